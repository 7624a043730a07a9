//! Scenario configuration files and their translation into solver inputs.

use crate::builtins::builtin_geometry;
use crate::error::CliError;
use piezo_core::coupler::{inside_curve, Discretization, Raster, Scenario, SnapshotSpec};
use piezo_core::cq::{CqScheme, DEFAULT_TOL};
use piezo_core::incident::{Grounding, IncidentWave, Profile};
use piezo_core::material::{Coefficient, PiezoMaterial};
use piezo_core::meshio::{load_mesh, BoundaryLabel, TriMesh};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub mesh: MeshConfig,
    #[serde(default)]
    pub material: MaterialConfig,
    #[serde(default)]
    pub discretization: DiscretizationConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub incident: IncidentConfig,
    /// Potential on the Dirichlet part of the boundary.
    #[serde(default)]
    pub grounding: SignalConfig,
    /// Charge flux on the Neumann part of the boundary.
    #[serde(default)]
    pub neumann_flux: SignalConfig,
    #[serde(default)]
    pub receivers: ReceiverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceConfig>,
}

fn default_name() -> String {
    "scenario".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    /// One of the builtin geometries; exclusive with `file`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    /// Gmsh ASCII mesh; exclusive with `builtin`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    /// Expression in `x, y`; panels whose midpoint gives a positive value are
    /// relabelled Neumann, all others Dirichlet. Absent keeps the labels of
    /// the mesh (builtins are all Dirichlet).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neumann_where: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    /// Upper triangle of the Voigt stiffness, row by row.
    pub c: [f64; 6],
    /// Piezoelectric tensor in Voigt form, row-major 2x3.
    pub e: [f64; 6],
    /// Dielectric tensor as `(k11, k22, k12)`.
    pub kappa: [f64; 3],
    pub rho: String,
    pub omega: String,
    pub kappa0: f64,
    pub kappa1: f64,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        MaterialConfig {
            c: [2.118, 0.6, 0.0, 2.118, 0.0, 0.9],
            e: [1.0, 5.0, 5.0, 5.0, 1.0, 5.0],
            kappa: [4.0, 4.0, 1.0],
            rho: "1".into(),
            omega: "0".into(),
            kappa0: 1.0,
            kappa1: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationConfig {
    pub fem_order: usize,
    /// Order of the continuous boundary space; the discontinuous one is one
    /// lower.
    pub bem_order: usize,
    /// Freeze the solid and treat it as a rigid scatterer.
    #[serde(default)]
    pub acoustic_only: bool,
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        DiscretizationConfig {
            fem_order: 2,
            bem_order: 2,
            acoustic_only: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub nsteps: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IncidentKind {
    None,
    Pulse,
    CausalSine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidentConfig {
    pub kind: IncidentKind,
    #[serde(default = "default_direction")]
    pub direction: [f64; 2],
    /// Reference point of the plane wave. Absent places it so that the wave
    /// front touches the solid at time `lead`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<[f64; 2]>,
    #[serde(default = "default_lead")]
    pub lead: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Support length of the pulse.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    /// Reverse the sign of both incident traces.
    #[serde(default)]
    pub flip_sign: bool,
}

fn default_direction() -> [f64; 2] {
    [1.0, 0.0]
}

fn default_lead() -> f64 {
    0.05
}

impl Default for IncidentConfig {
    fn default() -> Self {
        IncidentConfig {
            kind: IncidentKind::None,
            direction: default_direction(),
            origin: None,
            lead: default_lead(),
            amplitude: None,
            omega: None,
            window: None,
            flip_sign: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    Zero,
    Step,
    Oscillating,
}

/// `amplitude H(t)` or `amplitude H(t) sin(omega t)` with the smoothed step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub kind: SignalKind,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default)]
    pub omega: f64,
    /// Spatial weight in `x`, `y`, `r`, evaluated at the boundary nodes.
    /// Grounding only; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
}

impl Default for SignalConfig {
    fn default() -> Self {
        SignalConfig {
            kind: SignalKind::Zero,
            amplitude: 0.0,
            omega: 0.0,
            profile: None,
        }
    }
}

impl SignalConfig {
    pub fn to_grounding(&self) -> Grounding {
        match self.kind {
            SignalKind::Zero => Grounding::Zero,
            SignalKind::Step => Grounding::Step {
                amplitude: self.amplitude,
            },
            SignalKind::Oscillating => Grounding::Oscillating {
                amplitude: self.amplitude,
                omega: self.omega,
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverConfig {
    pub points: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RasterConfig {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raster: Option<RasterConfig>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("output"),
            snapshot_times: Vec::new(),
            raster: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderKind {
    /// Halve the time step at fixed space discretization.
    Time,
    /// Double the mesh resolution at fixed time step.
    Space,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub ladder: LadderKind,
    pub levels: usize,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        // mesh files are relative to the config file
        if let (Some(file), Some(dir)) = (&cfg.mesh.file, path.parent()) {
            if file.is_relative() {
                cfg.mesh.file = Some(dir.join(file));
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Schema checks that need no geometry.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.time.dt > 0.0) || !self.time.dt.is_finite() {
            return bad(format!("time.dt must be positive, got {}", self.time.dt));
        }
        if self.time.nsteps < 1 {
            return bad("time.nsteps must be at least 1".into());
        }
        if !(self.time.tol > 0.0 && self.time.tol < 1.0) {
            return bad(format!("time.tol must lie in (0, 1), got {}", self.time.tol));
        }
        match (&self.mesh.builtin, &self.mesh.file) {
            (Some(_), Some(_)) => return bad("mesh.builtin and mesh.file are exclusive".into()),
            (None, None) => return bad("mesh needs either builtin or file".into()),
            _ => {}
        }
        let d = &self.discretization;
        if !(1..=4).contains(&d.fem_order) {
            return bad(format!("discretization.fem_order must be 1..=4, got {}", d.fem_order));
        }
        if !(1..=4).contains(&d.bem_order) {
            return bad(format!("discretization.bem_order must be 1..=4, got {}", d.bem_order));
        }
        if !(self.material.kappa0 > 0.0 && self.material.kappa1 > 0.0) {
            return bad("material.kappa0 and material.kappa1 must be positive".into());
        }
        let inc = &self.incident;
        if inc.kind != IncidentKind::None {
            if inc.direction[0].hypot(inc.direction[1]) == 0.0 {
                return bad("incident.direction must be nonzero".into());
            }
            if !(inc.lead > 0.0) && inc.origin.is_none() {
                return bad("incident.lead must be positive".into());
            }
        }
        if let Some(c) = &self.convergence {
            if c.levels < 3 {
                return bad(format!("convergence.levels must be at least 3, got {}", c.levels));
            }
        }
        if self.neumann_flux.profile.is_some() {
            return bad("neumann_flux takes no profile".into());
        }
        if let Some(p) = &self.grounding.profile {
            Coefficient::parse(p).map_err(|e| CliError::Config(format!("grounding.profile: {e}")))?;
        }
        if !self.output.snapshot_times.is_empty() && self.output.raster.is_none() {
            return bad("output.snapshot_times needs output.raster".into());
        }
        if let Some(r) = &self.output.raster {
            if r.nx == 0 || r.ny == 0 {
                return bad("output.raster needs nx, ny >= 1".into());
            }
        }
        Ok(())
    }

    pub fn material(&self) -> Result<PiezoMaterial, CliError> {
        let m = &self.material;
        let parse = |s: &str| Coefficient::parse(s).map_err(|e| CliError::Config(format!("material: {e}")));
        Ok(PiezoMaterial::from_voigt_lists(
            m.c,
            m.e,
            m.kappa,
            parse(&m.rho)?,
            parse(&m.omega)?,
            m.kappa0,
            m.kappa1,
        ))
    }

    pub fn mesh(&self) -> Result<TriMesh, CliError> {
        let mesh = match (&self.mesh.builtin, &self.mesh.file) {
            (Some(name), None) => builtin_geometry(name, self.mesh.resolution)?,
            (None, Some(file)) => load_mesh(file).map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?,
            _ => return Err(CliError::Config("mesh needs exactly one of builtin or file".into())),
        };
        match &self.mesh.neumann_where {
            None => Ok(mesh),
            Some(expr) => {
                let c = Coefficient::parse(expr).map_err(|e| CliError::Config(format!("mesh.neumann_where: {e}")))?;
                // surface evaluation errors before relabelling
                for p in mesh.panels() {
                    let v = mesh.vertices();
                    let (a, b) = (v[p.vertices[0]], v[p.vertices[1]]);
                    c.eval([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])])
                        .map_err(|e| CliError::Config(format!("mesh.neumann_where: {e}")))?;
                }
                Ok(mesh.relabeled(|mid| match c.eval(mid) {
                    Ok(v) if v > 0.0 => BoundaryLabel::Neumann,
                    _ => BoundaryLabel::Dirichlet,
                }))
            }
        }
    }

    /// The incident wave with its reference point resolved against the mesh.
    pub fn incident(&self, mesh: &TriMesh, speed: f64) -> Result<IncidentWave, CliError> {
        let inc = &self.incident;
        let profile = match inc.kind {
            IncidentKind::None => return Ok(IncidentWave::None),
            IncidentKind::Pulse => Profile::Pulse {
                amplitude: inc.amplitude.unwrap_or(3.0),
                window: inc.window.unwrap_or(0.3),
                omega: inc.omega.unwrap_or(88.0),
            },
            IncidentKind::CausalSine => Profile::CausalSine {
                amplitude: inc.amplitude.unwrap_or(3.0),
                omega: inc.omega.unwrap_or(6.0 * PI),
            },
        };
        let origin = inc.origin.unwrap_or_else(|| front_origin(mesh, inc.direction, inc.lead, speed));
        IncidentWave::plane(profile, inc.direction, origin, speed).map_err(|e| CliError::Config(format!("incident: {e}")))
    }

    /// Resolves the reference point so it can be echoed into a manifest.
    pub fn resolved(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = self.clone();
        if cfg.incident.kind != IncidentKind::None && cfg.incident.origin.is_none() {
            let mesh = self.mesh()?;
            let speed = (cfg.material.kappa0 / cfg.material.kappa1).sqrt();
            cfg.incident.origin = Some(front_origin(&mesh, cfg.incident.direction, cfg.incident.lead, speed));
        }
        Ok(cfg)
    }

    /// Builds the solver input. Receivers must lie strictly outside the solid.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let mesh = self.mesh()?;
        let material = self.material()?;
        material
            .validate(mesh.vertices())
            .map_err(|e| CliError::Config(format!("material: {e}")))?;
        let d = &self.discretization;
        let disc = if d.acoustic_only {
            Discretization::acoustic_only(mesh.boundary(), material, d.bem_order)
        } else {
            Discretization::coupled(&mesh, material, d.fem_order, d.bem_order)
        }
        .map_err(CliError::from)?;
        let curve = &disc.curve;
        for (i, p) in self.receivers.points.iter().enumerate() {
            if inside_curve(curve, *p) || curve.distance(*p) <= 1e-10 {
                return Err(CliError::Config(format!(
                    "receiver {i} at ({}, {}) is not strictly outside the solid",
                    p[0], p[1]
                )));
            }
        }
        let speed = disc.sound_speed();
        let incident = self.incident(&mesh, speed)?;
        let scheme =
            CqScheme::new(self.time.dt, self.time.nsteps, self.time.tol).map_err(|e| CliError::Config(format!("time: {e}")))?;
        let snapshots = self.output.raster.as_ref().map(|r| SnapshotSpec {
            times: self.output.snapshot_times.clone(),
            raster: Raster {
                x_range: r.x,
                y_range: r.y,
                nx: r.nx,
                ny: r.ny,
            },
        });
        let grounding_profile = match (&self.grounding.profile, &disc.solid) {
            (Some(expr), Some(solid)) => {
                let c = Coefficient::parse(expr).map_err(|e| CliError::Config(format!("grounding.profile: {e}")))?;
                let coords = solid.spaces.node_coords();
                let pts: Vec<[f64; 2]> = solid.spaces.dirichlet_dofs().iter().map(|&d| coords[d]).collect();
                Some(
                    c.eval_many(&pts)
                        .map_err(|e| CliError::Config(format!("grounding.profile: {e}")))?,
                )
            }
            _ => None,
        };
        Ok(Scenario {
            disc,
            scheme,
            incident,
            grounding: self.grounding.to_grounding(),
            grounding_profile,
            neumann_flux: self.neumann_flux.to_grounding(),
            receivers: self.receivers.points.clone(),
            snapshots,
            flip_incident_sign: self.incident.flip_sign,
        })
    }
}

/// Reference point on the line through the origin along `d` such that the
/// front `(x - origin) . d = c t` reaches the first mesh vertex at `t = lead`.
pub fn front_origin(mesh: &TriMesh, direction: [f64; 2], lead: f64, speed: f64) -> [f64; 2] {
    let n = direction[0].hypot(direction[1]);
    let d = [direction[0] / n, direction[1] / n];
    let first = mesh
        .vertices()
        .iter()
        .map(|v| v[0] * d[0] + v[1] * d[1])
        .fold(f64::INFINITY, f64::min);
    let k = first - lead * speed;
    [k * d[0], k * d[1]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> String {
        r#"
[mesh]
builtin = "square"
resolution = 2

[time]
dt = 0.1
nsteps = 10
"#
        .to_string()
    }

    #[test]
    fn minimal_config_has_defaults() {
        let cfg = ScenarioConfig::from_toml(&minimal()).unwrap();
        assert_eq!(cfg.discretization.fem_order, 2);
        assert_eq!(cfg.incident.kind, IncidentKind::None);
        assert_eq!(cfg.time.tol, DEFAULT_TOL);
        let again = ScenarioConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn zero_time_step_is_a_schema_error() {
        let text = minimal().replace("dt = 0.1", "dt = 0.0");
        assert!(matches!(ScenarioConfig::from_toml(&text), Err(CliError::Config(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = minimal() + "\n[output]\ndir = \"x\"\nbogus = 1\n";
        assert!(matches!(ScenarioConfig::from_toml(&text), Err(CliError::Config(_))));
    }

    #[test]
    fn receiver_inside_is_rejected() {
        let text = minimal() + "\n[receivers]\npoints = [[0.5, 0.5]]\n";
        let cfg = ScenarioConfig::from_toml(&text).unwrap();
        assert!(matches!(cfg.scenario(), Err(CliError::Config(_))));
    }

    #[test]
    fn neumann_expression_relabels_panels() {
        let text = minimal().replace("resolution = 2", "resolution = 2\nneumann_where = \"0.01 - y\"");
        let cfg = ScenarioConfig::from_toml(&text).unwrap();
        let mesh = cfg.mesh().unwrap();
        let neumann = mesh.panels().iter().filter(|p| p.label == BoundaryLabel::Neumann).count();
        assert_eq!(neumann, 2);
    }

    #[test]
    fn front_origin_places_first_contact_at_lead() {
        let mesh = builtin_geometry("square", Some(2)).unwrap();
        let o = front_origin(&mesh, [1.0, 1.0], 0.1, 2.0);
        let wave = IncidentWave::plane(
            Profile::CausalSine {
                amplitude: 1.0,
                omega: 1.0,
            },
            [1.0, 1.0],
            o,
            2.0,
        )
        .unwrap();
        assert!((wave.arrival_time([0.0, 0.0]) - 0.1).abs() < 1e-14);
    }
}
