//! Time-domain solve: transform the data, solve every stored frequency,
//! transform back and post-process.

use super::discretization::Discretization;
use super::frequency::{FrequencyAssembler, FrequencyData, FrequencySolution};
use crate::bem::eval_potentials;
use crate::cq::CqScheme;
use crate::incident::{boundary_data, Grounding, IncidentWave};
use crate::meshio::{BoundaryCurve, Point};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

type C = Complex64;

/// Raster of points for field snapshots.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

impl Raster {
    pub fn points(&self) -> Vec<Point> {
        let coord = |r: [f64; 2], n: usize, i: usize| {
            if n <= 1 {
                0.5 * (r[0] + r[1])
            } else {
                r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.push([coord(self.x_range, self.nx, i), coord(self.y_range, self.ny, j)]);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotSpec {
    pub times: Vec<f64>,
    pub raster: Raster,
}

/// A complete simulation setup.
pub struct Scenario {
    pub disc: Discretization,
    pub scheme: CqScheme,
    pub incident: IncidentWave,
    /// Potential prescribed on the Dirichlet part of the boundary.
    pub grounding: Grounding,
    /// Spatial weight of the grounding per Dirichlet dof, in the order of
    /// `dirichlet_dofs()`; `None` means uniform. A uniform potential on all
    /// of the boundary is a gauge shift and excites nothing.
    pub grounding_profile: Option<Vec<f64>>,
    /// Spatially uniform charge flux on the Neumann part.
    pub neumann_flux: Grounding,
    pub receivers: Vec<Point>,
    pub snapshots: Option<SnapshotSpec>,
    /// Flips the sign of both incident traces.
    pub flip_incident_sign: bool,
}

/// Field values on a raster at one time; `None` where a quantity is not
/// defined (acoustic values inside the solid, displacement outside, points
/// on the boundary).
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub time: f64,
    pub points: Vec<Point>,
    pub acoustic: Vec<Option<f64>>,
    pub elastic: Vec<Option<f64>>,
}

/// Histories are time-major: `u[n][dof]`.
#[derive(Clone, Debug)]
pub struct SimulationResult {
    pub times: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub psi: Vec<Vec<f64>>,
    pub lambda: Vec<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
    pub receivers: Vec<Point>,
    /// Scattered field `S lambda - D phi` at the receivers.
    pub scattered: Vec<Vec<f64>>,
    /// Incident plus scattered field at the receivers.
    pub total: Vec<Vec<f64>>,
    pub snapshots: Vec<Snapshot>,
}

/// Per-frequency outputs kept for the inverse transform.
struct FrequencyOutput {
    solution: FrequencySolution,
    receivers: Vec<C>,
    raster: Vec<C>,
}

/// Which raster points lie in the fluid, solid, or on the boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Region {
    Fluid,
    Solid,
    Boundary,
}

const CAUSALITY_TOL: f64 = 1e-12;

impl Scenario {
    fn time_data(&self) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
        let times = self.scheme.times();
        let sign = if self.flip_incident_sign { -1.0 } else { 1.0 };
        let kappa0 = self.disc.material.kappa0;
        let mut beta0 = Vec::with_capacity(times.len());
        let mut beta1 = Vec::with_capacity(times.len());
        for &t in &times {
            let (mut b0, mut b1) = boundary_data(&self.incident, &self.disc.nodes, kappa0, t);
            if sign < 0.0 {
                b0.iter_mut().chain(b1.iter_mut()).for_each(|v| *v = -*v);
            }
            beta0.push(b0);
            beta1.push(b1);
        }
        let mu: Vec<f64> = times.iter().map(|&t| self.grounding.value(t)).collect();
        let eta: Vec<f64> = times.iter().map(|&t| self.neumann_flux.value(t)).collect();
        check_causal("incident trace", beta0.iter().flatten().copied(), &beta0[0])?;
        check_causal("incident flux", beta1.iter().flatten().copied(), &beta1[0])?;
        check_causal("grounding potential", mu.iter().copied(), &mu[..1])?;
        check_causal("Neumann flux", eta.iter().copied(), &eta[..1])?;
        Ok((beta0, beta1, mu, eta))
    }

    fn classify(&self, points: &[Point]) -> Vec<Region> {
        let tol = 1e-10 * self.disc.curve.perimeter().max(1.0);
        points
            .iter()
            .map(|&p| {
                if self.disc.curve.distance(p) <= tol {
                    Region::Boundary
                } else if inside_curve(&self.disc.curve, p) {
                    Region::Solid
                } else {
                    Region::Fluid
                }
            })
            .collect()
    }

    fn check(&self) -> Result<()> {
        let regions = self.classify(&self.receivers);
        for (i, r) in regions.iter().enumerate() {
            if *r != Region::Fluid {
                return Err(Error::InvalidArgument(format!(
                    "receiver {i} at ({}, {}) is not in the fluid",
                    self.receivers[i][0], self.receivers[i][1]
                )));
            }
        }
        if self.disc.is_acoustic_only() && (!self.grounding.is_zero() || !self.neumann_flux.is_zero()) {
            return Err(Error::InvalidArgument("acoustic-only mode takes no electric data".into()));
        }
        if let (Some(w), Some(solid)) = (&self.grounding_profile, &self.disc.solid) {
            if w.len() != solid.spaces.dirichlet_dofs().len() {
                return Err(Error::Dimension("grounding profile does not match the Dirichlet dofs".into()));
            }
        }
        Ok(())
    }

    /// Weight of the grounding at the `k`-th Dirichlet dof.
    fn grounding_weight(&self, k: usize) -> f64 {
        self.grounding_profile.as_ref().map_or(1.0, |w| w[k])
    }
}

fn check_causal(what: &str, all: impl Iterator<Item = f64>, first: &[f64]) -> Result<()> {
    let peak = all.fold(0.0f64, |m, v| m.max(v.abs()));
    let start = first.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if start > CAUSALITY_TOL * peak.max(f64::MIN_POSITIVE) && start > 0.0 {
        return Err(Error::NonCausal(format!(
            "{what} is {start:e} at t = 0 (peak {peak:e}); data must vanish at t <= 0"
        )));
    }
    Ok(())
}

/// Winding-number test against the oriented boundary loops (outer loops
/// counter-clockwise, holes clockwise).
pub fn inside_curve(curve: &BoundaryCurve, p: Point) -> bool {
    let mut winding = 0i32;
    for panel in &curve.panels {
        let (a, b) = (panel.start, panel.end);
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
        if a[1] <= p[1] {
            if b[1] > p[1] && cross > 0.0 {
                winding += 1;
            }
        } else if b[1] <= p[1] && cross < 0.0 {
            winding -= 1;
        }
    }
    winding != 0
}

/// Solves the scenario over all CQ steps.
pub fn solve_scenario(scenario: &Scenario) -> Result<SimulationResult> {
    scenario.check()?;
    let disc = &scenario.disc;
    let scheme = &scenario.scheme;
    let (beta0_t, beta1_t, mu_t, eta_t) = scenario.time_data()?;
    let beta0 = scheme.forward_many(&beta0_t)?;
    let beta1 = scheme.forward_many(&beta1_t)?;
    let mu = scheme.forward(&mu_t)?;
    let eta = scheme.forward(&eta_t)?;
    let (n_dir, n_neu) = match &disc.solid {
        Some(solid) => (solid.spaces.dirichlet_dofs().len(), solid.neumann.nodes.len()),
        None => (0, 0),
    };

    let raster_points = scenario.snapshots.as_ref().map(|s| s.raster.points()).unwrap_or_default();
    let regions = scenario.classify(&raster_points);
    let fluid_points: Vec<Point> = raster_points
        .iter()
        .zip(&regions)
        .filter(|(_, r)| **r == Region::Fluid)
        .map(|(p, _)| *p)
        .collect();
    let fluid_points = if scenario.snapshots.as_ref().is_some_and(|s| !s.times.is_empty()) {
        fluid_points
    } else {
        Vec::new()
    };

    let assembler = FrequencyAssembler::new(disc)?;
    let freqs = scheme.stored_frequencies();
    let c = disc.sound_speed();
    let outputs: Vec<FrequencyOutput> = freqs
        .par_iter()
        .enumerate()
        .map(|(l, &s)| {
            let breakdown = |e: Error| Error::SolverBreakdown {
                index: l,
                msg: e.to_string(),
            };
            let data = FrequencyData {
                beta0: beta0.values[l].clone(),
                beta1: beta1.values[l].clone(),
                eta: vec![eta.values[l]; n_neu],
                mu: (0..n_dir).map(|k| mu.values[l] * scenario.grounding_weight(k)).collect(),
            };
            let system = assembler.system(s).map_err(breakdown)?;
            let solution = system.solve(&data).map_err(breakdown)?;
            let receivers = eval_potentials(
                &disc.curve,
                &disc.bspaces,
                s / c,
                &solution.lambda,
                &solution.phi,
                &scenario.receivers,
            )?;
            let raster = if fluid_points.is_empty() {
                Vec::new()
            } else {
                eval_potentials(&disc.curve, &disc.bspaces, s / c, &solution.lambda, &solution.phi, &fluid_points)?
            };
            Ok(FrequencyOutput {
                solution,
                receivers,
                raster,
            })
        })
        .collect::<Result<_>>()?;

    let back = |pick: &dyn Fn(&FrequencyOutput) -> Vec<C>| -> Result<Vec<Vec<f64>>> {
        let spec = scheme.spectrum_from(outputs.iter().map(pick).collect())?;
        scheme.inverse_many(&spec)
    };
    let u = back(&|o| o.solution.u.clone())?;
    let mut psi = back(&|o| o.solution.psi.clone())?;
    let lambda = back(&|o| o.solution.lambda.clone())?;
    let phi = back(&|o| o.solution.phi.clone())?;
    let scattered = back(&|o| o.receivers.clone())?;
    let raster_hist = back(&|o| o.raster.clone())?;

    let times = scheme.times();
    // the Dirichlet values are data: use them exactly rather than their
    // transformed round trip
    if let Some(solid) = &disc.solid {
        for (n, row) in psi.iter_mut().enumerate() {
            for (k, &d) in solid.spaces.dirichlet_dofs().iter().enumerate() {
                row[d] = mu_t[n] * scenario.grounding_weight(k);
            }
        }
    }
    let total: Vec<Vec<f64>> = times
        .iter()
        .zip(&scattered)
        .map(|(&t, row)| {
            row.iter()
                .zip(&scenario.receivers)
                .map(|(v, &x)| v + scenario.incident.value(t, x))
                .collect()
        })
        .collect();

    let mut snapshots = Vec::new();
    if let Some(spec) = &scenario.snapshots {
        for &ts in &spec.times {
            let n = ((ts / scheme.dt()).round().max(0.0) as usize).min(scheme.nsteps());
            let t = times[n];
            let mut acoustic = Vec::with_capacity(raster_points.len());
            let mut elastic = Vec::with_capacity(raster_points.len());
            let mut k = 0;
            for (p, r) in raster_points.iter().zip(&regions) {
                match r {
                    Region::Fluid => {
                        acoustic.push(Some(raster_hist[n][k] + scenario.incident.value(t, *p)));
                        elastic.push(None);
                        k += 1;
                    }
                    Region::Solid => {
                        acoustic.push(None);
                        elastic.push(disc.solid.as_ref().and_then(|solid| {
                            let nn = solid.spaces.num_scalar();
                            let ux = solid.spaces.evaluate(&u[n][..nn], *p)?;
                            let uy = solid.spaces.evaluate(&u[n][nn..], *p)?;
                            Some(ux.hypot(uy))
                        }));
                    }
                    Region::Boundary => {
                        acoustic.push(None);
                        elastic.push(None);
                    }
                }
            }
            snapshots.push(Snapshot {
                time: t,
                points: raster_points.clone(),
                acoustic,
                elastic,
            });
        }
    }

    Ok(SimulationResult {
        times,
        u,
        psi,
        lambda,
        phi,
        receivers: scenario.receivers.clone(),
        scattered,
        total,
        snapshots,
    })
}
