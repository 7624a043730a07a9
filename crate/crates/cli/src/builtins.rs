//! Builtin geometries and the reduced-resolution experiment presets.

use crate::config::*;
use crate::error::CliError;
use piezo_core::cq::DEFAULT_TOL;
use piezo_core::meshio::{disk, regular_polygon, trapping, unit_square, TriMesh};
use std::f64::consts::PI;
use std::path::PathBuf;

pub const GEOMETRIES: [&str; 5] = ["pentagon", "trapping", "trapping_steep", "circle", "square"];
pub const SCENARIOS: [&str; 6] = ["pentagon", "trapping", "trapping_steep", "generation", "circle", "square"];

pub const PENTAGON_CIRCUMRADIUS: f64 = 0.55;

/// Builtin triangulations. The resolution counts panels per pentagon side,
/// grid cells per 0.1 for the trapping block, boundary panels of the circle
/// and cells per side of the unit square.
pub fn builtin_geometry(name: &str, resolution: Option<usize>) -> Result<TriMesh, CliError> {
    let res = |default: usize| resolution.unwrap_or(default).max(1);
    let mesh = match name {
        "pentagon" => regular_polygon(5, PENTAGON_CIRCUMRADIUS, res(12)),
        "trapping" | "trapping_steep" => trapping(0.1 / res(2) as f64),
        "circle" => disk(res(64).max(3), 1.0),
        "square" => unit_square(res(4)),
        other => {
            return Err(CliError::Config(format!(
                "unknown builtin geometry '{other}' (expected one of {})",
                GEOMETRIES.join(", ")
            )))
        }
    };
    mesh.map_err(CliError::from)
}

/// Five receivers on each of two rings around `centre`, the outer ring
/// rotated by half a step.
pub fn ring_receivers(centre: [f64; 2], inner: f64, outer: f64) -> Vec<[f64; 2]> {
    let mut pts = Vec::new();
    for (r, shift) in [(inner, 0.1), (outer, 0.3)] {
        for k in 0..5 {
            let th = 2.0 * PI * (k as f64 + shift) / 5.0;
            pts.push([centre[0] + r * th.cos(), centre[1] + r * th.sin()]);
        }
    }
    pts
}

fn reference_material(rho: &str) -> MaterialConfig {
    MaterialConfig {
        rho: rho.into(),
        ..MaterialConfig::default()
    }
}

fn output(name: &str, extent: f64, times: &[f64]) -> OutputConfig {
    OutputConfig {
        dir: PathBuf::from(format!("output/{name}")),
        snapshot_times: times.to_vec(),
        raster: Some(RasterConfig {
            x: [-extent, extent],
            y: [-extent, extent],
            nx: 41,
            ny: 41,
        }),
    }
}

fn step10() -> SignalConfig {
    SignalConfig {
        kind: SignalKind::Step,
        amplitude: 10.0,
        omega: 0.0,
        profile: None,
    }
}

/// Complete configuration of a builtin experiment.
pub fn builtin_scenario(name: &str) -> Result<ScenarioConfig, CliError> {
    let pentagon_mesh = MeshConfig {
        builtin: Some("pentagon".into()),
        resolution: Some(12),
        file: None,
        neumann_where: None,
    };
    let trapping_mesh = |n: &str| MeshConfig {
        builtin: Some(n.into()),
        resolution: Some(2),
        file: None,
        neumann_where: None,
    };
    let pulse = |d: [f64; 2]| IncidentConfig {
        kind: IncidentKind::Pulse,
        direction: d,
        ..IncidentConfig::default()
    };
    let cfg = match name {
        "pentagon" => ScenarioConfig {
            name: name.into(),
            mesh: pentagon_mesh,
            material: reference_material("5 + 25*exp(-100*r^2)"),
            discretization: DiscretizationConfig::default(),
            time: TimeConfig {
                dt: 0.012,
                nsteps: 500,
                tol: DEFAULT_TOL,
            },
            incident: pulse([1.0, 5.0]),
            grounding: step10(),
            neumann_flux: SignalConfig::default(),
            receivers: ReceiverConfig {
                points: ring_receivers([0.0, 0.0], 0.8, 1.4),
            },
            output: output(name, 1.5, &[0.25, 0.5, 1.0, 1.5, 3.0, 6.0]),
            convergence: None,
        },
        "trapping" => ScenarioConfig {
            name: name.into(),
            mesh: trapping_mesh("trapping"),
            material: reference_material("20 + abs(x) + 10*abs(y)"),
            discretization: DiscretizationConfig::default(),
            time: TimeConfig {
                dt: 0.012,
                nsteps: 500,
                tol: DEFAULT_TOL,
            },
            incident: pulse([-1.0, 1.0]),
            grounding: step10(),
            neumann_flux: SignalConfig::default(),
            receivers: ReceiverConfig {
                points: ring_receivers([0.0, 0.0], 0.85, 1.4),
            },
            output: output(name, 1.5, &[0.25, 0.5, 1.0, 1.5, 3.0, 6.0]),
            convergence: None,
        },
        "trapping_steep" => ScenarioConfig {
            name: name.into(),
            mesh: trapping_mesh("trapping_steep"),
            material: reference_material("20 + abs(x) + 50*abs(y)"),
            discretization: DiscretizationConfig::default(),
            time: TimeConfig {
                dt: 0.014,
                nsteps: 500,
                tol: DEFAULT_TOL,
            },
            incident: IncidentConfig {
                kind: IncidentKind::CausalSine,
                direction: [-1.0, 1.0],
                ..IncidentConfig::default()
            },
            grounding: step10(),
            neumann_flux: SignalConfig::default(),
            receivers: ReceiverConfig {
                points: ring_receivers([0.0, 0.0], 0.85, 1.4),
            },
            output: output(name, 1.5, &[0.75, 1.5, 2.25, 3.0, 3.75, 7.0]),
            convergence: None,
        },
        "generation" => ScenarioConfig {
            name: name.into(),
            mesh: pentagon_mesh,
            material: reference_material("5 + 25*exp(-100*r^2)"),
            discretization: DiscretizationConfig::default(),
            time: TimeConfig {
                dt: 0.01,
                nsteps: 600,
                tol: DEFAULT_TOL,
            },
            incident: IncidentConfig::default(),
            grounding: SignalConfig {
                kind: SignalKind::Oscillating,
                amplitude: 6.0,
                omega: 4.0 * PI,
                // a uniform potential on the whole boundary excites nothing,
                // so the electrodes carry opposite signs across x
                profile: Some(format!("x / {PENTAGON_CIRCUMRADIUS}")),
            },
            neumann_flux: SignalConfig::default(),
            receivers: ReceiverConfig {
                points: ring_receivers([0.0, 0.0], 0.8, 1.4),
            },
            output: output(name, 1.5, &[0.5, 1.0, 2.0, 4.0, 6.0]),
            convergence: None,
        },
        "circle" => ScenarioConfig {
            name: name.into(),
            mesh: MeshConfig {
                builtin: Some("circle".into()),
                resolution: Some(128),
                file: None,
                neumann_where: None,
            },
            material: reference_material("1"),
            discretization: DiscretizationConfig {
                fem_order: 1,
                bem_order: 2,
                acoustic_only: true,
            },
            time: TimeConfig {
                dt: 4.0 / 512.0,
                nsteps: 512,
                tol: DEFAULT_TOL,
            },
            incident: IncidentConfig {
                kind: IncidentKind::CausalSine,
                direction: [1.0, 0.0],
                origin: Some([-1.05, 0.0]),
                ..IncidentConfig::default()
            },
            grounding: SignalConfig::default(),
            neumann_flux: SignalConfig::default(),
            receivers: ReceiverConfig {
                points: vec![[-2.0, 0.0], [0.5, 1.6], [2.2, -0.3]],
            },
            output: OutputConfig {
                dir: PathBuf::from("output/circle"),
                ..OutputConfig::default()
            },
            convergence: Some(ConvergenceConfig {
                ladder: LadderKind::Space,
                levels: 3,
            }),
        },
        "square" => ScenarioConfig {
            name: name.into(),
            mesh: MeshConfig {
                builtin: Some("square".into()),
                resolution: Some(4),
                file: None,
                neumann_where: Some("0.01 - y".into()),
            },
            material: reference_material("5"),
            discretization: DiscretizationConfig {
                fem_order: 2,
                bem_order: 1,
                acoustic_only: false,
            },
            time: TimeConfig {
                dt: 0.0125,
                nsteps: 160,
                tol: DEFAULT_TOL,
            },
            incident: IncidentConfig {
                kind: IncidentKind::CausalSine,
                direction: [1.0, 1.0],
                omega: Some(2.0 * PI),
                ..IncidentConfig::default()
            },
            grounding: step10(),
            neumann_flux: SignalConfig::default(),
            receivers: ReceiverConfig {
                points: vec![[1.5, 0.5], [-0.5, 0.5]],
            },
            output: output(name, 1.0, &[1.0, 2.0]),
            convergence: Some(ConvergenceConfig {
                ladder: LadderKind::Time,
                levels: 3,
            }),
        },
        other => {
            return Err(CliError::Config(format!(
                "unknown builtin scenario '{other}' (expected one of {})",
                SCENARIOS.join(", ")
            )))
        }
    };
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagon_has_five_corners_and_one_loop() {
        let m = builtin_geometry("pentagon", Some(2)).unwrap();
        assert_eq!(m.loops().len(), 1);
        assert_eq!(m.panels().len(), 10);
        for k in 0..5 {
            let th = PI / 2.0 + 2.0 * PI * k as f64 / 5.0;
            let c = [PENTAGON_CIRCUMRADIUS * th.cos(), PENTAGON_CIRCUMRADIUS * th.sin()];
            assert!(m.vertices().iter().any(|v| (v[0] - c[0]).hypot(v[1] - c[1]) < 1e-14));
        }
    }

    #[test]
    fn circle_perimeter_is_inscribed_polygon() {
        for n in [16, 64, 256] {
            let m = builtin_geometry("circle", Some(n)).unwrap();
            let exact = 2.0 * n as f64 * (PI / n as f64).sin();
            assert!((m.perimeter() - exact).abs() < 1e-12);
            assert!((m.perimeter() - 2.0 * PI).abs() < 25.0 / (n * n) as f64);
        }
    }

    #[test]
    fn square_has_unit_area() {
        assert!((builtin_geometry("square", None).unwrap().area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_names_are_config_errors() {
        assert!(matches!(builtin_geometry("hexagon", None), Err(CliError::Config(_))));
        assert!(matches!(builtin_scenario("hexagon"), Err(CliError::Config(_))));
    }

    #[test]
    fn every_builtin_scenario_validates_and_round_trips() {
        for name in SCENARIOS {
            let cfg = builtin_scenario(name).unwrap();
            cfg.validate().unwrap();
            assert_eq!(ScenarioConfig::from_toml(&cfg.to_toml()).unwrap(), cfg, "{name}");
            let mesh = cfg.mesh().unwrap();
            for p in &cfg.receivers.points {
                assert!(!mesh.contains(*p) && mesh.distance_to_boundary(*p) > 0.05, "{name} receiver {p:?}");
            }
        }
    }
}
