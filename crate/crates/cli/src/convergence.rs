//! Observed convergence orders from a refinement ladder.
//!
//! The configured run is the finest level. Coarser levels double the time
//! step (time ladder) or halve the mesh resolution (space ladder). Receiver
//! signals are compared on the coarsest time grid.

use crate::checks::circle_oracle_errors;
use crate::config::{LadderKind, ScenarioConfig};
use crate::error::CliError;
use crate::run::{simulate, RunOutput};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub dt: f64,
    pub nsteps: usize,
    pub resolution: Option<usize>,
    /// Relative L2 distance to the finest level; zero on the finest.
    pub error_vs_finest: f64,
    /// Relative L2 distance to the next finer level; NaN on the finest.
    pub successive: f64,
    /// Worst receiver error against the circle oracle, when it applies.
    pub oracle: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub ladder: LadderKind,
    pub levels: Vec<Level>,
}

impl ConvergenceTable {
    /// `log2` of successive difference ratios: `d_k / d_{k+1}`.
    pub fn successive_orders(&self) -> Vec<f64> {
        let d: Vec<f64> = self.levels.iter().map(|l| l.successive).filter(|v| v.is_finite()).collect();
        d.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
    }

    /// `log2` of ratios of errors against the finest level.
    pub fn reference_orders(&self) -> Vec<f64> {
        let n = self.levels.len();
        self.levels[..n.saturating_sub(1)]
            .windows(2)
            .map(|w| (w[0].error_vs_finest / w[1].error_vs_finest).log2())
            .collect()
    }

    pub fn oracle_orders(&self) -> Vec<f64> {
        let e: Vec<f64> = self.levels.iter().filter_map(|l| l.oracle).collect();
        e.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,dt,nsteps,resolution,error_vs_finest,successive_difference,oracle_error\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        for (k, l) in self.levels.iter().enumerate() {
            let succ = if l.successive.is_finite() { format!("{}", l.successive) } else { String::new() };
            let res = l.resolution.map(|r| r.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{k},{},{},{res},{},{succ},{}", l.dt, l.nsteps, l.error_vs_finest, opt(l.oracle));
        }
        s
    }
}

/// Config of every level, coarsest first.
pub fn ladder_configs(cfg: &ScenarioConfig) -> Result<(LadderKind, Vec<ScenarioConfig>), CliError> {
    let conv = cfg
        .convergence
        .as_ref()
        .ok_or_else(|| CliError::Config("config has no [convergence] section".into()))?;
    if conv.levels < 3 {
        return Err(CliError::Config(format!("ladder too short: {} levels, need at least 3", conv.levels)));
    }
    let factor = 1usize << (conv.levels - 1);
    let mut out = Vec::new();
    for k in (0..conv.levels).rev() {
        let m = 1usize << k;
        let mut level = cfg.clone();
        level.output.raster = None;
        level.output.snapshot_times.clear();
        match conv.ladder {
            LadderKind::Time => {
                if cfg.time.nsteps % factor != 0 {
                    return Err(CliError::Config(format!(
                        "nsteps {} is not divisible by {factor}",
                        cfg.time.nsteps
                    )));
                }
                level.time.dt = cfg.time.dt * m as f64;
                level.time.nsteps = cfg.time.nsteps / m;
            }
            LadderKind::Space => {
                let res = cfg
                    .mesh
                    .resolution
                    .ok_or_else(|| CliError::Config("space ladder needs mesh.resolution".into()))?;
                if res % factor != 0 {
                    return Err(CliError::Config(format!("resolution {res} is not divisible by {factor}")));
                }
                level.mesh.resolution = Some(res / m);
            }
        }
        out.push(level);
    }
    Ok((conv.ladder, out))
}

/// Receiver signals subsampled to the `stride`, one vector per receiver.
fn signals(out: &RunOutput, stride: usize) -> Vec<Vec<f64>> {
    (0..out.result.receivers.len())
        .map(|k| out.result.total.iter().step_by(stride).map(|row| row[k]).collect())
        .collect()
}

fn worst_relative(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let num: f64 = x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum();
            let den: f64 = y.iter().map(|q| q * q).sum();
            if den > 0.0 {
                (num / den).sqrt()
            } else {
                num.sqrt()
            }
        })
        .fold(0.0, f64::max)
}

fn is_circle_oracle_case(cfg: &ScenarioConfig) -> bool {
    cfg.discretization.acoustic_only && cfg.mesh.builtin.as_deref() == Some("circle")
}

pub fn convergence(cfg: &ScenarioConfig) -> Result<ConvergenceTable, CliError> {
    let (ladder, configs) = ladder_configs(cfg)?;
    let coarse_steps = configs[0].time.nsteps;
    let mut runs = Vec::new();
    let mut oracle = Vec::new();
    for c in &configs {
        let out = simulate(c)?;
        oracle.push(if is_circle_oracle_case(c) {
            Some(circle_oracle_errors(c, &out, 256).into_iter().fold(0.0, f64::max))
        } else {
            None
        });
        let stride = c.time.nsteps / coarse_steps;
        runs.push(signals(&out, stride));
    }
    let finest = runs.last().expect("at least three levels");
    let levels = configs
        .iter()
        .enumerate()
        .map(|(k, c)| Level {
            dt: c.time.dt,
            nsteps: c.time.nsteps,
            resolution: c.mesh.resolution,
            error_vs_finest: worst_relative(&runs[k], finest),
            successive: runs.get(k + 1).map_or(f64::NAN, |next| worst_relative(&runs[k], next)),
            oracle: oracle[k],
        })
        .collect();
    Ok(ConvergenceTable { ladder, levels })
}
