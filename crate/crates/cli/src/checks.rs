//! The acceptance checks. Each returns a [`Check`] with the measured
//! quantity so that `validate` and the acceptance test print the same lines.

use crate::builtins::builtin_scenario;
use crate::config::{ScenarioConfig, SignalConfig, SignalKind};
use crate::error::CliError;
use crate::run::{simulate, RunOutput};
use num_complex::Complex64;
use piezo_core::bem::{assemble_operators, helmholtz_kernel, BoundarySpaces};
use piezo_core::coupler::{interior_conservation_run, random_smooth_state, EnergyHistory};
use piezo_core::cq::{CqScheme, DEFAULT_TOL};
use piezo_core::fem::{FemBlocks, FemSpaces};
use piezo_core::material::{Coefficient, PiezoMaterial};
use piezo_core::meshio::BoundaryCurve;
use piezo_oracles::circle::SoundHardCircle;
use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct Check {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub measured: String,
    pub seconds: f64,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {:<24} {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.seconds
        )
    }
}

/// Knobs for sensitivity experiments on the suite itself.
#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    /// Relative perturbation applied to the assembled single layer operator
    /// in the circle spectrum check.
    pub perturb_v: f64,
}

fn timed(
    id: usize,
    name: &'static str,
    f: impl FnOnce() -> Result<(bool, String), CliError>,
) -> Check {
    let start = Instant::now();
    let (passed, measured) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Check {
        id,
        name,
        passed,
        measured,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub const NAMES: [&str; 10] = [
    "kernel oracle",
    "circle spectrum",
    "cq order",
    "acoustic circle",
    "energy conservation",
    "damping",
    "degeneration",
    "causality",
    "qualitative norms",
    "linearity",
];

/// Runs the checks with the given ids (1 to 10) in order.
pub fn run_checks(ids: &[usize], opts: CheckOptions) -> Vec<Check> {
    // checks 8 and 9 share one pentagon run
    let pentagon: Option<Result<RunOutput, String>> = ids.iter().any(|i| *i == 8 || *i == 9).then(|| {
        builtin_scenario("pentagon")
            .and_then(|mut cfg| {
                cfg.output.raster = None;
                cfg.output.snapshot_times.clear();
                simulate(&cfg)
            })
            .map_err(|e| e.to_string())
    });
    let pentagon_run = || -> Result<&RunOutput, CliError> {
        match &pentagon {
            Some(Ok(out)) => Ok(out),
            Some(Err(e)) => Err(CliError::Numerical(e.clone())),
            None => Err(CliError::Config("pentagon run not prepared".into())),
        }
    };
    let mut out = Vec::new();
    for &id in ids {
        let name = NAMES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown");
        let check = match id {
            1 => timed(id, name, kernel_oracle),
            2 => timed(id, name, || circle_spectrum(opts.perturb_v)),
            3 => timed(id, name, cq_order),
            4 => timed(id, name, acoustic_circle),
            5 => timed(id, name, energy_conservation),
            6 => timed(id, name, damping),
            7 => timed(id, name, degeneration),
            8 => timed(id, name, || causality(pentagon_run()?)),
            9 => timed(id, name, || qualitative(pentagon_run()?)),
            10 => timed(id, name, linearity),
            _ => timed(id, name, || Err(CliError::Config(format!("no check with id {id}")))),
        };
        out.push(check);
    }
    out
}

/// 200 points with |s r| log-uniform in [1e-3, 100] and arg s in [-1.3, 1.3].
pub fn kernel_grid() -> Vec<(Complex64, f64)> {
    let mut out = Vec::new();
    for i in 0..20 {
        let modulus = 10f64.powf(-3.0 + 5.0 * i as f64 / 19.0);
        for j in 0..10 {
            let arg = -1.3 + 2.6 * j as f64 / 9.0;
            let r = [0.05, 0.3, 1.0, 2.5][(i + j) % 4];
            out.push((Complex64::from_polar(modulus / r, arg), r));
        }
    }
    out
}

pub fn kernel_oracle() -> Result<(bool, String), CliError> {
    let mut worst = 0.0f64;
    for (s, r) in kernel_grid() {
        let got = helmholtz_kernel(s, r)?;
        let want = piezo_oracles::bessel::k(0, s * r) / (2.0 * PI);
        worst = worst.max((got - want).norm() / want.norm());
    }
    Ok((worst <= 1e-12, format!("max rel err {worst:.2e} (tol 1e-12, 200 points)")))
}

/// Generalized eigenvalues of `V` against the Gram matrix of discontinuous
/// linears on a regular polygon, one 2x2 pencil per Fourier mode; the branch
/// nearest `guess` is returned.
fn v_eigenvalues(panels: usize, s: Complex64, guesses: &[Complex64], perturb: f64) -> Result<Vec<Complex64>, CliError> {
    let curve = BoundaryCurve::circle(panels, 1.0, [0.0, 0.0]);
    let spaces = BoundarySpaces::new(&curve, 2)?;
    let ops = assemble_operators(&curve, &spaces, s)?;
    let scale = 1.0 + perturb;
    let h = curve.panels[0].length;
    let mass = [h, h / 3.0];
    Ok(guesses
        .iter()
        .enumerate()
        .map(|(n, guess)| {
            let mut sym = [[Complex64::new(0.0, 0.0); 2]; 2];
            for k in 0..panels {
                let phase = Complex64::from_polar(1.0, 2.0 * PI * (n * k) as f64 / panels as f64);
                let off = spaces.x_panel_offset(k);
                for (a, row) in sym.iter_mut().enumerate() {
                    for (b, v) in row.iter_mut().enumerate() {
                        *v += ops.v[(a, off + b)] * phase * scale;
                    }
                }
            }
            let qa = Complex64::new(mass[0] * mass[1], 0.0);
            let qb = -(sym[0][0] * mass[1] + sym[1][1] * mass[0]);
            let qc = sym[0][0] * sym[1][1] - sym[0][1] * sym[1][0];
            let disc = (qb * qb - 4.0 * qa * qc).sqrt();
            let roots = [(-qb + disc) / (2.0 * qa), (-qb - disc) / (2.0 * qa)];
            if (roots[0] - guess).norm() < (roots[1] - guess).norm() {
                roots[0]
            } else {
                roots[1]
            }
        })
        .collect())
}

pub fn circle_spectrum(perturb: f64) -> Result<(bool, String), CliError> {
    let mut monotone = true;
    let mut worst_fine = 0.0f64;
    for s in [Complex64::new(1.0, 0.0), Complex64::new(2.0, 3.0)] {
        let exact: Vec<Complex64> = (0..6)
            .map(|n| piezo_oracles::bessel::i(n, s) * piezo_oracles::bessel::k(n, s))
            .collect();
        let mut previous = vec![f64::INFINITY; 6];
        for panels in [64, 128, 256] {
            let approx = v_eigenvalues(panels, s, &exact, perturb)?;
            for n in 0..6 {
                let err = (approx[n] - exact[n]).norm() / exact[n].norm();
                monotone &= err < previous[n];
                if panels == 256 {
                    worst_fine = worst_fine.max(err);
                }
                previous[n] = err;
            }
        }
    }
    Ok((
        monotone && worst_fine <= 1e-3,
        format!("max rel err at 256 panels {worst_fine:.2e} (tol 1e-3), monotone under doubling: {monotone}"),
    ))
}

// Smooth causal input t^4 e^{-6t}, quiet at the final time 2.
const CQ_DECAY: f64 = 6.0;

fn cq_input(t: f64) -> f64 {
    t.powi(4) * (-CQ_DECAY * t).exp()
}

fn cq_input_integral(t: f64) -> f64 {
    let a = CQ_DECAY;
    let x = a * t;
    let partial = 1.0 + x + x * x / 2.0 + x.powi(3) / 6.0 + x.powi(4) / 24.0;
    24.0 / a.powi(5) * (1.0 - (-x).exp() * partial)
}

fn cq_input_derivative(t: f64) -> f64 {
    (4.0 * t.powi(3) - CQ_DECAY * t.powi(4)) * (-CQ_DECAY * t).exp()
}

fn cq_orders(f: impl Fn(Complex64) -> Complex64 + Copy, exact: impl Fn(f64) -> f64) -> Result<Vec<f64>, CliError> {
    let mut errs = Vec::new();
    for dt in [0.02, 0.01, 0.005] {
        let n = (2.0 / dt as f64).round() as usize;
        let scheme = CqScheme::new(dt, n, DEFAULT_TOL)?;
        let times = scheme.times();
        let samples: Vec<f64> = times.iter().map(|&t| cq_input(t)).collect();
        let out = scheme.convolve_transfer(f, &samples)?;
        errs.push(
            times
                .iter()
                .zip(&out)
                .map(|(&t, v)| (v - exact(t)).abs())
                .fold(0.0, f64::max),
        );
    }
    Ok(errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

pub fn cq_order() -> Result<(bool, String), CliError> {
    let integ = cq_orders(|s| 1.0 / s, cq_input_integral)?;
    let diff = cq_orders(|s| s, cq_input_derivative)?;
    let ok = integ.iter().chain(&diff).all(|p| (p - 2.0).abs() <= 0.2);
    Ok((
        ok,
        format!("orders 1/s {:.3} {:.3}, s {:.3} {:.3} (want 2.0 +- 0.2)", integ[0], integ[1], diff[0], diff[1]),
    ))
}

fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// Relative discrete L2 errors of the circle receivers against the
/// separated-variables oracle, one per receiver.
pub fn circle_oracle_errors(cfg: &ScenarioConfig, out: &RunOutput, angles: usize) -> Vec<f64> {
    let material = &out.scenario.disc.material;
    let kappa0 = material.kappa0;
    let oracle = SoundHardCircle {
        radius: 1.0,
        c: (material.kappa0 / material.kappa1).sqrt(),
        kappa0,
    };
    let wave = &out.scenario.incident;
    let sign = if cfg.incident.flip_sign { -1.0 } else { 1.0 };
    let beta1 = |t: f64, th: f64| {
        let x = [th.cos(), th.sin()];
        let g = wave.gradient(t, x);
        sign * kappa0 * (g[0] * x[0] + g[1] * x[1])
    };
    let scheme = &out.scenario.scheme;
    out.result
        .receivers
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let want = oracle.cq_signal(beta1, angles, scheme.dt(), scheme.nsteps(), cfg.time.tol, r);
            let got: Vec<f64> = out.result.scattered.iter().map(|row| row[k]).collect();
            relative_l2(&got, &want)
        })
        .collect()
}

pub fn acoustic_circle() -> Result<(bool, String), CliError> {
    let cfg = builtin_scenario("circle")?;
    let out = simulate(&cfg)?;
    let errs = circle_oracle_errors(&cfg, &out, 256);
    let worst = errs.iter().copied().fold(0.0, f64::max);
    Ok((
        worst <= 1e-2,
        format!("max rel L2 err {worst:.2e} over {} receivers (tol 1e-2)", errs.len()),
    ))
}

const ENERGY_STEPS: usize = 1000;
const ENERGY_T: f64 = 2.0;

fn pentagon_blocks(material: &PiezoMaterial) -> Result<(FemSpaces, FemBlocks), CliError> {
    let mesh = builtin_scenario("pentagon")?.mesh()?;
    let spaces = FemSpaces::new(&mesh, 2)?;
    let blocks = FemBlocks::assemble(&spaces, material)?;
    Ok((spaces, blocks))
}

fn pentagon_material() -> Result<PiezoMaterial, CliError> {
    builtin_scenario("pentagon")?.material()
}

fn energy_history(material: &PiezoMaterial) -> Result<EnergyHistory, CliError> {
    let (spaces, blocks) = pentagon_blocks(material)?;
    let (u0, v0) = random_smooth_state(&spaces, 2024);
    Ok(interior_conservation_run(&spaces, &blocks, &u0, &v0, ENERGY_T, ENERGY_STEPS)?)
}

pub fn energy_conservation() -> Result<(bool, String), CliError> {
    let material = pentagon_material()?;
    if !material.has_coupling() {
        return Err(CliError::Config("pentagon material has no coupling".into()));
    }
    let coupled = energy_history(&material)?.max_relative_drift();
    let elastic = energy_history(&material.without_coupling())?.max_relative_drift();
    let worst = coupled.max(elastic);
    Ok((
        worst <= 1e-10,
        format!("max rel drift {coupled:.2e} coupled, {elastic:.2e} with e = 0 (tol 1e-10, {ENERGY_STEPS} steps)"),
    ))
}

pub fn damping() -> Result<(bool, String), CliError> {
    let material = pentagon_material()?;
    let undamped = energy_history(&material)?;
    let damped = energy_history(&material.with_damping(Coefficient::Constant(1.0)))?;
    let increase = damped.max_relative_increase();
    let ratio = damped.final_energy() / undamped.final_energy();
    Ok((
        increase <= 1e-12 && ratio < 1.0,
        format!("max rel step increase {increase:.2e} (slack 1e-12), E_damped(T)/E(T) = {ratio:.3}"),
    ))
}

fn peak(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// The pentagon scenario with the coupling tensor and every potential datum
/// switched off.
pub fn degeneration_config() -> Result<ScenarioConfig, CliError> {
    let mut cfg = builtin_scenario("pentagon")?;
    cfg.material.e = [0.0; 6];
    cfg.grounding = SignalConfig::default();
    cfg.neumann_flux = SignalConfig::default();
    cfg.mesh.neumann_where = None;
    cfg.output.raster = None;
    cfg.output.snapshot_times.clear();
    Ok(cfg)
}

pub fn degeneration() -> Result<(bool, String), CliError> {
    let out = simulate(&degeneration_config()?)?;
    let ratio = peak(&out.norms.psi_l2) / peak(&out.norms.u_l2);
    Ok((ratio <= 1e-10, format!("max psi L2 / peak u L2 = {ratio:.2e} (tol 1e-10)")))
}

/// Earliest time the scattered field can be nonzero at each receiver: the
/// first contact of the incident wave with the boundary (or `t = 0` when
/// electric data can excite the solid) plus the distance to the boundary
/// over the sound speed. The electric potential is quasi-static, so a
/// contact anywhere acts on the whole solid at once.
pub fn geometric_arrivals(out: &RunOutput) -> Vec<f64> {
    let disc = &out.scenario.disc;
    let c = disc.sound_speed();
    let mut first = f64::INFINITY;
    if !out.scenario.incident.is_none() {
        for p in &disc.curve.panels {
            for k in 0..=16 {
                let t = k as f64 / 16.0;
                let y = [p.start[0] + t * (p.end[0] - p.start[0]), p.start[1] + t * (p.end[1] - p.start[1])];
                first = first.min(out.scenario.incident.arrival_time(y));
            }
        }
    }
    // a uniform grounding is a gauge shift and radiates nothing
    let graded = out
        .scenario
        .grounding_profile
        .as_ref()
        .is_some_and(|w| w.iter().any(|v| *v != w[0]));
    if (graded && !out.scenario.grounding.is_zero()) || !out.scenario.neumann_flux.is_zero() {
        first = 0.0;
    }
    out.result
        .receivers
        .iter()
        .map(|&x| first.max(0.0) + disc.curve.distance(x) / c)
        .collect()
}

pub fn causality(out: &RunOutput) -> Result<(bool, String), CliError> {
    let arrivals = geometric_arrivals(out);
    let dt = out.scenario.scheme.dt();
    let mut worst = 0.0f64;
    for (k, &arrival) in arrivals.iter().enumerate() {
        let signal: Vec<f64> = out.result.scattered.iter().map(|row| row[k]).collect();
        let pk = peak(&signal);
        let early = out
            .result
            .times
            .iter()
            .zip(&signal)
            .filter(|(t, _)| **t < arrival - 5.0 * dt)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max);
        worst = worst.max(early / pk);
    }
    Ok((
        worst <= 1e-6,
        format!("max pre-arrival |u| / peak = {worst:.2e} over {} receivers (tol 1e-6)", arrivals.len()),
    ))
}

/// Interval in which the incident pulse interacts with the solid: from
/// first contact until the pulse has left the last boundary point plus one
/// crossing of the solid at the sound speed.
pub fn interaction_window(out: &RunOutput) -> [f64; 2] {
    let disc = &out.scenario.disc;
    let wave = &out.scenario.incident;
    let (mut first, mut last) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &disc.curve.panels {
        let t = wave.arrival_time(p.start);
        first = first.min(t);
        last = last.max(t);
        for i in 0..2 {
            lo[i] = lo[i].min(p.start[i]);
            hi[i] = hi[i].max(p.start[i]);
        }
    }
    let window = out.config.incident.window.unwrap_or(0.3);
    let diameter = (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
    [first, last + window + diameter / disc.sound_speed()]
}

/// Start values are compared with the aliasing floor of the transform,
/// about `sqrt(tol)` times the field left at the final time.
const START_TOL: f64 = 1e-5;
/// Plateaus count as peaking inside the window when the in-window maximum
/// is within this fraction of the overall one.
const PEAK_FRACTION: f64 = 0.95;

pub fn qualitative(out: &RunOutput) -> Result<(bool, String), CliError> {
    let norms = &out.norms;
    let [w0, w1] = interaction_window(out);
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, col) in piezo_core::coupler::NormHistory::COLUMNS[1..].iter().zip(norms.columns()) {
        let pk = peak(col);
        let in_window = norms
            .times
            .iter()
            .zip(col)
            .filter(|(t, _)| (w0..=w1).contains(*t))
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        let start = col[0].abs() / pk;
        let good = pk > 0.0 && start <= START_TOL && in_window >= PEAK_FRACTION * pk;
        ok &= good;
        if !good {
            notes.push(format!("{name}: start {start:.1e}, window peak / peak {:.3}", in_window / pk));
        }
    }
    let h1 = &norms.u_h1;
    let terminal = h1.last().copied().unwrap_or(0.0) / peak(h1);
    ok &= terminal < 0.5;
    let gen = generation_periodicity()?;
    ok &= gen <= 0.05;
    let mut measured = format!(
        "norms start at 0 and peak in [{w0:.2}, {w1:.2}]: {}, terminal/peak H1 {terminal:.3} (< 0.5), generation last-period mismatch {gen:.3} (<= 0.05)",
        notes.is_empty()
    );
    if !notes.is_empty() {
        measured.push_str("; ");
        measured.push_str(&notes.join("; "));
    }
    Ok((ok, measured))
}

/// Largest relative L2 mismatch between the last two periods of the
/// generation scenario's receiver signals.
pub fn generation_periodicity() -> Result<f64, CliError> {
    let mut cfg = builtin_scenario("generation")?;
    cfg.output.raster = None;
    cfg.output.snapshot_times.clear();
    let omega = cfg.grounding.omega;
    let out = simulate(&cfg)?;
    let dt = out.scenario.scheme.dt();
    let period = ((2.0 * PI / omega) / dt).round() as usize;
    let n = out.result.times.len();
    if 2 * period >= n {
        return Err(CliError::Config("generation run shorter than two periods".into()));
    }
    let mut worst = 0.0f64;
    for k in 0..out.result.receivers.len() {
        let signal: Vec<f64> = out.result.total.iter().map(|row| row[k]).collect();
        let last = &signal[n - period..];
        let before = &signal[n - 2 * period..n - period];
        worst = worst.max(relative_l2(before, last));
    }
    Ok(worst)
}

/// A small scenario exercising every datum: incident wave, grounding and
/// charge flux on a Neumann edge.
pub fn linearity_config(scale: f64) -> Result<ScenarioConfig, CliError> {
    let mut cfg = builtin_scenario("square")?;
    cfg.mesh.resolution = Some(3);
    cfg.time.nsteps = 40;
    cfg.output.raster = None;
    cfg.output.snapshot_times.clear();
    cfg.incident.amplitude = Some(3.0 * scale);
    cfg.grounding = SignalConfig {
        kind: SignalKind::Oscillating,
        amplitude: 2.0 * scale,
        omega: 3.0,
        profile: Some("1 + x".into()),
    };
    cfg.neumann_flux = SignalConfig {
        kind: SignalKind::Step,
        amplitude: 0.5 * scale,
        omega: 0.0,
        profile: None,
    };
    Ok(cfg)
}

/// Worst of `max |b - 2a| / max |2a|` over the histories of two results.
pub fn doubling_defect(a: &RunOutput, b: &RunOutput) -> f64 {
    let fields = |o: &RunOutput| {
        let r = &o.result;
        [r.u.clone(), r.psi.clone(), r.lambda.clone(), r.phi.clone(), r.scattered.clone(), r.total.clone()]
    };
    let (fa, fb) = (fields(a), fields(b));
    let mut worst = 0.0f64;
    for (ha, hb) in fa.iter().zip(&fb) {
        let scale = ha.iter().map(|row| 2.0 * peak(row)).fold(0.0, f64::max);
        let defect = ha
            .iter()
            .zip(hb)
            .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (y - 2.0 * x).abs()))
            .fold(0.0, f64::max);
        if scale > 0.0 {
            worst = worst.max(defect / scale);
        }
    }
    worst
}

pub fn linearity() -> Result<(bool, String), CliError> {
    let one = simulate(&linearity_config(1.0)?)?;
    let two = simulate(&linearity_config(2.0)?)?;
    let defect = doubling_defect(&one, &two);
    Ok((defect <= 1e-12, format!("max rel doubling defect {defect:.2e} (tol 1e-12)")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_two_hundred_points_in_range() {
        let g = kernel_grid();
        assert_eq!(g.len(), 200);
        assert!(g.iter().all(|(s, r)| s.re > 0.0 && (s * r).norm() <= 100.0 + 1e-9));
    }

    #[test]
    fn perturbed_single_layer_fails_spectrum_check() {
        assert!(circle_spectrum(0.0).unwrap().0);
        assert!(!circle_spectrum(1e-2).unwrap().0);
    }

    #[test]
    fn cq_inputs_are_consistent() {
        let h = 1e-5;
        for t in [0.3, 1.0, 1.7] {
            let fd = (cq_input_integral(t + h) - cq_input_integral(t - h)) / (2.0 * h);
            assert!((fd - cq_input(t)).abs() < 1e-9);
            let fd = (cq_input(t + h) - cq_input(t - h)) / (2.0 * h);
            assert!((fd - cq_input_derivative(t)).abs() < 1e-9);
        }
    }

    #[test]
    fn unknown_check_id_fails() {
        let r = run_checks(&[42], CheckOptions::default());
        assert!(!r[0].passed);
    }
}
