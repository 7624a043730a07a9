use num_complex::Complex64;
use piezo_core::cq::{CqScheme, DEFAULT_TOL};

const T: f64 = 2.0;

// Decay rate of the input. The input must be quiet at T: all-steps-at-once
// CQ wraps the truncation jump back with weight lambda^L.
const A: f64 = 6.0;

/// Smooth causal input `t^4 e^{-A t}`, its antiderivative from 0 and derivative.
fn g(t: f64) -> f64 {
    t.powi(4) * (-A * t).exp()
}

fn g_integral(t: f64) -> f64 {
    let x = A * t;
    let partial = 1.0 + x + x * x / 2.0 + x.powi(3) / 6.0 + x.powi(4) / 24.0;
    24.0 / A.powi(5) * (1.0 - (-x).exp() * partial)
}

fn g_derivative(t: f64) -> f64 {
    (4.0 * t.powi(3) - A * t.powi(4)) * (-A * t).exp()
}

fn max_error(dt: f64, f: impl Fn(Complex64) -> Complex64, exact: impl Fn(f64) -> f64) -> f64 {
    let n = (T / dt).round() as usize;
    let scheme = CqScheme::new(dt, n, DEFAULT_TOL).unwrap();
    let samples: Vec<f64> = scheme.times().iter().map(|&t| g(t)).collect();
    let out = scheme.convolve_transfer(f, &samples).unwrap();
    scheme
        .times()
        .iter()
        .zip(&out)
        .map(|(&t, v)| (v - exact(t)).abs())
        .fold(0.0, f64::max)
}

fn observed_orders(f: impl Fn(Complex64) -> Complex64 + Copy, exact: impl Fn(f64) -> f64 + Copy) -> Vec<f64> {
    let errs: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&dt| max_error(dt, f, exact)).collect();
    eprintln!("errors {errs:?}");
    errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn integration_is_second_order() {
    for p in observed_orders(|s| 1.0 / s, g_integral) {
        assert!((p - 2.0).abs() <= 0.2, "observed order {p}");
    }
}

#[test]
fn differentiation_is_second_order() {
    for p in observed_orders(|s| s, g_derivative) {
        assert!((p - 2.0).abs() <= 0.2, "observed order {p}");
    }
}

#[test]
fn matches_naive_oracle_transform() {
    let dt = 0.05;
    let scheme = CqScheme::new(dt, 40, DEFAULT_TOL).unwrap();
    let samples: Vec<f64> = scheme.times().iter().map(|&t| g(t)).collect();
    let f = |s: Complex64| (s * s + 1.0).sqrt() / (s + 2.0);
    let got = scheme.convolve_transfer(f, &samples).unwrap();
    let want = piezo_oracles::dft::convolve(f, &samples, dt, DEFAULT_TOL);
    let peak = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() <= 1e-9 * peak);
    }
}
