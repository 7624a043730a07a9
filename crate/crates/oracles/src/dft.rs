//! Straightforward BDF2 convolution-quadrature bookkeeping: frequency list
//! and the radius-scaled discrete Fourier transform pair, written out as
//! plain sums.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `s_l = delta(lambda exp(-2 pi i l / L)) / dt`, `delta(z) = 3/2 - 2 z + z^2 / 2`.
pub fn bdf2_frequencies(len: usize, dt: f64, lambda: f64) -> Vec<Complex64> {
    (0..len)
        .map(|l| {
            let z = Complex64::from_polar(lambda, -2.0 * PI * l as f64 / len as f64);
            (1.5 - 2.0 * z + 0.5 * z * z) / dt
        })
        .collect()
}

/// `lambda` such that `lambda^(2 L) = tol`.
pub fn radius(len: usize, tol: f64) -> f64 {
    tol.powf(1.0 / (2.0 * len as f64))
}

fn twiddles(len: usize, sign: f64) -> Vec<Complex64> {
    (0..len)
        .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / len as f64))
        .collect()
}

/// `G_l = sum_n lambda^n g_n exp(-2 pi i l n / L)`.
pub fn forward(g: &[Complex64], lambda: f64) -> Vec<Complex64> {
    let len = g.len();
    let tw = twiddles(len, -1.0);
    let scaled: Vec<Complex64> = g
        .iter()
        .enumerate()
        .map(|(n, v)| v * lambda.powi(n as i32))
        .collect();
    (0..len)
        .map(|l| {
            scaled
                .iter()
                .enumerate()
                .map(|(n, v)| v * tw[(l * n) % len])
                .sum()
        })
        .collect()
}

/// Inverse of [`forward`].
pub fn inverse(big: &[Complex64], lambda: f64) -> Vec<Complex64> {
    let len = big.len();
    let tw = twiddles(len, 1.0);
    (0..len)
        .map(|n| {
            let v: Complex64 = big
                .iter()
                .enumerate()
                .map(|(l, b)| b * tw[(l * n) % len])
                .sum();
            v / (len as f64 * lambda.powi(n as i32))
        })
        .collect()
}

/// Applies the transfer function `f` by convolution quadrature to samples
/// `g_0..g_N` on the grid `t_n = n dt`.
pub fn convolve(f: impl Fn(Complex64) -> Complex64, g: &[f64], dt: f64, tol: f64) -> Vec<f64> {
    let len = g.len();
    let lambda = radius(len, tol);
    let gc: Vec<Complex64> = g.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let big = forward(&gc, lambda);
    let s = bdf2_frequencies(len, dt, lambda);
    let prod: Vec<Complex64> = big.iter().zip(&s).map(|(b, &sl)| f(sl) * b).collect();
    inverse(&prod, lambda).into_iter().map(|z| z.re).collect()
}
