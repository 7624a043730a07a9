//! Scattering of a Laplace-domain wave by a sound-hard circle, by
//! separation of variables.
//!
//! Outside the circle of radius `R` centred at the origin, `U` solves
//! `Delta U - (s/c)^2 U = 0` with `kappa0 dU/dr = -b(theta)` at `r = R`.
//! Writing `b = sum_n b_n e^{i n theta}` gives
//! `U(r, theta) = -sum_n b_n K_n(s r / c) / (kappa0 (s/c) K_n'(s R / c)) e^{i n theta}`.

use crate::bessel::k_scaled;
use crate::dft;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug)]
pub struct SoundHardCircle {
    pub radius: f64,
    pub c: f64,
    pub kappa0: f64,
}

impl SoundHardCircle {
    /// `U` at polar receiver `(r, theta)` for boundary data sampled at the
    /// `M` equispaced angles `2 pi m / M` (`M` even).
    pub fn scattered(&self, s: Complex64, data: &[Complex64], r: f64, theta: f64) -> Complex64 {
        let m = data.len();
        let sigma = s / self.c;
        let zr = sigma * r;
        let zb = sigma * self.radius;
        let (k0r, k1r) = (k_scaled(0, zr), k_scaled(1, zr));
        let (k0b, k1b) = (k_scaled(0, zb), k_scaled(1, zb));
        // K_n(zr) / K_n(zb) and K_n'(zb) / K_n(zb) via ratios rho_n = K_n / K_{n-1}
        let mut ratio_rb = (k0r / k0b) * (-(zr - zb)).exp();
        let mut rho_r = k1r / k0r;
        let mut rho_b = k1b / k0b;
        let half = m / 2;
        let mut total = Complex64::new(0.0, 0.0);
        for n in 0..=half {
            let nf = n as f64;
            if n >= 1 {
                if n >= 2 {
                    rho_r = 1.0 / rho_r + 2.0 * (nf - 1.0) / zr;
                    rho_b = 1.0 / rho_b + 2.0 * (nf - 1.0) / zb;
                }
                ratio_rb *= rho_r / rho_b;
            }
            let dlog = if n == 0 { -rho_b } else { -1.0 / rho_b - nf / zb };
            let q = ratio_rb / dlog;
            // Fourier coefficients b_n and b_{-n}
            let mut bp = Complex64::new(0.0, 0.0);
            let mut bm = Complex64::new(0.0, 0.0);
            for (j, v) in data.iter().enumerate() {
                let th = 2.0 * PI * j as f64 / m as f64;
                bp += v * Complex64::from_polar(1.0, -nf * th);
                bm += v * Complex64::from_polar(1.0, nf * th);
            }
            bp /= m as f64;
            bm /= m as f64;
            let term = if n == 0 {
                bp
            } else if n == half {
                // the Nyquist mode is shared by +n and -n
                bp * (nf * theta).cos()
            } else {
                bp * Complex64::from_polar(1.0, nf * theta) + bm * Complex64::from_polar(1.0, -nf * theta)
            };
            total += term * q;
            if ratio_rb.norm() < 1e-300 {
                break;
            }
        }
        -total / (self.kappa0 * sigma)
    }

    /// Time-domain scattered signal at a receiver by BDF2 convolution
    /// quadrature with every frequency solved by separation of variables.
    ///
    /// `beta1(t, theta)` is the boundary data, sampled at `angles` equispaced
    /// angles and at `t_n = n dt`, `n = 0..=nsteps`.
    pub fn cq_signal(
        &self,
        beta1: impl Fn(f64, f64) -> f64,
        angles: usize,
        dt: f64,
        nsteps: usize,
        tol: f64,
        receiver: [f64; 2],
    ) -> Vec<f64> {
        let len = nsteps + 1;
        let lambda = dft::radius(len, tol);
        let s = dft::bdf2_frequencies(len, dt, lambda);
        // transform each angular sample in time
        let mut by_angle = Vec::with_capacity(angles);
        for j in 0..angles {
            let th = 2.0 * PI * j as f64 / angles as f64;
            let g: Vec<Complex64> = (0..len)
                .map(|n| Complex64::new(beta1(n as f64 * dt, th), 0.0))
                .collect();
            by_angle.push(dft::forward(&g, lambda));
        }
        let r = receiver[0].hypot(receiver[1]);
        let theta = receiver[1].atan2(receiver[0]);
        let u_hat: Vec<Complex64> = (0..len)
            .map(|l| {
                let data: Vec<Complex64> = by_angle.iter().map(|v| v[l]).collect();
                self.scattered(s[l], &data, r, theta)
            })
            .collect();
        dft::inverse(&u_hat, lambda).into_iter().map(|z| z.re).collect()
    }
}
