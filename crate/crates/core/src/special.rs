//! Modified Bessel functions of complex argument.
//!
//! `K_0` and `K_1` use the ascending series for `|z| <= 2` and the
//! Steed/Temme continued fraction (CF2) beyond, which is valid on the whole
//! right half-plane. Higher orders come from forward recurrence, which is
//! stable for `K_n`. `I_n` uses its ascending series.

use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_RADIUS: f64 = 2.0;
const MAX_ITER: usize = 100_000;

/// Returns `(e^z K_0(z), e^z K_1(z))` for `Re z > 0` (or `z` real positive).
pub fn k01_scaled(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() <= SERIES_RADIUS {
        let (k0, k1) = k01_series(z);
        let e = z.exp();
        (k0 * e, k1 * e)
    } else {
        k01_cf2_scaled(z)
    }
}

/// Returns `(K_0(z), K_1(z))`; underflows to zero for large `Re z`.
pub fn k01(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() <= SERIES_RADIUS {
        k01_series(z)
    } else {
        let (k0, k1) = k01_cf2_scaled(z);
        let e = (-z).exp();
        (k0 * e, k1 * e)
    }
}

pub fn bessel_k0(z: Complex64) -> Complex64 {
    k01(z).0
}

pub fn bessel_k1(z: Complex64) -> Complex64 {
    k01(z).1
}

fn k01_series(z: Complex64) -> (Complex64, Complex64) {
    let q = z * z * 0.25;
    let log_term = (z * 0.5).ln();

    // I_0, I_1 and the digamma-weighted sums of the ascending series.
    let mut term0 = Complex64::new(1.0, 0.0); // (q^k) / (k!)^2
    let mut term1 = Complex64::new(1.0, 0.0); // (q^k) / (k! (k+1)!)
    let mut i0 = term0;
    let mut i1_over = term1;
    let mut psi_k1 = -EULER_GAMMA; // psi(k + 1)
    let mut psi_k2 = 1.0 - EULER_GAMMA; // psi(k + 2)
    let mut s0 = term0 * psi_k1;
    let mut s1 = term1 * (psi_k1 + psi_k2);
    for k in 1..200 {
        let kf = k as f64;
        term0 *= q / (kf * kf);
        term1 *= q / (kf * (kf + 1.0));
        psi_k1 += 1.0 / kf;
        psi_k2 += 1.0 / (kf + 1.0);
        i0 += term0;
        i1_over += term1;
        let d0 = term0 * psi_k1;
        let d1 = term1 * (psi_k1 + psi_k2);
        s0 += d0;
        s1 += d1;
        if d0.norm() <= 1e-17 * s0.norm().max(i0.norm())
            && d1.norm() <= 1e-17 * s1.norm().max(i1_over.norm())
            && term0.norm() <= 1e-17 * i0.norm()
        {
            break;
        }
    }
    let half_z = z * 0.5;
    let i1 = half_z * i1_over;
    let k0 = -log_term * i0 + s0;
    let k1 = z.inv() + log_term * i1 - half_z * 0.5 * s1;
    (k0, k1)
}

fn k01_cf2_scaled(z: Complex64) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let mut b = (one + z) * 2.0;
    let mut d = b.inv();
    let mut h = d;
    let mut delh = d;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25;
    let mut q = Complex64::new(a1, 0.0);
    let mut c = Complex64::new(a1, 0.0);
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = c * (-a / (fi + 1.0));
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = (b + d * a).inv();
        delh = (b * d - one) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-17 * s.norm() {
            break;
        }
    }
    h *= a1;
    let k0 = (Complex64::new(PI, 0.0) / (z * 2.0)).sqrt() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    (k0, k1)
}

/// `K_n(z)` for `n = 0..=nmax`, by forward recurrence from `K_0, K_1`.
pub fn bessel_k_orders(nmax: usize, z: Complex64) -> Vec<Complex64> {
    let (k0, k1) = k01(z);
    recur_k(nmax, z, k0, k1)
}

/// `e^z K_n(z)` for `n = 0..=nmax`.
pub fn bessel_k_orders_scaled(nmax: usize, z: Complex64) -> Vec<Complex64> {
    let (k0, k1) = k01_scaled(z);
    recur_k(nmax, z, k0, k1)
}

fn recur_k(nmax: usize, z: Complex64, k0: Complex64, k1: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(k0);
    if nmax == 0 {
        return out;
    }
    out.push(k1);
    let two_over_z = z.inv() * 2.0;
    for n in 1..nmax {
        let next = out[n - 1] + two_over_z * (n as f64) * out[n];
        out.push(next);
    }
    out
}

/// Ratios `K_n(z) / K_{n-1}(z)` for `n = 1..=nmax` (entry 0 is unused and set
/// to 1). Free of overflow for large orders.
pub fn bessel_k_ratios(nmax: usize, z: Complex64) -> Vec<Complex64> {
    let (k0, k1) = k01_scaled(z);
    let mut out = vec![Complex64::new(1.0, 0.0); nmax + 1];
    if nmax == 0 {
        return out;
    }
    out[1] = k1 / k0;
    let two_over_z = z.inv() * 2.0;
    for n in 1..nmax {
        out[n + 1] = out[n].inv() + two_over_z * (n as f64);
    }
    out
}

/// `I_n(z)` by the ascending series. Accurate for moderate `|z|` (tested up to 20).
pub fn bessel_i(n: usize, z: Complex64) -> Complex64 {
    let q = z * z * 0.25;
    let mut lead = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        lead *= z * 0.5 / k as f64;
    }
    let mut term = lead;
    let mut sum = term;
    for k in 1..10_000 {
        term *= q / ((k as f64) * ((k + n) as f64));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && k as f64 > q.norm().sqrt() {
            break;
        }
    }
    sum
}

/// Laplace-domain fundamental solution of `Delta U - s^2 U = 0` in 2D,
/// `K_0(s r) / (2 pi)`, together with its radial derivative.
pub fn helmholtz_kernel_with_derivative(s: Complex64, r: f64) -> (Complex64, Complex64) {
    let (k0, k1) = k01(s * r);
    (k0 / (2.0 * PI), -s * k1 / (2.0 * PI))
}
