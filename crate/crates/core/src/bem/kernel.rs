//! Fundamental solution of `Delta U - s^2 U = 0` in the plane.

use crate::special::k01;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `K_0(s r) / (2 pi)`.
pub fn helmholtz_kernel(s: Complex64, r: f64) -> Result<Complex64> {
    check(s, r)?;
    Ok(k01(s * r).0 / (2.0 * PI))
}

/// Kernel value and its derivative with respect to `r`.
pub fn helmholtz_kernel_and_derivative(s: Complex64, r: f64) -> Result<(Complex64, Complex64)> {
    check(s, r)?;
    Ok(kernel_pair(s, r))
}

fn check(s: Complex64, r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("kernel distance must be positive, got {r}")));
    }
    if !(s.re > 0.0) {
        return Err(Error::InvalidArgument(format!("frequency must have Re s > 0, got {s}")));
    }
    Ok(())
}

#[inline]
pub(crate) fn kernel_pair(s: Complex64, r: f64) -> (Complex64, Complex64) {
    let (k0, k1) = k01(s * r);
    (k0 / (2.0 * PI), -s * k1 / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argument_checks() {
        let s = Complex64::new(1.0, 0.0);
        assert!(helmholtz_kernel(s, 0.0).is_err());
        assert!(helmholtz_kernel(Complex64::new(0.0, 1.0), 1.0).is_err());
        assert!(helmholtz_kernel(Complex64::new(-1.0, 1.0), 1.0).is_err());
    }

    #[test]
    fn small_distance_behaviour() {
        let s = Complex64::new(1.0, 0.0);
        let euler = 0.577_215_664_901_532_9;
        for &r in &[1e-3, 1e-4, 1e-6] {
            let v = helmholtz_kernel(s, r).unwrap();
            let lead = -((r / 2.0_f64).ln() + euler) / (2.0 * PI);
            assert!((v.re - lead).abs() < r * r * (1.0 - r.ln()), "r={r}");
            assert_eq!(v.im, 0.0);
        }
    }
}
