use num_complex::Complex64;
use piezo_core::bem::{helmholtz_kernel, helmholtz_kernel_and_derivative};
use std::f64::consts::PI;

/// 200 points with |s r| spread log-uniformly over [1e-3, 100] and
/// arg s over [-1.3, 1.3].
fn grid() -> Vec<(Complex64, f64)> {
    let mut out = Vec::new();
    for i in 0..20 {
        let modulus = 10f64.powf(-3.0 + 5.0 * i as f64 / 19.0);
        for j in 0..10 {
            let arg = -1.3 + 2.6 * j as f64 / 9.0;
            let r = [0.05, 0.3, 1.0, 2.5][(i + j) % 4];
            let s = Complex64::from_polar(modulus / r, arg);
            out.push((s, r));
        }
    }
    out
}

#[test]
fn kernel_matches_integral_oracle() {
    let pts = grid();
    assert_eq!(pts.len(), 200);
    let mut worst = 0.0f64;
    for (s, r) in pts {
        let got = helmholtz_kernel(s, r).unwrap();
        let want = piezo_oracles::bessel::k(0, s * r) / (2.0 * PI);
        let err = (got - want).norm() / want.norm();
        worst = worst.max(err);
        assert!(err < 1e-12, "s={s} r={r}: got {got}, want {want}, rel {err:e}");
    }
    eprintln!("worst relative kernel error {worst:e}");
}

#[test]
fn kernel_derivative_matches_oracle() {
    for (s, r) in grid().into_iter().step_by(7) {
        let (_, d) = helmholtz_kernel_and_derivative(s, r).unwrap();
        let want = -s * piezo_oracles::bessel::k(1, s * r) / (2.0 * PI);
        assert!((d - want).norm() <= 1e-12 * want.norm(), "s={s} r={r}");
    }
}

#[test]
fn kernel_rejects_invalid_arguments() {
    assert!(helmholtz_kernel(Complex64::new(1.0, 0.0), -1.0).is_err());
    assert!(helmholtz_kernel(Complex64::new(0.0, 3.0), 1.0).is_err());
    assert!(helmholtz_kernel(Complex64::new(f64::NAN, 0.0), 1.0).is_err());
}
