use num_complex::Complex64;
use piezo_core::bem::{assemble_operators, BoundarySpaces};
use piezo_core::meshio::BoundaryCurve;
use std::f64::consts::PI;

/// Generalized eigenvalues of `V` against the `X_h` Gram matrix for the
/// Fourier modes of a regular polygon inscribed in the unit circle, using
/// discontinuous linears. The problem is block circulant, so each mode
/// reduces to a 2x2 pencil; the smooth branch is the one nearest `guess`.
fn v_eigenvalues(panels: usize, s: Complex64, guesses: &[Complex64]) -> Vec<Complex64> {
    let curve = BoundaryCurve::circle(panels, 1.0, [0.0, 0.0]);
    let spaces = BoundarySpaces::new(&curve, 2).unwrap();
    let ops = assemble_operators(&curve, &spaces, s).unwrap();
    let h = curve.panels[0].length;
    let mass = [h, h / 3.0];
    guesses
        .iter()
        .enumerate()
        .map(|(n, guess)| {
            let mut sym = [[Complex64::new(0.0, 0.0); 2]; 2];
            for k in 0..panels {
                let phase = Complex64::from_polar(1.0, 2.0 * PI * (n * k) as f64 / panels as f64);
                let off = spaces.x_panel_offset(k);
                for a in 0..2 {
                    for b in 0..2 {
                        sym[a][b] += ops.v[(a, off + b)] * phase;
                    }
                }
            }
            // det(sym - lambda diag(mass)) = 0
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
        .collect()
}

#[test]
fn single_layer_spectrum_on_circle() {
    for s in [Complex64::new(1.0, 0.0), Complex64::new(2.0, 3.0)] {
        let exact: Vec<Complex64> = (0..6)
            .map(|n| piezo_oracles::bessel::i(n, s) * piezo_oracles::bessel::k(n, s))
            .collect();
        let mut previous = vec![f64::INFINITY; 6];
        for panels in [64, 128, 256] {
            let approx = v_eigenvalues(panels, s, &exact);
            for n in 0..6 {
                let err = (approx[n] - exact[n]).norm() / exact[n].norm();
                eprintln!("s={s} panels={panels} n={n} rel err {err:.3e}");
                assert!(err < previous[n], "error not decreasing for n={n}");
                if panels == 256 {
                    assert!(err < 1e-3, "s={s} n={n}: rel err {err:e}");
                }
                previous[n] = err;
            }
        }
    }
}
