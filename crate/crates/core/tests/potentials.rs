use num_complex::Complex64;
use piezo_core::bem::{eval_potentials, BoundarySpaces};
use piezo_core::meshio::BoundaryCurve;
use piezo_core::quadrature::gauss_legendre;
use piezo_oracles::bessel;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// L2 projection of `f` onto the discontinuous Legendre space `X_h`.
fn project_x(curve: &BoundaryCurve, spaces: &BoundarySpaces, f: impl Fn([f64; 2]) -> f64) -> Vec<Complex64> {
    let g = gauss_legendre(8);
    let mut out = vec![c(0.0); spaces.num_x()];
    for (p, panel) in curve.panels.iter().enumerate() {
        for (t, w) in g.iter() {
            let v = f(panel.point_at(t));
            for (j, pj) in spaces.x_values(t).iter().enumerate() {
                out[spaces.x_panel_offset(p) + j] += c((2 * j + 1) as f64 * w * v * pj);
            }
        }
    }
    out
}

fn angle(p: [f64; 2]) -> f64 {
    p[1].atan2(p[0])
}

#[test]
fn single_and_double_layer_match_fourier_oracle() {
    let curve = BoundaryCurve::circle(128, 1.0, [0.0, 0.0]);
    let spaces = BoundarySpaces::new(&curve, 2).unwrap();
    let points: Vec<[f64; 2]> = (0..5).map(|k| {
        let th = 0.4 + 1.1 * k as f64;
        [2.0 * th.cos(), 2.0 * th.sin()]
    }).collect();
    for s in [c(1.0), Complex64::new(2.0, 3.0)] {
        for n in 0..4u32 {
            let mode = |p: [f64; 2]| (n as f64 * angle(p)).cos();
            let lam = project_x(&curve, &spaces, mode);
            let phi: Vec<Complex64> = spaces.interpolate_y(&curve, mode).into_iter().map(c).collect();
            let zero_x = vec![c(0.0); spaces.num_x()];
            let zero_y = vec![c(0.0); spaces.num_y()];
            let single = eval_potentials(&curve, &spaces, s, &lam, &zero_y, &points).unwrap();
            let double = eval_potentials(&curve, &spaces, s, &zero_x, &phi, &points).unwrap();
            let kn = bessel::k(n, 2.0 * s);
            let i_n = bessel::i(n, s);
            let di_n = if n == 0 {
                bessel::i(1, s)
            } else {
                0.5 * (bessel::i(n - 1, s) + bessel::i(n + 1, s))
            };
            let scale_s = (i_n * kn).norm();
            let scale_d = (s * di_n * kn).norm();
            for (k, x) in points.iter().enumerate() {
                let m = (n as f64 * angle(*x)).cos();
                let want_s = i_n * kn * m;
                // U = -D phi
                let want_d = -s * di_n * kn * m;
                assert!((single[k] - want_s).norm() < 1e-3 * scale_s, "S: s={s} n={n} {} vs {want_s}", single[k]);
                assert!((double[k] - want_d).norm() < 1e-3 * scale_d, "D: s={s} n={n} {} vs {want_d}", double[k]);
            }
        }
    }
}

#[test]
fn double_layer_jump_reproduces_density() {
    let curve = BoundaryCurve::circle(48, 1.0, [0.0, 0.0]);
    let spaces = BoundarySpaces::new(&curve, 3).unwrap();
    let density = |p: [f64; 2]| 1.0 + 0.5 * p[0] - 0.3 * (2.0 * p[1]).sin();
    let phi: Vec<Complex64> = spaces.interpolate_y(&curve, density).into_iter().map(c).collect();
    let lam = vec![c(0.0); spaces.num_x()];
    let s = Complex64::new(1.5, -2.0);
    for p in [0usize, 11, 30] {
        let panel = &curve.panels[p];
        let mid = panel.point_at(0.37);
        let jump = |delta: f64| {
            let out = [mid[0] + delta * panel.normal[0], mid[1] + delta * panel.normal[1]];
            let inn = [mid[0] - delta * panel.normal[0], mid[1] - delta * panel.normal[1]];
            let v = eval_potentials(&curve, &spaces, s, &lam, &phi, &[out, inn]).unwrap();
            v[0] - v[1]
        };
        let extrapolated = 2.0 * jump(5e-4) - jump(1e-3);
        let want = -density(mid);
        assert!((extrapolated - want).norm() < 1e-3 * want.abs(), "panel {p}: {extrapolated} vs {want}");
    }
}
