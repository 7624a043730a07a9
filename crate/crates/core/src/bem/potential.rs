//! Point evaluation of `S(s) lambda - D(s) phi` off the boundary.

use super::assembly::local_basis;
use super::kernel::kernel_pair;
use super::spaces::BoundarySpaces;
use crate::meshio::{segment_distance, BoundaryCurve, Panel, Point};
use crate::quadrature::{gauss_legendre, Rule1d};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// Points closer to the boundary than this multiple of the local panel
/// length are treated as lying on it.
const ON_BOUNDARY: f64 = 1e-10;
const MAX_DEPTH: usize = 60;

struct Rules {
    coarse: Rule1d,
    fine: Rule1d,
}

/// `S(s) lambda - D(s) phi` at each point, with `lambda` in `X_h` and `phi`
/// in `Y_h`. The double layer uses the outward normal of the solid, so the
/// field jumps by `-phi` from inside to outside.
pub fn eval_potentials(
    curve: &BoundaryCurve,
    spaces: &BoundarySpaces,
    s: Complex64,
    lambda: &[Complex64],
    phi: &[Complex64],
    points: &[Point],
) -> Result<Vec<Complex64>> {
    if !(s.re > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("frequency must have Re s > 0, got {s}")));
    }
    if spaces.num_panels() != curve.len() {
        return Err(Error::Dimension("boundary spaces built on a different curve".into()));
    }
    if lambda.len() != spaces.num_x() || phi.len() != spaces.num_y() {
        return Err(Error::Dimension(format!(
            "densities have lengths {} and {}, spaces need {} and {}",
            lambda.len(),
            phi.len(),
            spaces.num_x(),
            spaces.num_y()
        )));
    }
    for (i, x) in points.iter().enumerate() {
        for panel in &curve.panels {
            if segment_distance(*x, panel.start, panel.end) <= ON_BOUNDARY * panel.length {
                return Err(Error::InvalidArgument(format!(
                    "evaluation point {i} at ({}, {}) lies on the boundary",
                    x[0], x[1]
                )));
            }
        }
    }
    let rules = Rules {
        coarse: gauss_legendre(6),
        fine: gauss_legendre(10),
    };
    points
        .par_iter()
        .map(|&x| {
            let mut total = Complex64::new(0.0, 0.0);
            for (p, panel) in curve.panels.iter().enumerate() {
                let lam = &lambda[spaces.x_panel_offset(p)..spaces.x_panel_offset(p) + spaces.y_order()];
                let ph: Vec<Complex64> = spaces.y_panel_dofs(p).iter().map(|&d| phi[d]).collect();
                let dens = Densities { lam, phi: &ph, order: spaces.y_order() };
                total += integrate(&rules, panel, &dens, s, x, 0.0, 1.0, 0)?;
            }
            Ok(total)
        })
        .collect()
}

struct Densities<'a> {
    lam: &'a [Complex64],
    phi: &'a [Complex64],
    order: usize,
}

#[allow(clippy::too_many_arguments)]
fn integrate(
    rules: &Rules,
    panel: &Panel,
    dens: &Densities,
    s: Complex64,
    x: Point,
    a: f64,
    b: f64,
    depth: usize,
) -> Result<Complex64> {
    let ya = panel.point_at(a);
    let yb = panel.point_at(b);
    let len = (b - a) * panel.length;
    let dist = segment_distance(x, ya, yb);
    let oscillation = s.norm() * len;
    // beyond this the kernel is below e^-40 of its near value
    if dist * s.re > 40.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rule = if dist >= 4.0 * len && oscillation <= 2.0 {
        &rules.coarse
    } else if dist >= len && oscillation <= 4.0 {
        &rules.fine
    } else {
        if depth >= MAX_DEPTH {
            return Err(Error::Quadrature(format!(
                "potential quadrature did not resolve point ({}, {})",
                x[0], x[1]
            )));
        }
        let m = 0.5 * (a + b);
        return Ok(integrate(rules, panel, dens, s, x, a, m, depth + 1)?
            + integrate(rules, panel, dens, s, x, m, b, depth + 1)?);
    };
    let mut sum = Complex64::new(0.0, 0.0);
    for (t, w) in rule.mapped(a, b).iter() {
        let y = panel.point_at(t);
        let d = [y[0] - x[0], y[1] - x[1]];
        let r = d[0].hypot(d[1]);
        let (k, dk) = kernel_pair(s, r);
        let basis = local_basis(dens.order, t);
        let mut lam = Complex64::new(0.0, 0.0);
        for (c, bx) in dens.lam.iter().zip(&basis.x) {
            lam += c * bx;
        }
        let mut ph = Complex64::new(0.0, 0.0);
        for (c, by) in dens.phi.iter().zip(&basis.y) {
            ph += c * by;
        }
        let dnu = dk * ((d[0] * panel.normal[0] + d[1] * panel.normal[1]) / r);
        sum += (k * lam - dnu * ph) * (w * panel.length);
    }
    Ok(sum)
}
