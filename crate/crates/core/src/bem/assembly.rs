//! Galerkin matrices of the single layer `V`, double layer `K`, adjoint
//! double layer `Kt` and hypersingular `W` operators at a complex frequency.
//!
//! Conventions: `V` acts on `X_h` and is tested with `X_h`; `K` maps `Y_h` to
//! `X_h`-tested values; `Kt = K^T`; `W` acts on and is tested with `Y_h`.
//! The double-layer kernel is `d/d nu_y Phi(|x - y|)` with `nu` the outward
//! normal of the solid. `W` uses the integrated-by-parts form
//! `<W phi, psi> = int int Phi [phi'(y) psi'(x) + s^2 nu_x . nu_y phi(y) psi(x)]`.

use super::kernel::kernel_pair;
use super::spaces::BoundarySpaces;
use crate::meshio::{segment_distance, BoundaryCurve, Panel};
use crate::quadrature::{gauss_legendre, graded_towards_zero, Rule1d};
use crate::{Error, Result};
use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

pub(crate) const MAX_LOCAL: usize = 5;

/// Quadrature parameters for operator assembly.
#[derive(Clone, Debug)]
pub struct QuadratureSettings {
    /// Gauss points per direction for panel pairs at the near/far threshold.
    pub far_order: usize,
    /// Gauss points for the smooth direction of singular integrals.
    pub singular_order: usize,
    /// Points per level of the geometrically graded rule.
    pub graded_points: usize,
    pub graded_levels: usize,
    pub grading: f64,
    /// Pairs closer than `near_ratio * max(length)` are subdivided.
    pub near_ratio: f64,
    pub max_depth: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            far_order: 8,
            singular_order: 8,
            graded_points: 7,
            graded_levels: 12,
            grading: 0.2,
            near_ratio: 1.0,
            max_depth: 20,
        }
    }
}

/// Dense Galerkin matrices at one frequency.
#[derive(Clone, Debug)]
pub struct LayerOperators {
    pub s: Complex64,
    /// `X_h x X_h`.
    pub v: Mat<Complex64>,
    /// `X_h x Y_h`.
    pub k: Mat<Complex64>,
    /// `Y_h x X_h`, equal to `k^T`.
    pub kt: Mat<Complex64>,
    /// `Y_h x Y_h`.
    pub w: Mat<Complex64>,
}

#[derive(Clone, Copy)]
pub(crate) struct LocalBasis {
    pub x: [f64; MAX_LOCAL],
    pub y: [f64; MAX_LOCAL],
    pub dy: [f64; MAX_LOCAL],
}

/// `X_h` (Legendre, order `p - 1`) and `Y_h` (Lagrange, order `p`) shape
/// functions on a panel at parameter `t`.
pub(crate) fn local_basis(p: usize, t: f64) -> LocalBasis {
    let mut b = LocalBasis {
        x: [0.0; MAX_LOCAL],
        y: [0.0; MAX_LOCAL],
        dy: [0.0; MAX_LOCAL],
    };
    let xi = 2.0 * t - 1.0;
    b.x[0] = 1.0;
    if p >= 2 {
        b.x[1] = xi;
    }
    for n in 1..p.saturating_sub(1) {
        let nf = n as f64;
        b.x[n + 1] = ((2.0 * nf + 1.0) * xi * b.x[n] - nf * b.x[n - 1]) / (nf + 1.0);
    }
    let pf = p as f64;
    for i in 0..=p {
        let ti = i as f64 / pf;
        let mut val = 1.0;
        let mut der = 0.0;
        for j in 0..=p {
            if j == i {
                continue;
            }
            let tj = j as f64 / pf;
            let f = (t - tj) / (ti - tj);
            // product rule accumulated alongside the product
            der = der * f + val / (ti - tj);
            val *= f;
        }
        b.y[i] = val;
        b.dy[i] = der;
    }
    b
}

/// Quadrature nodes `(t on test panel, t' on trial panel, weight)` in
/// parameter space.
type Nodes = Vec<(f64, f64, f64)>;

struct Rules {
    same: Nodes,
    /// Indexed by `2 * (shared vertex is end of test panel) + (shared is end of trial panel)`.
    adjacent: [Nodes; 4],
    gauss: Vec<Rule1d>,
}

impl Rules {
    fn new(q: &QuadratureSettings) -> Rules {
        let graded = graded_towards_zero(q.graded_points, q.graded_levels, q.grading);
        let smooth = gauss_legendre(q.singular_order);
        let mut same = Vec::new();
        for (tau, wt) in graded.iter() {
            for (u0, wu) in smooth.iter() {
                let u = u0 * (1.0 - tau);
                let w = wt * wu * (1.0 - tau);
                same.push((u + tau, u, w));
                same.push((u, u + tau, w));
            }
        }
        let mut base = Vec::new();
        for (a, wa) in graded.iter() {
            for (v, wv) in smooth.iter() {
                let w = wa * wv * a;
                base.push((a, a * v, w));
                base.push((a * v, a, w));
            }
        }
        let adjacent = [0, 1, 2, 3].map(|code| {
            let flip_test = code & 2 != 0;
            let flip_trial = code & 1 != 0;
            base.iter()
                .map(|&(a, b, w)| {
                    (
                        if flip_test { 1.0 - a } else { a },
                        if flip_trial { 1.0 - b } else { b },
                        w,
                    )
                })
                .collect()
        });
        let gauss = (0..=40).map(|n| gauss_legendre(n.max(1))).collect();
        Rules {
            same,
            adjacent,
            gauss,
        }
    }

    fn tensor(&self, n: usize, a: [f64; 2], b: [f64; 2], out: &mut Nodes) {
        let g = &self.gauss[n.min(40)];
        let (ha, hb) = (a[1] - a[0], b[1] - b[0]);
        for (t, wt) in g.iter() {
            for (u, wu) in g.iter() {
                out.push((a[0] + ha * t, b[0] + hb * u, wt * wu * ha * hb));
            }
        }
    }
}

fn sub_segment(p: &Panel, a: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    (p.point_at(a[0]), p.point_at(a[1]))
}

fn segments_distance(p0: [f64; 2], p1: [f64; 2], q0: [f64; 2], q1: [f64; 2]) -> f64 {
    segment_distance(p0, q0, q1)
        .min(segment_distance(p1, q0, q1))
        .min(segment_distance(q0, p0, p1))
        .min(segment_distance(q1, p0, p1))
}

/// Gauss points per direction for a separated pair.
fn far_points(q: &QuadratureSettings, p: usize, s: Complex64, ratio: f64, size: f64) -> usize {
    let base = if ratio >= 4.0 {
        q.far_order.saturating_sub(4).max(3)
    } else if ratio >= 2.0 {
        q.far_order.saturating_sub(2).max(3)
    } else {
        q.far_order
    };
    let oscillation = (s.im.abs() * size * 0.5).ceil() as usize;
    (base + p.saturating_sub(1) + oscillation).min(40)
}

#[allow(clippy::too_many_arguments)]
fn near_nodes(
    rules: &Rules,
    q: &QuadratureSettings,
    p: usize,
    s: Complex64,
    test: &Panel,
    a: [f64; 2],
    trial: &Panel,
    b: [f64; 2],
    depth: usize,
    out: &mut Nodes,
) -> Result<()> {
    let (p0, p1) = sub_segment(test, a);
    let (q0, q1) = sub_segment(trial, b);
    let la = test.length * (a[1] - a[0]);
    let lb = trial.length * (b[1] - b[0]);
    let size = la.max(lb);
    let dist = segments_distance(p0, p1, q0, q1);
    if dist >= q.near_ratio * size {
        let n = far_points(q, p, s, dist / size, size);
        rules.tensor(n, a, b, out);
        return Ok(());
    }
    if depth >= q.max_depth {
        return Err(Error::Quadrature(format!(
            "near-panel refinement exceeded depth {} (distance {dist:e}, size {size:e})",
            q.max_depth
        )));
    }
    if la >= lb {
        let m = 0.5 * (a[0] + a[1]);
        near_nodes(rules, q, p, s, test, [a[0], m], trial, b, depth + 1, out)?;
        near_nodes(rules, q, p, s, test, [m, a[1]], trial, b, depth + 1, out)
    } else {
        let m = 0.5 * (b[0] + b[1]);
        near_nodes(rules, q, p, s, test, a, trial, [b[0], m], depth + 1, out)?;
        near_nodes(rules, q, p, s, test, a, trial, [m, b[1]], depth + 1, out)
    }
}

type Block = [[Complex64; MAX_LOCAL]; MAX_LOCAL];

const ZERO_BLOCK: Block = [[Complex64::new(0.0, 0.0); MAX_LOCAL]; MAX_LOCAL];

/// Local blocks of a panel pair (P, Q) with P <= Q, both orientations.
struct PairBlocks {
    q: usize,
    v_pq: Block,
    k_pq: Block,
    k_qp: Block,
    w_pq: Block,
}

fn integrate_pair(
    s: Complex64,
    p: usize,
    test: &Panel,
    trial: &Panel,
    same: bool,
    nodes: &[(f64, f64, f64)],
    q: usize,
) -> PairBlocks {
    let mut out = PairBlocks {
        q,
        v_pq: ZERO_BLOCK,
        k_pq: ZERO_BLOCK,
        k_qp: ZERO_BLOCK,
        w_pq: ZERO_BLOCK,
    };
    let s2 = s * s;
    let nn = test.normal[0] * trial.normal[0] + test.normal[1] * trial.normal[1];
    let lpq = test.length * trial.length;
    for &(t, tq, w) in nodes {
        let x = test.point_at(t);
        let y = trial.point_at(tq);
        let d = [y[0] - x[0], y[1] - x[1]];
        let r = d[0].hypot(d[1]);
        let (phi, dphi) = kernel_pair(s, r);
        let bx = local_basis(p, t);
        let by = local_basis(p, tq);
        let ww = w * lpq;
        let phi_w = phi * ww;
        for a in 0..p {
            for b in 0..p {
                out.v_pq[a][b] += phi_w * (bx.x[a] * by.x[b]);
            }
        }
        if !same {
            let dn_q = dphi * ((d[0] * trial.normal[0] + d[1] * trial.normal[1]) / r) * ww;
            let dn_p = dphi * (-(d[0] * test.normal[0] + d[1] * test.normal[1]) / r) * ww;
            for a in 0..p {
                for b in 0..=p {
                    out.k_pq[a][b] += dn_q * (bx.x[a] * by.y[b]);
                    out.k_qp[a][b] += dn_p * (by.x[a] * bx.y[b]);
                }
            }
        }
        let tang = phi_w / lpq;
        let norm = phi_w * s2 * nn;
        for a in 0..=p {
            for b in 0..=p {
                out.w_pq[a][b] += tang * (bx.dy[a] * by.dy[b]) + norm * (bx.y[a] * by.y[b]);
            }
        }
    }
    out
}

/// Assembles all four operators with default quadrature settings.
pub fn assemble_operators(
    curve: &BoundaryCurve,
    spaces: &BoundarySpaces,
    s: Complex64,
) -> Result<LayerOperators> {
    assemble_operators_with(curve, spaces, s, &QuadratureSettings::default())
}

pub fn assemble_operators_with(
    curve: &BoundaryCurve,
    spaces: &BoundarySpaces,
    s: Complex64,
    settings: &QuadratureSettings,
) -> Result<LayerOperators> {
    if !(s.re > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("frequency must have Re s > 0, got {s}")));
    }
    if spaces.num_panels() != curve.len() {
        return Err(Error::Dimension("boundary spaces built on a different curve".into()));
    }
    let p = spaces.y_order();
    let rules = Rules::new(settings);
    let np = curve.len();
    let panels = &curve.panels;
    // beyond this separation the kernel is below 1e-17 of its near-field size
    let cutoff = 40.0 / s.re;

    let rows: Vec<Result<Vec<PairBlocks>>> = (0..np)
        .into_par_iter()
        .map(|ip| {
            let test = &panels[ip];
            let mut blocks = Vec::new();
            let mut nodes = Vec::new();
            for iq in ip..np {
                let trial = &panels[iq];
                if iq == ip {
                    blocks.push(integrate_pair(s, p, test, trial, true, &rules.same, iq));
                    continue;
                }
                let [ps, pe] = test.vertices;
                let [qs, qe] = trial.vertices;
                let shared = if pe == qs {
                    Some(2)
                } else if ps == qe {
                    Some(1)
                } else if ps == qs {
                    Some(0)
                } else if pe == qe {
                    Some(3)
                } else {
                    None
                };
                if let Some(code) = shared {
                    blocks.push(integrate_pair(s, p, test, trial, false, &rules.adjacent[code], iq));
                    continue;
                }
                let size = test.length.max(trial.length);
                let dist = segments_distance(test.start, test.end, trial.start, trial.end);
                if dist > cutoff {
                    continue;
                }
                nodes.clear();
                if dist >= settings.near_ratio * size {
                    let n = far_points(settings, p, s, dist / size, size);
                    rules.tensor(n, [0.0, 1.0], [0.0, 1.0], &mut nodes);
                } else {
                    near_nodes(&rules, settings, p, s, test, [0.0, 1.0], trial, [0.0, 1.0], 0, &mut nodes)?;
                }
                blocks.push(integrate_pair(s, p, test, trial, false, &nodes, iq));
            }
            Ok(blocks)
        })
        .collect();

    let nx = spaces.num_x();
    let ny = spaces.num_y();
    let zero = Complex64::new(0.0, 0.0);
    let mut v = Mat::<Complex64>::from_fn(nx, nx, |_, _| zero);
    let mut k = Mat::<Complex64>::from_fn(nx, ny, |_, _| zero);
    let mut w = Mat::<Complex64>::from_fn(ny, ny, |_, _| zero);
    for (ip, row) in rows.into_iter().enumerate() {
        for blk in row? {
            let iq = blk.q;
            let xp = spaces.x_panel_offset(ip);
            let xq = spaces.x_panel_offset(iq);
            let yp = spaces.y_panel_dofs(ip);
            let yq = spaces.y_panel_dofs(iq);
            for a in 0..p {
                for b in 0..p {
                    v[(xp + a, xq + b)] += blk.v_pq[a][b];
                    if iq != ip {
                        v[(xq + b, xp + a)] += blk.v_pq[a][b];
                    }
                }
            }
            if iq != ip {
                for a in 0..p {
                    for b in 0..=p {
                        k[(xp + a, yq[b])] += blk.k_pq[a][b];
                        k[(xq + a, yp[b])] += blk.k_qp[a][b];
                    }
                }
            }
            for a in 0..=p {
                for b in 0..=p {
                    w[(yp[a], yq[b])] += blk.w_pq[a][b];
                    if iq != ip {
                        w[(yq[b], yp[a])] += blk.w_pq[a][b];
                    }
                }
            }
        }
    }
    let kt = k.transpose().to_owned();
    Ok(LayerOperators { s, v, k, kt, w })
}

impl LayerOperators {
    /// Largest relative deviation from `V = V^T`, `W = W^T`, `Kt = K^T`.
    pub fn symmetry_defect(&self) -> f64 {
        let rel = |a: &Mat<Complex64>, b: &Mat<Complex64>| {
            let mut num: f64 = 0.0;
            let mut den: f64 = 0.0;
            for j in 0..a.ncols() {
                for i in 0..a.nrows() {
                    num = num.max((a[(i, j)] - b[(j, i)]).norm());
                    den = den.max(a[(i, j)].norm());
                }
            }
            if den == 0.0 {
                0.0
            } else {
                num / den
            }
        };
        rel(&self.v, &self.v).max(rel(&self.w, &self.w)).max(rel(&self.kt, &self.k))
    }

    /// Writes one operator in `row col re im` coordinate text.
    pub fn to_coordinate_text(m: &Mat<Complex64>) -> String {
        let mut s = format!("{} {}\n", m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                s.push_str(&format!("{i} {j} {:e} {:e}\n", z.re, z.im));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_basis_matches_space_definitions() {
        for p in 1..=4 {
            let t = 0.31;
            let b = local_basis(p, t);
            let y = crate::fem::lagrange::lagrange_1d(p, t);
            let dy = crate::fem::lagrange::lagrange_1d_derivative(p, t);
            let x = super::super::spaces::legendre_shifted(p - 1, t);
            for i in 0..=p {
                assert!((b.y[i] - y[i]).abs() < 1e-14);
                assert!((b.dy[i] - dy[i]).abs() < 1e-12);
            }
            for i in 0..p {
                assert!((b.x[i] - x[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn real_frequency_gives_real_symmetric_operators() {
        let c = BoundaryCurve::circle(24, 1.0, [0.0, 0.0]);
        let sp = BoundarySpaces::new(&c, 2).unwrap();
        let ops = assemble_operators(&c, &sp, Complex64::new(1.5, 0.0)).unwrap();
        assert!(ops.symmetry_defect() < 1e-12);
        for m in [&ops.v, &ops.k, &ops.w] {
            for j in 0..m.ncols() {
                for i in 0..m.nrows() {
                    assert_eq!(m[(i, j)].im, 0.0);
                }
            }
        }
    }

    #[test]
    fn double_layer_of_constant_is_minus_half() {
        // K 1 = -1/2 on a closed curve for the Laplace limit; at small s the
        // constant density gives approximately -1/2 <chi, 1>.
        let c = BoundaryCurve::circle(64, 1.0, [0.0, 0.0]);
        let sp = BoundarySpaces::new(&c, 1).unwrap();
        let ops = assemble_operators(&c, &sp, Complex64::new(1e-4, 0.0)).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); sp.num_y()];
        for i in 0..sp.num_x() {
            let v: Complex64 = (0..sp.num_y()).map(|j| ops.k[(i, j)] * ones[j]).sum();
            let len = c.panels[i].length;
            assert!((v.re / len + 0.5).abs() < 1e-3, "row {i}: {}", v.re / len);
        }
    }
}
