//! Lagrange shape functions of order 1..=4 on the reference triangle
//! `(0,0), (1,0), (0,1)`.
//!
//! Local node order: the three vertices, then `k - 1` nodes on each edge
//! `(0,1)`, `(1,2)`, `(2,0)` listed from the first vertex of the edge to the
//! second, then the interior lattice nodes `(a/k, b/k)` with `a` outermost.

use crate::{Error, Result};

pub const MIN_ORDER: usize = 1;
pub const MAX_ORDER: usize = 4;

#[derive(Clone, Debug)]
pub struct LagrangeBasis {
    order: usize,
    nodes: Vec<[f64; 2]>,
    monomials: Vec<(i32, i32)>,
    /// `coef[m][i]`: coefficient of monomial `m` in shape function `i`.
    coef: Vec<Vec<f64>>,
}

pub fn check_order(order: usize) -> Result<()> {
    if (MIN_ORDER..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder {
            order,
            min: MIN_ORDER,
            max: MAX_ORDER,
        })
    }
}

/// Local nodes on reference edge `e` (vertices `e` and `(e+1) % 3`).
pub const EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

impl LagrangeBasis {
    pub fn new(order: usize) -> Result<Self> {
        check_order(order)?;
        let k = order;
        let kf = k as f64;
        let verts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let mut nodes: Vec<[f64; 2]> = verts.to_vec();
        for [a, b] in EDGES {
            for j in 1..k {
                let t = j as f64 / kf;
                nodes.push([
                    verts[a][0] + t * (verts[b][0] - verts[a][0]),
                    verts[a][1] + t * (verts[b][1] - verts[a][1]),
                ]);
            }
        }
        for a in 1..k {
            for b in 1..(k - a) {
                nodes.push([a as f64 / kf, b as f64 / kf]);
            }
        }
        let mut monomials = Vec::new();
        for d in 0..=k as i32 {
            for py in 0..=d {
                monomials.push((d - py, py));
            }
        }
        let n = nodes.len();
        debug_assert_eq!(n, monomials.len());
        // Vandermonde V[node][mono]; coef = V^{-1}
        let v: Vec<Vec<f64>> = nodes
            .iter()
            .map(|p| monomials.iter().map(|&(a, b)| p[0].powi(a) * p[1].powi(b)).collect())
            .collect();
        let coef = invert(v).ok_or_else(|| Error::Singular("Lagrange Vandermonde".into()))?;
        Ok(LagrangeBasis {
            order,
            nodes,
            monomials,
            coef,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn num_interior(&self) -> usize {
        let k = self.order;
        if k < 3 {
            0
        } else {
            (k - 1) * (k - 2) / 2
        }
    }

    pub fn values(&self, p: [f64; 2]) -> Vec<f64> {
        let m: Vec<f64> = self
            .monomials
            .iter()
            .map(|&(a, b)| p[0].powi(a) * p[1].powi(b))
            .collect();
        (0..self.len())
            .map(|i| m.iter().zip(&self.coef).map(|(mv, row)| mv * row[i]).sum())
            .collect()
    }

    /// Reference gradients `(d/dx, d/dy)` of all shape functions.
    pub fn gradients(&self, p: [f64; 2]) -> Vec<[f64; 2]> {
        let dm: Vec<[f64; 2]> = self
            .monomials
            .iter()
            .map(|&(a, b)| {
                let dx = if a > 0 {
                    a as f64 * p[0].powi(a - 1) * p[1].powi(b)
                } else {
                    0.0
                };
                let dy = if b > 0 {
                    b as f64 * p[0].powi(a) * p[1].powi(b - 1)
                } else {
                    0.0
                };
                [dx, dy]
            })
            .collect();
        (0..self.len())
            .map(|i| {
                let mut g = [0.0; 2];
                for (d, row) in dm.iter().zip(&self.coef) {
                    g[0] += d[0] * row[i];
                    g[1] += d[1] * row[i];
                }
                g
            })
            .collect()
    }
}

/// One-dimensional Lagrange basis on the equispaced nodes `j / k`,
/// `j = 0..=k`, evaluated at `t`.
pub fn lagrange_1d(order: usize, t: f64) -> Vec<f64> {
    let k = order as f64;
    (0..=order)
        .map(|i| {
            let ti = i as f64 / k;
            (0..=order)
                .filter(|&j| j != i)
                .map(|j| {
                    let tj = j as f64 / k;
                    (t - tj) / (ti - tj)
                })
                .product()
        })
        .collect()
}

/// Derivatives of [`lagrange_1d`] with respect to `t`.
pub fn lagrange_1d_derivative(order: usize, t: f64) -> Vec<f64> {
    let k = order as f64;
    (0..=order)
        .map(|i| {
            let ti = i as f64 / k;
            let mut sum = 0.0;
            for m in 0..=order {
                if m == i {
                    continue;
                }
                let tm = m as f64 / k;
                let mut prod = 1.0 / (ti - tm);
                for j in 0..=order {
                    if j == i || j == m {
                        continue;
                    }
                    let tj = j as f64 / k;
                    prod *= (t - tj) / (ti - tj);
                }
                sum += prod;
            }
            sum
        })
        .collect()
}

/// Gauss-Jordan inverse with partial pivoting for small dense matrices.
pub(crate) fn invert(mut a: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-14 {
            return None;
        }
        a.swap(c, p);
        inv.swap(c, p);
        let d = a[c][c];
        for j in 0..n {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                if f != 0.0 {
                    for j in 0..n {
                        a[r][j] -= f * a[c][j];
                        inv[r][j] -= f * inv[c][j];
                    }
                }
            }
        }
    }
    Some(inv)
}
