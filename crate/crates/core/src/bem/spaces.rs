//! Piecewise polynomial spaces on the boundary panels.
//!
//! `Y_h` is continuous of order `p >= 1` with equispaced Lagrange nodes on
//! each panel; `X_h` is discontinuous of order `p - 1` with shifted Legendre
//! polynomials per panel.

use crate::fem::lagrange::{lagrange_1d, lagrange_1d_derivative};
use crate::meshio::BoundaryCurve;
use crate::quadrature::gauss_legendre;
use crate::sparse::CsrMatrix;
use crate::{Error, Result};
use std::collections::HashMap;

pub const MAX_Y_ORDER: usize = 4;

#[derive(Clone, Debug)]
pub struct BoundarySpaces {
    y_order: usize,
    num_y: usize,
    y_panel_dofs: Vec<Vec<usize>>,
    num_panels: usize,
}

impl BoundarySpaces {
    /// Spaces with `Y_h` of order `y_order` and `X_h` of order `y_order - 1`.
    pub fn new(curve: &BoundaryCurve, y_order: usize) -> Result<Self> {
        if !(1..=MAX_Y_ORDER).contains(&y_order) {
            return Err(Error::UnsupportedOrder {
                order: y_order,
                min: 1,
                max: MAX_Y_ORDER,
            });
        }
        let mut vertex_dof: HashMap<usize, usize> = HashMap::new();
        let mut next = 0;
        for p in &curve.panels {
            for v in p.vertices {
                vertex_dof.entry(v).or_insert_with(|| {
                    next += 1;
                    next - 1
                });
            }
        }
        let mut y_panel_dofs = Vec::with_capacity(curve.len());
        for p in &curve.panels {
            let mut d = vec![vertex_dof[&p.vertices[0]]];
            for _ in 1..y_order {
                d.push(next);
                next += 1;
            }
            d.push(vertex_dof[&p.vertices[1]]);
            y_panel_dofs.push(d);
        }
        Ok(BoundarySpaces {
            y_order,
            num_y: next,
            y_panel_dofs,
            num_panels: curve.len(),
        })
    }

    pub fn y_order(&self) -> usize {
        self.y_order
    }

    pub fn x_order(&self) -> usize {
        self.y_order - 1
    }

    pub fn num_y(&self) -> usize {
        self.num_y
    }

    pub fn num_x(&self) -> usize {
        self.y_order * self.num_panels
    }

    pub fn num_panels(&self) -> usize {
        self.num_panels
    }

    /// `Y_h` dofs on panel `p` from start to end vertex.
    pub fn y_panel_dofs(&self, p: usize) -> &[usize] {
        &self.y_panel_dofs[p]
    }

    /// First `X_h` dof of panel `p`; the panel owns `y_order` consecutive dofs.
    pub fn x_panel_offset(&self, p: usize) -> usize {
        p * self.y_order
    }

    /// Local `Y_h` shape functions at panel parameter `t`.
    pub fn y_values(&self, t: f64) -> Vec<f64> {
        lagrange_1d(self.y_order, t)
    }

    /// Derivatives of the local `Y_h` shape functions with respect to `t`.
    pub fn y_derivatives(&self, t: f64) -> Vec<f64> {
        lagrange_1d_derivative(self.y_order, t)
    }

    /// Local `X_h` shape functions at `t`: shifted Legendre `P_j(2t - 1)`.
    pub fn x_values(&self, t: f64) -> Vec<f64> {
        legendre_shifted(self.y_order - 1, t)
    }

    /// Mixed mass `<chi_i, zeta_j>` (rows `X_h`, columns `Y_h`).
    pub fn mixed_mass(&self, curve: &BoundaryCurve) -> CsrMatrix {
        let g = gauss_legendre(self.y_order + 1);
        let mut t = Vec::new();
        for (p, panel) in curve.panels.iter().enumerate() {
            let off = self.x_panel_offset(p);
            for (s, w) in g.iter() {
                let xv = self.x_values(s);
                let yv = self.y_values(s);
                for (a, xa) in xv.iter().enumerate() {
                    for (b, yb) in yv.iter().enumerate() {
                        t.push((off + a, self.y_panel_dofs[p][b], w * panel.length * xa * yb));
                    }
                }
            }
        }
        CsrMatrix::from_triplets(self.num_x(), self.num_y, &t)
    }

    /// `X_h` Gram matrix (block diagonal).
    pub fn x_mass(&self, curve: &BoundaryCurve) -> CsrMatrix {
        let mut t = Vec::new();
        for (p, panel) in curve.panels.iter().enumerate() {
            let off = self.x_panel_offset(p);
            for j in 0..self.y_order {
                // int_0^1 P_j(2t-1)^2 dt = 1 / (2j + 1)
                t.push((off + j, off + j, panel.length / (2 * j + 1) as f64));
            }
        }
        CsrMatrix::from_triplets(self.num_x(), self.num_x(), &t)
    }

    /// `Y_h` Gram matrix.
    pub fn y_mass(&self, curve: &BoundaryCurve) -> CsrMatrix {
        let g = gauss_legendre(self.y_order + 1);
        let mut t = Vec::new();
        for (p, panel) in curve.panels.iter().enumerate() {
            for (s, w) in g.iter() {
                let yv = self.y_values(s);
                for (a, ya) in yv.iter().enumerate() {
                    for (b, yb) in yv.iter().enumerate() {
                        t.push((
                            self.y_panel_dofs[p][a],
                            self.y_panel_dofs[p][b],
                            w * panel.length * ya * yb,
                        ));
                    }
                }
            }
        }
        CsrMatrix::from_triplets(self.num_y, self.num_y, &t)
    }

    /// `Y_h` nodal interpolant of a function of position.
    pub fn interpolate_y(&self, curve: &BoundaryCurve, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.num_y];
        for (p, panel) in curve.panels.iter().enumerate() {
            for (j, &d) in self.y_panel_dofs[p].iter().enumerate() {
                out[d] = f(panel.point_at(j as f64 / self.y_order as f64));
            }
        }
        out
    }
}

/// `P_j(2t - 1)` for `j = 0..=order`.
pub fn legendre_shifted(order: usize, t: f64) -> Vec<f64> {
    let x = 2.0 * t - 1.0;
    let mut out = Vec::with_capacity(order + 1);
    out.push(1.0);
    if order >= 1 {
        out.push(x);
    }
    for n in 1..order {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0) * x * out[n] - nf * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_on_closed_curve() {
        let c = BoundaryCurve::circle(10, 1.0, [0.0, 0.0]);
        for p in 1..=4 {
            let s = BoundarySpaces::new(&c, p).unwrap();
            assert_eq!(s.num_y(), 10 * p);
            assert_eq!(s.num_x(), 10 * p);
        }
        let m = crate::meshio::square_with_hole(1).unwrap();
        let s = BoundarySpaces::new(&m.boundary(), 2).unwrap();
        assert_eq!(s.num_y(), 2 * m.panels().len());
    }

    #[test]
    fn masses_integrate_constants() {
        let c = BoundaryCurve::circle(12, 1.0, [0.0, 0.0]);
        let s = BoundarySpaces::new(&c, 3).unwrap();
        let ones_y = vec![1.0; s.num_y()];
        let my = s.y_mass(&c);
        assert!((my.quadratic_form(&ones_y) - c.perimeter()).abs() < 1e-12);
        let mxy = s.mixed_mass(&c);
        // chi = sum of degree-0 Legendre functions is the constant 1
        let mut one_x = vec![0.0; s.num_x()];
        for p in 0..c.len() {
            one_x[s.x_panel_offset(p)] = 1.0;
        }
        let v: f64 = mxy.matvec(&ones_y).iter().zip(&one_x).map(|(a, b)| a * b).sum();
        assert!((v - c.perimeter()).abs() < 1e-12);
    }
}
