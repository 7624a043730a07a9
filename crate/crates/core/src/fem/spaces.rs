//! Global degree-of-freedom tables for continuous Lagrange spaces.

use super::lagrange::{LagrangeBasis, EDGES};
use crate::meshio::{BoundaryLabel, Point, TriMesh};
use crate::Result;
use std::collections::HashMap;

/// Scalar space `V_h` and vector space `V_h^2` of order `k` on a mesh.
///
/// Vector dofs are blocked by component: index `c * n + i` is component `c`
/// of scalar node `i`.
#[derive(Clone, Debug)]
pub struct FemSpaces {
    mesh: TriMesh,
    basis: LagrangeBasis,
    element_dofs: Vec<Vec<usize>>,
    node_coords: Vec<Point>,
    panel_dofs: Vec<Vec<usize>>,
    dirichlet: Vec<usize>,
    free: Vec<usize>,
}

impl FemSpaces {
    pub fn new(mesh: &TriMesh, order: usize) -> Result<Self> {
        let basis = LagrangeBasis::new(order)?;
        let k = order;
        let nv = mesh.num_vertices();
        let mut node_coords: Vec<Point> = mesh.vertices().to_vec();
        let mut edge_start: HashMap<(usize, usize), usize> = HashMap::new();
        let mut element_dofs = Vec::with_capacity(mesh.num_triangles());
        let mut next = nv;
        for tri in mesh.triangles() {
            let mut dofs: Vec<usize> = tri.to_vec();
            let x = tri.map(|v| mesh.vertices()[v]);
            for [a, b] in EDGES {
                let (ga, gb) = (tri[a], tri[b]);
                let key = (ga.min(gb), ga.max(gb));
                let start = *edge_start.entry(key).or_insert_with(|| {
                    let s = next;
                    let (p, q) = (mesh.vertices()[key.0], mesh.vertices()[key.1]);
                    for j in 1..k {
                        let t = j as f64 / k as f64;
                        node_coords.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                    }
                    next += k - 1;
                    s
                });
                for j in 1..k {
                    let jj = if ga < gb { j } else { k - j };
                    dofs.push(start + jj - 1);
                }
            }
            let map = |r: [f64; 2]| {
                [
                    x[0][0] + r[0] * (x[1][0] - x[0][0]) + r[1] * (x[2][0] - x[0][0]),
                    x[0][1] + r[0] * (x[1][1] - x[0][1]) + r[1] * (x[2][1] - x[0][1]),
                ]
            };
            let first_interior = 3 + 3 * (k - 1);
            for r in &basis.nodes()[first_interior..] {
                dofs.push(next);
                node_coords.push(map(*r));
                next += 1;
            }
            element_dofs.push(dofs);
        }

        let mut panel_dofs = Vec::with_capacity(mesh.panels().len());
        let mut is_dirichlet = vec![false; next];
        for p in mesh.panels() {
            let [a, b] = p.vertices;
            let start = edge_start[&(a.min(b), a.max(b))];
            let mut d = vec![a];
            for j in 1..k {
                let jj = if a < b { j } else { k - j };
                d.push(start + jj - 1);
            }
            d.push(b);
            if p.label == BoundaryLabel::Dirichlet {
                for &i in &d {
                    is_dirichlet[i] = true;
                }
            }
            panel_dofs.push(d);
        }
        let dirichlet: Vec<usize> = (0..next).filter(|&i| is_dirichlet[i]).collect();
        let free: Vec<usize> = (0..next).filter(|&i| !is_dirichlet[i]).collect();
        Ok(FemSpaces {
            mesh: mesh.clone(),
            basis,
            element_dofs,
            node_coords,
            panel_dofs,
            dirichlet,
            free,
        })
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn order(&self) -> usize {
        self.basis.order()
    }

    pub fn basis(&self) -> &LagrangeBasis {
        &self.basis
    }

    pub fn num_scalar(&self) -> usize {
        self.node_coords.len()
    }

    pub fn num_vector(&self) -> usize {
        2 * self.node_coords.len()
    }

    pub fn element_dofs(&self, t: usize) -> &[usize] {
        &self.element_dofs[t]
    }

    pub fn node_coords(&self) -> &[Point] {
        &self.node_coords
    }

    /// Scalar dofs on panel `p`, ordered from its start vertex to its end
    /// vertex (`k + 1` entries at parameters `j / k`).
    pub fn panel_dofs(&self, p: usize) -> &[usize] {
        &self.panel_dofs[p]
    }

    /// Scalar dofs on closed Dirichlet panels, ascending.
    pub fn dirichlet_dofs(&self) -> &[usize] {
        &self.dirichlet
    }

    /// Scalar dofs not on Dirichlet panels, ascending.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    /// Nodal interpolant of a scalar function.
    pub fn interpolate(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        self.node_coords.iter().map(|&p| f(p)).collect()
    }

    /// Nodal interpolant of a vector field in blocked layout.
    pub fn interpolate_vector(&self, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
        let n = self.num_scalar();
        let mut out = vec![0.0; 2 * n];
        for (i, &p) in self.node_coords.iter().enumerate() {
            let v = f(p);
            out[i] = v[0];
            out[n + i] = v[1];
        }
        out
    }

    /// Evaluates a scalar finite element function at a point of the solid.
    pub fn evaluate(&self, dofs: &[f64], p: Point) -> Option<f64> {
        let (t, bary) = self.mesh.locate(p)?;
        let r = [bary[1], bary[2]];
        let v = self.basis.values(r);
        Some(
            self.element_dofs[t]
                .iter()
                .zip(v)
                .map(|(&d, vi)| dofs[d] * vi)
                .sum(),
        )
    }
}
