//! Assembly of the interior finite element blocks.

use super::spaces::FemSpaces;
use crate::bem::spaces::BoundarySpaces;
use crate::fem::lagrange::lagrange_1d;
use crate::material::{Coefficient, PiezoMaterial};
use crate::meshio::{BoundaryCurve, BoundaryLabel, Point};
use crate::quadrature::{gauss_legendre, triangle_rule};
use crate::sparse::CsrMatrix;
use crate::Result;
use rayon::prelude::*;

/// Assembled interior matrices. Vector blocks use the blocked layout of
/// [`FemSpaces`].
#[derive(Clone, Debug)]
pub struct FemBlocks {
    /// `(rho u, w)`, vector.
    pub m_rho: CsrMatrix,
    /// `(omega u, w)`, vector; all zero when there is no damping.
    pub m_omega: CsrMatrix,
    /// `(C eps(u), eps(w))`.
    pub k_c: CsrMatrix,
    /// Rows vector dofs, columns scalar dofs: `(e grad phi_j, eps(w_i))`.
    pub k_e: CsrMatrix,
    /// `(kappa_psi grad psi, grad phi)`.
    pub k_kappa: CsrMatrix,
    /// Unweighted scalar mass, for norms.
    pub mass: CsrMatrix,
    /// Scalar Laplacian stiffness `(grad psi, grad phi)`, for norms.
    pub laplace: CsrMatrix,
}

struct ElementData {
    rho: Vec<f64>,
    omega: Vec<f64>,
}

struct Local {
    dofs: Vec<usize>,
    m_rho: Vec<f64>,
    m_omega: Vec<f64>,
    mass: Vec<f64>,
    laplace: Vec<f64>,
    kappa: Vec<f64>,
    /// `(2 nb) x (2 nb)` with index `c * nb + i`.
    k_c: Vec<f64>,
    /// `(2 nb) x nb`.
    k_e: Vec<f64>,
}

fn eval_at_points(c: &Coefficient, pts: &[Point]) -> Result<Vec<f64>> {
    c.eval_many(pts)
}

impl FemBlocks {
    pub fn assemble(spaces: &FemSpaces, material: &PiezoMaterial) -> Result<Self> {
        let mesh = spaces.mesh();
        let basis = spaces.basis();
        let k = spaces.order();
        let rule = triangle_rule(2 * k + 2);
        let nq = rule.len();
        let nb = basis.len();
        let ref_vals: Vec<Vec<f64>> = rule.points.iter().map(|&p| basis.values(p)).collect();
        let ref_grads: Vec<Vec<[f64; 2]>> = rule.points.iter().map(|&p| basis.gradients(p)).collect();

        let mut qpts = Vec::with_capacity(mesh.num_triangles() * nq);
        for tri in mesh.triangles() {
            let x = tri.map(|v| mesh.vertices()[v]);
            for r in &rule.points {
                qpts.push([
                    x[0][0] + r[0] * (x[1][0] - x[0][0]) + r[1] * (x[2][0] - x[0][0]),
                    x[0][1] + r[0] * (x[1][1] - x[0][1]) + r[1] * (x[2][1] - x[0][1]),
                ]);
            }
        }
        let rho = eval_at_points(&material.rho, &qpts)?;
        let damped = !material.omega.is_zero();
        let omega = if damped {
            eval_at_points(&material.omega, &qpts)?
        } else {
            Vec::new()
        };
        let data: Vec<ElementData> = (0..mesh.num_triangles())
            .map(|t| ElementData {
                rho: rho[t * nq..(t + 1) * nq].to_vec(),
                omega: if damped {
                    omega[t * nq..(t + 1) * nq].to_vec()
                } else {
                    vec![0.0; nq]
                },
            })
            .collect();

        let c = material.c_voigt;
        let e = material.e_voigt;
        let kap = material.kappa_psi;
        let locals: Vec<Local> = (0..mesh.num_triangles())
            .into_par_iter()
            .map(|t| {
                let tri = mesh.triangles()[t];
                let x = tri.map(|v| mesh.vertices()[v]);
                let j00 = x[1][0] - x[0][0];
                let j01 = x[2][0] - x[0][0];
                let j10 = x[1][1] - x[0][1];
                let j11 = x[2][1] - x[0][1];
                let det = j00 * j11 - j01 * j10;
                let mut loc = Local {
                    dofs: spaces.element_dofs(t).to_vec(),
                    m_rho: vec![0.0; nb * nb],
                    m_omega: vec![0.0; nb * nb],
                    mass: vec![0.0; nb * nb],
                    laplace: vec![0.0; nb * nb],
                    kappa: vec![0.0; nb * nb],
                    k_c: vec![0.0; 4 * nb * nb],
                    k_e: vec![0.0; 2 * nb * nb],
                };
                let d = &data[t];
                for q in 0..nq {
                    let w = rule.weights[q] * det;
                    let phi = &ref_vals[q];
                    let g: Vec<[f64; 2]> = ref_grads[q]
                        .iter()
                        .map(|gr| {
                            [
                                (j11 * gr[0] - j10 * gr[1]) / det,
                                (-j01 * gr[0] + j00 * gr[1]) / det,
                            ]
                        })
                        .collect();
                    // engineering strain of phi_i e_c
                    let eps = |cmp: usize, i: usize| -> [f64; 3] {
                        if cmp == 0 {
                            [g[i][0], 0.0, g[i][1]]
                        } else {
                            [0.0, g[i][1], g[i][0]]
                        }
                    };
                    let ceps: Vec<[f64; 3]> = (0..2 * nb)
                        .map(|ci| {
                            let v = eps(ci / nb, ci % nb);
                            [
                                c[0][0] * v[0] + c[0][1] * v[1] + c[0][2] * v[2],
                                c[1][0] * v[0] + c[1][1] * v[1] + c[1][2] * v[2],
                                c[2][0] * v[0] + c[2][1] * v[1] + c[2][2] * v[2],
                            ]
                        })
                        .collect();
                    let etg: Vec<[f64; 3]> = g
                        .iter()
                        .map(|gj| {
                            [
                                e[0][0] * gj[0] + e[1][0] * gj[1],
                                e[0][1] * gj[0] + e[1][1] * gj[1],
                                e[0][2] * gj[0] + e[1][2] * gj[1],
                            ]
                        })
                        .collect();
                    for i in 0..nb {
                        for j in 0..nb {
                            let pp = phi[i] * phi[j] * w;
                            loc.mass[i * nb + j] += pp;
                            loc.m_rho[i * nb + j] += pp * d.rho[q];
                            loc.m_omega[i * nb + j] += pp * d.omega[q];
                            let gg = g[i][0] * g[j][0] + g[i][1] * g[j][1];
                            loc.laplace[i * nb + j] += gg * w;
                            let kg = [
                                kap[0][0] * g[j][0] + kap[0][1] * g[j][1],
                                kap[1][0] * g[j][0] + kap[1][1] * g[j][1],
                            ];
                            loc.kappa[i * nb + j] += (g[i][0] * kg[0] + g[i][1] * kg[1]) * w;
                        }
                    }
                    for a in 0..2 * nb {
                        let ea = eps(a / nb, a % nb);
                        for b in 0..2 * nb {
                            let cb = ceps[b];
                            loc.k_c[a * 2 * nb + b] +=
                                (ea[0] * cb[0] + ea[1] * cb[1] + ea[2] * cb[2]) * w;
                        }
                        for j in 0..nb {
                            let s = etg[j];
                            loc.k_e[a * nb + j] += (ea[0] * s[0] + ea[1] * s[1] + ea[2] * s[2]) * w;
                        }
                    }
                }
                loc
            })
            .collect();

        let n = spaces.num_scalar();
        let mut t_rho = Vec::new();
        let mut t_omega = Vec::new();
        let mut t_mass = Vec::new();
        let mut t_lap = Vec::new();
        let mut t_kap = Vec::new();
        let mut t_kc = Vec::new();
        let mut t_ke = Vec::new();
        for loc in &locals {
            for (i, &gi) in loc.dofs.iter().enumerate() {
                for (j, &gj) in loc.dofs.iter().enumerate() {
                    let idx = i * nb + j;
                    t_mass.push((gi, gj, loc.mass[idx]));
                    t_lap.push((gi, gj, loc.laplace[idx]));
                    t_kap.push((gi, gj, loc.kappa[idx]));
                    for cmp in 0..2 {
                        t_rho.push((cmp * n + gi, cmp * n + gj, loc.m_rho[idx]));
                        if damped {
                            t_omega.push((cmp * n + gi, cmp * n + gj, loc.m_omega[idx]));
                        }
                    }
                }
            }
            for a in 0..2 * nb {
                let ga = (a / nb) * n + loc.dofs[a % nb];
                for b in 0..2 * nb {
                    let gb = (b / nb) * n + loc.dofs[b % nb];
                    t_kc.push((ga, gb, loc.k_c[a * 2 * nb + b]));
                }
                for (j, &gj) in loc.dofs.iter().enumerate() {
                    t_ke.push((ga, gj, loc.k_e[a * nb + j]));
                }
            }
        }
        Ok(FemBlocks {
            m_rho: CsrMatrix::from_triplets(2 * n, 2 * n, &t_rho),
            m_omega: CsrMatrix::from_triplets(2 * n, 2 * n, &t_omega),
            k_c: CsrMatrix::from_triplets(2 * n, 2 * n, &t_kc),
            k_e: CsrMatrix::from_triplets(2 * n, n, &t_ke),
            k_kappa: CsrMatrix::from_triplets(n, n, &t_kap),
            mass: CsrMatrix::from_triplets(n, n, &t_mass),
            laplace: CsrMatrix::from_triplets(n, n, &t_lap),
        })
    }

    /// `(u, u)` for a vector field in blocked layout.
    pub fn vector_l2_squared(&self, u: &[f64]) -> f64 {
        let n = self.mass.nrows();
        self.mass.quadratic_form(&u[..n]) + self.mass.quadratic_form(&u[n..])
    }

    /// `(grad u, grad u)` summed over components.
    pub fn vector_h1_seminorm_squared(&self, u: &[f64]) -> f64 {
        let n = self.mass.nrows();
        self.laplace.quadratic_form(&u[..n]) + self.laplace.quadratic_form(&u[n..])
    }
}

/// Trace coupling `T[j, i] = <zeta_j, gamma w_i . nu>` between `Y_h` and the
/// vector FEM space. The curve must be the boundary of the FEM mesh.
pub fn trace_coupling(spaces: &FemSpaces, bspaces: &BoundarySpaces, curve: &BoundaryCurve) -> CsrMatrix {
    let k = spaces.order();
    let n = spaces.num_scalar();
    let g = gauss_legendre((k + bspaces.y_order()) / 2 + 1);
    let mut t = Vec::new();
    for (p, panel) in curve.panels.iter().enumerate() {
        let fem_dofs = spaces.panel_dofs(p);
        let y_dofs = bspaces.y_panel_dofs(p);
        for (s, w) in g.iter() {
            let fv = lagrange_1d(k, s);
            let yv = bspaces.y_values(s);
            for (a, ya) in yv.iter().enumerate() {
                for (b, fb) in fv.iter().enumerate() {
                    let base = w * panel.length * ya * fb;
                    for cmp in 0..2 {
                        t.push((y_dofs[a], cmp * n + fem_dofs[b], base * panel.normal[cmp]));
                    }
                }
            }
        }
    }
    CsrMatrix::from_triplets(bspaces.num_y(), 2 * n, &t)
}

/// Sampling nodes and Galerkin weights for Neumann data on the Neumann panels:
/// the load vector is `matrix * samples`, with samples taken at `nodes`.
#[derive(Clone, Debug)]
pub struct NeumannLoad {
    pub nodes: Vec<Point>,
    pub matrix: CsrMatrix,
}

impl NeumannLoad {
    pub fn new(spaces: &FemSpaces, curve: &BoundaryCurve) -> Self {
        let k = spaces.order();
        let g = gauss_legendre(k + 2);
        let mut nodes = Vec::new();
        let mut t = Vec::new();
        for (p, panel) in curve.panels.iter().enumerate() {
            if panel.label != BoundaryLabel::Neumann {
                continue;
            }
            let dofs = spaces.panel_dofs(p);
            for (s, w) in g.iter() {
                let q = nodes.len();
                nodes.push(panel.point_at(s));
                for (b, fb) in lagrange_1d(k, s).iter().enumerate() {
                    t.push((dofs[b], q, w * panel.length * fb));
                }
            }
        }
        let nq = nodes.len();
        NeumannLoad {
            nodes,
            matrix: CsrMatrix::from_triplets(spaces.num_scalar(), nq, &t),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `<eta, gamma phi_i>_{Gamma_N}` for samples of `eta` at the nodes.
    pub fn load(&self, samples: &[f64]) -> Vec<f64> {
        self.matrix.matvec(samples)
    }
}
