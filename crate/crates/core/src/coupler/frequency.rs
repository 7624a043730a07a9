//! The coupled Laplace-domain system at one CQ frequency.
//!
//! Unknowns are the vector displacement `u`, the electric potential on the
//! free dofs `psi_f`, and the boundary densities `lambda` (in `X_h`) and
//! `phi` (in `Y_h`). With `T` the normal-trace coupling and `Mxy` the mixed
//! boundary mass, the rows are
//!
//! ```text
//! (s^2 M_rho + s M_omega + K_C) u + K_e[:, f] psi_f - s T^T phi = -s B0 beta0 - K_e[:, D] mu
//! -K_e[:, f]^T u + K_kappa[f, f] psi_f                          = -N eta - K_kappa[f, D] mu
//! s T u + kappa0 (-Mxy^T / 2 + Kt) lambda + kappa0 W phi         = -B1 beta1
//! V lambda + (Mxy / 2 - K) phi                                   = 0
//! ```
//!
//! with the layer operators evaluated at `s / c`. The interior rows are
//! eliminated with a sparse LU, leaving a dense system in `(lambda, phi)`.
//! In acoustic-only mode the first two rows and the `s T u` term are dropped.

use super::discretization::Discretization;
use crate::bem::{assemble_operators_with, LayerOperators, QuadratureSettings};
use crate::sparse::{complex_block_matrix, CsrMatrix};
use crate::{Error, Result};
use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::SparseColMat;
use faer::Mat;
use num_complex::Complex64;

type C = Complex64;

/// Transformed data at one frequency.
#[derive(Clone, Debug, Default)]
pub struct FrequencyData {
    /// `beta0` at the boundary nodes.
    pub beta0: Vec<C>,
    /// `beta1` at the boundary nodes.
    pub beta1: Vec<C>,
    /// `eta` at the Neumann nodes.
    pub eta: Vec<C>,
    /// `mu` on the Dirichlet dofs of the electric potential.
    pub mu: Vec<C>,
}

/// Solution at one frequency; `psi` includes the Dirichlet values.
#[derive(Clone, Debug)]
pub struct FrequencySolution {
    pub u: Vec<C>,
    pub psi: Vec<C>,
    pub lambda: Vec<C>,
    pub phi: Vec<C>,
}

/// Frequency-independent interior blocks split by free/Dirichlet dofs.
struct InteriorBlocks {
    n_u: usize,
    free: Vec<usize>,
    k_e_f: CsrMatrix,
    k_e_f_t: CsrMatrix,
    k_e_d: CsrMatrix,
    k_kappa_ff: CsrMatrix,
    k_kappa_fd: CsrMatrix,
}

/// Builds [`FrequencyBlockSystem`]s for a fixed discretization, sharing the
/// symbolic sparse factorization between frequencies.
pub struct FrequencyAssembler<'a> {
    disc: &'a Discretization,
    interior: Option<(InteriorBlocks, SymbolicLu<usize>)>,
    settings: QuadratureSettings,
}

/// Assembled and factorized system at one frequency.
pub struct FrequencyBlockSystem<'a> {
    disc: &'a Discretization,
    assembler: &'a FrequencyAssembler<'a>,
    pub s: C,
    pub ops: LayerOperators,
    interior_lu: Option<Lu<usize, C>>,
    /// `A^{-1} [T^T; 0]`, interior rows by `Y_h` columns.
    z: Option<Mat<C>>,
    boundary_lu: PartialPivLu<C>,
}

impl<'a> FrequencyAssembler<'a> {
    pub fn new(disc: &'a Discretization) -> Result<Self> {
        Self::with_settings(disc, QuadratureSettings::default())
    }

    pub fn with_settings(disc: &'a Discretization, settings: QuadratureSettings) -> Result<Self> {
        let interior = match &disc.solid {
            None => None,
            Some(solid) => {
                let n = solid.spaces.num_scalar();
                let free = solid.spaces.free_dofs().to_vec();
                let dir = solid.spaces.dirichlet_dofs().to_vec();
                let all_u: Vec<usize> = (0..2 * n).collect();
                let b = &solid.blocks;
                let k_e_f = b.k_e.select(&all_u, &free);
                let blocks = InteriorBlocks {
                    n_u: 2 * n,
                    k_e_f_t: k_e_f.transpose(),
                    k_e_f,
                    k_e_d: b.k_e.select(&all_u, &dir),
                    k_kappa_ff: b.k_kappa.select(&free, &free),
                    k_kappa_fd: b.k_kappa.select(&free, &dir),
                    free,
                };
                let pattern = interior_matrix(disc, &blocks, C::new(1.0, 1.0));
                let symbolic = SymbolicLu::try_new(pattern.symbolic())
                    .map_err(|e| Error::Singular(format!("symbolic interior factorization: {e:?}")))?;
                Some((blocks, symbolic))
            }
        };
        Ok(FrequencyAssembler {
            disc,
            interior,
            settings,
        })
    }

    fn blocks(&self) -> Option<&InteriorBlocks> {
        self.interior.as_ref().map(|(b, _)| b)
    }

    pub fn discretization(&self) -> &'a Discretization {
        self.disc
    }

    /// Assembles and factorizes the system at `s`.
    pub fn system(&'a self, s: C) -> Result<FrequencyBlockSystem<'a>> {
        if !(s.re > 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!("frequency must have Re s > 0, got {s}")));
        }
        let disc = self.disc;
        let kappa0 = disc.material.kappa0;
        let ops = assemble_operators_with(&disc.curve, &disc.bspaces, s / disc.sound_speed(), &self.settings)?;
        let (nx, ny) = (disc.num_x(), disc.num_y());

        let (interior_lu, z, tz) = match (&self.interior, &disc.solid) {
            (Some((blocks, symbolic)), Some(solid)) => {
                let a = interior_matrix(disc, blocks, s);
                let lu = Lu::try_new_with_symbolic(symbolic.clone(), a.as_ref())
                    .map_err(|e| Error::Singular(format!("interior block at s = {s}: {e:?}")))?;
                let n_int = a.nrows();
                let mut z = Mat::<C>::zeros(n_int, ny);
                for (j, i, v) in solid.trace.iter() {
                    z[(i, j)] = C::new(v, 0.0);
                }
                lu.solve_in_place(z.as_mut());
                // T Z restricted to the displacement rows
                let mut tz = Mat::<C>::zeros(ny, ny);
                for (j, i, v) in solid.trace.iter() {
                    for k in 0..ny {
                        tz[(j, k)] += z[(i, k)] * v;
                    }
                }
                (Some(lu), Some(z), Some(tz))
            }
            _ => (None, None, None),
        };

        let n = nx + ny;
        let mut m = Mat::<C>::zeros(n, n);
        for i in 0..nx {
            for j in 0..nx {
                m[(i, j)] = ops.v[(i, j)];
            }
            for j in 0..ny {
                m[(i, nx + j)] = -ops.k[(i, j)];
            }
        }
        for (i, j, v) in disc.mixed_mass.iter() {
            m[(i, nx + j)] += C::new(0.5 * v, 0.0);
            m[(nx + j, i)] += C::new(-0.5 * kappa0 * v, 0.0);
        }
        let s2 = s * s;
        for i in 0..ny {
            for j in 0..nx {
                m[(nx + i, j)] += ops.kt[(i, j)] * kappa0;
            }
            for j in 0..ny {
                let mut v = ops.w[(i, j)] * kappa0;
                if let Some(tz) = &tz {
                    v += s2 * tz[(i, j)];
                }
                m[(nx + i, nx + j)] = v;
            }
        }
        let boundary_lu = m.partial_piv_lu();
        Ok(FrequencyBlockSystem {
            disc,
            assembler: self,
            s,
            ops,
            interior_lu,
            z,
            boundary_lu,
        })
    }
}

fn interior_matrix(disc: &Discretization, blocks: &InteriorBlocks, s: C) -> SparseColMat<usize, C> {
    let solid = disc.solid.as_ref().expect("interior blocks need a solid");
    let b = &solid.blocks;
    let nf = blocks.free.len();
    let n_int = blocks.n_u + nf;
    let one = C::new(1.0, 0.0);
    let mut parts: Vec<(usize, usize, &CsrMatrix, C)> = vec![
        (0, 0, &b.m_rho, s * s),
        (0, 0, &b.k_c, one),
        (0, blocks.n_u, &blocks.k_e_f, one),
        (blocks.n_u, 0, &blocks.k_e_f_t, -one),
        (blocks.n_u, blocks.n_u, &blocks.k_kappa_ff, one),
    ];
    if b.m_omega.nnz() > 0 {
        parts.push((0, 0, &b.m_omega, s));
    }
    complex_block_matrix(n_int, n_int, &parts)
}

fn matvec(a: &CsrMatrix, x: &[C]) -> Vec<C> {
    a.matvec_complex(x)
}

impl FrequencyBlockSystem<'_> {
    fn check(&self, data: &FrequencyData) -> Result<()> {
        let disc = self.disc;
        let nq = disc.nodes.len();
        if data.beta0.len() != nq || data.beta1.len() != nq {
            return Err(Error::Dimension(format!("boundary data needs {nq} node samples")));
        }
        if let Some(solid) = &disc.solid {
            if data.eta.len() != solid.neumann.nodes.len() {
                return Err(Error::Dimension("Neumann data length".into()));
            }
            if data.mu.len() != solid.spaces.dirichlet_dofs().len() {
                return Err(Error::Dimension("Dirichlet data length".into()));
            }
        }
        Ok(())
    }

    pub fn solve(&self, data: &FrequencyData) -> Result<FrequencySolution> {
        self.check(data)?;
        let disc = self.disc;
        let s = self.s;
        let (nx, ny) = (disc.num_x(), disc.num_y());
        let b1 = matvec(&disc.beta1_load, &data.beta1);
        let mut rhs = Mat::<C>::zeros(nx + ny, 1);
        for j in 0..ny {
            rhs[(nx + j, 0)] = -b1[j];
        }

        // interior particular solution x0 = A^{-1} f_int
        let mut x0 = None;
        if let (Some(lu), Some(blocks), Some(solid)) = (&self.interior_lu, self.assembler.blocks(), &disc.solid) {
            let b0 = matvec(&solid.beta0_load, &data.beta0);
            let ked = matvec(&blocks.k_e_d, &data.mu);
            let eta = matvec(&solid.neumann.matrix, &data.eta);
            let kfd = matvec(&blocks.k_kappa_fd, &data.mu);
            let n_int = blocks.n_u + blocks.free.len();
            let mut f = Mat::<C>::zeros(n_int, 1);
            for i in 0..blocks.n_u {
                f[(i, 0)] = -s * b0[i] - ked[i];
            }
            for (k, &d) in blocks.free.iter().enumerate() {
                f[(blocks.n_u + k, 0)] = -eta[d] - kfd[k];
            }
            lu.solve_in_place(f.as_mut());
            let tu: Vec<C> = {
                let u: Vec<C> = (0..blocks.n_u).map(|i| f[(i, 0)]).collect();
                matvec(&solid.trace, &u)
            };
            for j in 0..ny {
                rhs[(nx + j, 0)] -= s * tu[j];
            }
            x0 = Some(f);
        }

        self.boundary_lu.solve_in_place(rhs.as_mut());
        let lambda: Vec<C> = (0..nx).map(|i| rhs[(i, 0)]).collect();
        let phi: Vec<C> = (0..ny).map(|j| rhs[(nx + j, 0)]).collect();
        if lambda.iter().chain(&phi).any(|v| !v.is_finite()) {
            return Err(Error::Singular(format!("boundary system at s = {s}")));
        }

        let (u, psi) = match (x0, &self.z, self.assembler.blocks(), &disc.solid) {
            (Some(mut x), Some(z), Some(blocks), Some(solid)) => {
                let n_int = x.nrows();
                for i in 0..n_int {
                    let mut acc = C::new(0.0, 0.0);
                    for (j, p) in phi.iter().enumerate() {
                        acc += z[(i, j)] * p;
                    }
                    x[(i, 0)] += s * acc;
                }
                let u: Vec<C> = (0..blocks.n_u).map(|i| x[(i, 0)]).collect();
                let mut psi = vec![C::new(0.0, 0.0); solid.spaces.num_scalar()];
                for (k, &f) in blocks.free.iter().enumerate() {
                    psi[f] = x[(blocks.n_u + k, 0)];
                }
                for (&d, &v) in solid.spaces.dirichlet_dofs().iter().zip(&data.mu) {
                    psi[d] = v;
                }
                if u.iter().chain(&psi).any(|v| !v.is_finite()) {
                    return Err(Error::Singular(format!("interior system at s = {s}")));
                }
                (u, psi)
            }
            _ => (Vec::new(), Vec::new()),
        };
        Ok(FrequencySolution { u, psi, lambda, phi })
    }
}
