//! The discrete electric solve `u, eta, mu -> psi`.

use super::assembly::FemBlocks;
use super::spaces::FemSpaces;
use crate::sparse::CsrMatrix;
use crate::{Error, Result};
use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::{Mat, Side};

/// Factorized dielectric stiffness on the free (non-Dirichlet) dofs.
pub struct ElectricSolver {
    free: Vec<usize>,
    dirichlet: Vec<usize>,
    n: usize,
    k_fd: CsrMatrix,
    k_e_free_t: CsrMatrix,
    llt: Option<Llt<usize, f64>>,
}

impl ElectricSolver {
    pub fn new(blocks: &FemBlocks, spaces: &FemSpaces) -> Result<Self> {
        let free = spaces.free_dofs().to_vec();
        let dirichlet = spaces.dirichlet_dofs().to_vec();
        let n = spaces.num_scalar();
        let k_ff = blocks.k_kappa.select(&free, &free);
        let k_fd = blocks.k_kappa.select(&free, &dirichlet);
        let all_vec: Vec<usize> = (0..2 * n).collect();
        let k_e_free_t = blocks.k_e.select(&all_vec, &free).transpose();
        let llt = if free.is_empty() {
            None
        } else {
            Some(k_ff.to_faer().sp_cholesky(Side::Lower).map_err(|e| {
                Error::Singular(format!("dielectric stiffness on free dofs: {e:?}"))
            })?)
        };
        Ok(ElectricSolver {
            free,
            dirichlet,
            n,
            k_fd,
            k_e_free_t,
            llt,
        })
    }

    /// Returns `psi` with `psi = mu` on the Dirichlet dofs and
    /// `(-e^T eps(u) + kappa grad psi, grad phi) = -<eta, phi>` on free dofs.
    ///
    /// `neumann_load` is the assembled `<eta, gamma phi_i>` vector (length
    /// `num_scalar`), `mu` holds values on [`FemSpaces::dirichlet_dofs`].
    pub fn solve(&self, u: &[f64], neumann_load: Option<&[f64]>, mu: &[f64]) -> Result<Vec<f64>> {
        if u.len() != 2 * self.n || mu.len() != self.dirichlet.len() {
            return Err(Error::Dimension("electric solve input sizes".into()));
        }
        let mut psi = vec![0.0; self.n];
        for (&d, &v) in self.dirichlet.iter().zip(mu) {
            psi[d] = v;
        }
        let Some(llt) = &self.llt else {
            return Ok(psi);
        };
        let keu = self.k_e_free_t.matvec(u);
        let lift = self.k_fd.matvec(mu);
        let mut rhs = Mat::<f64>::from_fn(self.free.len(), 1, |i, _| {
            let load = neumann_load.map_or(0.0, |l| l[self.free[i]]);
            keu[i] - load - lift[i]
        });
        llt.solve_in_place(rhs.as_mut());
        for (i, &f) in self.free.iter().enumerate() {
            psi[f] = rhs[(i, 0)];
        }
        Ok(psi)
    }
}
