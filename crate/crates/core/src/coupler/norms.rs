//! Norm histories of a simulation result.

use super::discretization::Discretization;
use super::scenario::SimulationResult;
use crate::bem::assemble_operators;
use crate::{Error, Result};
use num_complex::Complex64;

/// Real matrices realizing the boundary surrogate norms:
/// `|lambda|^2_{-1/2} = <V(1) lambda, lambda>` and
/// `|phi|^2_{1/2} = <W(1) phi, phi> + |phi|^2_{L2}`.
pub struct BoundaryNormOperators {
    v1: Vec<Vec<f64>>,
    phi_form: Vec<Vec<f64>>,
}

impl BoundaryNormOperators {
    pub fn new(disc: &Discretization) -> Result<Self> {
        let ops = assemble_operators(&disc.curve, &disc.bspaces, Complex64::new(1.0, 0.0))?;
        let real = |m: &faer::Mat<Complex64>| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect()
        };
        let v1 = real(&ops.v);
        let mut phi_form = real(&ops.w);
        for (i, j, v) in disc.y_mass.iter() {
            phi_form[i][j] += v;
        }
        Ok(BoundaryNormOperators { v1, phi_form })
    }

    pub fn lambda_norm(&self, lambda: &[f64]) -> f64 {
        quadratic(&self.v1, lambda).max(0.0).sqrt()
    }

    pub fn phi_norm(&self, phi: &[f64]) -> f64 {
        quadratic(&self.phi_form, phi).max(0.0).sqrt()
    }
}

fn quadratic(m: &[Vec<f64>], x: &[f64]) -> f64 {
    m.iter()
        .zip(x)
        .map(|(row, xi)| xi * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
        .sum()
}

/// One row per time step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormHistory {
    pub times: Vec<f64>,
    pub psi_l2: Vec<f64>,
    pub psi_grad_l2: Vec<f64>,
    pub u_l2: Vec<f64>,
    pub u_h1: Vec<f64>,
    pub phi_half: Vec<f64>,
    pub lambda_minus_half: Vec<f64>,
}

impl NormHistory {
    pub const COLUMNS: [&'static str; 7] = ["t", "psi_l2", "grad_psi_l2", "u_l2", "u_h1", "phi_h12", "lambda_hm12"];

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The six norm columns in output order.
    pub fn columns(&self) -> [&[f64]; 6] {
        [
            &self.psi_l2,
            &self.psi_grad_l2,
            &self.u_l2,
            &self.u_h1,
            &self.phi_half,
            &self.lambda_minus_half,
        ]
    }

    pub fn row(&self, n: usize) -> [f64; 7] {
        [
            self.times[n],
            self.psi_l2[n],
            self.psi_grad_l2[n],
            self.u_l2[n],
            self.u_h1[n],
            self.phi_half[n],
            self.lambda_minus_half[n],
        ]
    }
}

/// Norms of all unknown histories. Interior norms are zero in acoustic-only
/// mode.
pub fn norm_timeseries(result: &SimulationResult, disc: &Discretization) -> Result<NormHistory> {
    let bops = BoundaryNormOperators::new(disc)?;
    norm_timeseries_with(result, disc, &bops)
}

pub fn norm_timeseries_with(
    result: &SimulationResult,
    disc: &Discretization,
    bops: &BoundaryNormOperators,
) -> Result<NormHistory> {
    let steps = result.times.len();
    if result.lambda.len() != steps || result.phi.len() != steps {
        return Err(Error::Dimension("result histories have inconsistent lengths".into()));
    }
    let mut h = NormHistory {
        times: result.times.clone(),
        ..Default::default()
    };
    for n in 0..steps {
        let (pl2, pgrad, ul2, uh1) = match &disc.solid {
            Some(solid) => {
                let b = &solid.blocks;
                let (u, psi) = (&result.u[n], &result.psi[n]);
                if u.len() != 2 * b.mass.nrows() || psi.len() != b.mass.nrows() {
                    return Err(Error::Dimension("FEM histories do not match the discretization".into()));
                }
                let ul2 = b.vector_l2_squared(u);
                (
                    b.mass.quadratic_form(psi).max(0.0).sqrt(),
                    b.laplace.quadratic_form(psi).max(0.0).sqrt(),
                    ul2.max(0.0).sqrt(),
                    (ul2 + b.vector_h1_seminorm_squared(u)).max(0.0).sqrt(),
                )
            }
            None => (0.0, 0.0, 0.0, 0.0),
        };
        h.psi_l2.push(pl2);
        h.psi_grad_l2.push(pgrad);
        h.u_l2.push(ul2);
        h.u_h1.push(uh1);
        h.phi_half.push(bops.phi_norm(&result.phi[n]));
        h.lambda_minus_half.push(bops.lambda_norm(&result.lambda[n]));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{Coefficient, PiezoMaterial};
    use crate::meshio::BoundaryCurve;
    use rand::{Rng, SeedableRng};

    fn disc() -> Discretization {
        let curve = BoundaryCurve::circle(24, 1.0, [0.0, 0.0]);
        Discretization::acoustic_only(curve, PiezoMaterial::reference(Coefficient::Constant(1.0)), 1).unwrap()
    }

    #[test]
    fn lambda_surrogate_is_nonnegative() {
        let d = disc();
        let ops = BoundaryNormOperators::new(&d).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x: Vec<f64> = (0..d.num_x()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(quadratic(&ops.v1, &x) > 0.0);
            let y: Vec<f64> = (0..d.num_y()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(quadratic(&ops.phi_form, &y) > 0.0);
        }
    }

    #[test]
    fn constant_phi_norm_is_boundary_length() {
        // W annihilates constants up to s^2 terms, so the L2 part dominates
        let d = disc();
        let ops = BoundaryNormOperators::new(&d).unwrap();
        let one = vec![1.0; d.num_y()];
        let len: f64 = d.curve.panels.iter().map(|p| p.length).sum();
        let w1: f64 = quadratic(&ops.phi_form, &one) - len;
        assert!(w1 > 0.0 && w1 < len, "{w1}");
    }

    #[test]
    fn zero_fields_give_zero_norms() {
        let d = disc();
        let r = SimulationResult {
            times: vec![0.0, 0.1],
            u: vec![vec![]; 2],
            psi: vec![vec![]; 2],
            lambda: vec![vec![0.0; d.num_x()]; 2],
            phi: vec![vec![0.0; d.num_y()]; 2],
            receivers: vec![],
            scattered: vec![vec![]; 2],
            total: vec![vec![]; 2],
            snapshots: vec![],
        };
        let h = norm_timeseries(&r, &d).unwrap();
        assert!(h.columns().iter().all(|c| c.iter().all(|&v| v == 0.0)));
    }
}
