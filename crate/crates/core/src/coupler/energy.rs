//! Energy check of the interior piezoelectric system with the boundary
//! exchange switched off.
//!
//! The semidiscrete system `M u'' + M_w u' + K_C u + K_e psi = 0`,
//! `K_kappa psi = K_e^T u` (psi vanishing on the Dirichlet dofs) is integrated
//! by the trapezoidal rule in midpoint form. With `vb = (v^n + v^{n+1})/2`
//! and `psib` the midpoint potential, each step solves
//!
//! ```text
//! (2M + dt M_w + dt^2/2 K_C) vb + dt K_e psib = 2 M v^n - dt K_C u^n
//!            -dt/2 K_e^T vb + K_kappa psib   = K_e^T u^n
//! ```
//!
//! with a matrix that is factored once. The energy
//! `E = 1/2 v'Mv + 1/2 u'K_C u + 1/2 psi'K_kappa psi` is conserved exactly
//! without damping and decreases by `dt vb' M_w vb` per step with it.

use crate::fem::{FemBlocks, FemSpaces};
use crate::sparse::{real_block_matrix, CsrMatrix};
use crate::{Error, Result};
use faer::linalg::solvers::Solve;
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyHistory {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
}

impl EnergyHistory {
    /// `max_n |E(t_n) - E(0)| / E(0)`.
    pub fn max_relative_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0
    }

    /// Largest increase `E(t_{n+1}) - E(t_n)` relative to `E(0)`; negative
    /// when the energy strictly decreases at every step.
    pub fn max_relative_increase(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy
            .windows(2)
            .map(|w| (w[1] - w[0]) / e0)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn final_energy(&self) -> f64 {
        *self.energy.last().expect("nonempty history")
    }
}

/// Smooth random initial state: displacement and velocity fields built from a
/// few low-frequency Fourier modes with seeded amplitudes.
pub fn random_smooth_state(spaces: &FemSpaces, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = || {
        let modes: Vec<[f64; 4]> = (0..4)
            .map(|_| {
                [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                ]
            })
            .collect();
        move |p: [f64; 2]| -> f64 {
            modes
                .iter()
                .map(|m| m[0] * (m[1] * p[0] + m[2] * p[1] + m[3]).sin())
                .sum()
        }
    };
    let (ux, uy, vx, vy) = (field(), field(), field(), field());
    (
        spaces.interpolate_vector(|p| [ux(p), uy(p)]),
        spaces.interpolate_vector(|p| [vx(p), vy(p)]),
    )
}

/// Runs `nsteps` trapezoidal steps of length `t_end / nsteps` from the
/// given state and returns the energy at every step. Damping is active when
/// `blocks.m_omega` is nonzero.
pub fn interior_conservation_run(
    spaces: &FemSpaces,
    blocks: &FemBlocks,
    u0: &[f64],
    v0: &[f64],
    t_end: f64,
    nsteps: usize,
) -> Result<EnergyHistory> {
    if nsteps == 0 || !(t_end > 0.0) {
        return Err(Error::InvalidArgument("need a positive final time and at least one step".into()));
    }
    let nu = spaces.num_vector();
    if u0.len() != nu || v0.len() != nu {
        return Err(Error::Dimension("initial state does not match the vector space".into()));
    }
    let dt = t_end / nsteps as f64;
    let free = spaces.free_dofs().to_vec();
    if free.is_empty() && !blocks.k_e.is_zero() {
        return Err(Error::InvalidArgument("no free potential dofs".into()));
    }
    let all: Vec<usize> = (0..nu).collect();
    let k_e = blocks.k_e.select(&all, &free);
    let k_e_t = k_e.transpose();
    let k_kappa = blocks.k_kappa.select(&free, &free);
    let nf = free.len();
    let n = nu + nf;

    let a = real_block_matrix(
        n,
        n,
        &[
            (0, 0, &blocks.m_rho, 2.0),
            (0, 0, &blocks.m_omega, dt),
            (0, 0, &blocks.k_c, 0.5 * dt * dt),
            (0, nu, &k_e, dt),
            (nu, 0, &k_e_t, -0.5 * dt),
            (nu, nu, &k_kappa, 1.0),
        ],
    );
    let lu = a
        .sp_lu()
        .map_err(|e| Error::Singular(format!("trapezoidal step matrix: {e:?}")))?;
    let potential = |u: &[f64]| -> Result<Vec<f64>> {
        if nf == 0 {
            return Ok(Vec::new());
        }
        let kk = k_kappa.to_faer();
        let llt = kk
            .sp_cholesky(faer::Side::Lower)
            .map_err(|e| Error::Singular(format!("dielectric stiffness: {e:?}")))?;
        let rhs = k_e_t.matvec(u);
        let mut m = Mat::from_fn(nf, 1, |i, _| rhs[i]);
        llt.solve_in_place(m.as_mut());
        Ok((0..nf).map(|i| m[(i, 0)]).collect())
    };
    let energy = |u: &[f64], v: &[f64], psi: &[f64]| {
        0.5 * (blocks.m_rho.quadratic_form(v) + blocks.k_c.quadratic_form(u) + k_kappa.quadratic_form(psi))
    };

    let mut u = u0.to_vec();
    let mut v = v0.to_vec();
    let mut psi = potential(&u)?;
    let mut history = EnergyHistory {
        times: vec![0.0],
        energy: vec![energy(&u, &v, &psi)],
    };
    for step in 1..=nsteps {
        let mv = blocks.m_rho.matvec(&v);
        let kcu = blocks.k_c.matvec(&u);
        let ketu = k_e_t.matvec(&u);
        let mut rhs = Mat::from_fn(n, 1, |i, _| {
            if i < nu {
                2.0 * mv[i] - dt * kcu[i]
            } else {
                ketu[i - nu]
            }
        });
        lu.solve_in_place(rhs.as_mut());
        for i in 0..nu {
            let vb = rhs[(i, 0)];
            u[i] += dt * vb;
            v[i] = 2.0 * vb - v[i];
        }
        for j in 0..nf {
            psi[j] = 2.0 * rhs[(nu + j, 0)] - psi[j];
        }
        history.times.push(step as f64 * dt);
        history.energy.push(energy(&u, &v, &psi));
    }
    Ok(history)
}

/// Energy of an elastic-only state, for comparisons with `e = 0`.
pub fn elastic_energy(m_rho: &CsrMatrix, k_c: &CsrMatrix, u: &[f64], v: &[f64]) -> f64 {
    0.5 * (m_rho.quadratic_form(v) + k_c.quadratic_form(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{Coefficient, PiezoMaterial};
    use crate::meshio::unit_square;

    fn setup(material: &PiezoMaterial) -> (FemSpaces, FemBlocks) {
        let mesh = unit_square(4).unwrap();
        let spaces = FemSpaces::new(&mesh, 2).unwrap();
        let blocks = FemBlocks::assemble(&spaces, material).unwrap();
        (spaces, blocks)
    }

    #[test]
    fn coupled_energy_is_conserved() {
        let m = PiezoMaterial::reference(Coefficient::Constant(1.0));
        assert!(m.has_coupling());
        let (sp, bl) = setup(&m);
        let (u0, v0) = random_smooth_state(&sp, 3);
        let h = interior_conservation_run(&sp, &bl, &u0, &v0, 1.0, 100).unwrap();
        assert!(h.max_relative_drift() < 1e-11, "{}", h.max_relative_drift());
    }

    #[test]
    fn damping_dissipates() {
        let m = PiezoMaterial::reference(Coefficient::Constant(1.0)).with_damping(Coefficient::Constant(1.0));
        let (sp, bl) = setup(&m);
        let (u0, v0) = random_smooth_state(&sp, 3);
        let h = interior_conservation_run(&sp, &bl, &u0, &v0, 1.0, 100).unwrap();
        assert!(h.max_relative_increase() <= 1e-12);
        assert!(h.final_energy() < 0.9 * h.energy[0]);
    }

    #[test]
    fn uncoupled_energy_is_elastic() {
        let m = PiezoMaterial::reference(Coefficient::Constant(1.0)).without_coupling();
        let (sp, bl) = setup(&m);
        let (u0, v0) = random_smooth_state(&sp, 5);
        let h = interior_conservation_run(&sp, &bl, &u0, &v0, 1.0, 50).unwrap();
        assert!((h.energy[0] - elastic_energy(&bl.m_rho, &bl.k_c, &u0, &v0)).abs() <= 1e-14 * h.energy[0]);
        assert!(h.max_relative_drift() < 1e-11);
    }
}
