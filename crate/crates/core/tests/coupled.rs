use num_complex::Complex64;
use piezo_core::coupler::{
    norm_timeseries, solve_scenario, Discretization, FrequencyAssembler, FrequencyData, Scenario, SimulationResult,
};
use piezo_core::cq::{CqScheme, DEFAULT_TOL};
use piezo_core::incident::{Grounding, IncidentWave};
use piezo_core::material::{Coefficient, PiezoMaterial};
use piezo_core::meshio::{regular_polygon, BoundaryLabel, TriMesh};
use rand::{Rng, SeedableRng};

fn mesh() -> TriMesh {
    regular_polygon(5, 0.55, 2)
        .unwrap()
        .relabeled(|p| if p[1] < -0.2 { BoundaryLabel::Neumann } else { BoundaryLabel::Dirichlet })
}

fn material() -> PiezoMaterial {
    PiezoMaterial::reference(Coefficient::parse("5 + 25*exp(-100*(x^2+y^2))").unwrap())
}

fn scenario(material: PiezoMaterial, incident: IncidentWave, grounding: Grounding, flux: Grounding) -> Scenario {
    let disc = Discretization::coupled(&mesh(), material, 2, 1).unwrap();
    Scenario {
        disc,
        scheme: CqScheme::new(0.05, 40, DEFAULT_TOL).unwrap(),
        incident,
        grounding,
        grounding_profile: None,
        neumann_flux: flux,
        receivers: vec![[1.2, 0.0], [-0.9, 0.7]],
        snapshots: None,
        flip_incident_sign: false,
    }
}

fn wave() -> IncidentWave {
    IncidentWave::paper_causal_sine([1.0, 0.0], [-0.7, 0.0], 1.0).unwrap()
}

fn histories(r: &SimulationResult) -> [&Vec<Vec<f64>>; 5] {
    [&r.u, &r.psi, &r.lambda, &r.phi, &r.scattered]
}

fn max_abs(h: &[Vec<f64>]) -> f64 {
    h.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

#[test]
fn zero_data_gives_zero_result() {
    let s = scenario(material(), IncidentWave::None, Grounding::Zero, Grounding::Zero);
    let r = solve_scenario(&s).unwrap();
    for h in histories(&r) {
        assert_eq!(max_abs(h), 0.0);
    }
}

#[test]
fn doubling_data_doubles_output() {
    let base = scenario(material(), wave(), Grounding::paper_oscillating(), Grounding::paper_step());
    let twice = scenario(
        material(),
        wave().scaled(2.0),
        Grounding::paper_oscillating().scaled(2.0),
        Grounding::paper_step().scaled(2.0),
    );
    let (a, b) = (solve_scenario(&base).unwrap(), solve_scenario(&twice).unwrap());
    for (ha, hb) in histories(&a).iter().zip(histories(&b)) {
        let peak = max_abs(ha);
        assert!(peak > 0.0);
        for (ra, rb) in ha.iter().zip(hb) {
            for (x, y) in ra.iter().zip(rb) {
                assert!((2.0 * x - y).abs() <= 1e-12 * 2.0 * peak, "{x} {y}");
            }
        }
    }
}

#[test]
fn uniform_grounding_is_a_gauge_shift() {
    // a constant potential has no gradient, so nothing moves
    let s = scenario(material(), IncidentWave::None, Grounding::paper_oscillating(), Grounding::Zero);
    let r = solve_scenario(&s).unwrap();
    // roundoff is amplified by lambda^-N ~ 1e6 in the inverse transform
    let psi = max_abs(&r.psi);
    assert!(psi > 1.0);
    assert!(max_abs(&r.u) <= 1e-9 * psi, "{}", max_abs(&r.u));
    assert!(max_abs(&r.scattered) <= 1e-9 * psi);
}

#[test]
fn graded_grounding_generates_waves() {
    let mut s = scenario(material(), IncidentWave::None, Grounding::paper_oscillating(), Grounding::Zero);
    let solid = s.disc.solid.as_ref().unwrap();
    let coords = solid.spaces.node_coords();
    let profile: Vec<f64> = solid.spaces.dirichlet_dofs().iter().map(|&d| coords[d][0]).collect();
    s.grounding_profile = Some(profile.clone());
    let r = solve_scenario(&s).unwrap();
    assert!(max_abs(&r.u) > 1e-3);
    assert!(max_abs(&r.scattered) > 1e-4);
    // the Dirichlet values carry the profile exactly
    let n = r.times.len() - 1;
    let mu = Grounding::paper_oscillating().value(r.times[n]);
    for (k, &d) in solid.spaces.dirichlet_dofs().iter().enumerate() {
        assert_eq!(r.psi[n][d], mu * profile[k]);
    }
}

#[test]
fn mismatched_grounding_profile_is_rejected() {
    let mut s = scenario(material(), IncidentWave::None, Grounding::paper_oscillating(), Grounding::Zero);
    s.grounding_profile = Some(vec![1.0; 3]);
    assert!(solve_scenario(&s).is_err());
}

#[test]
fn zero_coupling_keeps_potential_zero() {
    let s = scenario(material().without_coupling(), wave(), Grounding::Zero, Grounding::Zero);
    let r = solve_scenario(&s).unwrap();
    let norms = norm_timeseries(&r, &s.disc).unwrap();
    let peak_u = norms.u_l2.iter().cloned().fold(0.0, f64::max);
    let max_psi = norms.psi_l2.iter().cloned().fold(0.0, f64::max);
    assert!(peak_u > 0.0);
    assert!(max_psi <= 1e-10 * peak_u, "{max_psi} vs {peak_u}");
}

fn random_data(disc: &Discretization, seed: u64) -> FrequencyData {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut c = |n: usize| -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    };
    let solid = disc.solid.as_ref().unwrap();
    FrequencyData {
        beta0: c(disc.nodes.len()),
        beta1: c(disc.nodes.len()),
        eta: c(solid.neumann.nodes.len()),
        mu: c(solid.spaces.dirichlet_dofs().len()),
    }
}

#[test]
fn conjugate_frequencies_give_conjugate_solutions() {
    let disc = Discretization::coupled(&mesh(), material(), 2, 1).unwrap();
    let asm = FrequencyAssembler::new(&disc).unwrap();
    let s = Complex64::new(1.3, 4.2);
    let data = random_data(&disc, 11);
    let conj_data = FrequencyData {
        beta0: data.beta0.iter().map(|z| z.conj()).collect(),
        beta1: data.beta1.iter().map(|z| z.conj()).collect(),
        eta: data.eta.iter().map(|z| z.conj()).collect(),
        mu: data.mu.iter().map(|z| z.conj()).collect(),
    };
    let a = asm.system(s).unwrap().solve(&data).unwrap();
    let b = asm.system(s.conj()).unwrap().solve(&conj_data).unwrap();
    for (x, y) in [(&a.u, &b.u), (&a.psi, &b.psi), (&a.lambda, &b.lambda), (&a.phi, &b.phi)] {
        let scale = x.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        for (p, q) in x.iter().zip(y) {
            assert!((p - q.conj()).norm() <= 1e-12 * scale);
        }
    }
}

#[test]
fn mirrored_solve_matches_full_frequency_solve() {
    // every frequency solved explicitly with plain-sum transforms
    use piezo_oracles::dft;
    let s = scenario(material(), wave(), Grounding::paper_oscillating(), Grounding::Zero);
    let r = solve_scenario(&s).unwrap();
    let asm = FrequencyAssembler::new(&s.disc).unwrap();
    let scheme = &s.scheme;
    let solid = s.disc.solid.as_ref().unwrap();
    let times = scheme.times();
    let len = times.len();
    let lambda = scheme.lambda();
    let spectrum = |samples: Vec<f64>| -> Vec<Complex64> {
        let c: Vec<Complex64> = samples.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        dft::forward(&c, lambda)
    };
    let nodes = s.disc.nodes.len();
    let beta: Vec<(Vec<f64>, Vec<f64>)> = times
        .iter()
        .map(|&t| piezo_core::incident::boundary_data(&s.incident, &s.disc.nodes, s.disc.material.kappa0, t))
        .collect();
    let b0: Vec<Vec<Complex64>> = (0..nodes).map(|q| spectrum(beta.iter().map(|b| b.0[q]).collect())).collect();
    let b1: Vec<Vec<Complex64>> = (0..nodes).map(|q| spectrum(beta.iter().map(|b| b.1[q]).collect())).collect();
    let mu = spectrum(times.iter().map(|&t| s.grounding.value(t)).collect());
    let nd = solid.spaces.dirichlet_dofs().len();
    let freqs = dft::bdf2_frequencies(len, scheme.dt(), lambda);
    let lam: Vec<Vec<Complex64>> = freqs
        .iter()
        .enumerate()
        .map(|(l, &z)| {
            let data = FrequencyData {
                beta0: (0..nodes).map(|q| b0[q][l]).collect(),
                beta1: (0..nodes).map(|q| b1[q][l]).collect(),
                eta: vec![Complex64::new(0.0, 0.0); solid.neumann.nodes.len()],
                mu: vec![mu[l]; nd],
            };
            asm.system(z).unwrap().solve(&data).unwrap().lambda
        })
        .collect();
    let peak = max_abs(&r.lambda);
    let mut dev: f64 = 0.0;
    for dof in 0..s.disc.num_x() {
        let series = dft::inverse(&lam.iter().map(|v| v[dof]).collect::<Vec<_>>(), lambda);
        for (n, v) in series.iter().enumerate() {
            dev = dev.max((v.re - r.lambda[n][dof]).abs());
        }
    }
    // the scaled inverse transform amplifies roundoff by lambda^-N ~ 1e6
    assert!(dev <= 1e-10 * peak, "{dev} vs peak {peak}");
}
