use piezo_core::fem::{rigid_motion_basis, ElectricSolver, FemBlocks, FemSpaces};
use piezo_core::material::{Coefficient, PiezoMaterial};
use piezo_core::meshio::{regular_polygon, unit_square, BoundaryLabel, TriMesh};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn paper_material() -> PiezoMaterial {
    PiezoMaterial::reference(Coefficient::parse("5 + 25*exp(-100*(x^2+y^2))").unwrap())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn stiffness_annihilates_rigid_motions() {
    let mesh = regular_polygon(5, 0.55, 3).unwrap();
    for k in 1..=4 {
        let spaces = FemSpaces::new(&mesh, k).unwrap();
        let blocks = FemBlocks::assemble(&spaces, &paper_material()).unwrap();
        let scale = blocks.k_c.max_abs();
        let basis = rigid_motion_basis(&spaces);
        for m in &basis {
            let r = blocks.k_c.matvec(m);
            assert!(norm(&r) <= 1e-10 * scale * norm(m), "order {k}: {}", norm(&r));
        }
        // Gram matrix of the three motions has full rank
        let g: Vec<Vec<f64>> = basis
            .iter()
            .map(|a| basis.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
            .collect();
        let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
        assert!(det > 1e-8 * g[0][0] * g[1][1] * g[2][2]);
    }
}

fn square_with_neumann_bottom() -> TriMesh {
    unit_square(1)
        .unwrap()
        .relabeled(|p| if p[1] < 1e-12 { BoundaryLabel::Neumann } else { BoundaryLabel::Dirichlet })
}

#[test]
fn electric_solve_matches_dense_elimination() {
    let mesh = square_with_neumann_bottom();
    let spaces = FemSpaces::new(&mesh, 3).unwrap();
    let blocks = FemBlocks::assemble(&spaces, &paper_material()).unwrap();
    let solver = ElectricSolver::new(&blocks, &spaces).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let n = spaces.num_scalar();
    let u: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mu: Vec<f64> = spaces.dirichlet_dofs().iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let load: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let psi = solver.solve(&u, Some(&load), &mu).unwrap();

    let free = spaces.free_dofs();
    let dir = spaces.dirichlet_dofs();
    let a: Vec<Vec<f64>> = free
        .iter()
        .map(|&i| free.iter().map(|&j| blocks.k_kappa.get(i, j)).collect())
        .collect();
    let b: Vec<f64> = free
        .iter()
        .map(|&i| {
            let coupling: f64 = (0..2 * n).map(|j| blocks.k_e.get(j, i) * u[j]).sum();
            let lift: f64 = dir.iter().zip(&mu).map(|(&d, m)| blocks.k_kappa.get(i, d) * m).sum();
            coupling - lift - load[i]
        })
        .collect();
    let want = piezo_oracles::dense::solve(a, b);
    let scale = norm(&want);
    for (k, &i) in free.iter().enumerate() {
        assert!((psi[i] - want[k]).abs() <= 1e-10 * scale, "dof {i}");
    }
    for (&d, &m) in dir.iter().zip(&mu) {
        assert_eq!(psi[d], m);
    }
}

#[test]
fn electric_solve_reproduces_affine_potential_without_coupling() {
    let mesh = regular_polygon(5, 0.55, 2).unwrap();
    let mut material = paper_material().without_coupling();
    material.kappa_psi = [[1.0, 0.0], [0.0, 1.0]];
    let f = |p: [f64; 2]| 0.3 - 1.2 * p[0] + 0.7 * p[1];
    for k in 1..=3 {
        let spaces = FemSpaces::new(&mesh, k).unwrap();
        let blocks = FemBlocks::assemble(&spaces, &material).unwrap();
        let solver = ElectricSolver::new(&blocks, &spaces).unwrap();
        let coords = spaces.node_coords();
        let mu: Vec<f64> = spaces.dirichlet_dofs().iter().map(|&d| f(coords[d])).collect();
        let random_u: Vec<f64> = (0..spaces.num_vector()).map(|i| (i as f64).sin()).collect();
        let psi = solver.solve(&random_u, None, &mu).unwrap();
        for (i, p) in coords.iter().enumerate() {
            assert!((psi[i] - f(*p)).abs() < 1e-12, "order {k}, dof {i}");
        }
    }
}
