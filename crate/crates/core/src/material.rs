//! Piezoelectric material coefficients in Voigt form.
//!
//! Strain is stored as `(eps11, eps22, 2 eps12)` (engineering shear), so the
//! elastic energy density is `eps . C eps` and `(e^T d) . eps = d . (e eps)`.

use crate::{Error, Result};
use evalexpr::{
    build_operator_tree, ContextWithMutableFunctions, ContextWithMutableVariables,
    DefaultNumericTypes, EvalexprError, Function, HashMapContext, Node, Value,
};
use faer::{Mat, Side};

pub type Vec2 = [f64; 2];
pub type Vec3 = [f64; 3];

/// Scalar coefficient field over the solid: a constant or a closed-form
/// expression in `x`, `y` and `r = sqrt(x^2 + y^2)`.
///
/// Expressions use evalexpr syntax with `exp`, `ln`, `sqrt`, `abs`, `sin`,
/// `cos`, `tanh` and `pi` available. Integer literals use integer arithmetic
/// (`1/2 == 0`); write `1.0/2`.
#[derive(Clone, Debug)]
pub enum Coefficient {
    Constant(f64),
    Expression { source: String, tree: Node<DefaultNumericTypes> },
}

impl Coefficient {
    pub fn parse(source: &str) -> Result<Self> {
        let trimmed = source.trim();
        if let Ok(v) = trimmed.parse::<f64>() {
            return Ok(Coefficient::Constant(v));
        }
        let tree = build_operator_tree::<DefaultNumericTypes>(trimmed).map_err(|e| {
            Error::Expression {
                expr: source.to_string(),
                msg: e.to_string(),
            }
        })?;
        let coef = Coefficient::Expression {
            source: trimmed.to_string(),
            tree,
        };
        // surface unknown identifiers and type errors at parse time
        coef.eval_many(&[[0.1, 0.2]])?;
        Ok(coef)
    }

    pub fn source(&self) -> String {
        match self {
            Coefficient::Constant(v) => format!("{v:?}"),
            Coefficient::Expression { source, .. } => source.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Constant(v) if *v == 0.0)
    }

    pub fn eval(&self, p: [f64; 2]) -> Result<f64> {
        Ok(self.eval_many(&[p])?[0])
    }

    pub fn eval_many(&self, points: &[[f64; 2]]) -> Result<Vec<f64>> {
        match self {
            Coefficient::Constant(v) => Ok(vec![*v; points.len()]),
            Coefficient::Expression { source, tree } => {
                let mut ctx = expression_context();
                let err = |e: EvalexprError<DefaultNumericTypes>| Error::Expression {
                    expr: source.clone(),
                    msg: e.to_string(),
                };
                let mut out = Vec::with_capacity(points.len());
                for p in points {
                    ctx.set_value("x".into(), Value::from_float(p[0])).map_err(err)?;
                    ctx.set_value("y".into(), Value::from_float(p[1])).map_err(err)?;
                    ctx.set_value("r".into(), Value::from_float(p[0].hypot(p[1])))
                        .map_err(err)?;
                    let v = tree.eval_number_with_context(&ctx).map_err(err)?;
                    if !v.is_finite() {
                        return Err(Error::Expression {
                            expr: source.clone(),
                            msg: format!("non-finite value at ({}, {})", p[0], p[1]),
                        });
                    }
                    out.push(v);
                }
                Ok(out)
            }
        }
    }
}

fn expression_context() -> HashMapContext<DefaultNumericTypes> {
    let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
    let unary: [(&str, fn(f64) -> f64); 7] = [
        ("exp", f64::exp),
        ("ln", f64::ln),
        ("sqrt", f64::sqrt),
        ("abs", f64::abs),
        ("sin", f64::sin),
        ("cos", f64::cos),
        ("tanh", f64::tanh),
    ];
    for (name, f) in unary {
        let _ = ctx.set_function(
            name.into(),
            Function::new(move |arg| Ok(Value::from_float(f(arg.as_number()?)))),
        );
    }
    let _ = ctx.set_value("pi".into(), Value::from_float(std::f64::consts::PI));
    ctx
}

/// Physical coefficients of the solid and the surrounding fluid.
#[derive(Clone, Debug)]
pub struct PiezoMaterial {
    pub c_voigt: [[f64; 3]; 3],
    pub e_voigt: [[f64; 3]; 2],
    pub kappa_psi: [[f64; 2]; 2],
    pub rho: Coefficient,
    pub omega: Coefficient,
    pub kappa0: f64,
    pub kappa1: f64,
}

/// Bounds computed by [`PiezoMaterial::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct MaterialDiagnostics {
    /// Eigenvalues of `c_voigt`, ascending.
    pub c_eigenvalues: Vec<f64>,
    /// Eigenvalues of `kappa_psi`, ascending.
    pub kappa_eigenvalues: Vec<f64>,
    pub rho_min: f64,
    pub rho_max: f64,
    pub omega_min: f64,
    pub omega_max: f64,
}

impl PiezoMaterial {
    /// Stiffness, coupling and permittivity used in all experiments of the
    /// reference study, with unit fluid constants.
    pub fn reference(rho: Coefficient) -> Self {
        PiezoMaterial {
            c_voigt: [[2.118, 0.6, 0.0], [0.6, 2.118, 0.0], [0.0, 0.0, 0.9]],
            e_voigt: [[1.0, 5.0, 5.0], [5.0, 1.0, 5.0]],
            kappa_psi: kappa_from_voigt([4.0, 4.0, 1.0]),
            rho,
            omega: Coefficient::Constant(0.0),
            kappa0: 1.0,
            kappa1: 1.0,
        }
    }

    /// Builds a material from the flat value lists of the config file:
    /// upper triangle of C row by row, e row-major, kappa as `(k11, k22, k12)`.
    pub fn from_voigt_lists(
        c_upper: [f64; 6],
        e_row_major: [f64; 6],
        kappa: [f64; 3],
        rho: Coefficient,
        omega: Coefficient,
        kappa0: f64,
        kappa1: f64,
    ) -> Self {
        let [c11, c12, c13, c22, c23, c33] = c_upper;
        PiezoMaterial {
            c_voigt: [[c11, c12, c13], [c12, c22, c23], [c13, c23, c33]],
            e_voigt: [
                [e_row_major[0], e_row_major[1], e_row_major[2]],
                [e_row_major[3], e_row_major[4], e_row_major[5]],
            ],
            kappa_psi: kappa_from_voigt(kappa),
            rho,
            omega,
            kappa0,
            kappa1,
        }
    }

    pub fn c_sound(&self) -> f64 {
        (self.kappa0 / self.kappa1).sqrt()
    }

    pub fn has_coupling(&self) -> bool {
        self.e_voigt.iter().flatten().any(|&v| v != 0.0)
    }

    pub fn without_coupling(&self) -> Self {
        PiezoMaterial {
            e_voigt: [[0.0; 3]; 2],
            ..self.clone()
        }
    }

    pub fn with_damping(&self, omega: Coefficient) -> Self {
        PiezoMaterial {
            omega,
            ..self.clone()
        }
    }

    pub fn validate(&self, sample_points: &[[f64; 2]]) -> Result<MaterialDiagnostics> {
        let all_finite = self
            .c_voigt
            .iter()
            .flatten()
            .chain(self.e_voigt.iter().flatten())
            .chain(self.kappa_psi.iter().flatten())
            .chain([&self.kappa0, &self.kappa1])
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::Material("non-finite coefficient".into()));
        }
        let c_eigenvalues = symmetric_eigenvalues(&self.c_voigt.map(|r| r.to_vec()), "c_voigt")?;
        if c_eigenvalues[0] <= 0.0 {
            return Err(Error::Material(format!(
                "c_voigt is not positive definite (smallest eigenvalue {})",
                c_eigenvalues[0]
            )));
        }
        let kappa_eigenvalues =
            symmetric_eigenvalues(&self.kappa_psi.map(|r| r.to_vec()), "kappa_psi")?;
        if kappa_eigenvalues[0] <= 0.0 {
            return Err(Error::Material(format!(
                "kappa_psi is not positive definite (smallest eigenvalue {})",
                kappa_eigenvalues[0]
            )));
        }
        if self.kappa0 <= 0.0 || self.kappa1 <= 0.0 {
            return Err(Error::Material("fluid constants must be positive".into()));
        }
        let rho = self.rho.eval_many(sample_points)?;
        let omega = self.omega.eval_many(sample_points)?;
        let (rho_min, rho_max) = min_max(&rho);
        let (omega_min, omega_max) = min_max(&omega);
        if rho_min <= 0.0 {
            return Err(Error::Material(format!("density is not positive (min {rho_min})")));
        }
        if omega_min < 0.0 {
            return Err(Error::Material(format!("damping is negative (min {omega_min})")));
        }
        Ok(MaterialDiagnostics {
            c_eigenvalues,
            kappa_eigenvalues,
            rho_min,
            rho_max,
            omega_min,
            omega_max,
        })
    }

    /// `C eps + e^T grad_psi`.
    pub fn stress_voigt(&self, eps: Vec3, grad_psi: Vec2) -> Vec3 {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.c_voigt[i][j] * eps[j]).sum::<f64>()
                + (0..2).map(|k| self.e_voigt[k][i] * grad_psi[k]).sum::<f64>();
        }
        out
    }

    /// `e eps - kappa_psi grad_psi`.
    pub fn electric_displacement(&self, eps: Vec3, grad_psi: Vec2) -> Vec2 {
        let mut out = [0.0; 2];
        for (k, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.e_voigt[k][j] * eps[j]).sum::<f64>()
                - (0..2).map(|l| self.kappa_psi[k][l] * grad_psi[l]).sum::<f64>();
        }
        out
    }

    /// Compliance `C^{-1}` in the same Voigt convention.
    pub fn compliance(&self) -> Result<[[f64; 3]; 3]> {
        let c = &self.c_voigt;
        let det = c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1])
            - c[0][1] * (c[1][0] * c[2][2] - c[1][2] * c[2][0])
            + c[0][2] * (c[1][0] * c[2][1] - c[1][1] * c[2][0]);
        if det.abs() < 1e-300 {
            return Err(Error::Material("c_voigt is singular".into()));
        }
        let mut inv = [[0.0; 3]; 3];
        for (i, row) in inv.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let (a, b) = ((j + 1) % 3, (j + 2) % 3);
                let (p, q) = ((i + 1) % 3, (i + 2) % 3);
                *v = (c[a][p] * c[b][q] - c[a][q] * c[b][p]) / det;
            }
        }
        Ok(inv)
    }
}

/// `(a, b, c) -> [[a, c], [c, b]]`.
pub fn kappa_from_voigt(v: [f64; 3]) -> [[f64; 2]; 2] {
    [[v[0], v[2]], [v[2], v[1]]]
}

fn symmetric_eigenvalues(rows: &[Vec<f64>], name: &str) -> Result<Vec<f64>> {
    let n = rows.len();
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (rows[i][j], rows[j][i]);
            if (a - b).abs() > 1e-14 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::Material(format!("{name} is not symmetric")));
            }
        }
    }
    let m = Mat::<f64>::from_fn(n, n, |i, j| rows[i][j]);
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Material(format!("{name}: eigenvalue solver failed: {e:?}")))
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> PiezoMaterial {
        PiezoMaterial::reference(Coefficient::parse("5 + 25*exp(-100*r^2)").unwrap())
    }

    #[test]
    fn reference_tensors_validate() {
        let d = reference().validate(&[[0.0, 0.0], [0.3, 0.1]]).unwrap();
        // 2x2 block [[a, b], [b, a]] has eigenvalues a +- b; the shear entry is separate
        let expect = [0.9, 2.118 - 0.6, 2.118 + 0.6];
        for (got, want) in d.c_eigenvalues.iter().zip(expect) {
            assert!((got - want).abs() < 1e-13);
        }
        assert!((d.kappa_eigenvalues[0] - 3.0).abs() < 1e-13);
        assert!((d.kappa_eigenvalues[1] - 5.0).abs() < 1e-13);
        assert!((d.rho_max - 30.0).abs() < 1e-12);
    }

    #[test]
    fn indefinite_stiffness_is_rejected() {
        let mut m = reference();
        m.c_voigt = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
        assert!(matches!(m.validate(&[[0.0, 0.0]]), Err(Error::Material(_))));
    }

    #[test]
    fn nonpositive_density_and_negative_damping_are_rejected() {
        let m = PiezoMaterial::reference(Coefficient::parse("x").unwrap());
        assert!(m.validate(&[[-0.1, 0.0]]).is_err());
        let m = reference().with_damping(Coefficient::Constant(-1.0));
        assert!(m.validate(&[[0.0, 0.0]]).is_err());
    }

    #[test]
    fn stress_and_displacement_examples() {
        let m = reference();
        assert_eq!(m.stress_voigt([0.0; 3], [0.0; 2]), [0.0; 3]);
        let s = m.stress_voigt([1.0, 1.0, 0.0], [0.0, 0.0]);
        assert!((s[0] - 2.718).abs() < 1e-14 && (s[1] - 2.718).abs() < 1e-14 && s[2] == 0.0);
        assert_eq!(m.stress_voigt([0.0; 3], [1.0, 0.0]), [1.0, 5.0, 5.0]);
        assert_eq!(m.electric_displacement([0.0; 3], [1.0, 0.0]), [-4.0, -1.0]);
        assert_eq!(m.electric_displacement([1.0, 0.0, 0.0], [0.0; 2]), [1.0, 5.0]);
    }

    #[test]
    fn compliance_inverts_stiffness() {
        let m = reference();
        let inv = m.compliance().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| m.c_voigt[i][k] * inv[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn expressions() {
        let c = Coefficient::parse("20 + abs(x) + 10*abs(y)").unwrap();
        assert!((c.eval([-0.25, 0.5]).unwrap() - 25.25).abs() < 1e-14);
        assert!(matches!(Coefficient::parse("3 +"), Err(Error::Expression { .. })));
        assert!(matches!(Coefficient::parse("foo(x)"), Err(Error::Expression { .. })));
        assert!(Coefficient::parse("0").unwrap().is_zero());
    }
}
