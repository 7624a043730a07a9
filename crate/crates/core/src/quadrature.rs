//! Quadrature rules on the unit interval and the reference triangle.

use std::f64::consts::PI;

/// A one-dimensional rule on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Rule1d {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// Affine copy of the rule on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Rule1d {
        let h = b - a;
        Rule1d {
            points: self.points.iter().map(|t| a + h * t).collect(),
            weights: self.weights.iter().map(|w| h * w).collect(),
        }
    }
}

/// Gauss-Legendre rule with `n` points on `[0, 1]`, exact for degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Rule1d {
    assert!(n >= 1, "gauss_legendre needs at least one point");
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        points[i] = 0.5 * (1.0 - x);
        points[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    Rule1d { points, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss rule on `[0, 1]` geometrically graded towards 0.
///
/// Subinterval breakpoints are `sigma^levels, ..., sigma, 1`, each carrying an
/// `n`-point Gauss rule. Integrands like `f(t) ln t` or `t^a` with smooth `f`
/// converge exponentially in `levels`.
pub fn graded_towards_zero(n: usize, levels: usize, sigma: f64) -> Rule1d {
    let base = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * (levels + 1));
    let mut weights = Vec::with_capacity(n * (levels + 1));
    let mut hi = 1.0;
    for _ in 0..levels {
        let lo = hi * sigma;
        for (t, w) in base.iter() {
            points.push(lo + (hi - lo) * t);
            weights.push((hi - lo) * w);
        }
        hi = lo;
    }
    for (t, w) in base.iter() {
        points.push(hi * t);
        weights.push(hi * w);
    }
    Rule1d { points, weights }
}

/// A rule on the reference triangle `{(x, y): x, y >= 0, x + y <= 1}`.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Collapsed Gauss-Legendre product rule exact for polynomials of total degree
/// `degree` on the reference triangle. Weights sum to 1/2.
pub fn triangle_rule(degree: usize) -> TriangleRule {
    // The Duffy jacobian adds one degree in the collapsed direction.
    let n = (degree + 2).div_ceil(2);
    let g = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (u, wu) in g.iter() {
        for (v, wv) in g.iter() {
            let x = u;
            let y = v * (1.0 - u);
            points.push([x, y]);
            weights.push(wu * wv * (1.0 - u));
        }
    }
    TriangleRule { points, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for n in 1..=12 {
            let rule = gauss_legendre(n);
            for p in 0..(2 * n) {
                let got: f64 = rule.iter().map(|(t, w)| w * t.powi(p as i32)).sum();
                let exact = 1.0 / (p as f64 + 1.0);
                assert!((got - exact).abs() < 1e-14, "n={n} p={p} got={got}");
            }
        }
    }

    #[test]
    fn triangle_rule_exactness() {
        for degree in 0..=12 {
            let rule = triangle_rule(degree);
            for i in 0..=degree {
                for j in 0..=(degree - i) {
                    let got: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * p[0].powi(i as i32) * p[1].powi(j as i32))
                        .sum();
                    // int x^i y^j over the simplex = i! j! / (i + j + 2)!
                    let exact = factorial(i) * factorial(j) / factorial(i + j + 2);
                    assert!((got - exact).abs() < 1e-14, "deg={degree} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn graded_rule_handles_log_singularity() {
        let rule = graded_towards_zero(12, 22, 0.3);
        let got: f64 = rule.iter().map(|(t, w)| w * t.ln()).sum();
        assert!((got + 1.0).abs() < 1e-10, "got {got}");
        let got: f64 = rule.iter().map(|(t, w)| w * t * t * t.ln()).sum();
        assert!((got + 1.0 / 9.0).abs() < 1e-12);
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }
}
