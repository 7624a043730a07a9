//! Incident acoustic waves, grounding potentials and their boundary traces.

use crate::meshio::{BoundaryCurve, Point};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Polynomial smoothed step: `t^5 (1 - 5(t-1) + 15(t-1)^2 - 35(t-1)^3
/// + 70(t-1)^4 - 126(t-1)^5)` on `[0, 1]`, 0 before and 1 after.
pub fn smooth_heaviside(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let d = t - 1.0;
        let poly = 1.0 + d * (-5.0 + d * (15.0 + d * (-35.0 + d * (70.0 - 126.0 * d))));
        t.powi(5) * poly
    }
}

/// Derivative of [`smooth_heaviside`].
pub fn smooth_heaviside_derivative(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let d = t - 1.0;
    let poly = 1.0 + d * (-5.0 + d * (15.0 + d * (-35.0 + d * (70.0 - 126.0 * d))));
    let dpoly = -5.0 + d * (30.0 + d * (-105.0 + d * (280.0 - 630.0 * d)));
    5.0 * t.powi(4) * poly + t.powi(5) * dpoly
}

/// Time profile of a plane wave as a function of `tau = t - (x - origin) . d`.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    /// `amplitude * chi_[0, window](tau) * sin(omega tau)`.
    Pulse { amplitude: f64, window: f64, omega: f64 },
    /// `amplitude * H(tau) sin(omega tau)` with the smoothed step `H`.
    CausalSine { amplitude: f64, omega: f64 },
}

impl Profile {
    pub fn value(&self, tau: f64) -> f64 {
        match *self {
            Profile::Pulse { amplitude, window, omega } => {
                if tau > 0.0 && tau <= window {
                    amplitude * (omega * tau).sin()
                } else {
                    0.0
                }
            }
            Profile::CausalSine { amplitude, omega } => amplitude * smooth_heaviside(tau) * (omega * tau).sin(),
        }
    }

    /// Derivative with respect to `tau` (the window edges contribute nothing).
    pub fn derivative(&self, tau: f64) -> f64 {
        match *self {
            Profile::Pulse { amplitude, window, omega } => {
                if tau > 0.0 && tau <= window {
                    amplitude * omega * (omega * tau).cos()
                } else {
                    0.0
                }
            }
            Profile::CausalSine { amplitude, omega } => {
                amplitude
                    * (smooth_heaviside_derivative(tau) * (omega * tau).sin()
                        + smooth_heaviside(tau) * omega * (omega * tau).cos())
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> Profile {
        match *self {
            Profile::Pulse { amplitude, window, omega } => Profile::Pulse {
                amplitude: amplitude * factor,
                window,
                omega,
            },
            Profile::CausalSine { amplitude, omega } => Profile::CausalSine {
                amplitude: amplitude * factor,
                omega,
            },
        }
    }
}

/// Plane wave `v(x, t) = profile(t - (x - origin) . d / c)` travelling in the
/// unit direction `d` at sound speed `c`, or no wave at all.
#[derive(Clone, Debug, PartialEq)]
pub enum IncidentWave {
    None,
    Plane {
        profile: Profile,
        direction: Point,
        origin: Point,
        speed: f64,
    },
}

impl IncidentWave {
    /// The direction is normalized; it must be nonzero.
    pub fn plane(profile: Profile, direction: Point, origin: Point, speed: f64) -> Result<Self> {
        let norm = direction[0].hypot(direction[1]);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument("incident direction must be a nonzero vector".into()));
        }
        if !(speed > 0.0) {
            return Err(Error::InvalidArgument(format!("sound speed must be positive, got {speed}")));
        }
        Ok(IncidentWave::Plane {
            profile,
            direction: [direction[0] / norm, direction[1] / norm],
            origin,
            speed,
        })
    }

    /// Plane pulse `3 chi_[0, 0.3](tau) sin(88 tau)`.
    pub fn paper_pulse(direction: Point, origin: Point, speed: f64) -> Result<Self> {
        Self::plane(
            Profile::Pulse {
                amplitude: 3.0,
                window: 0.3,
                omega: 88.0,
            },
            direction,
            origin,
            speed,
        )
    }

    /// Smoothly started sine `3 H(tau) sin(6 pi tau)`.
    pub fn paper_causal_sine(direction: Point, origin: Point, speed: f64) -> Result<Self> {
        Self::plane(
            Profile::CausalSine {
                amplitude: 3.0,
                omega: 6.0 * PI,
            },
            direction,
            origin,
            speed,
        )
    }

    pub fn is_none(&self) -> bool {
        matches!(self, IncidentWave::None)
    }

    /// Same wave with amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> IncidentWave {
        match self {
            IncidentWave::None => IncidentWave::None,
            IncidentWave::Plane {
                profile,
                direction,
                origin,
                speed,
            } => IncidentWave::Plane {
                profile: profile.scaled(factor),
                direction: *direction,
                origin: *origin,
                speed: *speed,
            },
        }
    }

    /// Time at which the wavefront reaches `x`; infinite without a wave.
    pub fn arrival_time(&self, x: Point) -> f64 {
        match self {
            IncidentWave::None => f64::INFINITY,
            IncidentWave::Plane {
                direction,
                origin,
                speed,
                ..
            } => ((x[0] - origin[0]) * direction[0] + (x[1] - origin[1]) * direction[1]) / speed,
        }
    }

    pub fn tau(&self, t: f64, x: Point) -> f64 {
        t - self.arrival_time(x)
    }

    pub fn value(&self, t: f64, x: Point) -> f64 {
        match self {
            IncidentWave::None => 0.0,
            IncidentWave::Plane { profile, .. } => profile.value(self.tau(t, x)),
        }
    }

    /// Spatial gradient `-profile'(tau) d / c`.
    pub fn gradient(&self, t: f64, x: Point) -> Point {
        match self {
            IncidentWave::None => [0.0, 0.0],
            IncidentWave::Plane {
                profile,
                direction,
                speed,
                ..
            } => {
                let g = -profile.derivative(self.tau(t, x)) / speed;
                [g * direction[0], g * direction[1]]
            }
        }
    }
}

/// Spatially uniform boundary potential history.
#[derive(Clone, Debug, PartialEq)]
pub enum Grounding {
    Zero,
    /// `amplitude * H(t)`.
    Step { amplitude: f64 },
    /// `amplitude * H(t) sin(omega t)`.
    Oscillating { amplitude: f64, omega: f64 },
}

impl Grounding {
    /// `10 H(t)`.
    pub fn paper_step() -> Self {
        Grounding::Step { amplitude: 10.0 }
    }

    /// `6 H(t) sin(4 pi t)`.
    pub fn paper_oscillating() -> Self {
        Grounding::Oscillating {
            amplitude: 6.0,
            omega: 4.0 * PI,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Grounding::Zero => 0.0,
            Grounding::Step { amplitude } => amplitude * smooth_heaviside(t),
            Grounding::Oscillating { amplitude, omega } => amplitude * smooth_heaviside(t) * (omega * t).sin(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Grounding {
        match *self {
            Grounding::Zero => Grounding::Zero,
            Grounding::Step { amplitude } => Grounding::Step {
                amplitude: amplitude * factor,
            },
            Grounding::Oscillating { amplitude, omega } => Grounding::Oscillating {
                amplitude: amplitude * factor,
                omega,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Grounding::Zero => true,
            Grounding::Step { amplitude } | Grounding::Oscillating { amplitude, .. } => amplitude == 0.0,
        }
    }
}

/// Boundary sampling nodes: panel index and panel parameter of each node.
#[derive(Clone, Debug)]
pub struct BoundaryNodes {
    pub points: Vec<Point>,
    pub normals: Vec<Point>,
    pub panel: Vec<usize>,
    pub param: Vec<f64>,
    /// Gauss weight times panel length.
    pub weights: Vec<f64>,
}

impl BoundaryNodes {
    /// Gauss nodes of the given order on every panel.
    pub fn gauss(curve: &BoundaryCurve, order: usize) -> Self {
        let g = crate::quadrature::gauss_legendre(order);
        let mut out = BoundaryNodes {
            points: Vec::new(),
            normals: Vec::new(),
            panel: Vec::new(),
            param: Vec::new(),
            weights: Vec::new(),
        };
        for (p, panel) in curve.panels.iter().enumerate() {
            for (t, w) in g.iter() {
                out.weights.push(w * panel.length);
                out.points.push(panel.point_at(t));
                out.normals.push(panel.normal);
                out.panel.push(p);
                out.param.push(t);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `beta0 = v` and `beta1 = kappa0 grad v . nu` at the nodes at time `t`.
pub fn boundary_data(wave: &IncidentWave, nodes: &BoundaryNodes, kappa0: f64, t: f64) -> (Vec<f64>, Vec<f64>) {
    let beta0 = nodes.points.iter().map(|&x| wave.value(t, x)).collect();
    let beta1 = nodes
        .points
        .iter()
        .zip(&nodes.normals)
        .map(|(&x, nu)| {
            let g = wave.gradient(t, x);
            kappa0 * (g[0] * nu[0] + g[1] * nu[1])
        })
        .collect();
    (beta0, beta1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heaviside_values() {
        assert_eq!(smooth_heaviside(-1.0), 0.0);
        assert_eq!(smooth_heaviside(2.0), 1.0);
        assert!((smooth_heaviside(0.5) - 0.03125 * 19.9375).abs() < 1e-15);
    }

    #[test]
    fn heaviside_is_continuous_and_monotone() {
        assert!(smooth_heaviside(1e-9).abs() < 1e-12);
        assert!((smooth_heaviside(1.0 - 1e-9) - 1.0).abs() < 1e-12);
        let mut prev = 0.0;
        for i in 0..=1000 {
            let v = smooth_heaviside(i as f64 / 1000.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn heaviside_derivative_matches_differences() {
        for &t in &[0.1, 0.37, 0.5, 0.93] {
            let h = 1e-6;
            let fd = (smooth_heaviside(t + h) - smooth_heaviside(t - h)) / (2.0 * h);
            assert!((fd - smooth_heaviside_derivative(t)).abs() < 1e-7);
        }
    }

    #[test]
    fn pulse_values() {
        let w = IncidentWave::paper_pulse([1.0, 5.0], [0.0, 0.0], 1.0).unwrap();
        let x = [0.0, 0.0];
        assert_eq!(w.value(-0.1, x), 0.0);
        assert_eq!(w.value(0.5, x), 0.0);
        assert!((w.value(PI / 176.0, x) - 3.0).abs() < 1e-14);
        if let IncidentWave::Plane { direction, .. } = w {
            assert!((direction[0].hypot(direction[1]) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_direction_is_rejected() {
        assert!(IncidentWave::paper_pulse([0.0, 0.0], [0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn gradient_matches_differences() {
        let w = IncidentWave::paper_causal_sine([-1.0, 1.0], [0.3, -0.2], 1.3).unwrap();
        let (t, x) = (0.9, [0.1, 0.2]);
        let h = 1e-6;
        let g = w.gradient(t, x);
        let fx = (w.value(t, [x[0] + h, x[1]]) - w.value(t, [x[0] - h, x[1]])) / (2.0 * h);
        let fy = (w.value(t, [x[0], x[1] + h]) - w.value(t, [x[0], x[1] - h])) / (2.0 * h);
        assert!((g[0] - fx).abs() < 1e-6 && (g[1] - fy).abs() < 1e-6);
    }

    #[test]
    fn grounding_values() {
        assert_eq!(Grounding::paper_step().value(2.0), 10.0);
        assert_eq!(Grounding::paper_oscillating().value(0.0), 0.0);
        let v = Grounding::paper_oscillating().value(1.125);
        assert!((v - 6.0 * (4.5 * PI).sin()).abs() < 1e-12);
    }

    #[test]
    fn flux_vanishes_on_panels_parallel_to_direction() {
        let curve = BoundaryCurve::from_polygons(&[vec![[0.0, 0.0], [0.0, 1.0], [-1.0, 1.0], [-1.0, 0.0]]]);
        let w = IncidentWave::paper_pulse([0.0, 1.0], [0.0, -1.0], 1.0).unwrap();
        let nodes = BoundaryNodes::gauss(&curve, 3);
        for t in [1.05, 1.2, 1.5] {
            let (_, b1) = boundary_data(&w, &nodes, 1.0, t);
            for (q, v) in b1.iter().enumerate() {
                let nu = nodes.normals[q];
                if nu[1].abs() < 1e-14 {
                    assert_eq!(*v, 0.0);
                }
            }
        }
        let (b0, b1) = boundary_data(&w, &nodes, 1.0, 0.5);
        assert!(b0.iter().chain(&b1).all(|v| *v == 0.0));
    }
}
