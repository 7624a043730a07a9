//! Rigid motions of the plane as finite element vectors.

use super::spaces::FemSpaces;

/// Interpolants of the translations `(1,0)`, `(0,1)` and the rotation
/// `(-y, x)` in blocked vector layout.
pub fn rigid_motion_basis(spaces: &FemSpaces) -> [Vec<f64>; 3] {
    [
        spaces.interpolate_vector(|_| [1.0, 0.0]),
        spaces.interpolate_vector(|_| [0.0, 1.0]),
        spaces.interpolate_vector(|p| [-p[1], p[0]]),
    ]
}
