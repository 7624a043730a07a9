//! Reference values computed by methods that share no code with the solver:
//! quadrature of integral representations for Bessel functions, a naive
//! scaled DFT, dense Gaussian elimination, and the separated-variables solution for scattering by a
//! sound-hard circle.

pub mod bessel;
pub mod circle;
pub mod dft;
pub mod dense;
