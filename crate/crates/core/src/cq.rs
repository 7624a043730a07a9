//! BDF2 convolution quadrature, all steps at once.
//!
//! With `L = N + 1` steps, `lambda = tol^(1 / (2 L))` and
//! `zeta_l = exp(-2 pi i l / L)`, the frequencies are
//! `s_l = delta(lambda zeta_l) / dt` and a sequence `g_n` is transformed by
//! `G_l = sum_n lambda^n g_n zeta_l^n`. For real sequences the transform is
//! conjugate symmetric, so only `l = 0..=L/2` are stored and solved.

use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_LEN: usize = 1 << 20;

/// `3/2 - 2 z + z^2 / 2`.
pub fn bdf2_symbol(z: Complex64) -> Complex64 {
    1.5 - 2.0 * z + 0.5 * z * z
}

#[derive(Clone, Debug, PartialEq)]
pub struct CqScheme {
    dt: f64,
    nsteps: usize,
    lambda: f64,
}

/// Transformed data on the stored half spectrum `l = 0..=L/2`, tagged with
/// the contour radius and length it was produced with.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    lambda: f64,
    len: usize,
}

/// Half spectra of several channels: `values[l][channel]`.
#[derive(Clone, Debug)]
pub struct MultiSpectrum {
    pub values: Vec<Vec<Complex64>>,
    lambda: f64,
    len: usize,
}

impl CqScheme {
    /// `nsteps` steps of size `dt` (samples at `t_n = n dt`, `n = 0..=nsteps`).
    pub fn new(dt: f64, nsteps: usize, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidArgument(format!("cq tolerance must lie in (0, 1), got {tol}")));
        }
        let lambda = tol.powf(1.0 / (2.0 * (nsteps + 1) as f64));
        Self::with_radius(dt, nsteps, lambda)
    }

    pub fn with_radius(dt: f64, nsteps: usize, lambda: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        if nsteps + 1 > MAX_LEN {
            return Err(Error::InvalidArgument(format!("at most {} steps", MAX_LEN - 1)));
        }
        // lambda < 1 also makes the frequencies distinct: delta(z1) = delta(z2)
        // with z1 != z2 forces z1 + z2 = 4
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidArgument(format!("contour radius must lie in (0, 1), got {lambda}")));
        }
        Ok(CqScheme { dt, nsteps, lambda })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nsteps(&self) -> usize {
        self.nsteps
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Number of samples `L = N + 1`.
    pub fn len(&self) -> usize {
        self.nsteps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of stored frequencies, `floor(L / 2) + 1`.
    pub fn num_stored(&self) -> usize {
        self.len() / 2 + 1
    }

    pub fn final_time(&self) -> f64 {
        self.dt * self.nsteps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|n| n as f64 * self.dt).collect()
    }

    fn frequency(&self, l: usize) -> Complex64 {
        let z = Complex64::from_polar(self.lambda, -2.0 * PI * l as f64 / self.len() as f64);
        let mut s = bdf2_symbol(z) / self.dt;
        // self-conjugate bins are real
        if l == 0 || 2 * l == self.len() {
            s.im = 0.0;
        }
        s
    }

    /// All `L` frequencies; the upper half is the exact conjugate mirror.
    pub fn frequencies(&self) -> Vec<Complex64> {
        let len = self.len();
        let stored = self.stored_frequencies();
        (0..len)
            .map(|l| if l < stored.len() { stored[l] } else { stored[len - l].conj() })
            .collect()
    }

    /// Frequencies `s_l` for `l = 0..=L/2`.
    pub fn stored_frequencies(&self) -> Vec<Complex64> {
        (0..self.num_stored()).map(|l| self.frequency(l)).collect()
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.len() {
            return Err(Error::Dimension(format!("expected {} samples, got {n}", self.len())));
        }
        Ok(())
    }

    fn scaled_fft(&self, samples: impl Iterator<Item = f64>) -> Vec<Complex64> {
        let len = self.len();
        let mut buf: Vec<Complex64> = samples
            .enumerate()
            .map(|(n, g)| Complex64::new(g * self.lambda.powi(n as i32), 0.0))
            .collect();
        FftPlanner::<f64>::new().plan_fft_forward(len).process(&mut buf);
        buf.truncate(self.num_stored());
        buf
    }

    fn unscaled_ifft(&self, half: &[Complex64]) -> Vec<f64> {
        let len = self.len();
        let mut buf: Vec<Complex64> = (0..len)
            .map(|l| if l < half.len() { half[l] } else { half[len - l].conj() })
            .collect();
        // imaginary parts of the self-conjugate bins are roundoff for real data
        buf[0].im = 0.0;
        if len % 2 == 0 {
            buf[len / 2].im = 0.0;
        }
        FftPlanner::<f64>::new().plan_fft_inverse(len).process(&mut buf);
        let inv_len = 1.0 / len as f64;
        buf.iter()
            .enumerate()
            .map(|(n, z)| z.re * inv_len / self.lambda.powi(n as i32))
            .collect()
    }

    pub fn forward(&self, samples: &[f64]) -> Result<Spectrum> {
        self.check_len(samples.len())?;
        Ok(Spectrum {
            values: self.scaled_fft(samples.iter().copied()),
            lambda: self.lambda,
            len: self.len(),
        })
    }

    pub fn inverse(&self, spectrum: &Spectrum) -> Result<Vec<f64>> {
        self.check_compatible(spectrum.lambda, spectrum.len)?;
        Ok(self.unscaled_ifft(&spectrum.values))
    }

    /// Forward transform of a time-major sample table `samples[n][channel]`.
    pub fn forward_many(&self, samples: &[Vec<f64>]) -> Result<MultiSpectrum> {
        self.check_len(samples.len())?;
        let channels = samples.first().map_or(0, |v| v.len());
        if samples.iter().any(|v| v.len() != channels) {
            return Err(Error::Dimension("ragged sample table".into()));
        }
        let mut values = vec![vec![Complex64::new(0.0, 0.0); channels]; self.num_stored()];
        for c in 0..channels {
            let col = self.scaled_fft(samples.iter().map(|v| v[c]));
            for (l, z) in col.into_iter().enumerate() {
                values[l][c] = z;
            }
        }
        Ok(MultiSpectrum {
            values,
            lambda: self.lambda,
            len: self.len(),
        })
    }

    /// Wraps per-frequency results computed from spectra of this scheme.
    pub fn spectrum_from(&self, values: Vec<Vec<Complex64>>) -> Result<MultiSpectrum> {
        if values.len() != self.num_stored() {
            return Err(Error::Dimension(format!(
                "expected {} frequencies, got {}",
                self.num_stored(),
                values.len()
            )));
        }
        Ok(MultiSpectrum {
            values,
            lambda: self.lambda,
            len: self.len(),
        })
    }

    /// Inverse of [`forward_many`](Self::forward_many); returns `[n][channel]`.
    pub fn inverse_many(&self, spectrum: &MultiSpectrum) -> Result<Vec<Vec<f64>>> {
        self.check_compatible(spectrum.lambda, spectrum.len)?;
        let channels = spectrum.values.first().map_or(0, |v| v.len());
        let mut out = vec![vec![0.0; channels]; self.len()];
        let mut col = vec![Complex64::new(0.0, 0.0); self.num_stored()];
        for c in 0..channels {
            for (l, v) in spectrum.values.iter().enumerate() {
                col[l] = v[c];
            }
            for (n, x) in self.unscaled_ifft(&col).into_iter().enumerate() {
                out[n][c] = x;
            }
        }
        Ok(out)
    }

    fn check_compatible(&self, lambda: f64, len: usize) -> Result<()> {
        if lambda != self.lambda || len != self.len() {
            return Err(Error::InvalidArgument(format!(
                "spectrum was produced with radius {lambda} and length {len}, scheme has {} and {}",
                self.lambda,
                self.len()
            )));
        }
        Ok(())
    }

    /// CQ approximation of `F(d/dt) g` at the grid times.
    pub fn convolve_transfer(
        &self,
        f: impl Fn(Complex64) -> Complex64,
        samples: &[f64],
    ) -> Result<Vec<f64>> {
        let mut spec = self.forward(samples)?;
        for (v, s) in spec.values.iter_mut().zip(self.stored_frequencies()) {
            *v *= f(s);
        }
        self.inverse(&spec)
    }

    /// Relative round-trip accuracy to expect: roundoff is amplified by
    /// `lambda^-N` in the inverse.
    pub fn roundtrip_tolerance(&self) -> f64 {
        64.0 * f64::EPSILON * self.lambda.powi(-(self.nsteps as i32)) * (self.len() as f64).log2().max(1.0)
    }
}

impl Spectrum {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl MultiSpectrum {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_values() {
        let c = |x: f64| Complex64::new(x, 0.0);
        assert_eq!(bdf2_symbol(c(1.0)), c(0.0));
        assert_eq!(bdf2_symbol(c(0.0)), c(1.5));
        assert_eq!(bdf2_symbol(c(-1.0)), c(4.0));
    }

    #[test]
    fn single_frequency_scheme() {
        let s = CqScheme::with_radius(1.0, 0, 0.5).unwrap();
        let f = s.frequencies();
        assert_eq!(f.len(), 1);
        assert!((f[0] - Complex64::new(0.625, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn frequencies_in_right_half_plane_and_paired() {
        for n in [1usize, 2, 7, 8, 100, 101] {
            let s = CqScheme::new(0.01, n, DEFAULT_TOL).unwrap();
            let f = s.frequencies();
            assert!(f.iter().all(|z| z.re > 0.0));
            for l in 1..f.len() {
                let direct = s.frequency(l);
                assert!((f[l] - direct).norm() < 1e-12 * direct.norm());
                assert_eq!(f[f.len() - l], f[l].conj());
            }
        }
    }

    #[test]
    fn frequencies_are_distinct() {
        let s = CqScheme::new(1e-3, 4095, DEFAULT_TOL).unwrap();
        let mut f = s.frequencies();
        f.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        assert!(f.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn invalid_parameters() {
        assert!(CqScheme::new(0.0, 10, 1e-12).is_err());
        assert!(CqScheme::new(-1.0, 10, 1e-12).is_err());
        assert!(CqScheme::with_radius(0.1, 10, 1.0).is_err());
    }

    #[test]
    fn mismatched_radius_is_rejected() {
        let a = CqScheme::new(0.1, 20, 1e-12).unwrap();
        let b = CqScheme::new(0.1, 20, 1e-8).unwrap();
        let spec = a.forward(&[1.0; 21]).unwrap();
        assert!(b.inverse(&spec).is_err());
        assert!(b.inverse(&b.forward(&[1.0; 21]).unwrap()).is_ok());
    }

    #[test]
    fn identity_transfer_reproduces_input() {
        let s = CqScheme::new(0.05, 60, DEFAULT_TOL).unwrap();
        let g: Vec<f64> = (0..61).map(|n| (0.3 * n as f64).sin()).collect();
        let out = s.convolve_transfer(|_| Complex64::new(1.0, 0.0), &g).unwrap();
        for (a, b) in g.iter().zip(&out) {
            assert!((a - b).abs() <= s.roundtrip_tolerance());
        }
    }
}
