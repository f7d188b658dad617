//! Numerical Bessel/Gamma kernels, the oscillatory integral transforms, a
//! Voronoi-summation verification on a concrete holomorphic form, and the
//! dual-frequency decay scans.

pub mod bessel;
pub mod decay;
pub mod gamma3;
pub mod tau;
pub mod transforms;
pub mod voronoi;

use num_complex::Complex64;

/// A ± choice in the transform kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Spectral data of the forms entering the kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralParams {
    /// Holomorphic form of even weight k ≥ 12.
    Holomorphic { weight: u32 },
    /// Maass form with spectral parameter μ and reflection eigenvalue ±1.
    Maass { mu: f64, eps: f64 },
    /// Langlands triple (μ₁, μ₂, μ₃) with Σ μⱼ = 0.
    Gl3 { mu: [Complex64; 3] },
}

impl SpectralParams {
    pub fn validate(&self) -> Result<(), crate::error::NumericError> {
        match self {
            SpectralParams::Holomorphic { weight } => {
                if weight % 2 != 0 || *weight < 12 {
                    return Err(crate::error::NumericError::OutOfRange(format!(
                        "holomorphic weight must be even and ≥ 12, got {weight}"
                    )));
                }
            }
            SpectralParams::Maass { eps, .. } => {
                if eps.abs() != 1.0 {
                    return Err(crate::error::NumericError::OutOfRange(
                        "reflection eigenvalue must be ±1".into(),
                    ));
                }
            }
            SpectralParams::Gl3 { mu } => {
                let s: Complex64 = mu.iter().sum();
                if s.norm() > 1e-12 {
                    return Err(crate::error::NumericError::OutOfRange(
                        "GL3 Langlands parameters must sum to zero".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The trivial GL₃ triple (0, 0, 0).
    pub fn gl3_trivial() -> Self {
        SpectralParams::Gl3 { mu: [Complex64::new(0.0, 0.0); 3] }
    }
}

/// Scale parameters of the oscillatory transforms. Q = √(N/M₁) is derived,
/// so Q²·M₁ = N holds by construction; M₁ here is a scale and toy
/// non-prime values are allowed.
#[derive(Debug, Clone, Copy)]
pub struct OscParams {
    /// The length N of the ambient sums.
    pub n: f64,
    /// The conductor-lowering scale M₁.
    pub m1: f64,
    /// The active modulus q (a dyadic representative C in scans).
    pub q: f64,
    /// The auxiliary integer r.
    pub r: u64,
    /// The dyadic block L of n₁²n₂.
    pub l_scale: f64,
    /// Quadrature tolerance (absolute), in (0, 1e-4].
    pub tolerance: f64,
}

impl OscParams {
    pub fn new(n: f64, m1: f64, q: f64) -> Self {
        let p = Self { n, m1, q, r: 1, l_scale: 1.0, tolerance: 1e-8 };
        assert!(p.tolerance > 0.0 && p.tolerance <= 1e-4);
        p
    }

    /// Q = √(N/M₁).
    pub fn big_q(&self) -> f64 {
        (self.n / self.m1).sqrt()
    }

    /// The phase rate N/(qQM₁) multiplying ζ (the A of W†(A, ·)).
    pub fn zeta_rate(&self) -> f64 {
        self.n / (self.q * self.big_q() * self.m1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn osc_params_derived_q() {
        let p = OscParams::new(1e4, 10.0, 4.0);
        let q = p.big_q();
        assert!((q * q * p.m1 - p.n).abs() < 1e-12 * p.n);
        assert!((p.zeta_rate() - 1e4 / (4.0 * q * 10.0)).abs() < 1e-12);
    }

    #[test]
    fn spectral_validation() {
        assert!(SpectralParams::Holomorphic { weight: 12 }.validate().is_ok());
        assert!(SpectralParams::Holomorphic { weight: 13 }.validate().is_err());
        assert!(SpectralParams::gl3_trivial().validate().is_ok());
        let bad = SpectralParams::Gl3 {
            mu: [
                Complex64::new(0.3, 0.0),
                Complex64::new(-0.1, 0.0),
                Complex64::new(-0.1, 0.0),
            ],
        };
        assert!(bad.validate().is_err());
    }
}
