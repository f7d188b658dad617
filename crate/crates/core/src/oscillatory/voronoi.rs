//! Dual-expansion verification on the discriminant form: both sides of
//!
//! ```text
//! Σ_m λ(m) e(am/c) φ(m/N) = (N/c) Σ± Σ_m λ(m) e(±ām/c) Ψ±(mN/c²)
//! ```
//!
//! with λ(m) = τ(m)/m^{11/2} and the ± of the additive character running
//! opposite to the kernel sign (the Ψ⁺ branch carries e(−ām/c); the
//! identity itself certifies that pairing). The holomorphic minus-kernel
//! vanishes, so the dual side is the Ψ⁺ branch truncated where it has
//! decayed below the reported tail tolerance.

use num_complex::Complex64;

use super::tau::TauTable;
use super::transforms::psi_transform;
use super::{Sign, SpectralParams};
use crate::arith::{additive_char, csum, gcd, mod_inverse};
use crate::error::NumericError;
use crate::weights::SmoothWeight;

/// Outcome of one Voronoi comparison.
#[derive(Debug, Clone, Copy)]
pub struct VoronoiReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// |lhs − rhs|.
    pub abs_diff: f64,
    /// |lhs − rhs| / (1 + |lhs|).
    pub rel_diff: f64,
    /// Dual terms actually summed.
    pub dual_terms: usize,
    /// Estimated dual tail dropped by the truncation.
    pub tail_estimate: f64,
}

/// Both sides of the summation formula for the weight-12 form.
pub fn gl2_voronoi_check(
    a: i64,
    c: u64,
    phi: &SmoothWeight,
    n_scale: f64,
    coeff_budget: usize,
    tau: &TauTable,
    tol: f64,
) -> Result<VoronoiReport, NumericError> {
    if c == 0 || gcd(a.unsigned_abs() % c.max(1), c) != 1 {
        return Err(NumericError::OutOfRange(format!("need gcd(a, c) = 1, got a={a}, c={c}")));
    }
    let sp = SpectralParams::Holomorphic { weight: 12 };
    let a_bar = mod_inverse(a, c).expect("a is a unit mod c") as i64;
    let (lo, hi) = phi.support();

    // Direct side: finitely many m with m/N in supp φ.
    let m_lo = (lo * n_scale).floor().max(1.0) as usize;
    let m_hi = (hi * n_scale).ceil() as usize;
    if m_hi > tau.budget() {
        return Err(NumericError::TruncationBudgetExceeded {
            context: "voronoi direct side",
            estimate: m_hi as f64,
            tolerance: tau.budget() as f64,
        });
    }
    let lhs = csum((m_lo..=m_hi).map(|m| {
        tau.lambda(m) * additive_char(a * m as i64, c) * phi.eval(m as f64 / n_scale)
    }));

    // Dual side: Ψ⁺ decays superpolynomially; stop once a block of terms
    // sits below the per-term tolerance and extrapolate the tail from the
    // observed block-to-block decay.
    let term_tol = tol * (1.0 + lhs.norm()) / 100.0;
    let mut rhs = Complex64::new(0.0, 0.0);
    let mut m = 1usize;
    let mut block_max = 0.0f64;
    let mut prev_block_max = f64::INFINITY;
    let mut dual_terms = 0usize;
    let tail_estimate;
    const BLOCK: usize = 8;
    loop {
        if m > coeff_budget || m > tau.budget() {
            return Err(NumericError::TruncationBudgetExceeded {
                context: "voronoi dual side",
                estimate: block_max,
                tolerance: term_tol,
            });
        }
        let x = m as f64 * n_scale / (c * c) as f64;
        let psi = psi_transform(Sign::Plus, x, phi, &sp, tol * 1e-3)?.value;
        let term = n_scale / c as f64
            * tau.lambda(m)
            * additive_char(-a_bar * m as i64, c)
            * psi;
        rhs += term;
        dual_terms += 1;
        block_max = block_max.max(term.norm());
        if m % BLOCK == 0 {
            if block_max < term_tol && m >= 2 * BLOCK {
                let ratio = (block_max / prev_block_max).min(0.9);
                tail_estimate = block_max * BLOCK as f64 * ratio / (1.0 - ratio);
                break;
            }
            prev_block_max = block_max.max(1e-300);
            block_max = 0.0;
        }
        m += 1;
    }

    let abs_diff = (lhs - rhs).norm();
    Ok(VoronoiReport {
        lhs,
        rhs,
        abs_diff,
        rel_diff: abs_diff / (1.0 + lhs.norm()),
        dual_terms,
        tail_estimate,
    })
}
