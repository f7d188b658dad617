//! Decay scans: the dual-frequency integral ℋ (and its 𝒦 mirror), the
//! W†-localization profile, and the Ψ⁻ decay check.

use num_complex::Complex64;

use super::transforms::{w_dagger, FusedR, FusedResolution, RContext};
use super::Sign;
use crate::arith::e;
use crate::delta::DfiWeight;
use crate::error::NumericError;
use crate::quad;
use crate::weights::SmoothWeight;

/// One side of the ℋ-correlation: its modulus q and dual scalings.
#[derive(Debug, Clone, Copy)]
pub struct HSide {
    /// The q of this side's ℛ (q₁q₂ or q₁q₂′).
    pub q: f64,
    /// The fixed first argument Y of ℛ.
    pub y1: f64,
    /// y₂(ξ) = y2_scale·ξ.
    pub y2_scale: f64,
}

/// Scan output: |ℋ| over the grid, plus peak/tail summaries.
#[derive(Debug, Clone)]
pub struct DecayReport {
    pub x_values: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// max |ℋ(X)| over |X| ≤ peak_radius.
    pub peak: f64,
    /// max |ℋ(X)| over |X| > tail_radius.
    pub tail: f64,
    pub tail_ratio: f64,
    pub h_at_zero: f64,
    /// Largest |standard − refined| over the grid.
    pub error_estimate: f64,
}

/// ℋ(X) = ∫ φ(ξ) ℛ(Y₁, y₂(ξ), q) conj(ℛ(Y₁′, y₂′(ξ), q′)) e(−Xξ) dξ/ξ
/// sampled on `x_grid`; `peak_radius`/`tail_radius` split the grid for the
/// tail-ratio summary. One pair of fused ℛ tables serves the whole grid.
#[allow(clippy::too_many_arguments)]
pub fn h_decay_scan(
    ctx: &RContext,
    side: HSide,
    side_p: HSide,
    signs: (Sign, Sign),
    omega: &DfiWeight,
    phi: &SmoothWeight,
    x_grid: &[f64],
    peak_radius: f64,
    tail_radius: f64,
) -> Result<DecayReport, NumericError> {
    let scan = |res: FusedResolution| -> Result<Vec<Complex64>, NumericError> {
        let mut ctx1 = RContext { osc: ctx.osc, ..*ctx };
        ctx1.osc.q = side.q;
        let mut ctx2 = RContext { osc: ctx.osc, ..*ctx };
        ctx2.osc.q = side_p.q;
        let r1 = FusedR::build(&ctx1, signs.0, signs.1, side.y1, omega, 1.0, res)?;
        let r2 = FusedR::build(&ctx2, signs.0, signs.1, side_p.y1, omega, 1.0, res)?;

        // Shared ξ-grid: resolve both the e(−Xξ) twist at max |X| and the
        // Mellin oscillation of the ℛ-tables.
        let (lo, hi) = phi.support();
        let x_max = x_grid.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tau_max = r1.tau_max().max(r2.tau_max());
        let freq = |xi: f64| x_max + tau_max / (2.0 * std::f64::consts::PI * xi.max(lo));
        let cuts = quad::oscillation_panels(lo, hi, freq, res.cycles_per_panel);
        let rule = quad::gauss_legendre(res.gl_points);
        let mut nodes: Vec<(f64, Complex64)> = Vec::new();
        for panel in cuts.windows(2) {
            let half = 0.5 * (panel[1] - panel[0]);
            let mid = 0.5 * (panel[0] + panel[1]);
            for (&x, &w) in rule.0.iter().zip(&rule.1) {
                let xi = mid + half * x;
                let weight = phi.eval(xi);
                if weight == 0.0 {
                    continue;
                }
                let integrand = weight / xi
                    * r1.eval(side.y2_scale * xi)
                    * r2.eval(side_p.y2_scale * xi).conj();
                nodes.push((xi, integrand * w * half));
            }
        }
        Ok(x_grid
            .iter()
            .map(|&xv| nodes.iter().map(|&(xi, g)| g * e(-xv * xi)).sum())
            .collect())
    };

    let standard = scan(FusedResolution::standard())?;
    let refined = scan(FusedResolution::refined())?;
    let error_estimate = standard
        .iter()
        .zip(&refined)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));

    let magnitudes: Vec<f64> = refined.iter().map(|z| z.norm()).collect();
    let mut peak = 0.0f64;
    let mut tail = 0.0f64;
    let mut h_at_zero = 0.0f64;
    for (&x, &mag) in x_grid.iter().zip(&magnitudes) {
        if x == 0.0 {
            h_at_zero = mag;
        }
        if x.abs() <= peak_radius {
            peak = peak.max(mag);
        }
        if x.abs() > tail_radius {
            tail = tail.max(mag);
        }
    }
    Ok(DecayReport {
        x_values: x_grid.to_vec(),
        magnitudes,
        peak,
        tail,
        tail_ratio: if peak > 0.0 { tail / peak } else { f64::INFINITY },
        h_at_zero,
        error_estimate,
    })
}

/// Default X-grid for a tail-ratio scan: dense inside the peak window,
/// sparse out to `tail_factor`·radius.
pub fn default_x_grid(peak_radius: f64, tail_radius: f64, tail_factor: f64) -> Vec<f64> {
    let mut grid = vec![0.0];
    for k in 1..=4 {
        let x = peak_radius * k as f64 / 4.0;
        grid.push(x);
        grid.push(-x);
    }
    for k in 0..=4 {
        let x = tail_radius * (1.05 + (tail_factor - 1.05) * k as f64 / 4.0);
        grid.push(x);
        grid.push(-x);
    }
    grid.sort_by(f64::total_cmp);
    grid
}

/// |W†(A, 1/2 − iτ)| sampled over a symmetric τ-grid, with the fraction of
/// the squared mass inside the stationary window −2πA·supp(W).
#[derive(Debug, Clone)]
pub struct WDaggerLocalization {
    pub tau_values: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub window: (f64, f64),
    pub mass_fraction_in_window: f64,
}

pub fn w_dagger_localization_scan(
    a_rate: f64,
    w: &SmoothWeight,
    steps: usize,
    tol: f64,
) -> Result<WDaggerLocalization, NumericError> {
    let (lo, hi) = w.support();
    let t_edge = 2.0 * std::f64::consts::PI * a_rate.abs() * hi * 1.6 + 30.0;
    let window = if a_rate >= 0.0 {
        (-2.0 * std::f64::consts::PI * a_rate * hi, -2.0 * std::f64::consts::PI * a_rate * lo)
    } else {
        (-2.0 * std::f64::consts::PI * a_rate * lo, -2.0 * std::f64::consts::PI * a_rate * hi)
    };
    let mut tau_values = Vec::with_capacity(steps);
    let mut magnitudes = Vec::with_capacity(steps);
    let mut total = 0.0f64;
    let mut inside = 0.0f64;
    // Widen the window slightly: the stationary band has smooth shoulders.
    let wlo = window.0 - 0.1 * (window.1 - window.0).abs() - 10.0;
    let whi = window.1 + 0.1 * (window.1 - window.0).abs() + 10.0;
    for k in 0..steps {
        let tau = -t_edge + 2.0 * t_edge * k as f64 / (steps - 1) as f64;
        let v = w_dagger(a_rate, Complex64::new(0.5, -tau), w, tol)?.value.norm();
        tau_values.push(tau);
        magnitudes.push(v);
        total += v * v;
        if tau >= wlo && tau <= whi {
            inside += v * v;
        }
    }
    Ok(WDaggerLocalization {
        tau_values,
        magnitudes,
        window,
        mass_fraction_in_window: if total > 0.0 { inside / total } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillatory::{OscParams, SpectralParams};

    #[test]
    fn w_dagger_mass_sits_in_stationary_window() {
        let w = SmoothWeight::w_weight();
        let scan = w_dagger_localization_scan(50.0, &w, 241, 1e-8).unwrap();
        assert!(
            scan.mass_fraction_in_window > 0.999,
            "fraction = {}",
            scan.mass_fraction_in_window
        );
        // Off-window value is negligible next to the window mass.
        let off = w_dagger(50.0, Complex64::new(0.5, -200.0), &w, 1e-10)
            .unwrap()
            .value
            .norm();
        let peak = scan.magnitudes.iter().fold(0.0f64, |m, &v| m.max(v));
        assert!(off <= 1e-4 * peak, "off={off} peak={peak}");
    }

    #[test]
    fn h_scan_toy_tail() {
        let osc = OscParams { tolerance: 1e-8, ..OscParams::new(1e4, 10.0, 4.0) };
        let v = SmoothWeight::v_weight();
        let w = SmoothWeight::w_weight();
        let u = SmoothWeight::u_cutoff();
        let gl2 = SpectralParams::Holomorphic { weight: 12 };
        let gl3 = SpectralParams::gl3_trivial();
        let ctx = RContext {
            osc,
            v_weight: &v,
            w_weight: &w,
            u_cutoff: &u,
            zeta_scale: 1.0,
            gl2: &gl2,
            gl3: &gl3,
            x_switch: 1.0,
        };
        let omega = DfiWeight::new(crate::delta::DeltaParams::new(osc.big_q()));
        let q_over_c = osc.big_q() / osc.q;
        let side = HSide { q: osc.q, y1: 0.5, y2_scale: 1e-4 };
        let grid = default_x_grid(q_over_c, 10.0 * q_over_c, 15.0);
        let report = h_decay_scan(
            &ctx,
            side,
            side,
            (Sign::Plus, Sign::Plus),
            &omega,
            &SmoothWeight::phi_weight(),
            &grid,
            q_over_c,
            10.0 * q_over_c,
        )
        .unwrap();
        assert!(report.peak > 0.0);
        assert!(
            report.tail_ratio <= 1e-3,
            "tail ratio {} (peak {}, tail {})",
            report.tail_ratio,
            report.peak,
            report.tail
        );
    }
}
