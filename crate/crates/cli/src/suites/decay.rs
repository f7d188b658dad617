//! Decay suite: the dual-frequency scan of ℋ and its 𝒦 mirror at toy
//! scale, the W†-localization profile, and the Ψ⁻ decay check.

use num_complex::Complex64;

use deltasum_core::delta::{DeltaParams, DfiWeight};
use deltasum_core::oscillatory::decay::{
    default_x_grid, h_decay_scan, w_dagger_localization_scan, HSide,
};
use deltasum_core::oscillatory::transforms::{psi_transform, w_dagger, RContext};
use deltasum_core::oscillatory::{OscParams, Sign, SpectralParams};
use deltasum_core::weights::SmoothWeight;

use crate::config::GridConfig;
use crate::report::{CaseResult, VerificationReport};

pub fn run(cfg: &GridConfig) -> anyhow::Result<VerificationReport> {
    let mut report = VerificationReport::new("decay", cfg.echo());
    let dc = &cfg.decay;

    let osc = OscParams { tolerance: 1e-8, ..OscParams::new(dc.n, dc.m1, dc.c) };
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
    let omega = DfiWeight::new(DeltaParams::new(osc.big_q()));
    let q_over_c = osc.big_q() / dc.c;
    let phi = SmoothWeight::phi_weight();

    // ℋ scan at toy parameters.
    let side = HSide { q: dc.c, y1: dc.y1, y2_scale: dc.y2_scale };
    let grid = default_x_grid(q_over_c, 10.0 * q_over_c, 15.0);
    let h = h_decay_scan(
        &ctx,
        side,
        side,
        (Sign::Plus, Sign::Plus),
        &omega,
        &phi,
        &grid,
        q_over_c,
        10.0 * q_over_c,
    )?;
    report.push(CaseResult::bound(
        format!("H tail ratio (N={}, M1={}, C={})", dc.n, dc.m1, dc.c),
        "h-integral-tail",
        h.tail_ratio,
        dc.tail_ratio_bound * cfg.global.tolerance_scale,
        true,
    ));
    report.note(format!(
        "H(0) = {:.3e}; C/Q = {:.3e}; ratio = {:.3} (reported, constant carries the weight scale)",
        h.h_at_zero,
        1.0 / q_over_c,
        h.h_at_zero * q_over_c
    ));
    report.note(format!(
        "H scan refinement delta = {:.2e} at peak {:.3e}",
        h.error_estimate, h.peak
    ));

    // 𝒦 mirror: the same correlation with the dual scale of the second
    // family (Y built from M₂ in place of M; at toy scale a larger Y and
    // dual range).
    let side_k = HSide { q: dc.c, y1: dc.y1 * 4.0, y2_scale: dc.y2_scale * 2.0 };
    let k = h_decay_scan(
        &ctx,
        side_k,
        side_k,
        (Sign::Plus, Sign::Plus),
        &omega,
        &phi,
        &grid,
        q_over_c,
        10.0 * q_over_c,
    )?;
    report.push(CaseResult::bound(
        "K mirror tail ratio".into(),
        "k-integral-tail",
        k.tail_ratio,
        dc.tail_ratio_bound * cfg.global.tolerance_scale,
        false,
    ));

    // W† localization at A = dc.w_dagger_a.
    let scan = w_dagger_localization_scan(dc.w_dagger_a, &w, 241, 1e-8)?;
    report.push(CaseResult::bound(
        format!("w-dagger mass outside window, A={}", dc.w_dagger_a),
        "w-dagger-localization",
        1.0 - scan.mass_fraction_in_window,
        1e-3,
        true,
    ));
    let peak = scan.magnitudes.iter().fold(0.0f64, |m, &v| m.max(v));
    let off = w_dagger(dc.w_dagger_a, Complex64::new(0.5, -4.0 * dc.w_dagger_a), &w, 1e-10)?
        .value
        .norm();
    report.push(CaseResult::bound(
        "w-dagger off-window decay".into(),
        "w-dagger-decay",
        off / peak,
        1e-4,
        true,
    ));
    report.note(format!(
        "w-dagger window for A={}: tau in [{:.1}, {:.1}], peak {:.3e}",
        dc.w_dagger_a, scan.window.0, scan.window.1, peak
    ));

    // Ψ⁻ decay for the Maass kernel.
    let sp = SpectralParams::Maass { mu: dc.psi_minus_mu, eps: 1.0 };
    let phi_psi = SmoothWeight::plateau(0.8, 1.0, 2.0, 2.2);
    for &x in &dc.psi_minus_x {
        let val = psi_transform(Sign::Minus, x, &phi_psi, &sp, 1e-12)?;
        report.push(CaseResult::bound(
            format!("psi-minus x={x}"),
            "psi-minus-decay",
            val.value.norm(),
            1e-6,
            true,
        ));
    }

    Ok(report)
}
