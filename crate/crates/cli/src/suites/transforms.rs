//! Transform suite: self-consistency of the nested quadratures, linearity,
//! kernel bounds, and the Gamma-factor band.

use num_complex::Complex64;

use deltasum_core::delta::{DeltaParams, DfiWeight};
use deltasum_core::oscillatory::bessel::bessel_k_imag_order;
use deltasum_core::oscillatory::gamma3::gamma_pm;
use deltasum_core::oscillatory::transforms::{
    bessel_kernel, i_transform, j_transform, j_transform_with_window, j_window, r_transform,
    stationary_phase_psi0, RContext,
};
use deltasum_core::oscillatory::{OscParams, Sign, SpectralParams};
use deltasum_core::weights::SmoothWeight;

use crate::config::GridConfig;
use crate::report::{CaseResult, VerificationReport};

pub fn run(cfg: &GridConfig) -> anyhow::Result<VerificationReport> {
    let mut report = VerificationReport::new("transforms", cfg.echo());
    let tc = &cfg.transforms;
    let osc = OscParams { tolerance: 1e-9, ..OscParams::new(tc.n, tc.m1, tc.q) };
    let v = SmoothWeight::v_weight();
    let w = SmoothWeight::w_weight();
    let u = SmoothWeight::u_cutoff();
    let gl2 = SpectralParams::Holomorphic { weight: 12 };
    let gl3 = SpectralParams::gl3_trivial();

    // Small-regime bound |ℐ±(x)| ≤ x^{1/2}·∫V·sup|kernel| for x ≤ 1.
    let kernel_sup = {
        let mut sup = 0.0f64;
        let mut arg = 1e-3;
        while arg < 4.0 * std::f64::consts::PI * 2f64.sqrt() {
            sup = sup.max(bessel_kernel(Sign::Plus, arg, &gl2).abs());
            arg += 1e-2;
        }
        sup
    };
    let v_mass: f64 = 0.5; // ∫V ≤ |supp V| with peak 1
    for &x in &[0.05f64, 0.2, tc.x_small, 1.0] {
        let val = i_transform(Sign::Plus, x, tc.zeta, &osc, &v, &gl2, 1.0, 1e-10)?;
        report.push(CaseResult::bound(
            format!("i-transform small x={x}"),
            "i-transform-small-bound",
            val.value.norm(),
            x.sqrt() * kernel_sup * 2.0 * v_mass.max(1.0),
            true,
        ));
    }

    // 𝔍 at the toy point: reproducible across truncation windows and
    // quadrature refinement.
    let x_j = 1.0 / (tc.q.powi(3) * tc.m1.powi(3));
    let j1 = j_transform(Sign::Plus, x_j, tc.zeta, &osc, &w, &gl3, 1e-8)?;
    let window = j_window(osc.zeta_rate() * tc.zeta, &w, &gl3)?;
    let j2 = j_transform_with_window(Sign::Plus, x_j, tc.zeta, &osc, &w, &gl3, 1e-8, window * 1.4)?;
    report.push(CaseResult::compare(
        "j-transform truncation windows".into(),
        "j-transform-truncation-independence",
        j1.value,
        j2.value,
        1e-6 * j1.value.norm().max(1e-9),
        false,
        true,
    ));
    let j3 = j_transform(Sign::Plus, x_j, tc.zeta, &osc, &w, &gl3, 1e-10)?;
    report.push(CaseResult::compare(
        "j-transform refinement".into(),
        "j-transform-self-consistency",
        j1.value,
        j3.value,
        1e-6 * j1.value.norm().max(1e-9),
        false,
        true,
    ));

    // ℛ linearity in the ℐ slot.
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
    let r1 = r_transform(&ctx, Sign::Plus, Sign::Plus, 0.5, tc.y2, &omega, 1.0)?;
    let r2 = r_transform(&ctx, Sign::Plus, Sign::Plus, 0.5, tc.y2, &omega, 2.0)?;
    report.push(CaseResult::compare(
        "r-transform doubling".into(),
        "r-transform-linearity",
        r2.value,
        2.0 * r1.value,
        1e-10 + 1e-9 * r1.value.norm(),
        false,
        true,
    ));
    report.note(format!(
        "r-transform value {:.6e}{:+.6e}i, refinement estimate {:.2e}",
        r1.value.re, r1.value.im, r1.error_estimate
    ));

    // Stationary-phase window of Ψ₀.
    let rate = osc.zeta_rate() * tc.zeta;
    let x_res = (rate * 1.4).powi(2);
    let (on_res, pred_on) = stationary_phase_psi0(Sign::Minus, x_res, tc.zeta, &osc, &v, 1e-9)?;
    let (off_sign, pred_off) = stationary_phase_psi0(Sign::Plus, x_res, tc.zeta, &osc, &v, 1e-9)?;
    let (off_far, pred_far) =
        stationary_phase_psi0(Sign::Minus, 100.0 * x_res, tc.zeta, &osc, &v, 1e-9)?;
    report.push(CaseResult::bound(
        "psi0 resonance prediction".into(),
        "stationary-phase-window",
        f64::from(!(pred_on && !pred_off && !pred_far)),
        0.5,
        true,
    ));
    report.push(CaseResult::bound(
        "psi0 resonant magnitude·x^{1/2}".into(),
        "stationary-phase-magnitude",
        (on_res.value.norm() * x_res.sqrt() - 1.0).abs(),
        0.99, // O(1) band: within [0.01, 1.99]
        false,
    ));
    report.push(CaseResult::bound(
        "psi0 off-sign".into(),
        "stationary-phase-off-support",
        off_sign.value.norm(),
        1e-4 * x_res.powf(-0.25),
        true,
    ));
    report.push(CaseResult::bound(
        "psi0 off-resonance".into(),
        "stationary-phase-off-support",
        off_far.value.norm(),
        1e-4 * (100.0 * x_res).powf(-0.25),
        true,
    ));

    // Gamma-factor band and reflection.
    let mut tau = 5.0f64;
    let mut worst_band: f64 = 1.0;
    let mut worst_reflection = 0.0f64;
    while tau <= 50.0 {
        let s = Complex64::new(-0.5, tau);
        let plus = gamma_pm(Sign::Plus, s, &gl3)?;
        let minus = gamma_pm(Sign::Minus, s, &gl3)?;
        let big = plus.norm().max(minus.norm());
        worst_band = worst_band.max(big.max(1.0 / big));
        let refl = gamma_pm(Sign::Minus, s.conj(), &gl3)?;
        worst_reflection = worst_reflection.max((plus.conj() - refl).norm());
        tau += 1.5;
    }
    report.push(CaseResult::bound(
        "gamma band tau in [5,50]".into(),
        "gamma-factor-band",
        worst_band,
        50.0,
        true,
    ));
    report.push(CaseResult::bound(
        "gamma reflection".into(),
        "gamma-factor-reflection",
        worst_reflection,
        1e-10,
        true,
    ));

    // K-kernel decay used by the Ψ⁻ bound.
    for &x in &[1.0f64, 5.0, 20.0] {
        let k = bessel_k_imag_order(1.0, x).abs();
        report.push(CaseResult::bound(
            format!("K-kernel decay x={x}"),
            "k-bessel-decay",
            k,
            8.0 * x.powf(-0.5) * (-x).exp(),
            true,
        ));
    }

    Ok(report)
}
