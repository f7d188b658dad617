//! The integral transforms: Bessel kernels J_g^±, the Hankel-type Ψ±, the
//! stationary-phase window Ψ₀, the Mellin-side W†, and the nested ℐ±, 𝔍±
//! and ℛ transforms.
//!
//! All quadratures are oscillation-aware composite Gauss rules: panels are
//! sized from a local frequency estimate, and every reported value carries
//! an error estimate obtained from a refined pass. ℛ is evaluated by
//! fusing its three layers (ζ against the weight and ℐ, then the v-layer
//! of W†, then the τ-layer with the Gamma factors) on shared grids; the
//! fused triple sum is the same finite sum as the nested quadrature,
//! reordered.

use num_complex::Complex64;

use super::bessel::{bessel_j, bessel_j_imag_order, bessel_k_imag_order};
use super::gamma3::gamma_pm;
use super::{OscParams, Sign, SpectralParams};
use crate::arith::e;
use crate::delta::DfiWeight;
use crate::error::NumericError;
use crate::quad::{self, QuadResult};
use crate::weights::SmoothWeight;

/// Oscillation-seeded adaptive quadrature: initial panels track the local
/// frequency, bisection then resolves the bump shoulders and any residual
/// structure.
fn osc_quad<F: FnMut(f64) -> Complex64, G: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    freq: G,
    tol: f64,
    context: &'static str,
) -> Result<QuadResult, NumericError> {
    let cuts = quad::oscillation_panels(a, b, freq, 2.0);
    quad::adaptive_with_cuts(f, &cuts, tol, 1e-12, 4000, context)
}

/// The Voronoi kernel J_g^±: for holomorphic g of weight k,
/// J⁺ = 2π i^k J_{k−1} and J⁻ = 0; for Maass g with parameter μ,
/// J⁺ = −π(J_{2iμ} − J_{−2iμ})/sin(πiμ) and J⁻ = 4ε_g cosh(πμ)K_{2iμ}.
pub fn bessel_kernel(sign: Sign, x: f64, sp: &SpectralParams) -> f64 {
    assert!(x > 0.0 || matches!(sp, SpectralParams::Holomorphic { .. }));
    match (sp, sign) {
        (SpectralParams::Holomorphic { weight }, Sign::Plus) => {
            // i^k = ±1 for even k.
            let ik = if weight % 4 == 0 { 1.0 } else { -1.0 };
            2.0 * std::f64::consts::PI * ik * bessel_j(weight - 1, x)
        }
        (SpectralParams::Holomorphic { .. }, Sign::Minus) => 0.0,
        (SpectralParams::Maass { mu, .. }, Sign::Plus) => {
            // −π/sin(πiμ)·(J_{2iμ} − J_{−2iμ}) = −2π·Im J_{2iμ} / sinh(πμ)
            let j = bessel_j_imag_order(*mu, x);
            -2.0 * std::f64::consts::PI * j.im / (std::f64::consts::PI * mu).sinh()
        }
        (SpectralParams::Maass { mu, eps }, Sign::Minus) => {
            4.0 * eps * (std::f64::consts::PI * mu).cosh() * bessel_k_imag_order(*mu, x)
        }
        (SpectralParams::Gl3 { .. }, _) => panic!("GL2 kernel asked for GL3 data"),
    }
}

/// Ψ±(x) = ∫ φ(y) J_g^±(4π√(xy)) dy.
pub fn psi_transform(
    sign: Sign,
    x: f64,
    phi: &SmoothWeight,
    sp: &SpectralParams,
    tol: f64,
) -> Result<QuadResult, NumericError> {
    let (lo, hi) = phi.support();
    if x == 0.0 {
        // Kernel value at 0 only matters for holomorphic forms (J_{k−1}(0) = 0).
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), error_estimate: 0.0 });
    }
    osc_quad(
        |y| Complex64::new(phi.eval(y) * bessel_kernel(sign, 4.0 * std::f64::consts::PI * (x * y).sqrt(), sp), 0.0),
        lo,
        hi,
        |y| (x / y.max(1e-6)).sqrt(),
        tol,
        "psi transform",
    )
}

/// W†(A, s) = ∫ W(v) v^{s−1} e(−Av) dv.
pub fn w_dagger(
    a_rate: f64,
    s: Complex64,
    w: &SmoothWeight,
    tol: f64,
) -> Result<QuadResult, NumericError> {
    let (lo, hi) = w.support();
    let tau = -s.im; // s = σ − iτ convention of the dual sums
    osc_quad(
        |v| {
            let power = ((s - 1.0) * v.ln()).exp();
            w.eval(v) * power * e(-a_rate * v)
        },
        lo,
        hi,
        |v| tau.abs() / (2.0 * std::f64::consts::PI * v.max(1e-6)) + a_rate.abs(),
        tol,
        "w-dagger",
    )
}

/// Ψ₀(x) = x^{−1/4} ∫ y^{−1/4} V(y) e(ζκy ± 2√(xy)) dy together with the
/// stationary-phase support prediction: a stationary point needs the −
/// sign against a positive rate and x within the window (ζκ)²·supp V,
/// widened to a factor of 16.
pub fn stationary_phase_psi0(
    sign: Sign,
    x: f64,
    zeta: f64,
    osc: &OscParams,
    v_weight: &SmoothWeight,
    tol: f64,
) -> Result<(QuadResult, bool), NumericError> {
    assert!(x > 0.0 && zeta != 0.0);
    let rate = osc.zeta_rate() * zeta;
    let (lo, hi) = v_weight.support();
    let value = osc_quad(
        |y| {
            let phase = rate * y + sign.as_f64() * 2.0 * (x * y).sqrt();
            Complex64::new(v_weight.eval(y) * y.powf(-0.25), 0.0) * e(phase)
        },
        lo,
        hi,
        |y| (rate.abs() + (x / y.max(1e-6)).sqrt()).max(0.5),
        tol,
        "stationary phase window",
    )?;
    let ratio = x / (rate * rate);
    let predicted = sign == Sign::Minus && rate > 0.0 && (1.0 / 16.0..=16.0).contains(&ratio);
    Ok((QuadResult { value: value.value * x.powf(-0.25), error_estimate: value.error_estimate }, predicted))
}

/// ℐ±(x, q, ζ): Bessel form x^{1/2}∫V(y)e(κζy)J_g^±(4π√(xy))dy below the
/// crossover, phase form x^{1/4}∫y^{−1/4}V(y)e(κζy ± 2√(xy))dy above it.
pub fn i_transform(
    sign: Sign,
    x: f64,
    zeta: f64,
    osc: &OscParams,
    v_weight: &SmoothWeight,
    gl2: &SpectralParams,
    x_switch: f64,
    tol: f64,
) -> Result<QuadResult, NumericError> {
    let rate = osc.zeta_rate() * zeta;
    let (lo, hi) = v_weight.support();
    if x <= x_switch {
        let r = osc_quad(
            |y| {
                let kernel = if x == 0.0 {
                    bessel_kernel(sign, 1e-300, gl2) * 0.0
                } else {
                    bessel_kernel(sign, 4.0 * std::f64::consts::PI * (x * y).sqrt(), gl2)
                };
                Complex64::new(v_weight.eval(y) * kernel, 0.0) * e(rate * y)
            },
            lo,
            hi,
            |y| rate.abs() + (x / y.max(1e-6)).sqrt(),
            tol,
            "i transform (Bessel form)",
        )?;
        Ok(QuadResult { value: r.value * x.sqrt(), error_estimate: r.error_estimate })
    } else {
        let r = osc_quad(
            |y| {
                Complex64::new(v_weight.eval(y) * y.powf(-0.25), 0.0)
                    * e(rate * y + sign.as_f64() * 2.0 * (x * y).sqrt())
            },
            lo,
            hi,
            |y| rate.abs() + (x / y.max(1e-6)).sqrt(),
            tol,
            "i transform (phase form)",
        )?;
        Ok(QuadResult { value: r.value * x.powf(0.25), error_estimate: r.error_estimate })
    }
}

/// Oscillation estimate (cycles per unit τ) of the 𝔍-integrand.
fn j_tau_freq(n_x: f64, tau: f64) -> f64 {
    (n_x.abs().max(1e-300).ln().abs()
        + 3.0 * ((1.0 + tau.abs()) / std::f64::consts::PI).ln().abs()
        + 2.0)
        / (2.0 * std::f64::consts::PI)
}

/// 𝔍±(x, q, ζ) = (1/2π) ∫ (Nx)^{−iτ} γ±(−1/2+iτ) W†(ζN/(qQM₁), 1/2−iτ) dτ
/// over the window where the W†-localization leaves mass.
pub fn j_transform(
    sign: Sign,
    x: f64,
    zeta: f64,
    osc: &OscParams,
    w_weight: &SmoothWeight,
    gl3: &SpectralParams,
    tol: f64,
) -> Result<QuadResult, NumericError> {
    let a_rate = osc.zeta_rate() * zeta;
    let window = j_window(a_rate, w_weight, gl3)?;
    j_transform_with_window(sign, x, zeta, osc, w_weight, gl3, tol, window)
}

/// τ-truncation point: starting past the stationary band
/// |τ| ≈ 2π|A|·supp(W), the window is widened until the integrand
/// magnitude |γ(−1/2+iτ)·W†(A, 1/2−iτ)| at the boundary has fallen below
/// 1e-12 of its peak.
pub fn j_window(
    a_rate: f64,
    w_weight: &SmoothWeight,
    gl3: &SpectralParams,
) -> Result<f64, NumericError> {
    let (_, hi) = w_weight.support();
    let a = a_rate.abs();
    let magnitude = |tau: f64| -> f64 {
        let gamma = [Sign::Plus, Sign::Minus]
            .into_iter()
            .filter_map(|s| gamma_pm(s, Complex64::new(-0.5, tau), gl3).ok())
            .fold(0.0f64, |m, g| m.max(g.norm()));
        let wd = w_dagger(a, Complex64::new(0.5, -tau), w_weight, 1e-12)
            .map(|r| r.value.norm())
            .unwrap_or(0.0);
        gamma * wd
    };
    let mut window = 2.0 * std::f64::consts::PI * a * hi * 1.3 + 60.0;
    let mut peak = 0.0f64;
    for _ in 0..12 {
        let mut boundary = 0.0f64;
        for k in 0..24 {
            let tau = window * (0.9 + 0.1 * k as f64 / 23.0);
            boundary = boundary.max(magnitude(tau)).max(magnitude(-tau));
        }
        for k in 0..32 {
            let tau = window * 0.9 * (2.0 * k as f64 / 31.0 - 1.0);
            peak = peak.max(magnitude(tau));
        }
        if boundary <= 1e-12 * peak.max(1e-300) {
            return Ok(window);
        }
        window *= 1.5;
    }
    Err(NumericError::TruncationBudgetExceeded {
        context: "j-transform tau window",
        estimate: window,
        tolerance: 1e-12 * peak,
    })
}

/// 𝔍± with an explicit τ-window (used by the truncation-independence
/// checks). The W†-layer is evaluated on a v-grid shared across all τ;
/// the reported error estimate compares two grid densities.
#[allow(clippy::too_many_arguments)]
pub fn j_transform_with_window(
    sign: Sign,
    x: f64,
    zeta: f64,
    osc: &OscParams,
    w_weight: &SmoothWeight,
    gl3: &SpectralParams,
    tol: f64,
    window: f64,
) -> Result<QuadResult, NumericError> {
    let a_rate = osc.zeta_rate() * zeta;
    let n_x = osc.n * x;
    let pass = |cycles: f64, gl_n: usize| -> Complex64 {
        let (wlo, whi) = w_weight.support();
        let rule = quad::gauss_legendre(gl_n);
        // v-grid dense enough for the fastest τ in the window.
        let v_freq = |v: f64| window / (2.0 * std::f64::consts::PI * v.max(wlo)) + a_rate.abs();
        let vcuts = quad::oscillation_panels(wlo, whi, v_freq, cycles);
        let mut v_nodes: Vec<(f64, Complex64)> = Vec::new();
        for panel in vcuts.windows(2) {
            let half = 0.5 * (panel[1] - panel[0]);
            let mid = 0.5 * (panel[0] + panel[1]);
            for (&xn, &wn) in rule.0.iter().zip(&rule.1) {
                let v = mid + half * xn;
                let wv = w_weight.eval(v);
                if wv == 0.0 {
                    continue;
                }
                v_nodes.push((v, wv * v.powf(-0.5) * e(-a_rate * v) * wn * half));
            }
        }
        let tcuts =
            quad::oscillation_panels(-window, window, |tau| j_tau_freq(n_x, tau), cycles);
        let mut acc = Complex64::new(0.0, 0.0);
        for panel in tcuts.windows(2) {
            let half = 0.5 * (panel[1] - panel[0]);
            let mid = 0.5 * (panel[0] + panel[1]);
            for (&xn, &wn) in rule.0.iter().zip(&rule.1) {
                let tau = mid + half * xn;
                let gamma = match gamma_pm(sign, Complex64::new(-0.5, tau), gl3) {
                    Ok(g) => g,
                    Err(_) => continue,
                };
                let wd: Complex64 = v_nodes
                    .iter()
                    .map(|&(v, c)| c * (Complex64::new(0.0, -tau) * v.ln()).exp())
                    .sum();
                acc += (Complex64::new(0.0, -tau) * n_x.ln()).exp() * gamma * wd * wn * half;
            }
        }
        acc / (2.0 * std::f64::consts::PI)
    };
    let coarse = pass(2.0, 16);
    let fine = pass(1.0, 24);
    let err = (fine - coarse).norm();
    if err <= tol.max(1e-12 * fine.norm()) {
        return Ok(QuadResult { value: fine, error_estimate: err });
    }
    let finest = pass(0.5, 32);
    let err = (finest - fine).norm();
    if err <= tol.max(1e-12 * finest.norm()) {
        Ok(QuadResult { value: finest, error_estimate: err })
    } else {
        Err(NumericError::QuadratureFailure { context: "j transform", estimate: err, tolerance: tol })
    }
}

/// Grid density for the fused ℛ evaluation.
#[derive(Debug, Clone, Copy)]
pub struct FusedResolution {
    pub cycles_per_panel: f64,
    pub gl_points: usize,
    /// Multiplier on the default τ-window.
    pub window_factor: f64,
}

impl FusedResolution {
    pub fn standard() -> Self {
        Self { cycles_per_panel: 1.5, gl_points: 16, window_factor: 1.0 }
    }

    pub fn refined() -> Self {
        Self { cycles_per_panel: 0.75, gl_points: 24, window_factor: 1.25 }
    }
}

/// ℛ(y₁, y₂, q) = ∫ U(ζ/Z) ω(q,ζ) ℐ±(y₁,q,ζ) 𝔍±(y₂,q,ζ) dζ with the
/// layers fused on shared grids; `eval` is O(#τ-nodes) per y₂, so one
/// build serves a whole y₂-sweep.
pub struct FusedR {
    n: f64,
    /// (τ, coefficient) pairs: coefficient = wτ·γ±(−1/2+iτ)·W-layer/2π.
    terms: Vec<(f64, Complex64)>,
}

/// Inputs shared by the ℛ layers.
pub struct RContext<'a> {
    pub osc: OscParams,
    pub v_weight: &'a SmoothWeight,
    pub w_weight: &'a SmoothWeight,
    pub u_cutoff: &'a SmoothWeight,
    /// ζ-scale of the U-cutoff (the M^ε role); support is that times the
    /// cutoff's own support.
    pub zeta_scale: f64,
    pub gl2: &'a SpectralParams,
    pub gl3: &'a SpectralParams,
    /// Crossover between the Bessel and phase forms of ℐ.
    pub x_switch: f64,
}

impl FusedR {
    /// Precompute the τ-layer for fixed (sign_i, sign_j, y₁, q).
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        ctx: &RContext,
        sign_i: Sign,
        sign_j: Sign,
        y1: f64,
        omega: &DfiWeight,
        i_scale: f64,
        res: FusedResolution,
    ) -> Result<Self, NumericError> {
        let osc = &ctx.osc;
        let kappa = osc.zeta_rate();
        let (ulo, uhi) = ctx.u_cutoff.support();
        let (zlo, zhi) = (ulo * ctx.zeta_scale, uhi * ctx.zeta_scale);
        let (wlo, whi) = ctx.w_weight.support();

        // ζ-layer: g(ζ) = U(ζ/Z)·ω(q,ζ)·ℐ(y₁,q,ζ)·scale on Gauss panels.
        let zeta_freq = |_: f64| kappa.abs() * whi + 1.0;
        let zcuts = quad::oscillation_panels(zlo, zhi, zeta_freq, res.cycles_per_panel);
        let (zn, zw) = quad::gauss_legendre(res.gl_points).clone();
        let mut zeta_nodes: Vec<(f64, Complex64)> = Vec::new();
        for panel in zcuts.windows(2) {
            let half = 0.5 * (panel[1] - panel[0]);
            let mid = 0.5 * (panel[0] + panel[1]);
            for (&x, &w) in zn.iter().zip(&zw) {
                let zeta = mid + half * x;
                let u = ctx.u_cutoff.eval(zeta / ctx.zeta_scale);
                if u == 0.0 {
                    continue;
                }
                let om = omega.eval(osc.q, zeta)?;
                let iv = i_transform(
                    sign_i,
                    y1,
                    zeta,
                    osc,
                    ctx.v_weight,
                    ctx.gl2,
                    ctx.x_switch,
                    osc.tolerance,
                )?
                .value;
                zeta_nodes.push((zeta, u * om * iv * i_scale * w * half));
            }
        }

        // v-layer: P(v) = Σ_ζ g(ζ)·e(−κζv) on Gauss panels over supp W.
        let a_max = kappa.abs() * ctx.zeta_scale * uhi.abs().max(ulo.abs());
        let tau_window = j_window(a_max, ctx.w_weight, ctx.gl3)? * res.window_factor;
        let v_freq = |v: f64| {
            tau_window / (2.0 * std::f64::consts::PI * v.max(wlo)) + kappa.abs() * ctx.zeta_scale * 2.0
        };
        let vcuts = quad::oscillation_panels(wlo, whi, v_freq, res.cycles_per_panel);
        let mut v_nodes: Vec<(f64, f64, Complex64)> = Vec::new(); // (v, weight·W·v^{-1/2}, P(v))
        for panel in vcuts.windows(2) {
            let half = 0.5 * (panel[1] - panel[0]);
            let mid = 0.5 * (panel[0] + panel[1]);
            for (&x, &w) in zn.iter().zip(&zw) {
                let v = mid + half * x;
                let wv = ctx.w_weight.eval(v);
                if wv == 0.0 {
                    continue;
                }
                let p: Complex64 = zeta_nodes
                    .iter()
                    .map(|&(zeta, g)| g * e(-kappa * zeta * v))
                    .sum();
                v_nodes.push((v, wv * v.powf(-0.5) * w * half, p));
            }
        }

        // τ-layer: coefficient per node, Gauss panels over [−T, T].
        let n_y_scale = osc.n; // (N y₂)^{−iτ} supplies the only y₂ dependence
        let tau_freq = |tau: f64| j_tau_freq(n_y_scale, tau) + 1.0;
        let tcuts = quad::oscillation_panels(-tau_window, tau_window, tau_freq, res.cycles_per_panel);
        let mut terms = Vec::new();
        for panel in tcuts.windows(2) {
            let half = 0.5 * (panel[1] - panel[0]);
            let mid = 0.5 * (panel[0] + panel[1]);
            for (&x, &w) in zn.iter().zip(&zw) {
                let tau = mid + half * x;
                let gamma = match gamma_pm(sign_j, Complex64::new(-0.5, tau), ctx.gl3) {
                    Ok(g) => g,
                    Err(_) => continue,
                };
                let wlayer: Complex64 = v_nodes
                    .iter()
                    .map(|&(v, wgt, p)| {
                        wgt * p * (Complex64::new(0.0, -tau) * v.ln()).exp()
                    })
                    .sum();
                terms.push((
                    tau,
                    gamma * wlayer * w * half / (2.0 * std::f64::consts::PI),
                ));
            }
        }
        Ok(Self { n: osc.n, terms })
    }

    /// ℛ at dual argument y₂: Σ_τ coef·(N y₂)^{−iτ}.
    pub fn eval(&self, y2: f64) -> Complex64 {
        let ln_ny2 = (self.n * y2).ln();
        self.terms
            .iter()
            .map(|&(tau, coef)| coef * (Complex64::new(0.0, -tau) * ln_ny2).exp())
            .sum()
    }

    /// Largest |τ| carried by the table (drives downstream grid densities).
    pub fn tau_max(&self) -> f64 {
        self.terms.iter().fold(0.0f64, |m, &(tau, _)| m.max(tau.abs()))
    }
}

/// ℛ(y₁, y₂, q) with an error estimate from a refined fused pass.
#[allow(clippy::too_many_arguments)]
pub fn r_transform(
    ctx: &RContext,
    sign_i: Sign,
    sign_j: Sign,
    y1: f64,
    y2: f64,
    omega: &DfiWeight,
    i_scale: f64,
) -> Result<QuadResult, NumericError> {
    let coarse = FusedR::build(ctx, sign_i, sign_j, y1, omega, i_scale, FusedResolution::standard())?
        .eval(y2);
    let fine = FusedR::build(ctx, sign_i, sign_j, y1, omega, i_scale, FusedResolution::refined())?
        .eval(y2);
    Ok(QuadResult { value: fine, error_estimate: (fine - coarse).norm() })
}
