//! J- and K-Bessel evaluation for the Voronoi kernels.
//!
//! Integer order: ascending series for x ≤ 18, Hankel asymptotics for J₀/J₁
//! beyond, and upward recurrence for higher orders (stable there since the
//! orders in play stay below x). Imaginary order 2iμ: ascending series in
//! complex order for small x and the Hankel expansion with complex
//! coefficients for large x; K_{2iμ} through the real integral
//! ∫ e^{−x cosh t} cos(2μt) dt.

use num_complex::Complex64;

use crate::quad;

/// Γ(n) for small positive integers, enough for series prefactors.
fn factorial(n: u32) -> f64 {
    (1..=n as u64).map(|k| k as f64).product()
}

/// J_n(x) by the ascending series; accurate to ~1e-11 for x ≤ 15, n ≤ 12.
fn bessel_j_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(n as i32) / factorial(n);
    let mut sum = term;
    for k in 1..200 {
        term *= -(half * half) / (k as f64 * (k as f64 + n as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-30) {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion of J_n for large x (n = 0, 1).
fn bessel_j_hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut p = 1.0;
    let mut q = (mu - 1.0) / (8.0 * x);
    let mut term_p = 1.0;
    let mut term_q = q;
    // a_k(n)/(8x)^k, truncated at the smallest term.
    let mut k = 1u32;
    loop {
        let f1 = (mu - ((4 * k - 3) as f64).powi(2)) * (mu - ((4 * k - 1) as f64).powi(2));
        term_p *= -f1 / ((2 * k - 1) as f64 * (2 * k) as f64 * (8.0 * x).powi(2));
        let f2 = (mu - ((4 * k - 1) as f64).powi(2)) * (mu - ((4 * k + 1) as f64).powi(2));
        term_q *= -f2 / ((2 * k) as f64 * (2 * k + 1) as f64 * (8.0 * x).powi(2));
        if term_p.abs() + term_q.abs() < 1e-17 || k > 15 {
            break;
        }
        p += term_p;
        q += term_q;
        k += 1;
    }
    let chi = x - (0.5 * n as f64 + 0.25) * std::f64::consts::PI;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// J_n(x) for integer n ≥ 0, x > 0. Series below 15 (cancellation keeps
/// ~11 digits there), Hankel plus recurrence above (the orders in use stay
/// below x, where upward recurrence is stable).
pub fn bessel_j(n: u32, x: f64) -> f64 {
    assert!(x >= 0.0);
    if x == 0.0 {
        return f64::from(n == 0);
    }
    if x <= 15.0 {
        return bessel_j_series(n, x);
    }
    let j0 = bessel_j_hankel(0, x);
    let j1 = bessel_j_hankel(1, x);
    match n {
        0 => j0,
        1 => j1,
        _ => {
            // Upward recurrence J_{k+1} = (2k/x) J_k − J_{k-1}; stable while
            // k stays below x (here x > 18 > any order we use).
            let (mut jm, mut j) = (j0, j1);
            for k in 1..n {
                let next = 2.0 * k as f64 / x * j - jm;
                jm = j;
                j = next;
            }
            j
        }
    }
}

/// ln Γ(z) by the Lanczos approximation (g = 7, 9 terms), principal branch.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    const G: f64 = 7.0;
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z.re < 0.5 {
        // Reflection: ln Γ(z) = ln π − ln sin(πz) − ln Γ(1 − z), with
        // ln sin(πz) assembled in log form so large |Im z| cannot overflow.
        let pi = std::f64::consts::PI;
        let ln_sin = if z.im > 10.0 {
            // sin(πz) = (i/2)·e^{−iπz}·(1 − e^{2πiz})
            Complex64::new(0.0, 0.5).ln() - Complex64::i() * pi * z
                + (Complex64::new(1.0, 0.0) - (Complex64::i() * 2.0 * pi * z).exp()).ln()
        } else if z.im < -10.0 {
            // sin(πz) = (−i/2)·e^{iπz}·(1 − e^{−2πiz})
            Complex64::new(0.0, -0.5).ln() + Complex64::i() * pi * z
                + (Complex64::new(1.0, 0.0) - (-Complex64::i() * 2.0 * pi * z).exp()).ln()
        } else {
            (pi * z).sin().ln()
        };
        return Complex64::new(pi, 0.0).ln() - ln_sin - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(COEFFS[0], 0.0);
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (zm1 + i as f64);
    }
    let t = zm1 + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (zm1 + 0.5) * t.ln() - t + acc.ln()
}

/// Γ(z).
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// J_ν(x) for complex order by the ascending series; fine for x ≤ 12 and
/// |ν| ≤ ~5 (loss of ~x/2 digits of cancellation).
fn bessel_j_complex_series(nu: Complex64, x: f64) -> Complex64 {
    let half = Complex64::new(0.5 * x, 0.0);
    let mut term = half.powc(nu) * (-ln_gamma(nu + 1.0)).exp();
    let mut sum = term;
    for k in 1..250 {
        term *= -(0.25 * x * x) / (k as f64 * (nu + k as f64));
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-30) {
            break;
        }
    }
    sum
}

/// Hankel expansion for complex order.
fn bessel_j_complex_hankel(nu: Complex64, x: f64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let mut p = Complex64::new(1.0, 0.0);
    let mut q = (mu - 1.0) / (8.0 * x);
    let mut term_p = Complex64::new(1.0, 0.0);
    let mut term_q = q;
    let mut k = 1u32;
    loop {
        let f1 = (mu - ((4 * k - 3) as f64).powi(2)) * (mu - ((4 * k - 1) as f64).powi(2));
        term_p *= -f1 / ((2 * k - 1) as f64 * (2 * k) as f64 * (8.0 * x) * (8.0 * x));
        let f2 = (mu - ((4 * k - 1) as f64).powi(2)) * (mu - ((4 * k + 1) as f64).powi(2));
        term_q *= -f2 / ((2 * k) as f64 * (2 * k + 1) as f64 * (8.0 * x) * (8.0 * x));
        if term_p.norm() + term_q.norm() < 1e-17 || k > 15 {
            break;
        }
        p += term_p;
        q += term_q;
        k += 1;
    }
    let chi = Complex64::new(x, 0.0) - (0.5 * nu + 0.25) * std::f64::consts::PI;
    ((2.0 / (std::f64::consts::PI * x)) as f64).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// J_{2iμ}(x) for real μ. The series loses ~x/2 digits to cancellation and
/// the Hankel expansion wants x ≳ 8|ν²|; the seam at 20 keeps both sides
/// near 1e-9 for |μ| ≤ 2.
pub fn bessel_j_imag_order(mu: f64, x: f64) -> Complex64 {
    let nu = Complex64::new(0.0, 2.0 * mu);
    if x <= 20.0 {
        bessel_j_complex_series(nu, x)
    } else {
        bessel_j_complex_hankel(nu, x)
    }
}

/// K_{2iμ}(x) = ∫₀^∞ e^{−x cosh t} cos(2μt) dt, real for real μ, x > 0.
pub fn bessel_k_imag_order(mu: f64, x: f64) -> f64 {
    assert!(x > 0.0);
    // e^{−x cosh t} < 1e-320 once x cosh t > 740.
    let t_max = (740.0 / x).max(2.0).acosh() + 1.0;
    let val = quad::adaptive(
        |t| Complex64::new((-x * t.cosh()).exp() * (2.0 * mu * t).cos(), 0.0),
        0.0,
        t_max,
        1e-15,
        1e-13,
        400,
        "K-Bessel integral",
    )
    .expect("K integrand is smooth and positive-decaying");
    val.value.re
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: J_n(x) = (1/π) ∫₀^π cos(nθ − x sin θ) dθ.
    fn bessel_j_oracle(n: u32, x: f64) -> f64 {
        let cuts = quad::oscillation_panels(
            0.0,
            std::f64::consts::PI,
            |_| (n as f64 + x) / (2.0 * std::f64::consts::PI),
            1.0,
        );
        let val = quad::adaptive_with_cuts(
            |t| Complex64::new((n as f64 * t - x * t.sin()).cos(), 0.0),
            &cuts,
            1e-14,
            1e-14,
            4000,
            "bessel oracle",
        )
        .unwrap();
        val.value.re / std::f64::consts::PI
    }

    #[test]
    fn j_matches_integral_oracle() {
        for &x in &[0.1, 1.0, 5.0, 12.0, 17.9, 18.1, 25.0, 60.0, 150.0] {
            for n in [0u32, 1, 11] {
                let got = bessel_j(n, x);
                let want = bessel_j_oracle(n, x);
                assert!(
                    (got - want).abs() < 2e-11,
                    "J_{n}({x}): {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn j11_at_zero() {
        assert_eq!(bessel_j(11, 0.0), 0.0);
        assert_eq!(bessel_j(0, 0.0), 1.0);
    }

    #[test]
    fn ln_gamma_known_values() {
        // Γ(5) = 24, Γ(1/2) = √π.
        assert!((gamma(Complex64::new(5.0, 0.0)).re - 24.0).abs() < 1e-10);
        assert!(
            (gamma(Complex64::new(0.5, 0.0)).re - std::f64::consts::PI.sqrt()).abs() < 1e-12
        );
        // |Γ(1/2 + it)|² = π / cosh(πt).
        for t in [0.5f64, 2.0, 10.0] {
            let g = gamma(Complex64::new(0.5, t));
            let expect = std::f64::consts::PI / (std::f64::consts::PI * t).cosh();
            assert!((g.norm_sqr() - expect).abs() < 1e-10 * expect);
        }
    }

    #[test]
    fn j_imag_order_is_conjugate_symmetric() {
        // J_{-2iμ}(x) = conj(J_{2iμ}(x)) for real x.
        for &x in &[0.5, 3.0, 9.0, 20.0] {
            let plus = bessel_j_imag_order(1.0, x);
            let minus = bessel_j_imag_order(-1.0, x);
            assert!((plus - minus.conj()).norm() < 1e-10 * plus.norm().max(1.0));
        }
    }

    #[test]
    fn j_imag_order_seam_consistency() {
        // Series and Hankel evaluations agree at the x = 20 crossover.
        for mu in [0.5f64, 1.0, 2.0] {
            let nu = Complex64::new(0.0, 2.0 * mu);
            for x in [20.0f64, 24.0] {
                let series = bessel_j_complex_series(nu, x);
                let hankel = bessel_j_complex_hankel(nu, x);
                assert!(
                    (series - hankel).norm() < 1e-7 * series.norm().max(1e-3),
                    "mu={mu} x={x}: {series} vs {hankel}"
                );
            }
        }
    }

    #[test]
    fn k_imag_order_decay() {
        // K_{2iμ}(x) ≤ C x^{-1/2} e^{-x} for x ≥ 1 (μ = 1).
        let c = 8.0;
        for &x in &[1.0, 2.0, 5.0, 10.0, 30.0] {
            let k = bessel_k_imag_order(1.0, x).abs();
            assert!(k <= c * x.powf(-0.5) * (-x).exp(), "x={x}: {k}");
        }
        // Known value: K_0(1) = 0.42102443824070834 (μ = 0 reduces to K_0).
        assert!((bessel_k_imag_order(0.0, 1.0) - 0.421_024_438_240_708_34).abs() < 1e-10);
    }
}
