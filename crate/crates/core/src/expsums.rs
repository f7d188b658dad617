//! The exponential-sum calculus: Ramanujan sums, Kloosterman sums, the
//! normalized Kl₂, the twisted sums L_{α,β}, normalized multiplicative
//! convolution, the finite Fourier transform on F_{M₁}, and the closed
//! forms L̂ and Z(v).
//!
//! Functions on F_{M₁} are dense `Vec<Complex64>` tables of length M₁;
//! the convolution and transform oracles are the O(M₁²) double sums.

use num_complex::Complex64;

use crate::arith::{self, additive_char, csum, gcd_signed, is_prime, mod_inverse, moebius_divisor_scan, units};
use crate::characters::{gauss_sum, DirichletCharacter};
use crate::error::ArithError;

/// Ramanujan sum R_q(b), evaluated both as the unit sum Σ*_{a mod q} e(ba/q)
/// and as the divisor form Σ_{d|(q,b)} d·μ(q/d).
///
/// The two routes are checked against each other to 1e-10 and the divisor
/// form (an integer) is returned.
pub fn ramanujan_sum(q: u64, b: i64) -> Complex64 {
    assert!(q >= 1);
    let unit_route = csum(units(q).into_iter().map(|a| additive_char(b * a as i64, q)));
    let divisor_route: i64 = moebius_divisor_scan(q)
        .into_iter()
        .filter(|&(d, _)| b.rem_euclid(d as i64) == 0)
        .map(|(d, mu)| d as i64 * mu)
        .sum();
    let value = Complex64::new(divisor_route as f64, 0.0);
    debug_assert!(
        (unit_route - value).norm() < 1e-10 * (1.0 + q as f64),
        "Ramanujan sum routes disagree at q={q}, b={b}"
    );
    value
}

/// Classical Kloosterman sum S(m, n; c) = Σ*_{x mod c} e((mx + n x̄)/c).
pub fn kloosterman(m: i64, n: i64, c: u64) -> Complex64 {
    assert!(c >= 1);
    if c == 1 {
        return Complex64::new(1.0, 0.0);
    }
    csum((1..c).filter(|&x| arith::gcd(x, c) == 1).map(|x| {
        let xbar = mod_inverse(x as i64, c).expect("x is a unit");
        additive_char(m * x as i64 + n * xbar as i64, c)
    }))
}

/// Kl₂(n; M₁) = M₁^{−1/2} Σ_{x₁x₂ ≡ n (M₁)} e((x₁+x₂)/M₁) for prime M₁.
///
/// For n ≢ 0 this is S(1, n; M₁)/√M₁; for n ≡ 0 the x₁ = 0 and x₂ = 0
/// branches leave −M₁^{−1/2}.
pub fn kl2_normalized(n: i64, m1: u64) -> Complex64 {
    debug_assert!(is_prime(m1));
    let scale = 1.0 / (m1 as f64).sqrt();
    if n.rem_euclid(m1 as i64) == 0 {
        Complex64::new(-scale, 0.0)
    } else {
        kloosterman(1, n, m1) * scale
    }
}

/// Dense table of Kl₂(n; M₁) over n in [0, M₁); one unit-group pass per
/// residue.
#[derive(Debug, Clone)]
pub struct Kl2Table {
    m1: u64,
    values: Vec<Complex64>,
}

impl Kl2Table {
    pub fn build(m1: u64) -> Self {
        let values = (0..m1).map(|n| kl2_normalized(n as i64, m1)).collect();
        Self { m1, values }
    }

    #[inline]
    pub fn get(&self, n: i64) -> Complex64 {
        self.values[n.rem_euclid(self.m1 as i64) as usize]
    }
}

/// L_{α,β}(v; M₁) = M₁^{−1/2} Σ_{b mod M₁, (b+βv, M₁)=1} χ̄₁(b) e(α·(b+βv)^{-1}/M₁).
///
/// The b with b + βv ≡ 0 is skipped; the b ≡ 0 term contributes 0 through
/// χ̄₁(0) = 0.
pub fn l_sum(alpha: i64, beta: i64, v: i64, m1: u64, chi1: &DirichletCharacter) -> Complex64 {
    debug_assert!(is_prime(m1));
    debug_assert_eq!(chi1.modulus(), m1);
    let chi_bar = chi1.conjugate();
    let scale = 1.0 / (m1 as f64).sqrt();
    csum((0..m1 as i64).filter_map(|b| {
        let denom = b + beta * v;
        if denom.rem_euclid(m1 as i64) == 0 {
            return None;
        }
        let inv = mod_inverse(denom, m1).expect("denominator is a unit") as i64;
        Some(chi_bar.eval(b) * additive_char(alpha * inv, m1))
    })) * scale
}

/// Dense table of v ↦ L_{α,β}(v; M₁).
pub fn l_table(alpha: i64, beta: i64, m1: u64, chi1: &DirichletCharacter) -> Vec<Complex64> {
    (0..m1 as i64).map(|v| l_sum(alpha, beta, v, m1, chi1)).collect()
}

#[inline]
fn idx(v: i64, m1: u64) -> usize {
    v.rem_euclid(m1 as i64) as usize
}

/// Normalized multiplicative convolution
/// (K⋆L)(v) = M₁^{−1/2} Σ_{u ≠ 0} K(u) L(v/u) on F_{M₁}.
pub fn mult_convolution(k: &[Complex64], l: &[Complex64], m1: u64) -> Vec<Complex64> {
    debug_assert_eq!(k.len(), m1 as usize);
    debug_assert_eq!(l.len(), m1 as usize);
    let scale = 1.0 / (m1 as f64).sqrt();
    (0..m1 as i64)
        .map(|v| {
            csum((1..m1 as i64).map(|u| {
                let ubar = mod_inverse(u, m1).expect("u is a unit") as i64;
                k[idx(u, m1)] * l[idx(v * ubar, m1)]
            })) * scale
        })
        .collect()
}

/// Finite Fourier transform K̂(v) = M₁^{−1/2} Σ_a K(a) e(av/M₁) on F_{M₁}.
pub fn finite_fourier(k: &[Complex64], m1: u64) -> Vec<Complex64> {
    debug_assert_eq!(k.len(), m1 as usize);
    let scale = 1.0 / (m1 as f64).sqrt();
    (0..m1 as i64)
        .map(|v| csum((0..m1 as i64).map(|a| k[idx(a, m1)] * additive_char(a * v, m1))) * scale)
        .collect()
}

/// Closed form of the transform of L_{α,β}:
/// L̂(v) = (√M₁/τ(χ₁))·χ₁(β^{-1}v)·Kl₂(β^{-1}α v; M₁).
pub fn l_hat_closed_form(
    alpha: i64,
    beta: i64,
    v: i64,
    m1: u64,
    chi1: &DirichletCharacter,
    kl2: &Kl2Table,
) -> Result<Complex64, ArithError> {
    if !chi1.is_primitive() {
        return Err(ArithError::NotPrimitive(m1));
    }
    for (name, x) in [("alpha", alpha), ("beta", beta)] {
        if gcd_signed(x, m1) != 1 {
            return Err(ArithError::NonUnit { name, value: x, modulus: m1 });
        }
    }
    let beta_inv = mod_inverse(beta, m1)? as i64;
    let tau = gauss_sum(chi1).value;
    Ok((m1 as f64).sqrt() / tau * chi1.eval(beta_inv * v) * kl2.get(beta_inv * alpha * v))
}

/// Unit parameters (α, β, γ, η and primed copies) for the trace-function
/// correlation machinery, together with the character χ₁.
#[derive(Debug, Clone)]
pub struct TraceFunctionParams {
    pub m1: u64,
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub alpha_p: i64,
    pub beta_p: i64,
    pub gamma_p: i64,
    pub eta: i64,
    pub chi1: DirichletCharacter,
}

impl TraceFunctionParams {
    /// Check that all residues named by the correlation statements are
    /// units mod M₁.
    pub fn validate_units(&self) -> Result<(), ArithError> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("alpha'", self.alpha_p),
            ("beta'", self.beta_p),
            ("gamma'", self.gamma_p),
        ] {
            if gcd_signed(v, self.m1) != 1 {
                return Err(ArithError::NonUnit { name, value: v, modulus: self.m1 });
            }
        }
        Ok(())
    }
}

/// Z(v) = (1/τ(χ₁)) Σ_{u≠0} Kl₂(βγu; M₁) χ₁(uv) Kl₂(αuv; M₁), the closed
/// form of the transform of K⋆L, as a dense table over v.
pub fn z_transform(
    alpha: i64,
    beta: i64,
    gamma: i64,
    m1: u64,
    chi1: &DirichletCharacter,
    kl2: &Kl2Table,
) -> Result<Vec<Complex64>, ArithError> {
    for (name, x) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
        if gcd_signed(x, m1) != 1 {
            return Err(ArithError::NonUnit { name, value: x, modulus: m1 });
        }
    }
    if !chi1.is_primitive() {
        return Err(ArithError::NotPrimitive(m1));
    }
    let tau = gauss_sum(chi1).value;
    Ok((0..m1 as i64)
        .map(|v| {
            csum((1..m1 as i64).map(|u| {
                kl2.get(beta * gamma * u) * chi1.eval(u * v) * kl2.get(alpha * u * v)
            })) / tau
        })
        .collect())
}

/// The definitional route to Z: finite Fourier transform of the
/// multiplicative convolution of K(u) = Kl₂(γu) with L = L_{α,β}.
pub fn z_via_transform_chain(
    alpha: i64,
    beta: i64,
    gamma: i64,
    m1: u64,
    chi1: &DirichletCharacter,
    kl2: &Kl2Table,
) -> Vec<Complex64> {
    let k: Vec<Complex64> = (0..m1 as i64).map(|u| kl2.get(gamma * u)).collect();
    let l = l_table(alpha, beta, m1, chi1);
    finite_fourier(&mult_convolution(&k, &l, m1), m1)
}

/// Σ_v f(v)·conj(g(v))·e(ηv/M₁), the shifted correlation of two tables.
pub fn shifted_correlation(f: &[Complex64], g: &[Complex64], eta: i64, m1: u64) -> Complex64 {
    csum((0..m1 as i64).map(|v| f[idx(v, m1)] * g[idx(v, m1)].conj() * additive_char(eta * v, m1)))
}

/// Σ_v f̂(v)·conj(ĝ(v−η)), the dual side of the shifted Plancherel identity.
pub fn shifted_correlation_dual(
    f_hat: &[Complex64],
    g_hat: &[Complex64],
    eta: i64,
    m1: u64,
) -> Complex64 {
    csum((0..m1 as i64).map(|v| f_hat[idx(v, m1)] * g_hat[idx(v - eta, m1)].conj()))
}

/// One row of the square-root-cancellation statistic: the correlation
/// Σ_v Z(v) conj(Z'(v−η)) and its ratio to √M₁.
#[derive(Debug, Clone, Copy)]
pub struct CancellationRow {
    pub eta: i64,
    pub value: Complex64,
    pub ratio_to_sqrt_m1: f64,
}

/// Correlations Σ_v Z(v) conj(Z'(v−η)) for every η mod M₁ from the closed
/// forms of Z and Z', one row per η.
pub fn cancellation_scan(params: &TraceFunctionParams) -> Result<Vec<CancellationRow>, ArithError> {
    params.validate_units()?;
    let m1 = params.m1;
    let kl2 = Kl2Table::build(m1);
    let z = z_transform(params.alpha, params.beta, params.gamma, m1, &params.chi1, &kl2)?;
    let zp = z_transform(params.alpha_p, params.beta_p, params.gamma_p, m1, &params.chi1, &kl2)?;
    let sqrt_m1 = (m1 as f64).sqrt();
    Ok((0..m1 as i64)
        .map(|eta| {
            let value = shifted_correlation_dual(&z, &zp, eta, m1);
            CancellationRow { eta, value, ratio_to_sqrt_m1: value.norm() / sqrt_m1 }
        })
        .collect())
}

/// The computable proxy for the degenerate direction of the cancellation
/// statistic: α ≡ α' and βγ ≡ β'γ' (mod M₁), i.e. both trace-function
/// ratios equal 1.
pub fn is_degenerate_pair(params: &TraceFunctionParams) -> bool {
    let m = params.m1 as i64;
    (params.alpha - params.alpha_p).rem_euclid(m) == 0
        && (params.beta * params.gamma - params.beta_p * params.gamma_p).rem_euclid(m) == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::primitive_characters;
    use proptest::prelude::*;

    fn quadratic(p: u64) -> DirichletCharacter {
        crate::characters::enumerate_characters(p)
            .unwrap()
            .into_iter()
            .find(|c| c.order() == 2)
            .unwrap()
    }

    #[test]
    fn ramanujan_examples() {
        assert!((ramanujan_sum(6, 3) - Complex64::new(-2.0, 0.0)).norm() < 1e-10);
        assert!((ramanujan_sum(5, 1) - Complex64::new(-1.0, 0.0)).norm() < 1e-10);
        for q in [1u64, 2, 3, 4, 6, 12, 30] {
            let phi = arith::euler_phi(q) as f64;
            assert!((ramanujan_sum(q, 0) - Complex64::new(phi, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn kloosterman_examples() {
        assert!((kloosterman(1, 1, 2) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let expect = 2.0 + 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
        assert!((kloosterman(1, 1, 5) - Complex64::new(expect, 0.0)).norm() < 1e-12);
        // S(m,n;c) = S(n,m;c) via x ↔ x̄.
        for c in [5u64, 7, 12, 15] {
            for m in 0..4i64 {
                for n in 0..4i64 {
                    let d = (kloosterman(m, n, c) - kloosterman(n, m, c)).norm();
                    assert!(d < 1e-11, "c={c} m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn kloosterman_is_real() {
        for c in [3u64, 5, 7, 11, 13, 21] {
            for n in 0..c as i64 {
                assert!(kloosterman(1, n, c).im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn kl2_examples() {
        let s5 = 2.0 + 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
        assert!((kl2_normalized(1, 5).re - s5 / 5f64.sqrt()).abs() < 1e-12);
        for p in [3u64, 5, 7, 11] {
            assert!((kl2_normalized(0, p).re + 1.0 / (p as f64).sqrt()).abs() < 1e-12);
        }
        // Direct definition cross-check: pair sum over x1·x2 ≡ n.
        for p in [5u64, 7] {
            for n in 0..p as i64 {
                let direct = csum((0..p as i64).flat_map(|x1| {
                    (0..p as i64).filter_map(move |x2| {
                        ((x1 * x2 - n).rem_euclid(p as i64) == 0)
                            .then_some((x1 + x2, p))
                    })
                }).map(|(s, p)| additive_char(s, p))) / (p as f64).sqrt();
                assert!((kl2_normalized(n, p) - direct).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn weil_bound_exhaustive_small() {
        for p in [3u64, 5, 7, 11, 13] {
            let bound = 2.0 * (p as f64).sqrt();
            for m in 1..p as i64 {
                for n in 1..p as i64 {
                    assert!(kloosterman(m, n, p).norm() <= bound + 1e-9);
                }
            }
            for n in 0..p as i64 {
                assert!(kl2_normalized(n, p).norm() <= 2.0 + 1e-9);
            }
        }
    }

    #[test]
    fn l_sum_examples() {
        let chi = quadratic(3);
        // Only b = 1 survives: (1/√3)·χ̄(1)·e(2/3).
        let got = l_sum(1, 1, 1, 3, &chi);
        let expect = additive_char(2, 3) / 3f64.sqrt();
        assert!((got - expect).norm() < 1e-12);
        assert!((got - Complex64::new(-0.2886751345948129, -0.5)).norm() < 1e-10);

        // v = 0: direct 2-term sum Σ_{b≠0} χ̄(b) e(b̄/3)/√3.
        let got0 = l_sum(1, 1, 0, 3, &chi);
        let expect0 = (chi.eval(1) * additive_char(1, 3) + chi.eval(2) * additive_char(2, 3))
            / 3f64.sqrt();
        assert!((got0 - expect0).norm() < 1e-12);

        // Term count: M₁−1 units except when βv ≡ 0 allows b = 0 to enter
        // the (b+βv,M₁)=1 set, where χ̄(0)=0 still kills it; |L| ≤ √M₁.
        for p in [5u64, 7, 11] {
            for chi in primitive_characters(p).unwrap() {
                for v in 0..p as i64 {
                    assert!(l_sum(2, 3, v, p, &chi).norm() <= (p as f64).sqrt() + 1e-9);
                }
            }
        }
    }

    #[test]
    fn convolution_trivial_cases() {
        let m1 = 7u64;
        let mut delta1 = vec![Complex64::new(0.0, 0.0); 7];
        delta1[1] = Complex64::new(1.0, 0.0);
        let conv = mult_convolution(&delta1, &delta1, m1);
        for v in 0..7usize {
            let expect = if v == 1 { 1.0 / 7f64.sqrt() } else { 0.0 };
            assert!((conv[v] - Complex64::new(expect, 0.0)).norm() < 1e-12);
        }

        let ones = vec![Complex64::new(1.0, 0.0); 7];
        let l: Vec<Complex64> = (0..7).map(|k| e(k as f64 / 7.0)).collect();
        let conv = mult_convolution(&ones, &l, m1);
        // Constant in v on the units (v/u sweeps the units); at v = 0 every
        // term is L(0).
        let expect = csum((1..7).map(|u| l[u])) / 7f64.sqrt();
        for v in 1..7usize {
            assert!((conv[v] - expect).norm() < 1e-12);
        }
        assert!((conv[0] - 6.0 * l[0] / 7f64.sqrt()).norm() < 1e-12);
    }

    use crate::arith::e;

    #[test]
    fn convolution_matches_double_sum_oracle() {
        // Paper's K = Kl₂(γ·), L = L_{α,β} case at M₁ = 5 against the O(M₁²)
        // double sum with the other reindexing.
        let m1 = 5u64;
        let chi = quadratic(m1);
        let kl2 = Kl2Table::build(m1);
        let k: Vec<Complex64> = (0..5i64).map(|u| kl2.get(2 * u)).collect();
        let l = l_table(1, 1, m1, &chi);
        let conv = mult_convolution(&k, &l, m1);
        for v in 0..5i64 {
            let direct = csum((1..5i64).map(|u| {
                k[idx(v * u, m1)] * l[idx(mod_inverse(u, m1).unwrap() as i64, m1)]
            })) / 5f64.sqrt();
            assert!((conv[idx(v, m1)] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_trivial_and_parseval() {
        let m1 = 11u64;
        let mut delta0 = vec![Complex64::new(0.0, 0.0); 11];
        delta0[0] = Complex64::new(1.0, 0.0);
        for v in finite_fourier(&delta0, m1) {
            assert!((v - Complex64::new(1.0 / 11f64.sqrt(), 0.0)).norm() < 1e-12);
        }
        let ones = vec![Complex64::new(1.0, 0.0); 11];
        let hat = finite_fourier(&ones, m1);
        assert!((hat[0] - Complex64::new(11f64.sqrt(), 0.0)).norm() < 1e-11);
        for v in 1..11usize {
            assert!(hat[v].norm() < 1e-11);
        }
    }

    #[test]
    fn l_hat_closed_form_matches_transform() {
        for (m1, alpha, beta) in [(5u64, 1i64, 1i64), (7, 2, 3)] {
            let kl2 = Kl2Table::build(m1);
            for chi in primitive_characters(m1).unwrap() {
                let hat = finite_fourier(&l_table(alpha, beta, m1, &chi), m1);
                for v in 0..m1 as i64 {
                    let closed = l_hat_closed_form(alpha, beta, v, m1, &chi, &kl2).unwrap();
                    assert!(
                        (closed - hat[idx(v, m1)]).norm() < 1e-10,
                        "m1={m1} v={v}"
                    );
                }
                assert!(l_hat_closed_form(alpha, beta, 0, m1, &chi, &kl2)
                    .unwrap()
                    .norm() < 1e-12);
            }
        }
    }

    #[test]
    fn z_closed_form_matches_chain() {
        for (m1, a, b, g) in [(5u64, 1i64, 1i64, 1i64), (11, 2, 3, 5)] {
            let kl2 = Kl2Table::build(m1);
            for chi in primitive_characters(m1).unwrap() {
                let z = z_transform(a, b, g, m1, &chi, &kl2).unwrap();
                let chain = z_via_transform_chain(a, b, g, m1, &chi, &kl2);
                assert!(z[0].norm() < 1e-12);
                for v in 0..m1 as usize {
                    assert!((z[v] - chain[v]).norm() < 1e-10, "m1={m1} v={v}");
                }
            }
        }
        let chi = quadratic(5);
        let kl2 = Kl2Table::build(5);
        assert!(z_transform(5, 1, 1, 5, &chi, &kl2).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fourier_parseval(seed in 0u64..1_000_000) {
            let m1 = 13u64;
            let k: Vec<Complex64> = (0..13u64)
                .map(|j| e(((seed.wrapping_mul(j * j + 1)) % 101) as f64 / 101.0))
                .collect();
            let hat = finite_fourier(&k, m1);
            let norm_k: f64 = k.iter().map(|z| z.norm_sqr()).sum();
            let norm_hat: f64 = hat.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((norm_k - norm_hat).abs() < 1e-10 * norm_k.max(1.0));
        }

        #[test]
        fn fourier_double_transform_is_reflection(seed in 0u64..1_000_000) {
            let m1 = 11u64;
            let k: Vec<Complex64> = (0..11u64)
                .map(|j| e(((seed.wrapping_mul(3 * j + 7)) % 89) as f64 / 89.0))
                .collect();
            let twice = finite_fourier(&finite_fourier(&k, m1), m1);
            for v in 0..11i64 {
                prop_assert!((twice[idx(v, m1)] - k[idx(-v, m1)]).norm() < 1e-12);
            }
        }

        #[test]
        fn convolution_reindexing_agrees(va in 1i64..7, vb in 1i64..7) {
            // (K⋆L)(v) summed over u equals the sum over vu.
            let m1 = 7u64;
            let chi = quadratic(m1);
            let kl2 = Kl2Table::build(m1);
            let k: Vec<Complex64> = (0..7i64).map(|u| kl2.get(va * u)).collect();
            let l = l_table(vb, 1, m1, &chi);
            let conv = mult_convolution(&k, &l, m1);
            for v in 1..7i64 {
                let re = csum((1..7i64).map(|u| {
                    k[idx(v * u, m1)] * l[idx(mod_inverse(u, m1).unwrap() as i64, m1)]
                })) / 7f64.sqrt();
                prop_assert!((conv[idx(v, m1)] - re).norm() < 1e-12);
            }
        }
    }
}
