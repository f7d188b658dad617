//! Brute-force and factored evaluation of the twisted character sums and
//! their correlation sums.
//!
//! The two basic sums are, for a composite modulus M = M₁M₂ and primitive
//! χ = χ₁χ₂,
//!
//! ```text
//! 𝔠₁ = Σ*_{a mod qM₁} Σ_{c mod M, c ≢ −q̄aM₂ (M₁)} χ̄(c) S(−rā, n₂; qM₁r/n₁) e(m·(aM₂+cq)^{-1}/(qM))
//! 𝔠₂ = Σ*_{a mod qM₁} Σ_{c mod M, c ≡ −q̄aM₂ (M₁)} χ̄(c) S(−rā, n₂; qM₁r/n₁) e(m·((aM₂+cq)/M₁)^{-1}/(qM₂))
//! ```
//!
//! and the factored forms multiply Gauss sums against the divisor sum 𝔅 and
//! the unit sum 𝔇 of L·Kl₂ products. The factored 𝔠₂ carries a χ₁(n̄₂)
//! factor: the c-sum evaluation produces χ̄₁(n₂) (zero when M₁ | n₂), and
//! the brute force confirms it, so it is kept even though the assembled
//! display drops it.
//!
//! Every modular inverse taken inside a mixed-modulus additive character is
//! taken modulo the denominator of that character, as follows:
//!   - in 𝔠₁/𝔠₂ the ā of S(−rā, n₂; qM₁r/n₁) is the inverse mod qM₁,
//!     reduced mod qM₁r/n₁ (well-defined since n₁ | qr);
//!   - (aM₂+cq)^{-1} is taken mod qM (case 𝔠₁) and mod qM₂ after dividing
//!     by M₁ (case 𝔠₂);
//!   - in 𝔅 the (M₁u)^{-1} is taken mod qr/n₁;
//!   - in 𝔇 the arguments of L and Kl₂ are classes mod M₁.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::arith::{additive_char, gcd, mod_inverse, moebius_divisor_scan, units, ComplexAccumulator, FactoredModulus};
use crate::characters::{gauss_sum, DirichletCharacter};
use crate::error::ArithError;
use crate::expsums::{kl2_normalized, kloosterman, l_sum, l_table, mult_convolution, shifted_correlation, Kl2Table};

/// Parameter tuple for the sums 𝔠₁, 𝔠₂.
#[derive(Debug, Clone)]
pub struct CharSumInstance {
    pub n1: u64,
    pub n2: u64,
    pub m: u64,
    pub q: u64,
    pub r: u64,
    pub modulus: FactoredModulus,
    pub chi1: DirichletCharacter,
    pub chi2: DirichletCharacter,
    /// Sign attached to n₂ in the evaluation (the ± of the dual sums).
    pub sign_n2: i64,
    /// Sign attached to m.
    pub sign_m: i64,
}

impl CharSumInstance {
    /// Check the structural invariants; names the failing condition.
    pub fn validate(&self) -> Result<(), ArithError> {
        let (m1, m2, m) = (self.modulus.m1(), self.modulus.m2(), self.modulus.m());
        let fail = |msg: String| Err(ArithError::InvariantViolation(msg));
        if gcd(self.q, m) != 1 {
            return fail(format!("gcd(q={}, M={m}) != 1", self.q));
        }
        if gcd(self.r, m) != 1 {
            return fail(format!("gcd(r={}, M={m}) != 1", self.r));
        }
        if self.r >= m1.min(m2) {
            return fail(format!("r={} >= min(M1={m1}, M2={m2})", self.r));
        }
        if (self.q * self.r) % self.n1 != 0 {
            return fail(format!("n1={} does not divide q*r={}", self.n1, self.q * self.r));
        }
        if gcd(self.n1, m1) != 1 {
            return fail(format!("gcd(n1={}, M1={m1}) != 1", self.n1));
        }
        if gcd(self.m, m2) != 1 {
            return fail(format!("gcd(m={}, M2={m2}) != 1", self.m));
        }
        if self.chi1.modulus() != m1 || !self.chi1.is_primitive() {
            return fail(format!("chi1 must be primitive mod M1={m1}"));
        }
        if self.chi2.modulus() != m2 || !self.chi2.is_primitive() {
            return fail(format!("chi2 must be primitive mod M2={m2}"));
        }
        if self.sign_n2.abs() != 1 || self.sign_m.abs() != 1 {
            return fail("signs must be ±1".into());
        }
        Ok(())
    }

    fn signed_n2(&self) -> i64 {
        self.sign_n2 * self.n2 as i64
    }

    fn signed_m(&self) -> i64 {
        self.sign_m * self.m as i64
    }

    /// Modulus qM₁r/n₁ of the inner Kloosterman sum.
    fn kloosterman_modulus(&self) -> u64 {
        self.q * self.modulus.m1() * self.r / self.n1
    }
}

/// Kloosterman values S(x, n₂; c) for fixed (n₂, c), filled on demand.
struct KloostermanMemo {
    c: u64,
    n: i64,
    table: Vec<Option<Complex64>>,
}

impl KloostermanMemo {
    fn new(c: u64, n: i64) -> Self {
        Self { c, n, table: vec![None; c as usize] }
    }

    fn get(&mut self, x: i64) -> Complex64 {
        let i = x.rem_euclid(self.c as i64) as usize;
        if let Some(v) = self.table[i] {
            return v;
        }
        let v = kloosterman(i as i64, self.n, self.c);
        self.table[i] = Some(v);
        v
    }
}

/// 𝔠₁ by the direct double sum over a mod qM₁ and c mod M.
pub fn c1_bruteforce(inst: &CharSumInstance) -> Result<Complex64, ArithError> {
    inst.validate()?;
    let (m1, m2, m) = (inst.modulus.m1(), inst.modulus.m2(), inst.modulus.m());
    let (q, r) = (inst.q, inst.r);
    let qm1 = q * m1;
    let qm = q * m;
    let c_star = inst.kloosterman_modulus();
    let mut kl = KloostermanMemo::new(c_star, inst.signed_n2());
    let chi_bar: Vec<Complex64> = (0..m)
        .map(|c| (inst.chi1.eval(c as i64) * inst.chi2.eval(c as i64)).conj())
        .collect();
    let q_bar_m1 = mod_inverse(q as i64, m1)? as i64;
    let sm = inst.signed_m();

    let mut acc = ComplexAccumulator::new();
    for a in units(qm1) {
        let a_bar = mod_inverse(a as i64, qm1)? as i64;
        let s_val = kl.get(-(r as i64) * a_bar);
        if s_val.norm() == 0.0 {
            continue;
        }
        let forbidden = (-q_bar_m1 * a as i64 * m2 as i64).rem_euclid(m1 as i64) as u64;
        for c in 0..m {
            if chi_bar[c as usize].norm_sqr() == 0.0 || c % m1 == forbidden {
                continue;
            }
            let denom = (a * m2 + c * q) % qm;
            let inv_d = mod_inverse(denom as i64, qm)? as i64;
            acc.add(chi_bar[c as usize] * s_val * additive_char(sm * inv_d, qm));
        }
    }
    Ok(acc.value())
}

/// 𝔠₂ by the direct double sum (c restricted to c ≡ −q̄aM₂ mod M₁).
pub fn c2_bruteforce(inst: &CharSumInstance) -> Result<Complex64, ArithError> {
    inst.validate()?;
    let (m1, m2, m) = (inst.modulus.m1(), inst.modulus.m2(), inst.modulus.m());
    let (q, r) = (inst.q, inst.r);
    let qm1 = q * m1;
    let qm = q * m;
    let qm2 = q * m2;
    let c_star = inst.kloosterman_modulus();
    let mut kl = KloostermanMemo::new(c_star, inst.signed_n2());
    let chi_bar: Vec<Complex64> = (0..m)
        .map(|c| (inst.chi1.eval(c as i64) * inst.chi2.eval(c as i64)).conj())
        .collect();
    let q_bar_m1 = mod_inverse(q as i64, m1)? as i64;
    let sm = inst.signed_m();

    let mut acc = ComplexAccumulator::new();
    for a in units(qm1) {
        let a_bar = mod_inverse(a as i64, qm1)? as i64;
        let s_val = kl.get(-(r as i64) * a_bar);
        let required = (-q_bar_m1 * a as i64 * m2 as i64).rem_euclid(m1 as i64) as u64;
        for c in 0..m {
            if chi_bar[c as usize].norm_sqr() == 0.0 || c % m1 != required {
                continue;
            }
            // M₁ divides aM₂+cq exactly on this congruence class.
            let x = (a * m2 + c * q) % qm;
            debug_assert_eq!(x % m1, 0);
            let y = (x / m1) % qm2;
            let inv_y = mod_inverse(y as i64, qm2)? as i64;
            acc.add(chi_bar[c as usize] * s_val * additive_char(sm * inv_y, qm2));
        }
    }
    Ok(acc.value())
}

/// 𝔅(n₁, n₂, m; q) = Σ_{d|q} d μ(q/d) Σ*_{u mod qr/n₁, m ≡ M₂²n₁u (d)} e(n₂·(M₁u)^{-1}/(qr/n₁)).
///
/// n₂ and m may carry signs. Reduces to a single unconstrained term when
/// qr/n₁ = 1.
pub fn b_sum(
    n1: u64,
    n2: i64,
    m: i64,
    q: u64,
    r: u64,
    modulus: &FactoredModulus,
) -> Result<Complex64, ArithError> {
    if (q * r) % n1 != 0 {
        return Err(ArithError::DivisibilityViolation(format!(
            "n1={n1} does not divide q*r={}",
            q * r
        )));
    }
    let (m1, m2) = (modulus.m1(), modulus.m2());
    let c2 = q * r / n1;
    let mut total = ComplexAccumulator::new();
    for (d, mu) in moebius_divisor_scan(q) {
        if mu == 0 {
            continue;
        }
        let mut inner = ComplexAccumulator::new();
        for u in units(c2) {
            let lhs = (m - (m2 * m2 % d) as i64 * (n1 % d) as i64 * (u % d) as i64)
                .rem_euclid(d as i64);
            if lhs != 0 {
                continue;
            }
            let inv = mod_inverse((m1 * u) as i64, c2)? as i64;
            inner.add(additive_char(n2 * inv, c2));
        }
        total.add(inner.value() * (d as f64 * mu as f64));
    }
    Ok(total.value())
}

/// 𝔇(n₁, n₂, m, q; M₁) = Σ*_{a mod M₁} L_{m(qM₂)^{-1}, M₂}(a; M₁) · Kl₂(−rn₂·(a(qr/n₁)²)^{-1}; M₁).
pub fn d_sum(
    n1: u64,
    n2: i64,
    m: i64,
    q: u64,
    r: u64,
    modulus: &FactoredModulus,
    chi1: &DirichletCharacter,
) -> Result<Complex64, ArithError> {
    let m1 = modulus.m1();
    let m2 = modulus.m2();
    for (name, v) in [("q", q), ("r", r), ("n1", n1)] {
        if gcd(v, m1) != 1 {
            return Err(ArithError::NonUnit { name, value: v as i64, modulus: m1 });
        }
    }
    let alpha = (m * mod_inverse((q * m2) as i64, m1)? as i64).rem_euclid(m1 as i64);
    let beta = (m2 % m1) as i64;
    let c2 = q * r / n1;
    let w_sq = {
        let t = (c2 % m1) as i64;
        (t * t).rem_euclid(m1 as i64)
    };
    let mut acc = ComplexAccumulator::new();
    for a in 1..m1 as i64 {
        let inv = mod_inverse(a * w_sq, m1)? as i64;
        acc.add(
            l_sum(alpha, beta, a, m1, chi1)
                * kl2_normalized(-(r as i64) * n2 * inv, m1),
        );
    }
    Ok(acc.value())
}

/// 𝔠₁ from the factorization χ₁(q)·χ₂(q²M₁m̄)·τ(χ₂)·M₁·𝔅·𝔇.
pub fn c1_factored(inst: &CharSumInstance) -> Result<Complex64, ArithError> {
    inst.validate()?;
    let (m1, m2) = (inst.modulus.m1(), inst.modulus.m2());
    let (sn2, sm) = (inst.signed_n2(), inst.signed_m());
    let m_inv = mod_inverse(sm, m2)? as i64;
    let chi2_arg = ((inst.q * inst.q % m2) as i64 * (m1 % m2) as i64 * m_inv).rem_euclid(m2 as i64);
    let tau2 = gauss_sum(&inst.chi2).value;
    let b = b_sum(inst.n1, sn2, sm, inst.q, inst.r, &inst.modulus)?;
    let d = d_sum(inst.n1, sn2, sm, inst.q, inst.r, &inst.modulus, &inst.chi1)?;
    Ok(inst.chi1.eval(inst.q as i64) * inst.chi2.eval(chi2_arg) * tau2 * m1 as f64 * b * d)
}

/// 𝔠₂ from the factorization
/// χ₁(q·(M₂r)^{-1}·(qr/n₁)²)·χ₁(n̄₂)·χ₂(q²·(mM₁)^{-1})·τ²(χ₁)·τ(χ₂)·𝔅(n₁,n₂,M₁²m;q).
pub fn c2_factored(inst: &CharSumInstance) -> Result<Complex64, ArithError> {
    inst.validate()?;
    let (m1, m2) = (inst.modulus.m1(), inst.modulus.m2());
    let (sn2, sm) = (inst.signed_n2(), inst.signed_m());
    let c2 = inst.q * inst.r / inst.n1;
    let chi1_arg = {
        let inv_m2r = mod_inverse((m2 * inst.r) as i64, m1)? as i64;
        let t = (c2 % m1) as i64;
        ((inst.q % m1) as i64 * inv_m2r % m1 as i64 * (t * t % m1 as i64)).rem_euclid(m1 as i64)
    };
    // χ₁(n̄₂): zero branch when M₁ | n₂, matching the vanishing unit sum in
    // the direct evaluation.
    let chi1_n2 = inst.chi1.eval(sn2).conj();
    let chi2_arg = {
        let inv = mod_inverse(sm * (m1 % m2) as i64, m2)? as i64;
        ((inst.q * inst.q % m2) as i64 * inv).rem_euclid(m2 as i64)
    };
    let tau1 = gauss_sum(&inst.chi1).value;
    let tau2 = gauss_sum(&inst.chi2).value;
    let b = b_sum(inst.n1, sn2, m1 as i64 * m1 as i64 * sm, inst.q, inst.r, &inst.modulus)?;
    Ok(inst.chi1.eval(chi1_arg) * chi1_n2 * inst.chi2.eval(chi2_arg) * tau1 * tau1 * tau2 * b)
}

/// Two [`CharSumInstance`]s sharing (n₁, q₁, r, M, χ's) with separate
/// (q₂, m) and (q₂′, m′), plus the dual frequency ñ₂.
#[derive(Debug, Clone)]
pub struct CorrelationInstance {
    pub n1: u64,
    pub q1: u64,
    pub q2: u64,
    pub q2p: u64,
    pub r: u64,
    pub m: u64,
    pub mp: u64,
    pub modulus: FactoredModulus,
    pub chi1: DirichletCharacter,
    pub chi2: DirichletCharacter,
    pub sign_n2: i64,
    pub sign_m: i64,
    pub n2_tilde: i64,
}

impl CorrelationInstance {
    /// Validate the q = q₁q₂ coprimality split and both underlying instances.
    pub fn validate(&self) -> Result<(), ArithError> {
        let fail = |msg: String| Err(ArithError::InvariantViolation(msg));
        // q1 | (n1 r)^∞: every prime of q1 divides n1·r.
        let mut q1 = self.q1;
        for p in 2..=q1 {
            while q1 % p == 0 {
                if (self.n1 * self.r) % p != 0 {
                    return fail(format!("prime {p} | q1 does not divide n1*r"));
                }
                q1 /= p;
            }
        }
        if gcd(self.q2, self.n1 * self.r) != 1 {
            return fail(format!("gcd(q2={}, n1*r) != 1", self.q2));
        }
        if gcd(self.q2p, self.n1 * self.r) != 1 {
            return fail(format!("gcd(q2'={}, n1*r) != 1", self.q2p));
        }
        if (self.q1 * self.r) % self.n1 != 0 {
            return fail(format!("n1={} does not divide q1*r", self.n1));
        }
        self.side(self.q2, self.m).validate()?;
        self.side(self.q2p, self.mp).validate()
    }

    /// The underlying single sum with modulus part q = q₁·q₂side.
    pub fn side(&self, q2: u64, m: u64) -> CharSumInstance {
        CharSumInstance {
            n1: self.n1,
            n2: 1,
            m,
            q: self.q1 * q2,
            r: self.r,
            modulus: self.modulus,
            chi1: self.chi1.clone(),
            chi2: self.chi2.clone(),
            sign_n2: self.sign_n2,
            sign_m: self.sign_m,
        }
    }

    /// Period P = q₂q₂′q₁r/n₁ of the q-side correlation.
    pub fn period_q(&self) -> u64 {
        self.q2 * self.q2p * self.q1 * self.r / self.n1
    }

    /// Full period M₁·P of ñ₂ ↦ 𝒞(ñ₂).
    pub fn period(&self) -> u64 {
        self.modulus.m1() * self.period_q()
    }
}

/// Key identifying a cached 𝔠₁-vector: the side's (q, m) with the shared
/// data fixed per engine.
type SideKey = (u64, u64);

/// Evaluator for the correlation sums, caching per-side 𝔠₁ vectors.
pub struct CorrelationEngine {
    c1_vectors: HashMap<SideKey, Vec<Complex64>>,
}

impl Default for CorrelationEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl CorrelationEngine {
    pub fn new() -> Self {
        Self { c1_vectors: HashMap::new() }
    }

    /// v ↦ 𝔠₁(n₁, ±v, ±m, q) over one period qM₁r/n₁, by brute force.
    fn c1_vector(&mut self, inst: &CorrelationInstance, q2: u64, m: u64) -> Result<&Vec<Complex64>, ArithError> {
        let side = inst.side(q2, m);
        let key = (side.q, m);
        if !self.c1_vectors.contains_key(&key) {
            let period = side.q * side.modulus.m1() * side.r / side.n1;
            let mut vec = Vec::with_capacity(period as usize);
            for v in 0..period {
                let mut s = side.clone();
                s.n2 = v;
                vec.push(c1_bruteforce(&s)?);
            }
            self.c1_vectors.insert(key, vec);
        }
        Ok(&self.c1_vectors[&key])
    }

    /// 𝒞(ñ₂) by the direct v-sum over v mod M₁q₂q₂′q₁r/n₁ of brute-force
    /// 𝔠₁-products.
    pub fn correlation_c(&mut self, inst: &CorrelationInstance) -> Result<Complex64, ArithError> {
        inst.validate()?;
        let period = inst.period();
        // n₁/(M₁q₂q₂′q₁r) = 1/(M₁·P).
        let pref = 1.0 / period as f64;
        let left_len = {
            let v = self.c1_vector(inst, inst.q2, inst.m)?;
            v.len()
        };
        let right_len = {
            let v = self.c1_vector(inst, inst.q2p, inst.mp)?;
            v.len()
        };
        let mut acc = ComplexAccumulator::new();
        for v in 0..period {
            let a = self.c1_vectors[&(inst.q1 * inst.q2, inst.m)][(v as usize) % left_len];
            let b = self.c1_vectors[&(inst.q1 * inst.q2p, inst.mp)][(v as usize) % right_len];
            acc.add(a * b.conj() * additive_char(inst.n2_tilde * v as i64, period));
        }
        Ok(acc.value() * pref)
    }

    /// 𝒞₁(ñ₂) by its definition: the M₁-part of the CRT split, a v-sum of
    /// 𝔇-products with the twist e((P)^{-1}ñ₂v/M₁).
    pub fn correlation_c1_definitional(
        &self,
        inst: &CorrelationInstance,
    ) -> Result<Complex64, ArithError> {
        let m1 = inst.modulus.m1();
        let p_inv = mod_inverse(inst.period_q() as i64, m1)? as i64;
        let mut acc = ComplexAccumulator::new();
        for v in 0..m1 as i64 {
            let d_left = d_sum(
                inst.n1,
                inst.sign_n2 * v,
                inst.sign_m * inst.m as i64,
                inst.q1 * inst.q2,
                inst.r,
                &inst.modulus,
                &inst.chi1,
            )?;
            let d_right = d_sum(
                inst.n1,
                inst.sign_n2 * v,
                inst.sign_m * inst.mp as i64,
                inst.q1 * inst.q2p,
                inst.r,
                &inst.modulus,
                &inst.chi1,
            )?;
            acc.add(d_left * d_right.conj() * additive_char(p_inv * inst.n2_tilde * v, m1));
        }
        Ok(acc.value() / m1 as f64)
    }

    /// The trace-function parameters (α, β, γ, η and primes) attached to a
    /// correlation instance.
    pub fn trace_parameters(inst: &CorrelationInstance) -> Result<(i64, i64, i64, i64, i64, i64, i64), ArithError> {
        let m1 = inst.modulus.m1();
        let mi = m1 as i64;
        let c2 = (inst.q1 * inst.q2 * inst.r / inst.n1) % m1;
        let c2p = (inst.q1 * inst.q2p * inst.r / inst.n1) % m1;
        let alpha = (inst.sign_m
            * inst.m as i64
            * mod_inverse((inst.q1 * inst.q2 % m1) as i64, m1)? as i64
            % mi
            * mod_inverse((inst.modulus.m2() % m1) as i64, m1)? as i64)
            .rem_euclid(mi);
        let alpha_p = (inst.sign_m
            * inst.mp as i64
            * mod_inverse((inst.q1 * inst.q2p % m1) as i64, m1)? as i64
            % mi
            * mod_inverse((inst.modulus.m2() % m1) as i64, m1)? as i64)
            .rem_euclid(mi);
        let beta = (inst.modulus.m2() % m1) as i64;
        let gamma = (-inst.sign_n2 * inst.r as i64
            * mod_inverse((c2 * c2 % m1) as i64, m1)? as i64)
            .rem_euclid(mi);
        let gamma_p = (-inst.sign_n2 * inst.r as i64
            * mod_inverse((c2p * c2p % m1) as i64, m1)? as i64)
            .rem_euclid(mi);
        let eta = (inst.n2_tilde * mod_inverse(inst.period_q() as i64, m1)? as i64).rem_euclid(mi);
        Ok((alpha, beta, gamma, alpha_p, gamma_p, eta, c2 as i64))
    }

    /// 𝒞₁(ñ₂) through the trace-function route:
    /// Σ_v (K⋆L)(v)·conj((K'⋆L')(v))·e(ηv/M₁) with K = Kl₂(γ·), L = L_{α,β}.
    pub fn correlation_c1_trace_form(
        &self,
        inst: &CorrelationInstance,
    ) -> Result<Complex64, ArithError> {
        let m1 = inst.modulus.m1();
        let (alpha, beta, gamma, alpha_p, gamma_p, eta, _) = Self::trace_parameters(inst)?;
        let kl2 = Kl2Table::build(m1);
        let k: Vec<Complex64> = (0..m1 as i64).map(|u| kl2.get(gamma * u)).collect();
        let kp: Vec<Complex64> = (0..m1 as i64).map(|u| kl2.get(gamma_p * u)).collect();
        let l = l_table(alpha, beta, m1, &inst.chi1);
        let lp = l_table(alpha_p, beta, m1, &inst.chi1);
        let conv = mult_convolution(&k, &l, m1);
        let conv_p = mult_convolution(&kp, &lp, m1);
        Ok(shifted_correlation(&conv, &conv_p, eta, m1))
    }

    /// 𝒞₂(ñ₂) by the direct v-sum of 𝔅-products with the twist
    /// e(M₁^{-1}ñ₂v/P).
    pub fn correlation_c2_direct(&self, inst: &CorrelationInstance) -> Result<Complex64, ArithError> {
        let p = inst.period_q();
        let m1_inv = mod_inverse(inst.modulus.m1() as i64, p)? as i64;
        self.b_correlation(inst, |v| m1_inv * inst.n2_tilde * v, 1)
    }

    /// 𝒞₂*(ñ₂): the same object with m ↦ M₁²m and the untwisted character
    /// e(ñ₂v/P).
    pub fn correlation_c2_star_direct(
        &self,
        inst: &CorrelationInstance,
    ) -> Result<Complex64, ArithError> {
        let m1sq = (inst.modulus.m1() * inst.modulus.m1()) as i64;
        self.b_correlation(inst, |v| inst.n2_tilde * v, m1sq)
    }

    fn b_correlation<F: Fn(i64) -> i64>(
        &self,
        inst: &CorrelationInstance,
        twist: F,
        m_scale: i64,
    ) -> Result<Complex64, ArithError> {
        let p = inst.period_q();
        let mut acc = ComplexAccumulator::new();
        for v in 0..p as i64 {
            let b_left = b_sum(
                inst.n1,
                inst.sign_n2 * v,
                inst.sign_m * m_scale * inst.m as i64,
                inst.q1 * inst.q2,
                inst.r,
                &inst.modulus,
            )?;
            let b_right = b_sum(
                inst.n1,
                inst.sign_n2 * v,
                inst.sign_m * m_scale * inst.mp as i64,
                inst.q1 * inst.q2p,
                inst.r,
                &inst.modulus,
            )?;
            acc.add(b_left * b_right.conj() * additive_char(twist(v), p));
        }
        Ok(acc.value() * inst.n1 as f64 / (inst.q2 * inst.q2p * inst.q1 * inst.r) as f64)
    }

    /// 𝒞₂(ñ₂) by the reindexed divisor/congruence count; exact integer.
    pub fn correlation_c2_reindexed(&self, inst: &CorrelationInstance) -> Result<Complex64, ArithError> {
        self.reindexed_count(inst, inst.n2_tilde, 1)
    }

    /// 𝒞₂*(ñ₂) by the reindexed count (congruences carry M₁²m and M₁ñ₂).
    pub fn correlation_c2_star_reindexed(
        &self,
        inst: &CorrelationInstance,
    ) -> Result<Complex64, ArithError> {
        let m1 = inst.modulus.m1() as i64;
        self.reindexed_count(inst, m1 * inst.n2_tilde, m1 * m1)
    }

    fn reindexed_count(
        &self,
        inst: &CorrelationInstance,
        shifted_n2: i64,
        m_scale: i64,
    ) -> Result<Complex64, ArithError> {
        let p = inst.period_q() as i64;
        let m2sq = (inst.modulus.m2() * inst.modulus.m2()) as i64;
        let c2 = inst.q1 * inst.q2 * inst.r / inst.n1;
        let c2p = inst.q1 * inst.q2p * inst.r / inst.n1;
        let mut total = 0i64;
        for (d, mu) in moebius_divisor_scan(inst.q1 * inst.q2) {
            if mu == 0 {
                continue;
            }
            for (dp, mup) in moebius_divisor_scan(inst.q1 * inst.q2p) {
                if mup == 0 {
                    continue;
                }
                let mut count = 0i64;
                for u in units(c2) {
                    // n₁u ≡ ±(M₂²)^{-1}·(scale·m) (mod d), written multiplied
                    // through by M₂².
                    let lhs = (m2sq * (inst.n1 % d) as i64 % d as i64 * (u % d) as i64
                        - inst.sign_m * m_scale * inst.m as i64)
                        .rem_euclid(d as i64);
                    if lhs != 0 {
                        continue;
                    }
                    let u_bar = if c2 == 1 { 0 } else { mod_inverse(u as i64, c2)? as i64 };
                    for up in units(c2p) {
                        let lhsp = (m2sq * (inst.n1 % dp) as i64 % dp as i64 * (up % dp) as i64
                            - inst.sign_m * m_scale * inst.mp as i64)
                            .rem_euclid(dp as i64);
                        if lhsp != 0 {
                            continue;
                        }
                        let up_bar =
                            if c2p == 1 { 0 } else { mod_inverse(up as i64, c2p)? as i64 };
                        let cond = (inst.q2 as i64 * up_bar - inst.q2p as i64 * u_bar
                            - inst.sign_n2 * shifted_n2)
                            .rem_euclid(p);
                        if cond == 0 {
                            count += 1;
                        }
                    }
                }
                total += d as i64 * mu * dp as i64 * mup * count;
            }
        }
        Ok(Complex64::new(total as f64, 0.0))
    }

    /// 𝒟(ñ₂): the correlation of factored 𝔠₂-forms, i.e. the unimodular
    /// prefactor times τ-moduli times 𝒞₂*(ñ₂). Returns (𝒟, prefactor
    /// magnitude) so the |𝒟| = M₁²M₂|𝒞₂*| factorization can be checked
    /// against the numerically computed Gauss sums.
    pub fn correlation_d(&self, inst: &CorrelationInstance) -> Result<(Complex64, f64), ArithError> {
        let (m1, m2) = (inst.modulus.m1(), inst.modulus.m2());
        let tau1 = gauss_sum(&inst.chi1).value;
        let tau2 = gauss_sum(&inst.chi2).value;
        let chi1_part = {
            let arg = |q2: u64| -> Result<i64, ArithError> {
                let c2 = (inst.q1 * q2 * inst.r / inst.n1) % m1;
                let inv = mod_inverse((m2 * inst.r) as i64, m1)? as i64;
                Ok(((inst.q1 * q2 % m1) as i64 * inv % m1 as i64 * ((c2 * c2 % m1) as i64))
                    .rem_euclid(m1 as i64))
            };
            inst.chi1.eval(arg(inst.q2)?) * inst.chi1.eval(arg(inst.q2p)?).conj()
        };
        let chi2_part = {
            let arg = |q2: u64, m: u64| -> Result<i64, ArithError> {
                let q = inst.q1 * q2;
                let inv = mod_inverse(inst.sign_m * m as i64 * (m1 % m2) as i64, m2)? as i64;
                Ok(((q * q % m2) as i64 * inv).rem_euclid(m2 as i64))
            };
            inst.chi2.eval(arg(inst.q2, inst.m)?) * inst.chi2.eval(arg(inst.q2p, inst.mp)?).conj()
        };
        let prefactor = chi1_part * chi2_part * tau1 * tau1 * (tau1 * tau1).conj()
            * tau2 * tau2.conj();
        let c2_star = self.correlation_c2_star_direct(inst)?;
        Ok((prefactor * c2_star, prefactor.norm()))
    }
}

/// The degenerate-direction proxy for a correlation instance:
/// m·q₂′ ≡ m′·q₂ and q₂² ≡ q₂′² (mod M₁), i.e. both trace-function ratios
/// are 1.
pub fn is_degenerate(inst: &CorrelationInstance) -> bool {
    let m1 = inst.modulus.m1() as i64;
    let a = (inst.m as i64 * inst.q2p as i64 - inst.mp as i64 * inst.q2 as i64).rem_euclid(m1);
    let b = (inst.q2 as i64 * inst.q2 as i64 - inst.q2p as i64 * inst.q2p as i64).rem_euclid(m1);
    a == 0 && b == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::primitive_characters;

    fn instance(
        m1: u64,
        m2: u64,
        q: u64,
        r: u64,
        n1: u64,
        n2: u64,
        m: u64,
        signs: (i64, i64),
    ) -> CharSumInstance {
        CharSumInstance {
            n1,
            n2,
            m,
            q,
            r,
            modulus: FactoredModulus::new(m1, m2).unwrap(),
            chi1: primitive_characters(m1).unwrap().remove(0),
            chi2: primitive_characters(m2).unwrap().remove(0),
            sign_n2: signs.0,
            sign_m: signs.1,
        }
    }

    fn assert_close(a: Complex64, b: Complex64, scale: f64, ctx: &str) {
        assert!(
            (a - b).norm() <= 1e-8 * (1.0 + scale),
            "{ctx}: {a} vs {b} (diff {})",
            (a - b).norm()
        );
    }

    #[test]
    fn c1_factorization_spot_cases() {
        for (m1, m2, q, r, n1, n2, m) in [
            (5u64, 3u64, 2u64, 1u64, 1u64, 1u64, 1u64),
            (7, 5, 4, 2, 2, 3, 2),
            (3, 5, 1, 1, 1, 2, 1),
            (5, 3, 2, 2, 4, 1, 1),
        ] {
            for signs in [(1, 1), (-1, 1), (1, -1), (-1, -1)] {
                let inst = instance(m1, m2, q, r, n1, n2, m, signs);
                let brute = c1_bruteforce(&inst).unwrap();
                let fact = c1_factored(&inst).unwrap();
                assert_close(brute, fact, brute.norm(), &format!("c1 {m1},{m2},{q},{r},{n1},{n2},{m} {signs:?}"));
            }
        }
    }

    #[test]
    fn c1_maximal_n1() {
        // n₁ = qr puts the Kloosterman modulus at M₁.
        let inst = instance(5, 3, 2, 1, 2, 1, 1, (1, 1));
        assert_eq!(inst.kloosterman_modulus(), 5);
        let brute = c1_bruteforce(&inst).unwrap();
        let fact = c1_factored(&inst).unwrap();
        assert_close(brute, fact, brute.norm(), "c1 maximal n1");
    }

    #[test]
    fn c2_factorization_spot_cases() {
        for (m1, m2, q, r, n1, n2, m) in [
            (3u64, 5u64, 2u64, 1u64, 1u64, 1u64, 1u64),
            (5, 7, 4, 1, 4, 2, 3),
            (5, 3, 2, 2, 1, 3, 2),
        ] {
            for signs in [(1, 1), (-1, -1)] {
                let inst = instance(m1, m2, q, r, n1, n2, m, signs);
                let brute = c2_bruteforce(&inst).unwrap();
                let fact = c2_factored(&inst).unwrap();
                assert_close(brute, fact, brute.norm(), &format!("c2 {m1},{m2},{q},{r},{n1},{n2},{m} {signs:?}"));
            }
        }
    }

    #[test]
    fn c2_degenerate_n2_class() {
        // n₂ ≡ 0 mod M₁: both routes must agree (both vanish through the
        // χ₁(n̄₂) factor / empty unit sum).
        let inst = instance(3, 5, 2, 1, 1, 3, 1, (1, 1));
        let brute = c2_bruteforce(&inst).unwrap();
        let fact = c2_factored(&inst).unwrap();
        assert!(brute.norm() < 1e-9, "direct c2 should vanish, got {brute}");
        assert!(fact.norm() < 1e-12);
    }

    #[test]
    fn invariant_violations_are_reported() {
        let mut inst = instance(5, 3, 2, 1, 1, 1, 1, (1, 1));
        inst.m = 3; // gcd(m, M2) = 3
        assert!(matches!(
            c1_bruteforce(&inst),
            Err(ArithError::InvariantViolation(_))
        ));
        let inst2 = instance(5, 3, 2, 1, 4, 1, 1, (1, 1));
        assert!(inst2.validate().is_err(), "n1=4 does not divide qr=2");
    }

    #[test]
    fn b_sum_edge_cases() {
        let m15 = FactoredModulus::new(5, 3).unwrap();
        // q = r = n1 = 1: single unconstrained term 1.
        let b = b_sum(1, 1, 1, 1, 1, &m15).unwrap();
        assert!((b - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // Direct enumeration for (q=2, r=1, n1=1): d ∈ {1,2}, u ∈ (Z/2)*.
        let b = b_sum(1, 1, 1, 2, 1, &m15).unwrap();
        let c2 = 2u64;
        let mut expect = Complex64::new(0.0, 0.0);
        for (d, mu) in [(1u64, -1i64), (2, 1)] {
            for u in units(c2) {
                if (1 - (9 % d) as i64 * (u % d) as i64).rem_euclid(d as i64) != 0 {
                    continue;
                }
                let inv = mod_inverse((5 * u) as i64, c2).unwrap() as i64;
                expect += additive_char(inv, c2) * d as f64 * mu as f64;
            }
        }
        assert!((b - expect).norm() < 1e-12);
        assert!(b_sum(3, 1, 1, 2, 1, &m15).is_err());
    }

    #[test]
    fn b_sum_trivial_bound() {
        let m15 = FactoredModulus::new(5, 3).unwrap();
        for q in [1u64, 2, 4] {
            for n2 in 0..4i64 {
                let b = b_sum(1, n2, 1, q, 2, &m15).unwrap();
                let bound: f64 = moebius_divisor_scan(q)
                    .iter()
                    .map(|&(d, mu)| (d as f64) * (mu as f64).abs() * crate::arith::euler_phi(2 * q) as f64)
                    .sum();
                assert!(b.norm() <= bound + 1e-9);
            }
        }
    }

    #[test]
    fn d_sum_bounds_and_errors() {
        let m15 = FactoredModulus::new(3, 5).unwrap();
        let chi1 = primitive_characters(3).unwrap().remove(0);
        let d = d_sum(1, 1, 1, 2, 1, &m15, &chi1).unwrap();
        // |𝔇| ≤ (M₁−1)·(√M₁)·2 crude bound from |L| ≤ √M₁, |Kl₂| ≤ 2.
        assert!(d.norm() <= 2.0 * 2.0 * 3f64.sqrt() + 1e-9);
        assert!(d_sum(1, 1, 1, 3, 1, &m15, &chi1).is_err());
    }

    fn corr_instance(
        m1: u64,
        m2: u64,
        (q1, q2, q2p): (u64, u64, u64),
        r: u64,
        n1: u64,
        (m, mp): (u64, u64),
        n2_tilde: i64,
    ) -> CorrelationInstance {
        CorrelationInstance {
            n1,
            q1,
            q2,
            q2p,
            r,
            m,
            mp,
            modulus: FactoredModulus::new(m1, m2).unwrap(),
            chi1: primitive_characters(m1).unwrap().remove(0),
            chi2: primitive_characters(m2).unwrap().remove(0),
            sign_n2: 1,
            sign_m: 1,
            n2_tilde,
        }
    }

    #[test]
    fn correlation_crt_factorization() {
        for (params, n2t) in [
            ((1u64, 2u64, 2u64), 0i64),
            ((1, 2, 2), 1),
            ((1, 1, 4), 0),
            ((1, 2, 7), 2),
        ] {
            let inst = corr_instance(5, 3, params, 1, 1, (1, 1), n2t);
            let mut engine = CorrelationEngine::new();
            let c = engine.correlation_c(&inst).unwrap();
            let c1 = engine.correlation_c1_definitional(&inst).unwrap();
            let c2 = engine.correlation_c2_direct(&inst).unwrap();
            let m1 = inst.modulus.m1() as f64;
            let m2 = inst.modulus.m2() as f64;
            let lhs = c.norm();
            let rhs = m1 * m1 * m2 * c1.norm() * c2.norm();
            if lhs > 1e-6 || rhs > 1e-6 {
                assert!(
                    (lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.max(rhs)),
                    "params={params:?} n2t={n2t}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn correlation_c1_routes_agree() {
        for m1 in [5u64, 7, 11] {
            let inst = corr_instance(m1, 3, (1, 2, 2), 1, 1, (1, 2), 1);
            let engine = CorrelationEngine::new();
            let a = engine.correlation_c1_definitional(&inst).unwrap();
            let b = engine.correlation_c1_trace_form(&inst).unwrap();
            assert!((a - b).norm() < 1e-10, "m1={m1}: {a} vs {b}");
        }
    }

    #[test]
    fn correlation_c1_degenerate_magnitude() {
        // m q₂' ≡ m' q₂ and q₂ = q₂' with ñ₂ = 0: |𝒞₁(0)| ≈ M₁.
        let inst = corr_instance(7, 3, (1, 2, 2), 1, 1, (1, 1), 0);
        assert!(is_degenerate(&inst));
        let engine = CorrelationEngine::new();
        let c1 = engine.correlation_c1_definitional(&inst).unwrap();
        assert!(
            c1.norm() > 7.0 / 3.0 && c1.norm() < 3.0 * 7.0,
            "|C1(0)| = {} should be ≈ M1 = 7",
            c1.norm()
        );
    }

    #[test]
    fn correlation_c2_routes_agree() {
        let cases = [
            corr_instance(5, 3, (1, 2, 2), 1, 1, (1, 2), 0),
            corr_instance(5, 3, (1, 2, 2), 1, 1, (1, 2), 3),
            corr_instance(5, 3, (1, 4, 2), 1, 1, (2, 1), 1),
            corr_instance(7, 5, (2, 1, 3), 1, 2, (1, 2), 2),
            corr_instance(5, 3, (2, 7, 1), 2, 4, (1, 1), 1),
        ];
        for inst in cases {
            inst.validate().unwrap();
            let engine = CorrelationEngine::new();
            let direct = engine.correlation_c2_direct(&inst).unwrap();
            let re = engine.correlation_c2_reindexed(&inst).unwrap();
            assert!(
                (direct - re).norm() < 1e-10,
                "q=({},{},{}) n2t={}: {direct} vs {re}",
                inst.q1,
                inst.q2,
                inst.q2p,
                inst.n2_tilde
            );
        }
    }

    #[test]
    fn correlation_c2_star_and_d() {
        let inst = corr_instance(5, 3, (1, 2, 2), 1, 1, (1, 2), 1);
        let engine = CorrelationEngine::new();
        let direct = engine.correlation_c2_star_direct(&inst).unwrap();
        let re = engine.correlation_c2_star_reindexed(&inst).unwrap();
        assert!((direct - re).norm() < 1e-10, "{direct} vs {re}");
        let (d, pref_norm) = engine.correlation_d(&inst).unwrap();
        let m1m2 = 25.0 * 3.0;
        assert!((pref_norm - m1m2).abs() < 1e-8 * m1m2);
        assert!((d.norm() - m1m2 * direct.norm()).abs() < 1e-8 * (1.0 + d.norm()));
    }

    #[test]
    fn correlation_periodicity() {
        let inst = corr_instance(5, 3, (1, 2, 7), 1, 1, (1, 1), 2);
        let mut engine = CorrelationEngine::new();
        let a = engine.correlation_c(&inst).unwrap();
        let shifted = CorrelationInstance {
            n2_tilde: inst.n2_tilde + inst.period() as i64,
            ..inst.clone()
        };
        let b = engine.correlation_c(&shifted).unwrap();
        assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()));
    }
}
