//! Exact residue arithmetic and compensated complex accumulation.
//!
//! Everything here is elementary: gcd/inverse arithmetic on `i64`/`u64`,
//! deterministic trial-division primality (moduli in scope stay below 10^6),
//! Möbius/divisor scans, the additive character e(a/q) = exp(2πi a/q), and a
//! Neumaier-compensated complex accumulator used by the long residue-class
//! sums in the other modules.

use num_complex::Complex64;

use crate::error::ArithError;

/// exp(2πi x).
#[inline]
pub fn e(x: f64) -> Complex64 {
    let t = 2.0 * std::f64::consts::PI * x;
    Complex64::new(t.cos(), t.sin())
}

/// Additive character e(a/q) = exp(2πi a/q), reduced so the result depends
/// only on `a mod q`.
#[inline]
pub fn additive_char(a: i64, q: u64) -> Complex64 {
    debug_assert!(q >= 1);
    e(a.rem_euclid(q as i64) as f64 / q as f64)
}

/// Nonnegative gcd.
pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// gcd of a signed value with a modulus.
pub fn gcd_signed(a: i64, q: u64) -> u64 {
    num_integer::gcd(a.unsigned_abs() % q.max(1), q)
}

/// a^k mod q by square-and-multiply (q ≤ 2^32 so products fit in u64 via u128).
pub fn mod_pow(mut a: u64, mut k: u64, q: u64) -> u64 {
    if q == 1 {
        return 0;
    }
    a %= q;
    let mut acc = 1u64;
    while k > 0 {
        if k & 1 == 1 {
            acc = ((acc as u128 * a as u128) % q as u128) as u64;
        }
        a = ((a as u128 * a as u128) % q as u128) as u64;
        k >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `q`: the unique x in [0, q) with a·x ≡ 1 (mod q).
///
/// By the usual convention the inverse modulo 1 is 0. Errors with
/// [`ArithError::NonInvertible`] when gcd(a, q) > 1.
pub fn mod_inverse(a: i64, q: u64) -> Result<u64, ArithError> {
    if q == 1 {
        return Ok(0);
    }
    let a_red = a.rem_euclid(q as i64) as u64;
    let g = gcd(a_red, q);
    if g != 1 {
        return Err(ArithError::NonInvertible { a, q, g });
    }
    // Extended Euclid on (a_red, q).
    let (mut r0, mut r1) = (a_red as i128, q as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    debug_assert_eq!(r0, 1);
    Ok(s0.rem_euclid(q as i128) as u64)
}

/// Deterministic trial-division primality check; intended for n < 10^6.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Möbius function μ(n) by trial factorisation.
pub fn moebius(mut n: u64) -> i64 {
    assert!(n >= 1);
    let mut mu = 1i64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Euler phi by trial factorisation.
pub fn euler_phi(mut n: u64) -> u64 {
    assert!(n >= 1);
    let mut phi = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            phi -= phi / p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// The divisor scan behind the Ramanujan-sum identity: all pairs
/// (d, μ(q/d)) over d | q, ordered by ascending d.
pub fn moebius_divisor_scan(q: u64) -> Vec<(u64, i64)> {
    divisors(q).into_iter().map(|d| (d, moebius(q / d))).collect()
}

/// Units of Z/qZ, ascending. For q = 1 this is `[0]` (the trivial group).
pub fn units(q: u64) -> Vec<u64> {
    if q == 1 {
        return vec![0];
    }
    (0..q).filter(|&x| gcd(x, q) == 1).collect()
}

/// Smallest primitive root modulo a prime p.
pub fn primitive_root(p: u64) -> Result<u64, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    if p == 2 {
        return Ok(1);
    }
    let order = p - 1;
    let mut factors = Vec::new();
    let mut n = order;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    'outer: for g in 2..p {
        for &f in &factors {
            if mod_pow(g, order / f, p) == 1 {
                continue 'outer;
            }
        }
        return Ok(g);
    }
    unreachable!("every prime has a primitive root")
}

/// A composite modulus M = M₁·M₂ with both factors odd primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactoredModulus {
    m1: u64,
    m2: u64,
}

impl FactoredModulus {
    /// Build M = m1·m2, checking that m1, m2 are distinct primes > 2.
    pub fn new(m1: u64, m2: u64) -> Result<Self, ArithError> {
        if !is_prime(m1) || m1 == 2 {
            return Err(ArithError::NotPrime(m1));
        }
        if !is_prime(m2) || m2 == 2 {
            return Err(ArithError::NotPrime(m2));
        }
        if m1 == m2 {
            return Err(ArithError::NonCoprimeModuli(m1, m2));
        }
        Ok(Self { m1, m2 })
    }

    pub fn m1(&self) -> u64 {
        self.m1
    }

    pub fn m2(&self) -> u64 {
        self.m2
    }

    pub fn m(&self) -> u64 {
        self.m1 * self.m2
    }
}

/// Neumaier-compensated complex accumulator.
///
/// Summing N unit-modulus terms keeps the absolute rounding error below
/// a few ulps per term, far inside the 10⁻¹²·N contract the identity
/// checks rely on.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexAccumulator {
    sum_re: f64,
    sum_im: f64,
    comp_re: f64,
    comp_im: f64,
}

impl ComplexAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.sum_re = neumaier_step(self.sum_re, z.re, &mut self.comp_re);
        self.sum_im = neumaier_step(self.sum_im, z.im, &mut self.comp_im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.sum_re + self.comp_re, self.sum_im + self.comp_im)
    }
}

#[inline]
fn neumaier_step(sum: f64, v: f64, comp: &mut f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *comp += (sum - t) + v;
    } else {
        *comp += (v - t) + sum;
    }
    t
}

/// Compensated sum of an iterator of complex terms.
pub fn csum<I: IntoIterator<Item = Complex64>>(terms: I) -> Complex64 {
    let mut acc = ComplexAccumulator::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert_eq!(mod_inverse(1, 19).unwrap(), 1);
        assert_eq!(mod_inverse(1, 1).unwrap(), 0);
        assert!(matches!(
            mod_inverse(4, 6),
            Err(ArithError::NonInvertible { g: 2, .. })
        ));
    }

    #[test]
    fn moebius_divisor_scan_examples() {
        assert_eq!(
            moebius_divisor_scan(6),
            vec![(1, 1), (2, -1), (3, -1), (6, 1)]
        );
        assert_eq!(moebius_divisor_scan(1), vec![(1, 1)]);
        assert!(moebius_divisor_scan(12).contains(&(3, 0)));
        // Σ_{d|q} μ(d) = [q = 1]
        for q in 1..200u64 {
            let s: i64 = divisors(q).iter().map(|&d| moebius(d)).sum();
            assert_eq!(s, i64::from(q == 1));
        }
    }

    #[test]
    fn additive_char_examples() {
        let tol = 1e-14;
        assert!((additive_char(0, 5) - Complex64::new(1.0, 0.0)).norm() < tol);
        assert!((additive_char(3, 6) - Complex64::new(-1.0, 0.0)).norm() < tol);
        assert!((additive_char(1, 4) - Complex64::new(0.0, 1.0)).norm() < tol);
    }

    #[test]
    fn additive_char_orthogonality() {
        // (1/q)·Σ_{b mod q} e(nb/q) = [q | n], the congruence-detection step.
        for q in 1..=50u64 {
            for n in -200i64..=200 {
                let s = csum((0..q).map(|b| additive_char(n * b as i64, q)));
                let expect = if n.rem_euclid(q as i64) == 0 { 1.0 } else { 0.0 };
                assert!(
                    (s / q as f64 - expect).norm() < 1e-12,
                    "q={q} n={n}"
                );
            }
        }
    }

    #[test]
    fn factored_modulus_invariants() {
        let m = FactoredModulus::new(5, 3).unwrap();
        assert_eq!(m.m(), 15);
        assert!(FactoredModulus::new(4, 3).is_err());
        assert!(FactoredModulus::new(5, 5).is_err());
        assert!(FactoredModulus::new(2, 7).is_err());
    }

    #[test]
    fn accumulator_unit_terms() {
        // 10^5 unit-modulus terms, error well under 1e-12·N.
        let n = 100_000usize;
        let mut acc = ComplexAccumulator::new();
        for k in 0..n {
            acc.add(e(k as f64 / 97.0));
        }
        // 97 | N would make the sum 0; with N = 100000 = 97·1030 + 90 the tail
        // is a 90-term geometric sum computable directly.
        let tail = csum((0..90).map(|k| e(k as f64 / 97.0)));
        assert!((acc.value() - tail).norm() < 1e-12 * n as f64);
    }

    proptest! {
        #[test]
        fn mod_inverse_is_involution(a in 1i64..10_000, q in 2u64..10_000) {
            prop_assume!(gcd_signed(a, q) == 1);
            let inv = mod_inverse(a, q).unwrap();
            let back = mod_inverse(inv as i64, q).unwrap();
            prop_assert_eq!(back as i64, a.rem_euclid(q as i64));
        }

        #[test]
        fn additive_char_periodicity(a in -10_000i64..10_000, q in 1u64..2_000) {
            let lhs = additive_char(a + q as i64, q);
            let rhs = additive_char(a, q);
            prop_assert!((lhs - rhs).norm() < 1e-14);
        }

        #[test]
        fn primitive_root_generates(p in prop::sample::select(vec![3u64, 5, 7, 11, 13, 17, 101, 997])) {
            let g = primitive_root(p).unwrap();
            let mut seen = std::collections::HashSet::new();
            let mut x = 1u64;
            for _ in 0..p - 1 {
                x = x * g % p;
                seen.insert(x);
            }
            prop_assert_eq!(seen.len() as u64, p - 1);
        }
    }
}
