//! Dirichlet characters modulo odd primes and products of two distinct
//! primes, Gauss sums, and the additive-character Fourier expansion of χ.
//!
//! Characters mod a prime p are built from the smallest primitive root g:
//! the character with index j sends g^k to e(jk/(p−1)). Characters mod
//! M₁M₂ are pointwise products of characters mod the prime factors (CRT on
//! the unit group). χ(n) is exactly 0 when gcd(n, q) > 1.

use num_complex::Complex64;

use crate::arith::{self, csum, e, gcd, is_prime, primitive_root};
use crate::error::ArithError;

/// A Dirichlet character stored as a dense value table on [0, modulus).
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    values: Vec<Complex64>,
    order: u64,
    is_primitive: bool,
    /// (prime factor, exponent index) pairs identifying the character in
    /// reports: index j means g ↦ e(j/(p−1)) for the smallest primitive
    /// root g of that factor.
    label: Vec<(u64, u64)>,
}

impl DirichletCharacter {
    /// The character mod prime `p` with index `j` (0 = principal).
    pub fn mod_prime(p: u64, j: u64) -> Result<Self, ArithError> {
        if !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        let j = j % (p - 1).max(1);
        let g = primitive_root(p)?;
        let mut values = vec![Complex64::new(0.0, 0.0); p as usize];
        // Walk powers of g once; dlog(g^k) = k.
        let mut x = 1u64;
        for k in 0..p - 1 {
            values[x as usize] = e((j * k % (p - 1)) as f64 / (p - 1) as f64);
            x = x * g % p;
        }
        let order = (p - 1) / gcd(j, p - 1).max(1);
        Ok(Self {
            modulus: p,
            values,
            order: if j == 0 { 1 } else { order },
            is_primitive: j != 0,
            label: vec![(p, j)],
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_primitive(&self) -> bool {
        self.is_primitive
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    /// Report label: (prime factor, primitive-root-exponent index) pairs.
    pub fn label(&self) -> &[(u64, u64)] {
        &self.label
    }

    /// χ(n), with n reduced mod the modulus; exactly 0 off the units.
    #[inline]
    pub fn eval(&self, n: i64) -> Complex64 {
        self.values[n.rem_euclid(self.modulus as i64) as usize]
    }

    /// The conjugate character χ̄.
    pub fn conjugate(&self) -> Self {
        Self {
            modulus: self.modulus,
            values: self.values.iter().map(|z| z.conj()).collect(),
            order: self.order,
            is_primitive: self.is_primitive,
            label: self
                .label
                .iter()
                .map(|&(p, j)| (p, if j == 0 { 0 } else { p - 1 - j }))
                .collect(),
        }
    }
}

/// All p−1 characters mod the prime p, ordered by index.
pub fn enumerate_characters(p: u64) -> Result<Vec<DirichletCharacter>, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    (0..(p - 1).max(1))
        .map(|j| DirichletCharacter::mod_prime(p, j))
        .collect()
}

/// The primitive (= non-principal) characters mod the prime p.
pub fn primitive_characters(p: u64) -> Result<Vec<DirichletCharacter>, ArithError> {
    Ok(enumerate_characters(p)?
        .into_iter()
        .filter(|c| c.is_primitive())
        .collect())
}

/// Product character χ₁χ₂ mod M₁M₂ for coprime moduli.
pub fn product_character(
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
) -> Result<DirichletCharacter, ArithError> {
    let (m1, m2) = (chi1.modulus, chi2.modulus);
    if gcd(m1, m2) != 1 {
        return Err(ArithError::NonCoprimeModuli(m1, m2));
    }
    let m = m1 * m2;
    let values = (0..m)
        .map(|n| chi1.eval(n as i64) * chi2.eval(n as i64))
        .collect();
    let mut label = chi1.label.clone();
    label.extend_from_slice(&chi2.label);
    Ok(DirichletCharacter {
        modulus: m,
        values,
        order: num_integer::lcm(chi1.order, chi2.order),
        is_primitive: chi1.is_primitive && chi2.is_primitive,
        label,
    })
}

/// A Gauss sum τ(χ) = Σ_{x mod q} χ(x) e(x/q) together with its character's
/// modulus, so the |τ| = √q primitivity check can be replayed.
#[derive(Debug, Clone, Copy)]
pub struct GaussSumValue {
    pub value: Complex64,
    pub modulus: u64,
    pub primitive: bool,
}

impl GaussSumValue {
    /// |value| − √modulus, which should vanish (to 1e-10 relative) for a
    /// primitive character.
    pub fn modulus_defect(&self) -> f64 {
        (self.value.norm() - (self.modulus as f64).sqrt()) / (self.modulus as f64).sqrt()
    }
}

/// τ(χ) by direct summation.
pub fn gauss_sum(chi: &DirichletCharacter) -> GaussSumValue {
    let q = chi.modulus;
    let value = csum((0..q).map(|x| chi.eval(x as i64) * arith::additive_char(x as i64, q)));
    GaussSumValue {
        value,
        modulus: q,
        primitive: chi.is_primitive,
    }
}

/// Both sides of the Fourier expansion of a primitive character,
/// χ(m) = (1/τ(χ̄)) Σ_{c mod M} χ̄(c) e(cm/M).
pub fn fourier_expand_check(
    chi: &DirichletCharacter,
    m: i64,
) -> Result<(Complex64, Complex64), ArithError> {
    if !chi.is_primitive {
        return Err(ArithError::NotPrimitive(chi.modulus));
    }
    let big_m = chi.modulus;
    let bar = chi.conjugate();
    let tau_bar = gauss_sum(&bar).value;
    let lhs = chi.eval(m);
    let rhs = csum((0..big_m).map(|c| bar.eval(c as i64) * arith::additive_char(c as i64 * m, big_m)))
        / tau_bar;
    Ok((lhs, rhs))
}
