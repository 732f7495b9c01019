use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_traits::{One, Zero};

use super::{factor_rational, factor_u64, rat_to_f64, ExactError, Rat};

/// A multiplicative base: a prime or the transcendental π.
///
/// Primes sort before π, so `2π` prints as `2^1*pi^1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    Prime(u64),
    Pi,
}

impl Base {
    pub fn ln(self) -> f64 {
        match self {
            Base::Prime(p) => (p as f64).ln(),
            Base::Pi => std::f64::consts::PI.ln(),
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Prime(p) => write!(f, "{p}"),
            Base::Pi => f.write_str("pi"),
        }
    }
}

/// Sparse map base → nonzero rational exponent. Shared representation of
/// [`PowerProduct`] and the twist of a unit phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub(crate) struct ExponentMap(BTreeMap<Base, Rat>);

impl ExponentMap {
    pub(crate) fn add_term(&mut self, base: Base, e: &Rat) {
        if e.is_zero() {
            return;
        }
        let slot = self.0.entry(base).or_insert_with(Rat::zero);
        *slot += e;
        if slot.is_zero() {
            self.0.remove(&base);
        }
    }

    pub(crate) fn add_map(&mut self, other: &ExponentMap) {
        for (b, e) in &other.0 {
            self.add_term(*b, e);
        }
    }

    pub(crate) fn scaled(&self, k: &Rat) -> ExponentMap {
        if k.is_zero() {
            return ExponentMap::default();
        }
        ExponentMap(self.0.iter().map(|(b, e)| (*b, e * k)).collect())
    }

    /// Exponent map of `q^e` for a positive rational `q`.
    pub(crate) fn of_rational_pow(q: &Rat, e: &Rat) -> Result<ExponentMap, ExactError> {
        let mut m = ExponentMap::default();
        for (p, k) in factor_rational(q)? {
            m.add_term(Base::Prime(p), &(Rat::from_integer(k.into()) * e));
        }
        Ok(m)
    }

    pub(crate) fn get(&self, base: Base) -> Rat {
        self.0.get(&base).cloned().unwrap_or_else(Rat::zero)
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = (&Base, &Rat)> {
        self.0.iter()
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Σ e_b · ln b` in floating point.
    pub(crate) fn ln_sum(&self) -> f64 {
        self.0.iter().map(|(b, e)| rat_to_f64(e) * b.ln()).sum()
    }
}

/// An exact positive real `∏ b^{e_b}` over primes and π with rational
/// exponents. Equality is equality of exponent maps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct PowerProduct(pub(crate) ExponentMap);

impl PowerProduct {
    pub fn one() -> Self {
        PowerProduct::default()
    }

    /// Factor a positive rational into primes.
    pub fn from_rational(q: &Rat) -> Result<Self, ExactError> {
        Self::rational_pow(q, &Rat::one())
    }

    /// `q^e` for positive rational `q` and rational `e`.
    pub fn rational_pow(q: &Rat, e: &Rat) -> Result<Self, ExactError> {
        ExponentMap::of_rational_pow(q, e).map(PowerProduct)
    }

    /// `n^e` for a positive integer `n`, factored into primes.
    pub fn integer_pow(n: u64, e: &Rat) -> Result<Self, ExactError> {
        if n == 0 {
            return Err(ExactError::NonPositive(Rat::zero()));
        }
        let mut m = ExponentMap::default();
        for (p, k) in factor_u64(n) {
            m.add_term(Base::Prime(p), &(e * Rat::from_integer(k.into())));
        }
        Ok(PowerProduct(m))
    }

    pub fn pi_pow(e: Rat) -> Self {
        let mut m = ExponentMap::default();
        m.add_term(Base::Pi, &e);
        PowerProduct(m)
    }

    /// `(2π)^e`, stored as `2^e · π^e`.
    pub fn two_pi_pow(e: &Rat) -> Self {
        let mut m = ExponentMap::default();
        m.add_term(Base::Prime(2), e);
        m.add_term(Base::Pi, e);
        PowerProduct(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, base: Base) -> Rat {
        self.0.get(base)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Base, &Rat)> {
        self.0.iter()
    }

    pub fn pow(&self, e: &Rat) -> Self {
        PowerProduct(self.0.scaled(e))
    }

    pub fn recip(&self) -> Self {
        self.pow(&-Rat::one())
    }

    pub fn div(&self, other: &PowerProduct) -> Self {
        self * &other.recip()
    }

    pub fn mul_rational(&self, q: &Rat) -> Result<Self, ExactError> {
        Ok(self * &PowerProduct::from_rational(q)?)
    }

    /// Natural logarithm of the represented value.
    pub fn ln(&self) -> f64 {
        self.0.ln_sum()
    }

    pub fn to_f64(&self) -> Result<f64, ExactError> {
        let l = self.ln();
        let v = l.exp();
        if !v.is_finite() || (v == 0.0 && !self.is_one()) {
            return Err(ExactError::Overflow);
        }
        Ok(v)
    }
}

impl Mul for &PowerProduct {
    type Output = PowerProduct;
    fn mul(self, rhs: &PowerProduct) -> PowerProduct {
        let mut m = self.0.clone();
        m.add_map(&rhs.0);
        PowerProduct(m)
    }
}

impl Mul for PowerProduct {
    type Output = PowerProduct;
    fn mul(self, rhs: PowerProduct) -> PowerProduct {
        &self * &rhs
    }
}

/// `1` for the empty product, otherwise `b^e` terms joined by `*`.
impl fmt::Display for PowerProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (i, (b, e)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{b}^{e}")?;
        }
        Ok(())
    }
}

/// Floating evaluation of a power product.
pub fn pow_product_to_float(p: &PowerProduct) -> Result<f64, ExactError> {
    p.to_f64()
}
