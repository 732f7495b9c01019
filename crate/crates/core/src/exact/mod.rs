//! Exact arithmetic substrate: rationals, Gaussian rationals, products of
//! prime and π powers with rational exponents, and unit phases.

mod gaussian;
mod phase;
mod power;

pub use gaussian::GaussianRat;
pub use phase::{phase_to_float, phase_twist, Twist, UnitPhase};
pub use power::{pow_product_to_float, Base, PowerProduct};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("expected a positive rational, got {0}")]
    NonPositive(Rat),
    #[error("integer {0} is too large to factor")]
    TooLarge(BigInt),
    #[error("value out of floating-point range")]
    Overflow,
}

/// Shorthand for `numer/denom`. Panics on a zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Prime factorization of a positive integer by trial division, ascending.
pub(crate) fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while n.is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5u64;
    while p.saturating_mul(p) <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Factor a positive rational into `(prime, signed exponent)` pairs.
pub(crate) fn factor_rational(q: &Rat) -> Result<Vec<(u64, i64)>, ExactError> {
    if !q.is_positive() {
        return Err(ExactError::NonPositive(q.clone()));
    }
    let to_u64 = |n: &BigInt| n.to_u64().ok_or_else(|| ExactError::TooLarge(n.clone()));
    let mut out: Vec<(u64, i64)> = factor_u64(to_u64(q.numer())?)
        .into_iter()
        .map(|(p, e)| (p, i64::from(e)))
        .collect();
    out.extend(
        factor_u64(to_u64(q.denom())?)
            .into_iter()
            .map(|(p, e)| (p, -i64::from(e))),
    );
    out.sort_unstable();
    Ok(out)
}

pub(crate) fn rat_to_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `q^n` for a signed integer exponent; `0^0 = 1`.
pub fn rat_pow(q: &Rat, n: i64) -> Rat {
    if n == 0 {
        return Rat::one();
    }
    let base = if n < 0 { q.recip() } else { q.clone() };
    let mut acc = Rat::one();
    let mut sq = base;
    let mut k = n.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &sq;
        }
        k >>= 1;
        if k > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// Parse `p`, `-p` or `p/q`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() || d.is_negative() {
        return None;
    }
    Some(Rat::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_division() {
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factor_u64(97), vec![(97, 1)]);
        assert_eq!(factor_u64(999_999_937), vec![(999_999_937, 1)]);
        assert_eq!(factor_u64(35 * 49), vec![(5, 1), (7, 3)]);
    }

    #[test]
    fn factor_rational_signs() {
        assert_eq!(factor_rational(&rat(3, 4)).unwrap(), vec![(2, -2), (3, 1)]);
        assert!(matches!(
            factor_rational(&rat(-1, 2)),
            Err(ExactError::NonPositive(_))
        ));
        assert!(factor_rational(&rat_int(0)).is_err());
    }

    #[test]
    fn rationals_stay_normalized() {
        let a = rat(6, -4);
        assert_eq!(a.numer(), &BigInt::from(-3));
        assert_eq!(a.denom(), &BigInt::from(2));
        assert_eq!(rat_pow(&rat(2, 3), -2), rat(9, 4));
        assert_eq!(rat_pow(&rat_int(0), 0), rat_int(1));
    }

    #[test]
    fn parse_rat_forms() {
        assert_eq!(parse_rat("-3/6"), Some(rat(-1, 2)));
        assert_eq!(parse_rat("7"), Some(rat_int(7)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("1/-2"), None);
        assert_eq!(parse_rat("x"), None);
    }
}
