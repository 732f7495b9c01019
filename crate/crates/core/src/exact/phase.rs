use std::fmt;

use num_complex::Complex64;
use num_traits::One;

use super::power::{Base, ExponentMap};
use super::{ExactError, Rat};

/// A modulus-one multiplier `∏ b^{i·t_b}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Twist(pub(crate) ExponentMap);

impl Twist {
    pub fn identity() -> Self {
        Twist::default()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn compose(&self, other: &Twist) -> Twist {
        let mut m = self.0.clone();
        m.add_map(&other.0);
        Twist(m)
    }

    pub fn inverse(&self) -> Twist {
        Twist(self.0.scaled(&-Rat::one()))
    }

    pub fn exponent(&self, base: Base) -> Rat {
        self.0.get(base)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Base, &Rat)> {
        self.0.iter()
    }

    pub(crate) fn add_term(&mut self, base: Base, t: &Rat) {
        self.0.add_term(base, t);
    }

    /// The argument `Σ t_b ln b` of the represented unit complex number.
    pub fn angle(&self) -> f64 {
        self.0.ln_sum()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle())
    }
}

/// `base^{i·t}` with `base` factored into primes.
pub fn phase_twist(base: &Rat, t: &Rat) -> Result<Twist, ExactError> {
    ExponentMap::of_rational_pow(base, t).map(Twist)
}

/// An exact unit complex number, known relative to an opaque starting
/// value: `tag · ∏ b^{i·t_b}`.
///
/// Two phases compare equal iff they carry the same tag and the same
/// twist map. This is sound as long as `{ln p} ∪ {ln π}` is linearly
/// independent over ℚ, which is assumed rather than proved.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitPhase {
    pub tag: String,
    pub twist: Twist,
}

impl UnitPhase {
    pub fn tagged(tag: impl Into<String>) -> Self {
        UnitPhase {
            tag: tag.into(),
            twist: Twist::identity(),
        }
    }

    pub fn twisted(&self, t: &Twist) -> Self {
        UnitPhase {
            tag: self.tag.clone(),
            twist: self.twist.compose(t),
        }
    }

    /// Evaluate with `tag_value` substituted for the opaque tag.
    pub fn to_complex(&self, tag_value: Complex64) -> Complex64 {
        tag_value * self.twist.to_complex()
    }
}

impl Default for UnitPhase {
    fn default() -> Self {
        UnitPhase::tagged("tag")
    }
}

pub fn phase_to_float(u: &UnitPhase, tag_value: Complex64) -> Complex64 {
    u.to_complex(tag_value)
}

/// `tag` or `tag*b^(i*t)*...`.
impl fmt::Display for Twist {
    /// `1` for the identity, otherwise `b^(i*t)` terms joined by `*`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("1");
        }
        for (k, (b, t)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "{b}^(i*{t})")?;
        }
        Ok(())
    }
}

impl fmt::Display for UnitPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag)?;
        if !self.twist.is_identity() {
            write!(f, "*{}", self.twist)?;
        }
        Ok(())
    }
}
