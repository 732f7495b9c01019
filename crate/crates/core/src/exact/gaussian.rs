use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{rat_to_f64, Rat};

/// A complex number with rational real and imaginary parts.
///
/// Ordering is lexicographic on `(re, im)`, which is the canonical order
/// used when printing root and pole lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GaussianRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussianRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussianRat { re, im }
    }

    pub fn real(re: Rat) -> Self {
        GaussianRat {
            re,
            im: Rat::zero(),
        }
    }

    pub fn i() -> Self {
        GaussianRat::new(Rat::zero(), Rat::one())
    }

    pub fn zero() -> Self {
        GaussianRat::default()
    }

    pub fn one() -> Self {
        GaussianRat::real(Rat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRat::new(self.re.clone(), -&self.im)
    }

    /// `re² + im²`.
    pub fn norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, k: &Rat) -> Self {
        GaussianRat::new(&self.re * k, &self.im * k)
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "reciprocal of zero");
        GaussianRat::new(&self.re / &n, -&self.im / &n)
    }

    /// Integer power with `z^0 = 1` for every `z`, including zero.
    pub fn pow(&self, n: i64) -> Self {
        if n == 0 {
            return GaussianRat::one();
        }
        let base = if n < 0 { self.recip() } else { self.clone() };
        let mut acc = GaussianRat::one();
        let mut sq = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl From<Rat> for GaussianRat {
    fn from(re: Rat) -> Self {
        GaussianRat::real(re)
    }
}

impl<'a> Add<&'a GaussianRat> for &'a GaussianRat {
    type Output = GaussianRat;
    fn add(self, rhs: &GaussianRat) -> GaussianRat {
        GaussianRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a GaussianRat> for &'a GaussianRat {
    type Output = GaussianRat;
    fn sub(self, rhs: &GaussianRat) -> GaussianRat {
        GaussianRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a GaussianRat> for &'a GaussianRat {
    type Output = GaussianRat;
    fn mul(self, rhs: &GaussianRat) -> GaussianRat {
        GaussianRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl<'a> Div<&'a GaussianRat> for &'a GaussianRat {
    type Output = GaussianRat;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &GaussianRat) -> GaussianRat {
        self * &rhs.recip()
    }
}

impl Neg for &GaussianRat {
    type Output = GaussianRat;
    fn neg(self) -> GaussianRat {
        GaussianRat::new(-&self.re, -&self.im)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for GaussianRat {
            type Output = GaussianRat;
            fn $m(self, rhs: GaussianRat) -> GaussianRat {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussianRat> for GaussianRat {
            type Output = GaussianRat;
            fn $m(self, rhs: &GaussianRat) -> GaussianRat {
                (&self).$m(rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for GaussianRat {
    type Output = GaussianRat;
    fn neg(self) -> GaussianRat {
        -&self
    }
}

/// Canonical text form: `a`, `bi`, `a+bi` or `a-bi`, with unit imaginary
/// coefficients written as `i` / `-i`.
impl fmt::Display for GaussianRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imag = |im: &Rat| {
            if im.is_one() {
                "i".to_string()
            } else if *im == -Rat::one() {
                "-i".to_string()
            } else {
                format!("{im}i")
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => f.write_str(&imag(&self.im)),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}{}", self.re, imag(&self.im))
                } else {
                    write!(f, "{}+{}", self.re, imag(&self.im))
                }
            }
        }
    }
}
