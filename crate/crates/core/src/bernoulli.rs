//! Exact Bernoulli numbers and polynomials.
//!
//! Uses the `B_1 = -1/2` convention, so `B_n(0) = B_n`. Numbers and
//! polynomial coefficient vectors are memoized for indices up to
//! [`MEMO_LIMIT`]; larger indices are computed on demand without caching.

use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exact::{GaussianRat, Rat};

pub const MEMO_LIMIT: usize = 256;

/// `B_n(x) = Σ_k C(n,k) B_k x^{n-k}`, stored as coefficients of `x^0..x^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliPoly {
    coeffs: Vec<Rat>,
    // coeffs[k] = scaled[k] / common_denom
    scaled: Vec<BigInt>,
    common_denom: BigInt,
}

impl BernoulliPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `x^k`.
    pub fn coeff(&self, k: usize) -> &Rat {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn eval(&self, z: &GaussianRat) -> GaussianRat {
        // Horner
        let mut acc = GaussianRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &acc * z;
            acc.re += c;
        }
        acc
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

struct Memo {
    numbers: Vec<Rat>,
    polys: Vec<Arc<BernoulliPoly>>,
}

static MEMO: RwLock<Memo> = RwLock::new(Memo {
    numbers: Vec::new(),
    polys: Vec::new(),
});

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

/// Extend `numbers` so that it holds `B_0..=B_n`.
fn extend_numbers(numbers: &mut Vec<Rat>, n: usize) {
    while numbers.len() <= n {
        let m = numbers.len();
        if m == 0 {
            numbers.push(Rat::one());
            continue;
        }
        // Σ_{k=0}^{m} C(m+1,k) B_k = 0
        let row = binomial_row(m + 1);
        let mut s = Rat::zero();
        for (k, b) in numbers.iter().enumerate() {
            s += Rat::from_integer(row[k].clone()) * b;
        }
        numbers.push(-s / Rat::from_integer(BigInt::from(m + 1)));
    }
}

fn build_poly(numbers: &[Rat], n: usize) -> BernoulliPoly {
    let row = binomial_row(n);
    let coeffs: Vec<Rat> = (0..=n)
        .map(|j| Rat::from_integer(row[j].clone()) * &numbers[n - j])
        .collect();
    let common_denom = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let scaled = coeffs
        .iter()
        .map(|c| c.numer() * (&common_denom / c.denom()))
        .collect();
    BernoulliPoly {
        coeffs,
        scaled,
        common_denom,
    }
}

/// Exact `B_n`.
pub fn bernoulli_number(n: usize) -> Rat {
    if n <= MEMO_LIMIT {
        if let Some(b) = MEMO.read().unwrap().numbers.get(n) {
            return b.clone();
        }
        let mut memo = MEMO.write().unwrap();
        extend_numbers(&mut memo.numbers, n);
        return memo.numbers[n].clone();
    }
    let mut numbers = {
        let mut memo = MEMO.write().unwrap();
        extend_numbers(&mut memo.numbers, MEMO_LIMIT);
        memo.numbers.clone()
    };
    extend_numbers(&mut numbers, n);
    numbers.swap_remove(n)
}

/// The `n`-th Bernoulli polynomial.
pub fn bernoulli_poly(n: usize) -> Arc<BernoulliPoly> {
    if n > MEMO_LIMIT {
        let numbers: Vec<Rat> = (0..=n).map(bernoulli_number).collect();
        return Arc::new(build_poly(&numbers, n));
    }
    if let Some(p) = MEMO.read().unwrap().polys.get(n) {
        return Arc::clone(p);
    }
    let mut memo = MEMO.write().unwrap();
    extend_numbers(&mut memo.numbers, n);
    while memo.polys.len() <= n {
        let k = memo.polys.len();
        let p = Arc::new(build_poly(&memo.numbers, k));
        memo.polys.push(p);
    }
    Arc::clone(&memo.polys[n])
}

pub fn bernoulli_poly_eval(n: usize, z: &GaussianRat) -> GaussianRat {
    bernoulli_poly(n).eval(z)
}

/// `[B_0(z), B_1(z), …, B_{n_max}(z)]`.
///
/// Writes `z = (a + bi)/d` with integers `a, b, d` and evaluates every
/// polynomial over the common denominator `L_n·d^n`, so each value is
/// normalized only once.
pub fn bernoulli_values(z: &GaussianRat, n_max: usize) -> Vec<GaussianRat> {
    let d = z.re.denom().lcm(z.im.denom());
    let a = z.re.numer() * (&d / z.re.denom());
    let b = z.im.numer() * (&d / z.im.denom());
    // (a + bi)^k and d^k
    let mut powers: Vec<(BigInt, BigInt)> = Vec::with_capacity(n_max + 1);
    let mut d_pow = Vec::with_capacity(n_max + 1);
    powers.push((BigInt::one(), BigInt::zero()));
    d_pow.push(BigInt::one());
    for k in 1..=n_max {
        let (pr, pi) = &powers[k - 1];
        let next = (pr * &a - pi * &b, pr * &b + pi * &a);
        powers.push(next);
        d_pow.push(&d_pow[k - 1] * &d);
    }
    let real = b.is_zero();
    (0..=n_max)
        .map(|n| {
            let p = bernoulli_poly(n);
            let mut re = BigInt::zero();
            let mut im = BigInt::zero();
            for (k, c) in p.scaled.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let w = c * &d_pow[n - k];
                re += &w * &powers[k].0;
                if !real {
                    im += &w * &powers[k].1;
                }
            }
            let denom = &p.common_denom * &d_pow[n];
            GaussianRat::new(Rat::new(re, denom.clone()), Rat::new(im, denom))
        })
        .collect()
}
