//! Degree, conductor, root number, H-invariants, their rational extension
//! `H*` to decorated γ-factors, and fingerprints built from them.

use num_traits::Zero;
use thiserror::Error;

use crate::bernoulli::{bernoulli_values, MEMO_LIMIT};
use crate::exact::{
    phase_twist, rat_int, rat_pow, ExactError, GaussianRat, PowerProduct, Rat, Twist, UnitPhase,
};
use crate::gamma::{DecoratedGamma, GammaData, Multiset};

/// Default fingerprint depth `N`.
pub const DEFAULT_DEPTH: usize = 12;
/// Largest accepted H-index.
pub const MAX_DEPTH: usize = MEMO_LIMIT;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("H-invariant index {0} exceeds the limit {MAX_DEPTH}")]
    IndexTooLarge(usize),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

fn check_index(n: usize) -> Result<(), InvariantError> {
    if n > MAX_DEPTH {
        return Err(InvariantError::IndexTooLarge(n));
    }
    Ok(())
}

/// `d = 2 Σ λ_j`.
pub fn degree(g: &GammaData) -> Rat {
    g.lambdas().fold(Rat::zero(), |acc, l| acc + l) * rat_int(2)
}

/// `q = (2π)^d · Q² · ∏ λ_j^{2λ_j}`.
pub fn conductor(g: &GammaData) -> Result<PowerProduct, ExactError> {
    let mut q = &PowerProduct::two_pi_pow(&degree(g)) * &g.q().pow(&rat_int(2));
    for l in g.lambdas() {
        q = &q * &PowerProduct::rational_pow(l, &(l * rat_int(2)))?;
    }
    Ok(q)
}

/// `ω_F = ω ∏ λ_j^{−2i·Im μ_j}`.
pub fn root_number(g: &GammaData) -> Result<UnitPhase, ExactError> {
    let mut t = Twist::identity();
    for f in g.factors() {
        if !f.mu.im.is_zero() {
            t = t.compose(&phase_twist(&f.lambda, &(rat_int(-2) * &f.mu.im))?);
        }
    }
    Ok(g.omega().twisted(&t))
}

/// `[2 Σ_j B_n(μ_j)/λ_j^{n−1}]` for `n = 0..=depth`.
fn bernoulli_sums(g: &GammaData, depth: usize) -> Vec<GaussianRat> {
    let mut out = vec![GaussianRat::zero(); depth + 1];
    for f in g.factors() {
        let values = bernoulli_values(&f.mu, depth);
        let inv = f.lambda.recip();
        // λ^{-(n-1)} starting from n = 0
        let mut scale = f.lambda.clone();
        for (n, v) in values.iter().enumerate() {
            out[n].re += &v.re * &scale;
            out[n].im += &v.im * &scale;
            scale *= &inv;
        }
    }
    for v in &mut out {
        *v = v.scale(&rat_int(2));
    }
    out
}

/// `Σ_{z ∈ set} z^{n−1}` for `n = 0..=depth`, slot 0 left at zero; `0^0 = 1`.
fn power_sums(set: &Multiset<GaussianRat>, depth: usize) -> Vec<GaussianRat> {
    let mut out = vec![GaussianRat::zero(); depth + 1];
    for (z, count) in set.distinct() {
        let c = rat_int(count as i64);
        let mut p = GaussianRat::one();
        for slot in out.iter_mut().skip(1) {
            *slot = &*slot + &p.scale(&c);
            p = &p * z;
        }
    }
    out
}

/// The two summands of `H*(n)`: the Bernoulli sum over Γ factors and the
/// root/pole term `(−1)^n 2n (Σβ^{n−1} − Σα^{n−1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HStarParts {
    pub gamma_part: GaussianRat,
    pub rational_part: GaussianRat,
}

impl HStarParts {
    pub fn total(&self) -> GaussianRat {
        &self.gamma_part + &self.rational_part
    }
}

/// Both parts of `H*(n)` for every `n = 0..=depth`. At `n = 0` the
/// rational part is zero and the Bernoulli part equals the degree.
pub fn h_star_parts(g: &DecoratedGamma, depth: usize) -> Result<Vec<HStarParts>, InvariantError> {
    check_index(depth)?;
    let gamma = bernoulli_sums(&g.gamma, depth);
    let betas = power_sums(g.rational.poles(), depth);
    let alphas = power_sums(g.rational.roots(), depth);
    Ok((0..=depth)
        .map(|n| {
            let rational_part = if n == 0 {
                GaussianRat::zero()
            } else {
                let sign = if n % 2 == 0 { 2 } else { -2 };
                (&betas[n] - &alphas[n]).scale(&rat_int(sign * n as i64))
            };
            HStarParts {
                gamma_part: gamma[n].clone(),
                rational_part,
            }
        })
        .collect())
}

/// `H*(0..=depth)` of a decorated γ-factor.
pub fn h_star_values(g: &DecoratedGamma, depth: usize) -> Result<Vec<GaussianRat>, InvariantError> {
    Ok(h_star_parts(g, depth)?
        .iter()
        .map(HStarParts::total)
        .collect())
}

/// `H_F(n) = 2 Σ B_n(μ_j)/λ_j^{n−1}`.
pub fn h_invariant(g: &GammaData, n: usize) -> Result<GaussianRat, InvariantError> {
    check_index(n)?;
    Ok(bernoulli_sums(g, n).swap_remove(n))
}

/// `H*(n; Rγ)`; equals the degree at `n = 0`.
pub fn h_star(g: &DecoratedGamma, n: usize) -> Result<GaussianRat, InvariantError> {
    if n == 0 {
        return Ok(GaussianRat::real(degree(&g.gamma)));
    }
    Ok(h_star_values(g, n)?.swap_remove(n))
}

/// Truncated invariant fingerprint `(d, q, ω_F, H*(0..=N))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub degree: Rat,
    pub conductor: PowerProduct,
    pub root_number: UnitPhase,
    pub h_values: Vec<GaussianRat>,
}

impl Fingerprint {
    pub fn depth(&self) -> usize {
        self.h_values.len().saturating_sub(1)
    }

    /// First component where `self` and `other` differ.
    pub fn first_difference(&self, other: &Fingerprint) -> Option<Component> {
        if self.degree != other.degree {
            return Some(Component::Degree);
        }
        if self.conductor != other.conductor {
            return Some(Component::Conductor);
        }
        if self.root_number != other.root_number {
            return Some(Component::RootNumber);
        }
        let n = self
            .h_values
            .iter()
            .zip(&other.h_values)
            .position(|(a, b)| a != b);
        match n {
            Some(n) => Some(Component::H(n)),
            None if self.h_values.len() != other.h_values.len() => {
                Some(Component::H(self.h_values.len().min(other.h_values.len())))
            }
            None => None,
        }
    }

    /// Component-wise change from `self` to `after`: differences for the
    /// additive parts, quotients for conductor and root number.
    pub fn delta(&self, after: &Fingerprint) -> FingerprintDelta {
        FingerprintDelta {
            degree: &after.degree - &self.degree,
            conductor: after.conductor.div(&self.conductor),
            same_tag: after.root_number.tag == self.root_number.tag,
            root_number: after
                .root_number
                .twist
                .compose(&self.root_number.twist.inverse()),
            h_values: self
                .h_values
                .iter()
                .zip(&after.h_values)
                .map(|(a, b)| b - a)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Degree,
    Conductor,
    RootNumber,
    H(usize),
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Component::Degree => f.write_str("degree"),
            Component::Conductor => f.write_str("conductor"),
            Component::RootNumber => f.write_str("root_number"),
            Component::H(n) => write!(f, "H*({n})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FingerprintDelta {
    pub degree: Rat,
    pub conductor: PowerProduct,
    pub same_tag: bool,
    pub root_number: Twist,
    pub h_values: Vec<GaussianRat>,
}

impl FingerprintDelta {
    pub fn is_zero(&self) -> bool {
        self.degree.is_zero()
            && self.conductor.is_one()
            && self.same_tag
            && self.root_number.is_identity()
            && self.h_values.iter().all(GaussianRat::is_zero)
    }
}

pub fn fingerprint(g: &DecoratedGamma, depth: usize) -> Result<Fingerprint, InvariantError> {
    let mut h_values = h_star_values(g, depth)?;
    let degree = degree(&g.gamma);
    h_values[0] = GaussianRat::real(degree.clone());
    Ok(Fingerprint {
        degree,
        conductor: conductor(&g.gamma)?,
        root_number: root_number(&g.gamma)?,
        h_values,
    })
}

/// Outcome of a truncated equivalence check. `Distinct` is definitive;
/// `FingerprintEqual` only covers `H*(0..=depth)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Distinct(Component),
    FingerprintEqual { depth: usize },
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Distinct(c) => write!(f, "distinct ({c} differs)"),
            Verdict::FingerprintEqual { depth } => write!(f, "fingerprint-equal({depth})"),
        }
    }
}

pub fn equivalent(
    a: &DecoratedGamma,
    b: &DecoratedGamma,
    depth: usize,
) -> Result<Verdict, InvariantError> {
    let fa = fingerprint(a, depth)?;
    let fb = fingerprint(b, depth)?;
    Ok(match fa.first_difference(&fb) {
        Some(c) => Verdict::Distinct(c),
        None => Verdict::FingerprintEqual { depth },
    })
}

/// Evaluate `f` on the fingerprint of `g`.
///
/// Any `f` of `(ω_F, q_F, H*(0..N))` extends the function of the data it
/// induces on undecorated γ-factors, and is stable under every move
/// because its inputs are.
pub fn rational_extension_eval<T>(
    f: impl FnOnce(&Fingerprint) -> T,
    g: &DecoratedGamma,
    depth: usize,
) -> Result<T, InvariantError> {
    Ok(f(&fingerprint(g, depth)?))
}

/// `z^{n−1}/λ^{n−1}` helper shared with tests of the expanding identity.
pub fn scaled_power(z: &GaussianRat, lambda: &Rat, n: usize) -> GaussianRat {
    let k = n as i64 - 1;
    z.pow(k).scale(&rat_pow(&lambda.recip(), k))
}
