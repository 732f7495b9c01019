use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use super::{DecoratedGamma, GammaFactor};
use crate::exact::{phase_twist, rat_int, ExactError, GaussianRat, PowerProduct, Rat, Twist};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("factor index {index} out of range (r = {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("expand needs Re(μ) ≥ 1 at factor {index}, got μ = {mu}")]
    RealPartBelowOne { index: usize, mu: Box<GaussianRat> },
    #[error("multiplication order must be at least 1")]
    InvalidOrder,
    #[error("merge pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// One rewriting step. Indices refer to the factor list at the moment the
/// move is applied.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Move {
    Expand(usize),
    Contract(usize),
    Split(usize, u32),
    Merge(Vec<usize>, u32),
}

impl Move {
    /// Factor indices the move reads.
    pub fn indices(&self) -> Vec<usize> {
        match self {
            Move::Expand(j) | Move::Contract(j) | Move::Split(j, _) => vec![*j],
            Move::Merge(ix, _) => ix.clone(),
        }
    }

    /// The same move with every index passed through `f`.
    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Move {
        match self {
            Move::Expand(j) => Move::Expand(f(*j)),
            Move::Contract(j) => Move::Contract(f(*j)),
            Move::Split(j, m) => Move::Split(f(*j), *m),
            Move::Merge(ix, m) => Move::Merge(ix.iter().map(|&j| f(j)).collect(), *m),
        }
    }

    pub fn is_factorial(&self) -> bool {
        matches!(self, Move::Expand(_) | Move::Contract(_))
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Expand(j) => write!(f, "expand({j})"),
            Move::Contract(j) => write!(f, "contract({j})"),
            Move::Split(j, m) => write!(f, "split({j},{m})"),
            Move::Merge(ix, m) => {
                let contiguous = !ix.is_empty() && ix.windows(2).all(|w| w[1] == w[0] + 1);
                if contiguous {
                    write!(f, "merge({}..{},{m})", ix[0], ix[ix.len() - 1])
                } else {
                    let list: Vec<String> = ix.iter().map(|j| j.to_string()).collect();
                    write!(f, "merge({{{}}},{m})", list.join(","))
                }
            }
        }
    }
}

/// An ordered, replayable list of moves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MoveTrace(pub Vec<Move>);

impl MoveTrace {
    pub fn new() -> Self {
        MoveTrace::default()
    }

    pub fn push(&mut self, mv: Move) {
        self.0.push(mv);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Move> {
        self.0.iter()
    }
}

/// Comma-separated move script, e.g. `expand(0),split(1,3)`.
impl fmt::Display for MoveTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, mv) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{mv}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("move {position} ({mv}) failed: {source}")]
pub struct TraceError {
    pub position: usize,
    pub mv: Move,
    #[source]
    pub source: MoveError,
}

fn check_index(g: &DecoratedGamma, j: usize) -> Result<(), MoveError> {
    if j >= g.len() {
        return Err(MoveError::IndexOutOfRange {
            index: j,
            len: g.len(),
        });
    }
    Ok(())
}

/// Factorial formula, expanding direction:
/// `Γ(λs+μ) = (λs+μ−1)·Γ(λs+μ−1) = λ(s − (1−μ)/λ)·Γ(λs+μ−1)`.
pub fn expand(g: &DecoratedGamma, j: usize) -> Result<DecoratedGamma, MoveError> {
    check_index(g, j)?;
    let GammaFactor { lambda, mu } = g.gamma.factors[j].clone();
    if mu.re < Rat::one() {
        return Err(MoveError::RealPartBelowOne {
            index: j,
            mu: Box::new(mu),
        });
    }
    let mut out = g.clone();
    let root = (&GaussianRat::one() - &mu).scale(&lambda.recip());
    out.rational.add_root(root);
    out.rational
        .scale_kappa(&PowerProduct::from_rational(&lambda)?);
    out.gamma.factors_mut()[j].mu.re -= Rat::one();
    Ok(out)
}

/// Factorial formula, contracting direction:
/// `Γ(λs+μ) = Γ(λs+μ+1) / (λs+μ) = λ⁻¹ (s + μ/λ)⁻¹ Γ(λs+μ+1)`.
pub fn contract(g: &DecoratedGamma, j: usize) -> Result<DecoratedGamma, MoveError> {
    check_index(g, j)?;
    let GammaFactor { lambda, mu } = g.gamma.factors[j].clone();
    let mut out = g.clone();
    let pole = (-&mu).scale(&lambda.recip());
    out.rational.add_pole(pole);
    out.rational
        .scale_kappa(&PowerProduct::from_rational(&lambda.recip())?);
    out.gamma.factors_mut()[j].mu.re += Rat::one();
    Ok(out)
}

/// Multiplication formula of order `m` applied to factor `j`.
///
/// `Γ(λs+μ) = c · m^{λs} ∏_{k<m} Γ(λs/m + (μ+k)/m)` with
/// `c = m^{μ−1/2}(2π)^{(1−m)/2}`, so `Q` gains `m^λ` and ω is multiplied by
/// `c̄/c = m^{−2i·Im μ}`. Returns the new object and that twist.
pub fn split(g: &DecoratedGamma, j: usize, m: u32) -> Result<(DecoratedGamma, Twist), MoveError> {
    check_index(g, j)?;
    if m < 1 {
        return Err(MoveError::InvalidOrder);
    }
    if m == 1 {
        return Ok((g.clone(), Twist::identity()));
    }
    let GammaFactor { lambda, mu } = g.gamma.factors[j].clone();
    let m_rat = rat_int(i64::from(m));
    let inv_m = m_rat.recip();
    let twist = phase_twist(&m_rat, &(rat_int(-2) * &mu.im))?;
    let mut out = g.clone();
    let new_factors = (0..m).map(|k| {
        let shifted = GaussianRat::new(&mu.re + rat_int(i64::from(k)), mu.im.clone());
        GammaFactor::new(&lambda * &inv_m, shifted.scale(&inv_m))
    });
    out.gamma.factors_mut().splice(j..=j, new_factors);
    let q = out.gamma.q() * &PowerProduct::integer_pow(u64::from(m), &lambda)?;
    out.gamma.set_q(q);
    let omega = out.gamma.omega().twisted(&twist);
    out.gamma.set_omega(omega);
    Ok((out, twist))
}

/// Inverse of [`split`]: the factors at `indices` must share one `λ` and
/// have `μ`'s exactly `{μ, μ+1/m, …, μ+(m−1)/m}`. They are replaced by
/// `Γ(mλ s + mμ)` at the smallest selected position.
pub fn merge(
    g: &DecoratedGamma,
    indices: &[usize],
    m: u32,
) -> Result<(DecoratedGamma, Twist), MoveError> {
    if m < 1 {
        return Err(MoveError::InvalidOrder);
    }
    for &j in indices {
        check_index(g, j)?;
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != indices.len() {
        return Err(MoveError::PatternMismatch("repeated index".into()));
    }
    if sorted.len() != m as usize {
        return Err(MoveError::PatternMismatch(format!(
            "{} factors selected for order {m}",
            sorted.len()
        )));
    }
    let selected: Vec<&GammaFactor> = sorted.iter().map(|&j| &g.gamma.factors[j]).collect();
    let lambda = selected[0].lambda.clone();
    if selected.iter().any(|f| f.lambda != lambda) {
        return Err(MoveError::PatternMismatch("λ values differ".into()));
    }
    let m_rat = rat_int(i64::from(m));
    let base = selected
        .iter()
        .map(|f| &f.mu)
        .find(|cand| progression_from(cand, &selected, m, &m_rat))
        .cloned()
        .ok_or_else(|| {
            MoveError::PatternMismatch(format!(
                "μ values are not an arithmetic progression with step 1/{m}"
            ))
        })?;
    let twist = phase_twist(&m_rat, &(rat_int(2) * &m_rat * &base.im))?;
    let mut out = g.clone();
    let at = sorted[0];
    {
        let factors = out.gamma.factors_mut();
        for &j in sorted.iter().rev() {
            factors.remove(j);
        }
        factors.insert(at, GammaFactor::new(&lambda * &m_rat, base.scale(&m_rat)));
    }
    let q = out.gamma.q() * &PowerProduct::integer_pow(u64::from(m), &(-&m_rat * &lambda))?;
    out.gamma.set_q(q);
    let omega = out.gamma.omega().twisted(&twist);
    out.gamma.set_omega(omega);
    Ok((out, twist))
}

/// Whether the selected μ's are exactly `base + k/m`, `k = 0..m`.
fn progression_from(base: &GaussianRat, selected: &[&GammaFactor], m: u32, m_rat: &Rat) -> bool {
    let mut seen = vec![false; m as usize];
    for f in selected {
        let d = &f.mu - base;
        if !d.im.is_zero() {
            return false;
        }
        let k = &d.re * m_rat;
        if !k.is_integer() || k < Rat::zero() || k >= *m_rat {
            return false;
        }
        let k = usize::try_from(k.to_integer()).unwrap_or(usize::MAX);
        if k >= seen.len() || seen[k] {
            return false;
        }
        seen[k] = true;
    }
    true
}

pub fn apply_move(g: &DecoratedGamma, mv: &Move) -> Result<DecoratedGamma, MoveError> {
    match mv {
        Move::Expand(j) => expand(g, *j),
        Move::Contract(j) => contract(g, *j),
        Move::Split(j, m) => split(g, *j, *m).map(|(out, _)| out),
        Move::Merge(ix, m) => merge(g, ix, *m).map(|(out, _)| out),
    }
}

/// Left-to-right composition of the moves of `t`.
pub fn apply_trace(g: &DecoratedGamma, t: &MoveTrace) -> Result<DecoratedGamma, TraceError> {
    let mut cur = g.clone();
    for (position, mv) in t.iter().enumerate() {
        cur = apply_move(&cur, mv).map_err(|source| TraceError {
            position,
            mv: mv.clone(),
            source,
        })?;
    }
    Ok(cur)
}

/// Expand every factor until `Re μ_j < 1` for all `j`.
pub fn reduce(g: &DecoratedGamma) -> (DecoratedGamma, MoveTrace) {
    let mut cur = g.clone();
    let mut trace = MoveTrace::new();
    for j in 0..cur.len() {
        while cur.gamma.factors[j].mu.re >= Rat::one() {
            cur = expand(&cur, j).expect("Re μ ≥ 1 was just checked");
            trace.push(Move::Expand(j));
        }
    }
    (cur, trace)
}
