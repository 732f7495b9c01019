//! Decorated γ-factors `R(s)·Q^s·∏ Γ(λ_j s + μ_j)` and the exact rewriting
//! moves derived from the factorial and multiplication formulae.

mod moves;
mod multiset;

pub use moves::{
    apply_move, apply_trace, contract, expand, merge, reduce, split, Move, MoveError, MoveTrace,
    TraceError,
};
pub use multiset::Multiset;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::exact::{GaussianRat, PowerProduct, Rat, UnitPhase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DataError {
    #[error("factor {index}: λ must be positive (λ_j > 0), got {lambda}")]
    NonPositiveLambda { index: usize, lambda: Box<Rat> },
    #[error("factor {index}: Re(μ) must be non-negative (Re μ_j ≥ 0), got {mu}")]
    NegativeRealPart { index: usize, mu: Box<GaussianRat> },
}

/// One `Γ(λ s + μ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GammaFactor {
    pub lambda: Rat,
    pub mu: GaussianRat,
}

impl GammaFactor {
    pub fn new(lambda: Rat, mu: GaussianRat) -> Self {
        GammaFactor { lambda, mu }
    }

    fn check(&self, index: usize) -> Result<(), DataError> {
        if !self.lambda.is_positive() {
            return Err(DataError::NonPositiveLambda {
                index,
                lambda: Box::new(self.lambda.clone()),
            });
        }
        if self.mu.re.is_negative() {
            return Err(DataError::NegativeRealPart {
                index,
                mu: Box::new(self.mu.clone()),
            });
        }
        Ok(())
    }
}

/// The data `(ω, Q, λ, μ)` of a functional equation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GammaData {
    omega: UnitPhase,
    q: PowerProduct,
    factors: Vec<GammaFactor>,
}

impl GammaData {
    pub fn new(
        omega: UnitPhase,
        q: PowerProduct,
        factors: Vec<GammaFactor>,
    ) -> Result<Self, DataError> {
        for (i, f) in factors.iter().enumerate() {
            f.check(i)?;
        }
        Ok(GammaData { omega, q, factors })
    }

    pub fn omega(&self) -> &UnitPhase {
        &self.omega
    }

    pub fn q(&self) -> &PowerProduct {
        &self.q
    }

    pub fn factors(&self) -> &[GammaFactor] {
        &self.factors
    }

    /// Number of Γ factors, `r`.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn lambdas(&self) -> impl Iterator<Item = &Rat> {
        self.factors.iter().map(|f| &f.lambda)
    }

    pub fn mus(&self) -> impl Iterator<Item = &GaussianRat> {
        self.factors.iter().map(|f| &f.mu)
    }

    /// True when `0 ≤ Re μ_j < 1` for every factor.
    pub fn is_reduced(&self) -> bool {
        self.factors.iter().all(|f| f.mu.re < Rat::one())
    }

    /// Same data with factor `index` removed.
    pub fn without_factor(&self, index: usize) -> GammaData {
        let mut g = self.clone();
        g.factors.remove(index);
        g
    }

    pub(crate) fn factors_mut(&mut self) -> &mut Vec<GammaFactor> {
        &mut self.factors
    }

    pub(crate) fn set_q(&mut self, q: PowerProduct) {
        self.q = q;
    }

    pub(crate) fn set_omega(&mut self, omega: UnitPhase) {
        self.omega = omega;
    }
}

/// `R(s) = ±κ ∏(s − α_j) / ∏(s − β_j)` with roots and poles kept
/// disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFactor {
    negative: bool,
    kappa: PowerProduct,
    roots: Multiset<GaussianRat>,
    poles: Multiset<GaussianRat>,
}

impl Default for RationalFactor {
    fn default() -> Self {
        RationalFactor::constant(PowerProduct::one())
    }
}

impl RationalFactor {
    pub fn constant(kappa: PowerProduct) -> Self {
        RationalFactor {
            negative: false,
            kappa,
            roots: Multiset::new(),
            poles: Multiset::new(),
        }
    }

    /// Builds a factor and cancels common roots and poles.
    pub fn new(
        negative: bool,
        kappa: PowerProduct,
        roots: impl IntoIterator<Item = GaussianRat>,
        poles: impl IntoIterator<Item = GaussianRat>,
    ) -> Self {
        let mut r = RationalFactor {
            negative,
            kappa,
            ..RationalFactor::default()
        };
        for a in roots {
            r.add_root(a);
        }
        for b in poles {
            r.add_pole(b);
        }
        r
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn kappa(&self) -> &PowerProduct {
        &self.kappa
    }

    pub fn roots(&self) -> &Multiset<GaussianRat> {
        &self.roots
    }

    pub fn poles(&self) -> &Multiset<GaussianRat> {
        &self.poles
    }

    /// No roots or poles.
    pub fn is_constant(&self) -> bool {
        self.roots.is_empty() && self.poles.is_empty()
    }

    /// The trivial decoration `R ≡ 1`.
    pub fn is_one(&self) -> bool {
        self.is_constant() && !self.negative && self.kappa.is_one()
    }

    /// Multiply by `(s − α)`.
    pub fn add_root(&mut self, alpha: GaussianRat) {
        if !self.poles.remove_one(&alpha) {
            self.roots.insert(alpha);
        }
    }

    /// Divide by `(s − β)`.
    pub fn add_pole(&mut self, beta: GaussianRat) {
        if !self.roots.remove_one(&beta) {
            self.poles.insert(beta);
        }
    }

    pub(crate) fn scale_kappa(&mut self, by: &PowerProduct) {
        self.kappa = &self.kappa * by;
    }
}

/// The product `R(s)·γ(s)` together with its ω datum.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecoratedGamma {
    pub rational: RationalFactor,
    pub gamma: GammaData,
}

impl DecoratedGamma {
    pub fn new(rational: RationalFactor, gamma: GammaData) -> Self {
        DecoratedGamma { rational, gamma }
    }

    /// `γ` with the trivial decoration `R ≡ 1`.
    pub fn undecorated(gamma: GammaData) -> Self {
        DecoratedGamma {
            rational: RationalFactor::default(),
            gamma,
        }
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn factor(&self, j: usize) -> Option<&GammaFactor> {
        self.gamma.factors.get(j)
    }
}
