//! Exact algebra of γ-factors `Q^s ∏ Γ(λ_j s + μ_j)` of L-function
//! functional equations.
//!
//! The factorial formula `sΓ(s) = Γ(s+1)` and the Legendre–Gauss
//! multiplication formula act on γ-factors as exact rewriting moves
//! ([`gamma::expand`], [`gamma::contract`], [`gamma::split`],
//! [`gamma::merge`]). Factorial moves leave a rational factor `R(s)` in
//! front, so objects are decorated products `R(s)γ(s)`. The
//! [`invariants`] module computes degree, conductor, root number, and the
//! H-invariants extended to decorated products by the root/pole correction
//! term, and [`oracle`] checks every move numerically with a complex Γ.

pub mod bernoulli;
pub mod dsl;
pub mod exact;
pub mod fuzz;
pub mod gamma;
pub mod invariants;
pub mod json;
pub mod oracle;

pub use exact::{GaussianRat, PowerProduct, Rat, Twist, UnitPhase};
pub use gamma::{DecoratedGamma, GammaData, GammaFactor, Move, MoveTrace, RationalFactor};
pub use invariants::{Fingerprint, Verdict};
