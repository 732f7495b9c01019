//! Seeded generation of γ-data and move traces, and the invariance suite
//! that replays them with exact fingerprint checks and the numeric oracle.
//!
//! Randomness is keyed by `(seed, case, stream)`: every case owns an
//! independent ChaCha stream, so cases can run in parallel and any single
//! case can be regenerated in isolation.

use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dsl;
use crate::exact::{phase_twist, rat, rat_int, GaussianRat, PowerProduct, Rat, UnitPhase};
use crate::gamma::{
    apply_move, DecoratedGamma, GammaData, GammaFactor, Move, MoveError, MoveTrace, RationalFactor,
};
use crate::invariants::{fingerprint, Fingerprint, InvariantError, DEFAULT_DEPTH};
use crate::json::SCHEMA_VERSION;
use crate::oracle::{verify_move, SamplePlan};

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub cases: usize,
    /// Factor count bound for generated data.
    pub max_r: usize,
    /// Move count bound for generated traces.
    pub max_trace: usize,
    /// Largest multiplication order used by split/merge.
    pub max_m: u32,
    /// Bound on numerators of λ and μ components.
    pub num_bound: i64,
    /// Bound on denominators of λ and μ components.
    pub den_bound: i64,
    /// Fingerprint depth `N`.
    pub depth: usize,
    /// Splits are skipped once a trace would push `r` past this.
    pub max_factors: usize,
    /// Relative tolerance for the numeric oracle.
    pub tolerance: f64,
}

pub const DEFAULT_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: DEFAULT_SEED,
            cases: 1000,
            max_r: 4,
            max_trace: 12,
            max_m: 6,
            num_bound: 20,
            den_bound: 20,
            depth: DEFAULT_DEPTH,
            max_factors: 24,
            tolerance: 1e-8,
        }
    }
}

const GAMMA_STREAM: u64 = 0;
const TRACE_STREAM: u64 = 1;

fn keyed_rng(seed: u64, case: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((case as u64) << 8) | stream);
    rng
}

/// Denominator biased toward `1..=6`.
fn small_den(rng: &mut ChaCha8Rng, den_bound: i64) -> i64 {
    if rng.random_bool(0.8) {
        rng.random_range(1..=den_bound.min(6))
    } else {
        rng.random_range(1..=den_bound)
    }
}

fn random_exponent(rng: &mut ChaCha8Rng) -> Rat {
    rat(rng.random_range(-3..=3), rng.random_range(1..=3))
}

/// Deterministic random data for case `i`: `λ > 0`, `Re μ ≥ 0`, small `Q`
/// and a constant decoration.
pub fn gen_gamma(cfg: &FuzzConfig, i: usize) -> DecoratedGamma {
    let mut rng = keyed_rng(cfg.seed, i, GAMMA_STREAM);
    let num = cfg.num_bound.max(1);
    let den = cfg.den_bound.max(1);
    let r = rng.random_range(0..=cfg.max_r);
    let mut factors = Vec::with_capacity(r);
    for _ in 0..r {
        let lambda = rat(rng.random_range(1..=num), rng.random_range(1..=den));
        let d = small_den(&mut rng, den);
        let re = rat(rng.random_range(0..=num), d);
        let im = if rng.random_bool(0.4) {
            Rat::zero()
        } else {
            let d = small_den(&mut rng, den);
            rat(rng.random_range(-num..=num), d)
        };
        factors.push(GammaFactor::new(lambda, GaussianRat::new(re, im)));
    }
    // occasionally present one factor already split so merges are available
    if r > 0 && cfg.max_m >= 2 && rng.random_bool(0.3) {
        let room = cfg.max_r + 1 - r;
        let m_max = (cfg.max_m as usize).min(room);
        if m_max >= 2 {
            let m = rng.random_range(2..=m_max) as i64;
            let j = rng.random_range(0..r);
            let GammaFactor { lambda, mu } = factors[j].clone();
            let inv = rat(1, m);
            let pieces = (0..m).map(|k| {
                let shifted = GaussianRat::new(&mu.re + rat_int(k), mu.im.clone());
                GammaFactor::new(&lambda * &inv, shifted.scale(&inv))
            });
            factors.splice(j..=j, pieces);
        }
    }
    const Q_BASES: [Option<u64>; 5] = [Some(2), Some(3), Some(5), Some(7), None];
    let mut q = PowerProduct::one();
    for _ in 0..rng.random_range(0..=2) {
        let e = random_exponent(&mut rng);
        let term = match Q_BASES[rng.random_range(0..Q_BASES.len())] {
            Some(p) => PowerProduct::integer_pow(p, &e).expect("small prime"),
            None => PowerProduct::pi_pow(e),
        };
        q = &q * &term;
    }
    let mut omega = UnitPhase::tagged("tag");
    if rng.random_bool(0.5) {
        let b = rng.random_range(2..=7);
        let t = random_exponent(&mut rng);
        omega = omega.twisted(&phase_twist(&rat_int(b), &t).expect("positive base"));
    }
    let kappa = if rng.random_bool(0.7) {
        PowerProduct::one()
    } else {
        PowerProduct::integer_pow(rng.random_range(2..=12), &random_exponent(&mut rng))
            .expect("positive base")
    };
    let gamma = GammaData::new(omega, q, factors).expect("generated data satisfies invariants");
    DecoratedGamma::new(RationalFactor::constant(kappa), gamma)
}

/// Every `(indices, m)` for which `merge` applies to `g`, with `m ≤ max_m`.
pub fn merge_candidates(g: &DecoratedGamma, max_m: u32) -> Vec<(Vec<usize>, u32)> {
    let factors = g.gamma.factors();
    let mut out = Vec::new();
    for (a, fa) in factors.iter().enumerate() {
        for m in 2..=max_m {
            if m as usize > factors.len() {
                break;
            }
            let step = rat(1, i64::from(m));
            let mut picked = vec![a];
            for k in 1..m {
                let want =
                    GaussianRat::new(&fa.mu.re + &step * rat_int(i64::from(k)), fa.mu.im.clone());
                let hit = factors.iter().enumerate().position(|(b, fb)| {
                    !picked.contains(&b) && fb.lambda == fa.lambda && fb.mu == want
                });
                match hit {
                    Some(b) => picked.push(b),
                    None => break,
                }
            }
            if picked.len() == m as usize {
                picked.sort_unstable();
                out.push((picked, m));
            }
        }
    }
    out
}

/// Deterministic random valid trace for case `i` starting at `g`, mixing
/// all four moves. When no expand applies, a contract is emitted in its
/// place so later expands become possible.
pub fn gen_trace(cfg: &FuzzConfig, g: &DecoratedGamma, i: usize) -> MoveTrace {
    let mut rng = keyed_rng(cfg.seed, i, TRACE_STREAM);
    let mut trace = MoveTrace::new();
    if cfg.max_trace == 0 || g.is_empty() {
        return trace;
    }
    let len = rng.random_range(0..=cfg.max_trace);
    let mut cur = g.clone();
    for _ in 0..len {
        let r = cur.len();
        let contract = |rng: &mut ChaCha8Rng| Move::Contract(rng.random_range(0..r));
        let split = |rng: &mut ChaCha8Rng| {
            let room = cfg.max_factors.saturating_sub(r) + 1;
            let m_max = (cfg.max_m as usize).min(room);
            (m_max >= 2)
                .then(|| Move::Split(rng.random_range(0..r), rng.random_range(2..=m_max) as u32))
        };
        let mv = match rng.random_range(0..4) {
            0 => {
                let ready: Vec<usize> = (0..r)
                    .filter(|&j| cur.factor(j).is_some_and(|f| f.mu.re >= Rat::one()))
                    .collect();
                if ready.is_empty() {
                    contract(&mut rng)
                } else {
                    Move::Expand(ready[rng.random_range(0..ready.len())])
                }
            }
            1 => contract(&mut rng),
            2 => split(&mut rng).unwrap_or_else(|| contract(&mut rng)),
            _ => {
                let cands = merge_candidates(&cur, cfg.max_m);
                if cands.is_empty() {
                    split(&mut rng).unwrap_or_else(|| contract(&mut rng))
                } else {
                    let (ix, m) = cands[rng.random_range(0..cands.len())].clone();
                    Move::Merge(ix, m)
                }
            }
        };
        cur = apply_move(&cur, &mv).expect("generated move is valid");
        trace.push(mv);
    }
    trace
}

/// The move semantics and fingerprint under test. The suite is generic so
/// deliberately broken engines can be checked for detection.
pub trait Engine: Sync {
    fn apply(&self, g: &DecoratedGamma, mv: &Move) -> Result<DecoratedGamma, MoveError>;
    fn fingerprint(&self, g: &DecoratedGamma, depth: usize) -> Result<Fingerprint, InvariantError>;
}

/// The library's own moves and invariants.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactEngine;

impl Engine for ExactEngine {
    fn apply(&self, g: &DecoratedGamma, mv: &Move) -> Result<DecoratedGamma, MoveError> {
        apply_move(g, mv)
    }

    fn fingerprint(&self, g: &DecoratedGamma, depth: usize) -> Result<Fingerprint, InvariantError> {
        fingerprint(g, depth)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FailureKind {
    MoveRejected(String),
    Invariant(String),
    FingerprintChanged(String),
    Oracle(String),
    NumericDeviation(f64),
    OmegaInconsistent,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureKind::MoveRejected(e) => write!(f, "move rejected: {e}"),
            FailureKind::Invariant(e) => write!(f, "invariant computation failed: {e}"),
            FailureKind::FingerprintChanged(c) => write!(f, "fingerprint changed at {c}"),
            FailureKind::Oracle(e) => write!(f, "numeric oracle error: {e}"),
            FailureKind::NumericDeviation(d) => write!(f, "ratio not constant (deviation {d:e})"),
            FailureKind::OmegaInconsistent => f.write_str("ω update disagrees with c̄/c"),
        }
    }
}

/// First failing step of a replay.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFailure {
    pub step: usize,
    pub kind: FailureKind,
}

/// Replay `trace` from `g`, checking at every step that the fingerprint is
/// unchanged and that the numeric oracle confirms the move.
pub fn check_case(
    engine: &dyn Engine,
    cfg: &FuzzConfig,
    g: &DecoratedGamma,
    trace: &MoveTrace,
) -> Result<usize, StepFailure> {
    let plan = SamplePlan::with_tolerance(cfg.tolerance);
    let fail = |step, kind| StepFailure { step, kind };
    let mut cur = g.clone();
    let mut fp = engine
        .fingerprint(&cur, cfg.depth)
        .map_err(|e| fail(0, FailureKind::Invariant(e.to_string())))?;
    for (step, mv) in trace.iter().enumerate() {
        let next = engine
            .apply(&cur, mv)
            .map_err(|e| fail(step, FailureKind::MoveRejected(e.to_string())))?;
        let next_fp = engine
            .fingerprint(&next, cfg.depth)
            .map_err(|e| fail(step, FailureKind::Invariant(e.to_string())))?;
        if let Some(c) = fp.first_difference(&next_fp) {
            return Err(fail(step, FailureKind::FingerprintChanged(c.to_string())));
        }
        let report = verify_move(&cur, &next, &plan)
            .map_err(|e| fail(step, FailureKind::Oracle(e.to_string())))?;
        // written so that a NaN deviation also counts as a failure
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(report.max_rel_dev < cfg.tolerance) {
            return Err(fail(
                step,
                FailureKind::NumericDeviation(report.max_rel_dev),
            ));
        }
        if !report.omega_consistent {
            return Err(fail(step, FailureKind::OmegaInconsistent));
        }
        cur = next;
        fp = next_fp;
    }
    Ok(trace.len())
}

/// A failing `(start, trace)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Reproducer {
    pub gamma: DecoratedGamma,
    pub trace: MoveTrace,
    pub failure: StepFailure,
}

impl Reproducer {
    pub fn to_json(&self) -> Value {
        json!({
            "gamma": dsl::print(&self.gamma),
            "trace": dsl::print_script(&self.trace),
            "step": self.failure.step,
            "kind": self.failure.kind.to_string(),
        })
    }
}

/// Minimize a failing case: cut moves after the failure, drop interior
/// moves, fold leading moves into the start object, then drop Γ factors
/// the remaining moves do not touch. Every accepted candidate still fails.
pub fn shrink(
    engine: &dyn Engine,
    cfg: &FuzzConfig,
    g: &DecoratedGamma,
    trace: &MoveTrace,
    failure: StepFailure,
) -> Reproducer {
    let rejected_originally = matches!(failure.kind, FailureKind::MoveRejected(_));
    let still_fails = |g: &DecoratedGamma, t: &MoveTrace| match check_case(engine, cfg, g, t) {
        Ok(_) => None,
        Err(f) if rejected_originally || !matches!(f.kind, FailureKind::MoveRejected(_)) => Some(f),
        Err(_) => None,
    };

    let mut best = Reproducer {
        gamma: g.clone(),
        trace: MoveTrace(trace.0[..=failure.step.min(trace.len().saturating_sub(1))].to_vec()),
        failure,
    };
    if let Some(f) = still_fails(&best.gamma, &best.trace) {
        best.failure = f;
    }

    // drop interior moves, last first
    let mut i = best.trace.len().saturating_sub(1);
    while i > 0 {
        i -= 1;
        let mut cand = best.trace.clone();
        cand.0.remove(i);
        if let Some(f) = still_fails(&best.gamma, &cand) {
            best.trace = MoveTrace(cand.0[..=f.step].to_vec());
            best.failure = f;
            i = i.min(best.trace.len().saturating_sub(1));
        }
    }

    // fold leading moves into the start
    while best.trace.len() > 1 {
        let Ok(next) = engine.apply(&best.gamma, &best.trace.0[0]) else {
            break;
        };
        let rest = MoveTrace(best.trace.0[1..].to_vec());
        match still_fails(&next, &rest) {
            Some(f) => {
                best = Reproducer {
                    gamma: next,
                    trace: MoveTrace(rest.0[..=f.step].to_vec()),
                    failure: f,
                };
            }
            None => break,
        }
    }

    // drop untouched factors
    if best.trace.len() == 1 {
        let mut k = best.gamma.len();
        while k > 0 {
            k -= 1;
            let mv = &best.trace.0[0];
            if mv.indices().contains(&k) {
                continue;
            }
            let mut cand_g = best.gamma.clone();
            cand_g.gamma = cand_g.gamma.without_factor(k);
            let cand_t = MoveTrace(vec![mv.remap(|j| if j > k { j - 1 } else { j })]);
            if let Some(f) = still_fails(&cand_g, &cand_t) {
                best = Reproducer {
                    gamma: cand_g,
                    trace: cand_t,
                    failure: f,
                };
            }
        }
    }
    best
}

/// A failing case with its minimized reproducer.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseFailure {
    pub case: usize,
    pub original_step: usize,
    pub original_trace_len: usize,
    pub reproducer: Reproducer,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub cases_run: usize,
    pub steps_checked: usize,
    /// Counts of expand, contract, split, merge moves replayed.
    pub move_counts: [usize; 4],
    pub failures: Vec<CaseFailure>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "cases_run": self.cases_run,
            "steps_checked": self.steps_checked,
            "moves": {
                "expand": self.move_counts[0],
                "contract": self.move_counts[1],
                "split": self.move_counts[2],
                "merge": self.move_counts[3],
            },
            "failures": self.failures.iter().map(|f| json!({
                "case": f.case,
                "step": f.original_step,
                "trace_len": f.original_trace_len,
                "reproducer": f.reproducer.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn move_slot(mv: &Move) -> usize {
    match mv {
        Move::Expand(_) => 0,
        Move::Contract(_) => 1,
        Move::Split(..) => 2,
        Move::Merge(..) => 3,
    }
}

/// Run the suite against the exact engine.
pub fn run_suite(cfg: &FuzzConfig) -> Summary {
    run_suite_with(&ExactEngine, cfg)
}

/// Generate `cfg.cases` cases, replay each with [`check_case`] and shrink
/// failures. The result does not depend on thread scheduling.
pub fn run_suite_with(engine: &dyn Engine, cfg: &FuzzConfig) -> Summary {
    let per_case: Vec<(usize, [usize; 4], Option<CaseFailure>)> = (0..cfg.cases)
        .into_par_iter()
        .map(|i| {
            let g = gen_gamma(cfg, i);
            let t = gen_trace(cfg, &g, i);
            let mut counts = [0; 4];
            for mv in t.iter() {
                counts[move_slot(mv)] += 1;
            }
            match check_case(engine, cfg, &g, &t) {
                Ok(steps) => (steps, counts, None),
                Err(failure) => {
                    let original_step = failure.step;
                    let reproducer = shrink(engine, cfg, &g, &t, failure);
                    let fail = CaseFailure {
                        case: i,
                        original_step,
                        original_trace_len: t.len(),
                        reproducer,
                    };
                    (original_step + 1, counts, Some(fail))
                }
            }
        })
        .collect();
    let mut summary = Summary {
        cases_run: cfg.cases,
        ..Summary::default()
    };
    for (steps, counts, failure) in per_case {
        summary.steps_checked += steps;
        for (total, c) in summary.move_counts.iter_mut().zip(counts) {
            *total += c;
        }
        summary.failures.extend(failure);
    }
    summary
}
