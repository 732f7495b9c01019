//! Acceptance suite. Runs every exit criterion at its pinned tolerance and
//! prints one PASS/FAIL line per criterion; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gamma_invariants::bernoulli::bernoulli_poly_eval;
use gamma_invariants::dsl;
use gamma_invariants::exact::{rat, rat_int, GaussianRat, PowerProduct, Rat, UnitPhase};
use gamma_invariants::fuzz::{
    check_case, gen_gamma, gen_trace, run_suite, run_suite_with, Engine, ExactEngine, FuzzConfig,
};
use gamma_invariants::gamma::{
    apply_move, apply_trace, contract, expand, merge, split, DecoratedGamma, GammaData,
    GammaFactor, Move, MoveError, RationalFactor,
};
use gamma_invariants::invariants::{
    conductor, degree, equivalent, fingerprint, h_invariant, h_star, h_star_parts, Fingerprint,
    InvariantError, Verdict,
};
use gamma_invariants::oracle::{gamma_complex, verify_move, SamplePlan};

const STABILITY_RUNTIME_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_TOL: f64 = 1e-8;
const DEPTH: usize = 12;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Mutant<'a> = (&'static str, &'a dyn Engine, fn(&Move) -> bool);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_rat(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rat {
    rat(rng.random_range(-num..=num), rng.random_range(1..=den))
}

fn random_gauss(rng: &mut ChaCha8Rng) -> GaussianRat {
    GaussianRat::new(random_rat(rng, 20, 12), random_rat(rng, 20, 12))
}

fn random_factor(rng: &mut ChaCha8Rng, min_re: i64) -> GammaFactor {
    let lambda = rat(rng.random_range(1..=20), rng.random_range(1..=20));
    let d = rng.random_range(1..=6);
    let re = rat(rng.random_range(min_re * d..=20 * d), d);
    let im = random_rat(rng, 20, 6);
    GammaFactor::new(lambda, GaussianRat::new(re, im))
}

fn single(f: GammaFactor) -> DecoratedGamma {
    DecoratedGamma::undecorated(
        GammaData::new(UnitPhase::default(), PowerProduct::one(), vec![f]).unwrap(),
    )
}

/// Default-config cases shared by criteria 1, 5 and 9.
fn stability_cases(cfg: &FuzzConfig) -> Vec<(DecoratedGamma, gamma_invariants::MoveTrace)> {
    (0..cfg.cases)
        .map(|i| {
            let g = gen_gamma(cfg, i);
            let t = gen_trace(cfg, &g, i);
            (g, t)
        })
        .collect()
}

fn c1_exact_stability() -> Outcome {
    let cfg = FuzzConfig::default();
    let start = Instant::now();
    let summary = run_suite(&cfg);
    let elapsed = start.elapsed();
    ensure(
        summary.cases_run == 1000 && cfg.max_trace == 12 && cfg.depth == DEPTH,
        || "default configuration drifted".into(),
    )?;
    ensure(summary.passed(), || {
        format!(
            "{} failing cases, first: {:?}",
            summary.failures.len(),
            summary.failures.first().map(|f| f.reproducer.to_json())
        )
    })?;
    ensure(summary.move_counts.iter().all(|&c| c > 0), || {
        format!("not all four moves exercised: {:?}", summary.move_counts)
    })?;
    ensure(elapsed < STABILITY_RUNTIME_LIMIT, || {
        format!("took {elapsed:.1?}, limit {STABILITY_RUNTIME_LIMIT:?}")
    })?;
    Ok(format!(
        "1000 cases, {} steps (expand/contract/split/merge = {:?}), 0 failures, {elapsed:.1?}",
        summary.steps_checked, summary.move_counts
    ))
}

fn c2_expand_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..500 {
        let f = random_factor(&mut rng, 1);
        let (lambda, mu) = (f.lambda.clone(), f.mu.clone());
        let g = single(f);
        let e = expand(&g, 0).map_err(|e| e.to_string())?;
        let before = h_star_parts(&g, DEPTH).map_err(|e| e.to_string())?;
        let after = h_star_parts(&e, DEPTH).map_err(|e| e.to_string())?;
        let one = GaussianRat::one();
        let mu_minus_one = &mu - &one;
        let inv = lambda.recip();
        for n in 1..=DEPTH {
            let k = n as i64 - 1;
            let inv_pow = gamma_invariants::exact::rat_pow(&inv, k);
            let bern_delta = &after[n].gamma_part - &before[n].gamma_part;
            let root_delta = &after[n].rational_part - &before[n].rational_part;
            // 2λ^{1−n}(B_n(μ−1) − B_n(μ))
            let bern_closed = (&bernoulli_poly_eval(n, &mu_minus_one)
                - &bernoulli_poly_eval(n, &mu))
                .scale(&(rat_int(2) * &inv_pow));
            // new root α = (1−μ)/λ enters as −(−1)^n 2n α^{n−1}
            let sign = if n % 2 == 0 { -1 } else { 1 };
            let root_closed = (&one - &mu)
                .pow(k)
                .scale(&(rat_int(sign * 2 * n as i64) * &inv_pow));
            ensure(
                bern_delta == bern_closed && root_delta == root_closed,
                || format!("case {case}, n = {n}: deltas do not match closed forms"),
            )?;
            ensure((&bern_delta + &root_delta).is_zero(), || {
                format!("case {case}, n = {n}: λ = {lambda}, μ = {mu}: deltas do not cancel")
            })?;
        }
    }
    Ok("500 expands × n = 1..12: Bernoulli delta + root delta = 0".into())
}

fn c3_rational_extension() -> Outcome {
    let cfg = FuzzConfig {
        seed: 3,
        ..FuzzConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..500 {
        let g = gen_gamma(&cfg, i);
        let kappa =
            PowerProduct::integer_pow(rng.random_range(1..=30), &random_rat(&mut rng, 5, 4))
                .unwrap();
        let decorated = DecoratedGamma::new(
            RationalFactor::new(rng.random_bool(0.5), kappa, vec![], vec![]),
            g.gamma.clone(),
        );
        for n in 0..=DEPTH {
            let lhs = h_star(&decorated, n).map_err(|e| e.to_string())?;
            let rhs = h_invariant(&g.gamma, n).map_err(|e| e.to_string())?;
            ensure(lhs == rhs, || {
                format!("case {i}, n = {n}: H* = {lhs}, H = {rhs}")
            })?;
        }
    }
    Ok("500 data sets × n = 0..12: H*(n; κγ) = H(n)".into())
}

fn c4_bernoulli_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let x = random_rat(&mut rng, 50, 30);
        let z = random_gauss(&mut rng);
        let one = GaussianRat::one();
        for n in 0..=DEPTH {
            for arg in [GaussianRat::real(x.clone()), z.clone()] {
                // B_n(x+1) = B_n(x) + n x^{n−1}
                let lhs = bernoulli_poly_eval(n, &(&arg + &one));
                let rhs = &bernoulli_poly_eval(n, &arg)
                    + &arg.pow(n as i64 - 1).scale(&rat_int(n as i64));
                let rhs = if n == 0 {
                    bernoulli_poly_eval(0, &arg)
                } else {
                    rhs
                };
                ensure(lhs == rhs, || {
                    format!("translation fails at n = {n}, x = {arg}")
                })?;
            }
            for m in 1..=6i64 {
                // B_n(mx) = m^{n−1} Σ_{j<m} B_n(x + j/m)
                let lhs = bernoulli_poly_eval(n, &GaussianRat::real(&x * rat_int(m)));
                let mut sum = GaussianRat::zero();
                for j in 0..m {
                    sum = &sum + &bernoulli_poly_eval(n, &GaussianRat::real(&x + rat(j, m)));
                }
                let rhs = sum.scale(&gamma_invariants::exact::rat_pow(&rat_int(m), n as i64 - 1));
                ensure(lhs == rhs, || {
                    format!("multiplication fails at n = {n}, m = {m}, x = {x}")
                })?;
            }
        }
    }
    Ok("translation and multiplication identities exact for n ≤ 12, m ≤ 6, 100 arguments".into())
}

fn c5_numeric_concordance() -> Outcome {
    let cfg = FuzzConfig::default();
    let plan = SamplePlan::with_tolerance(ORACLE_TOL);
    let mut worst = 0.0f64;
    let mut moves = 0usize;
    for (i, (g, t)) in stability_cases(&cfg).into_iter().enumerate() {
        let mut cur = g;
        for (k, mv) in t.iter().enumerate() {
            let next = apply_move(&cur, mv).map_err(|e| e.to_string())?;
            let rep =
                verify_move(&cur, &next, &plan).map_err(|e| format!("case {i} step {k}: {e}"))?;
            ensure(rep.points_used >= 3, || {
                format!("case {i} step {k}: too few points")
            })?;
            ensure(rep.max_rel_dev < ORACLE_TOL && rep.omega_consistent, || {
                format!(
                    "case {i} step {k} ({mv}): deviation {:e}, ω ok = {}",
                    rep.max_rel_dev, rep.omega_consistent
                )
            })?;
            worst = worst.max(rep.max_rel_dev);
            moves += 1;
            cur = next;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_fact = 0.0f64;
    let mut worst_mult = 0.0f64;
    let mut tested = 0;
    while tested < 500 {
        let z = Complex64::new(rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0));
        if z.norm() > 30.0 || (z.re < 0.5 && (z.re - z.re.round()).hypot(z.im) < 1e-3) {
            continue;
        }
        tested += 1;
        // zΓ(z) = Γ(z+1)
        let ratio = z * gamma_complex(z).unwrap() / gamma_complex(z + 1.0).unwrap();
        worst_fact = worst_fact.max((ratio - 1.0).norm());
        for m in 2..=5u32 {
            let mf = f64::from(m);
            let mut prod = Complex64::new(1.0, 0.0);
            for k in 0..m {
                prod *= gamma_complex((z + f64::from(k)) / mf).unwrap();
            }
            let rhs = Complex64::new(mf, 0.0).powc(z - 0.5)
                * (2.0 * std::f64::consts::PI).powf((1.0 - mf) / 2.0)
                * prod;
            let lhs = gamma_complex(z).unwrap();
            worst_mult = worst_mult.max((rhs / lhs - 1.0).norm());
        }
    }
    ensure(worst_fact < 1e-9, || {
        format!("factorial formula error {worst_fact:e}")
    })?;
    ensure(worst_mult < ORACLE_TOL, || {
        format!("multiplication formula error {worst_mult:e}")
    })?;
    Ok(format!(
        "{moves} moves verified (worst deviation {worst:.1e}); Γ factorial {worst_fact:.1e}, multiplication {worst_mult:.1e}"
    ))
}

fn c6_worked_constants() -> Outcome {
    let zeta = dsl::parse("omega=tag; Q=pi^-1/2; G(1/2*s+0)").map_err(|e| e.to_string())?;
    ensure(degree(&zeta.gamma) == rat_int(1), || "ζ degree ≠ 1".into())?;
    ensure(
        conductor(&zeta.gamma).map_err(|e| e.to_string())?.is_one(),
        || "ζ conductor ≠ 1".into(),
    )?;
    let fp = fingerprint(&zeta, 2).map_err(|e| e.to_string())?;
    ensure(fp.h_values[0] == GaussianRat::one(), || {
        "ζ H*(0) ≠ 1".into()
    })?;

    let g = dsl::parse("omega=tag; Q=1; G(1*s+0)").map_err(|e| e.to_string())?;
    let (s, _) = split(&g, 0, 2).map_err(|e| e.to_string())?;
    let two_pi_sq = PowerProduct::two_pi_pow(&rat_int(2));
    for (name, x) in [("Γ(s)", &g), ("split", &s)] {
        ensure(conductor(&x.gamma).unwrap() == two_pi_sq, || {
            format!("{name}: conductor ≠ (2π)²")
        })?;
        ensure(
            h_star(x, 2).unwrap() == GaussianRat::real(rat(1, 3)),
            || format!("{name}: H(2) ≠ 1/3"),
        )?;
    }
    Ok("ζ: d = 1, q = 1, H*(0) = 1; Γ(s) and its duplication: q = (2π)², H(2) = 1/3".into())
}

fn c7_inverse_pairs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..500 {
        let r = rng.random_range(1..=4);
        let factors: Vec<GammaFactor> = (0..r).map(|_| random_factor(&mut rng, 0)).collect();
        let mut g = DecoratedGamma::new(
            RationalFactor::new(
                rng.random_bool(0.3),
                PowerProduct::integer_pow(rng.random_range(1..=9), &random_rat(&mut rng, 3, 3))
                    .unwrap(),
                (0..rng.random_range(0..3))
                    .map(|_| random_gauss(&mut rng))
                    .collect::<Vec<_>>(),
                (0..rng.random_range(0..3))
                    .map(|_| random_gauss(&mut rng))
                    .collect::<Vec<_>>(),
            ),
            GammaData::new(
                UnitPhase::tagged("w"),
                PowerProduct::integer_pow(rng.random_range(1..=12), &random_rat(&mut rng, 3, 2))
                    .unwrap(),
                factors,
            )
            .unwrap(),
        );
        let j = rng.random_range(0..r);
        // contract then expand always applies; expand then contract when Re μ ≥ 1
        let back = expand(&contract(&g, j).unwrap(), j).unwrap();
        ensure(back == g, || format!("case {i}: expand∘contract ≠ id"))?;
        if g.factor(j).unwrap().mu.re < Rat::one() {
            g = contract(&g, j).unwrap();
        }
        let back = contract(&expand(&g, j).unwrap(), j).unwrap();
        ensure(back == g, || format!("case {i}: contract∘expand ≠ id"))?;
        let m = rng.random_range(1..=6u32);
        let (s, _) = split(&g, j, m).unwrap();
        let ix: Vec<usize> = (j..j + m as usize).collect();
        let (back, _) = merge(&s, &ix, m).unwrap();
        ensure(back == g, || {
            format!("case {i}: merge∘split ≠ id for m = {m}")
        })?;
    }
    Ok("500 instances each: expand/contract and split/merge restore Q, ω, κ, roots, poles".into())
}

/// Engine whose H* omits the root/pole term.
struct DropRootTerm;

impl Engine for DropRootTerm {
    fn apply(&self, g: &DecoratedGamma, mv: &Move) -> Result<DecoratedGamma, MoveError> {
        apply_move(g, mv)
    }

    fn fingerprint(&self, g: &DecoratedGamma, depth: usize) -> Result<Fingerprint, InvariantError> {
        let mut fp = fingerprint(g, depth)?;
        for (n, parts) in h_star_parts(g, depth)?.into_iter().enumerate().skip(1) {
            fp.h_values[n] = parts.gamma_part;
        }
        Ok(fp)
    }
}

/// Engine whose split forgets the ω update.
struct DropSplitTwist;

impl Engine for DropSplitTwist {
    fn apply(&self, g: &DecoratedGamma, mv: &Move) -> Result<DecoratedGamma, MoveError> {
        let out = apply_move(g, mv)?;
        if !matches!(mv, Move::Split(..)) {
            return Ok(out);
        }
        let gamma = GammaData::new(
            g.gamma.omega().clone(),
            out.gamma.q().clone(),
            out.gamma.factors().to_vec(),
        )
        .expect("split output is valid data");
        Ok(DecoratedGamma::new(out.rational, gamma))
    }

    fn fingerprint(&self, g: &DecoratedGamma, depth: usize) -> Result<Fingerprint, InvariantError> {
        fingerprint(g, depth)
    }
}

fn c8_mutation_sensitivity() -> Outcome {
    let cfg = FuzzConfig::default();
    let mut details = Vec::new();
    let mutants: [Mutant; 2] = [
        ("root term dropped", &DropRootTerm, Move::is_factorial),
        ("split twist dropped", &DropSplitTwist, |mv| {
            matches!(mv, Move::Split(..))
        }),
    ];
    for (name, engine, expected_move) in mutants {
        let summary = run_suite_with(engine, &cfg);
        ensure(!summary.passed(), || format!("{name}: mutant survived"))?;
        for f in &summary.failures {
            let r = &f.reproducer;
            ensure(r.trace.len() == 1, || {
                format!(
                    "{name}: case {} minimized to length {}",
                    f.case,
                    r.trace.len()
                )
            })?;
            ensure(expected_move(&r.trace.0[0]), || {
                format!("{name}: case {} blamed {}", f.case, r.trace.0[0])
            })?;
            ensure(
                check_case(engine, &cfg, &r.gamma, &r.trace).is_err(),
                || format!("{name}: reproducer of case {} does not fail", f.case),
            )?;
            ensure(
                check_case(&ExactEngine, &cfg, &r.gamma, &r.trace).is_ok(),
                || {
                    format!(
                        "{name}: reproducer of case {} fails the exact engine",
                        f.case
                    )
                },
            )?;
        }
        details.push(format!(
            "{name}: {} failures, all length-1",
            summary.failures.len()
        ));
    }
    Ok(details.join("; "))
}

fn c9_cli_round_trip() -> Outcome {
    let cfg = FuzzConfig::default();
    let cases = stability_cases(&cfg);
    // decorated, non-reduced, twisted objects reached by the traces
    let mut checked = 0;
    for (g, t) in cases
        .iter()
        .filter(|(g, t)| !g.is_empty() && !t.is_empty())
        .take(200)
    {
        let h = apply_trace(g, t).map_err(|e| e.to_string())?;
        let text = dsl::print(&h);
        let parsed = dsl::parse(&text).map_err(|e| format!("{e}\n{text}"))?;
        ensure(parsed == h, || format!("parse∘print changed\n{text}"))?;
        ensure(dsl::print(&parsed) == text, || {
            format!("print not canonical\n{text}")
        })?;
        let script = dsl::print_script(t);
        ensure(
            dsl::parse_script(&script).map_err(|e| e.to_string())? == *t,
            || format!("script round trip failed: {script}"),
        )?;
        checked += 1;
    }
    ensure(checked == 200, || format!("only {checked} files generated"))?;
    for (i, (g, t)) in cases.iter().enumerate() {
        let h = apply_trace(g, t).map_err(|e| e.to_string())?;
        let a = dsl::parse(&dsl::print(g)).unwrap();
        let b = dsl::parse(&dsl::print(&h)).unwrap();
        let v = equivalent(&a, &b, DEPTH).map_err(|e| e.to_string())?;
        ensure(v == Verdict::FingerprintEqual { depth: DEPTH }, || {
            format!("case {i}: {v}")
        })?;
    }
    Ok(format!(
        "200 canonical files round-trip; {} equiv pairs fingerprint-equal",
        cases.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("C1 exact stability along random traces", c1_exact_stability),
        ("C2 expanding-move identity", c2_expand_identity),
        ("C3 rational-extension property", c3_rational_extension),
        ("C4 Bernoulli identities", c4_bernoulli_identities),
        ("C5 numeric oracle concordance", c5_numeric_concordance),
        ("C6 worked constants", c6_worked_constants),
        ("C7 inverse-pair laws", c7_inverse_pairs),
        ("C8 mutation sensitivity", c8_mutation_sensitivity),
        ("C9 DSL round trip and equiv", c9_cli_round_trip),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("[PASS] {name}: {detail} ({:.1?})", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
