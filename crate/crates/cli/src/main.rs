//! `gamma-invariants`: compute, compare and transform γ-factor presentations.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 when a verification or
//! fuzz run fails.

use std::fmt::Write as _;
use std::io::{Read, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gamma_invariants::dsl;
use gamma_invariants::fuzz::{run_suite, FuzzConfig};
use gamma_invariants::gamma::{apply_move, reduce};
use gamma_invariants::invariants::{
    equivalent, fingerprint, Fingerprint, DEFAULT_DEPTH, MAX_DEPTH,
};
use gamma_invariants::json::{self, SCHEMA_VERSION};
use gamma_invariants::oracle::{verify_move, SamplePlan};
use gamma_invariants::DecoratedGamma;

#[derive(Parser)]
#[command(
    name = "gamma-invariants",
    version,
    about = "Exact invariants of γ-factors under expand/contract/split/merge moves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Emit machine-readable JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print the fingerprint (d, q, ω_F, H*(0..N)) of a presentation.
    Invariants {
        /// Input file in the DSL or JSON ("-" for stdin).
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEPTH, value_parser = parse_depth)]
        depth: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Apply a move script, printing the fingerprint delta of every step.
    Transform {
        file: PathBuf,
        /// Comma-separated moves, e.g. "expand(0),split(1,2),merge(1..2,2)".
        #[arg(long)]
        script: String,
        #[arg(long, default_value_t = DEFAULT_DEPTH, value_parser = parse_depth)]
        depth: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Expand every factor down to 0 ≤ Re μ < 1.
    Reduce {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Compare two presentations by fingerprint.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEPTH, value_parser = parse_depth)]
        depth: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Check numerically that `a` = c·`b` for a single constant c.
    Verify {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Replay random move traces and check every step.
    Fuzz(FuzzArgs),
}

#[derive(Args)]
struct FuzzArgs {
    /// Suite seed, decimal or 0x-prefixed hex.
    #[arg(long, env = "GAMMA_INVARIANTS_SEED", value_parser = parse_seed)]
    seed: Option<u64>,
    #[arg(long)]
    cases: Option<usize>,
    /// Maximum number of Γ factors in a generated start object.
    #[arg(long)]
    max_r: Option<usize>,
    /// Maximum number of moves per trace.
    #[arg(long)]
    max_trace: Option<usize>,
    /// Largest split/merge multiplicity.
    #[arg(long)]
    max_m: Option<u32>,
    /// Bound on numerators and denominators of generated rationals.
    #[arg(long)]
    bound: Option<i64>,
    #[arg(long, value_parser = parse_depth)]
    depth: Option<usize>,
    /// Numeric oracle tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    out: Output,
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    CheckFailed,
}

fn parse_depth(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n > MAX_DEPTH {
        return Err(format!("depth must be at most {MAX_DEPTH}"));
    }
    Ok(n)
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn read_input(path: &Path) -> Result<DecoratedGamma> {
    let text = if path == Path::new("-") {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading stdin")?;
        buf
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text)
            .with_context(|| format!("{}: malformed JSON", path.display()))?;
        // `reduce --json` and `transform --json` wrap the object they produce
        let inner = ["reduced", "result"]
            .iter()
            .find_map(|k| v.get(*k))
            .unwrap_or(&v);
        json::decorated_from_json(inner).with_context(|| format!("{}", path.display()))
    } else {
        dsl::parse(&text).with_context(|| format!("{}", path.display()))
    }
}

fn emit(buf: &mut String, v: &Value) {
    let _ = writeln!(
        buf,
        "{}",
        serde_json::to_string_pretty(v).expect("JSON values serialize")
    );
}

/// Print rows with left-aligned, space-padded columns.
fn print_table(buf: &mut String, rows: &[Vec<String>]) {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c + 1 == row.len() {
                line.push_str(cell);
            } else {
                line.push_str(&format!("{cell:<w$}  ", w = widths[c]));
            }
        }
        let _ = writeln!(buf, "{line}");
    }
}

fn fingerprint_rows(fp: &Fingerprint) -> Vec<Vec<String>> {
    let mut rows = vec![
        vec!["d".to_string(), fp.degree.to_string()],
        vec!["q".to_string(), fp.conductor.to_string()],
        vec!["omega_F".to_string(), fp.root_number.to_string()],
    ];
    for (n, h) in fp.h_values.iter().enumerate() {
        rows.push(vec![format!("H*({n})"), h.to_string()]);
    }
    rows
}

fn cmd_invariants(file: &Path, depth: usize, out: &Output, buf: &mut String) -> Result<Status> {
    let g = read_input(file)?;
    let fp = fingerprint(&g, depth)?;
    if out.json {
        emit(buf, &json::fingerprint(&fp));
    } else {
        print_table(buf, &fingerprint_rows(&fp));
    }
    Ok(Status::Ok)
}

fn cmd_transform(
    file: &Path,
    script: &str,
    depth: usize,
    out: &Output,
    buf: &mut String,
) -> Result<Status> {
    let g = read_input(file)?;
    let trace = dsl::parse_script(script).context("--script")?;
    let mut cur = g;
    let mut fp = fingerprint(&cur, depth)?;
    let mut all_zero = true;
    let mut rows = vec![["step", "move", "Q", "Δd", "Δq", "Δω_F", "ΔH*"]
        .map(String::from)
        .to_vec()];
    let mut steps = Vec::new();
    for (k, mv) in trace.iter().enumerate() {
        let next = apply_move(&cur, mv).with_context(|| format!("step {k} ({mv})"))?;
        let next_fp = fingerprint(&next, depth)?;
        let delta = fp.delta(&next_fp);
        all_zero &= delta.is_zero();
        let h_cell = {
            let nonzero: Vec<String> = delta
                .h_values
                .iter()
                .enumerate()
                .filter(|(_, h)| !h.is_zero())
                .map(|(n, h)| format!("{n}:{h}"))
                .collect();
            if nonzero.is_empty() {
                "0".to_string()
            } else {
                nonzero.join(",")
            }
        };
        let omega_cell = if delta.same_tag {
            delta.root_number.to_string()
        } else {
            format!("{} (tag changed)", delta.root_number)
        };
        rows.push(vec![
            k.to_string(),
            mv.to_string(),
            next.gamma.q().to_string(),
            delta.degree.to_string(),
            delta.conductor.to_string(),
            omega_cell,
            h_cell,
        ]);
        steps.push(json!({
            "step": k,
            "move": mv.to_string(),
            "Q": json::power_product(next.gamma.q()),
            "delta": json::delta(&delta),
        }));
        cur = next;
        fp = next_fp;
    }
    if out.json {
        emit(
            buf,
            &json!({
                "schema_version": SCHEMA_VERSION,
                "steps": steps,
                "all_zero": all_zero,
                "result": json::decorated(&cur),
            }),
        );
    } else {
        print_table(buf, &rows);
        let _ = writeln!(buf);
        let _ = write!(buf, "{}", dsl::print(&cur));
    }
    Ok(if all_zero {
        Status::Ok
    } else {
        Status::CheckFailed
    })
}

fn cmd_reduce(file: &Path, out: &Output, buf: &mut String) -> Result<Status> {
    let g = read_input(file)?;
    let (r, trace) = reduce(&g);
    if out.json {
        emit(
            buf,
            &json!({
                "schema_version": SCHEMA_VERSION,
                "reduced": json::decorated(&r),
                "trace": json::trace(&trace),
            }),
        );
    } else {
        let _ = write!(buf, "{}", dsl::print(&r));
        let _ = writeln!(buf, "# trace: {}", dsl::print_script(&trace));
    }
    Ok(Status::Ok)
}

fn cmd_equiv(a: &Path, b: &Path, depth: usize, out: &Output, buf: &mut String) -> Result<Status> {
    let (ga, gb) = (read_input(a)?, read_input(b)?);
    let v = equivalent(&ga, &gb, depth)?;
    if out.json {
        emit(buf, &json::verdict(&v));
    } else {
        let _ = writeln!(buf, "{v}");
    }
    Ok(Status::Ok)
}

fn cmd_verify(a: &Path, b: &Path, tol: f64, out: &Output, buf: &mut String) -> Result<Status> {
    if tol.is_nan() || tol <= 0.0 {
        bail!("--tol must be positive");
    }
    let (ga, gb) = (read_input(a)?, read_input(b)?);
    let report = verify_move(&ga, &gb, &SamplePlan::with_tolerance(tol))?;
    let pass = report.passes(tol);
    if out.json {
        let mut v = json::report(&report);
        v["pass"] = json!(pass);
        emit(buf, &v);
    } else {
        print_table(
            buf,
            &[
                vec![
                    "c".to_string(),
                    format!("{:.15e} {:+.15e}i", report.c.re, report.c.im),
                ],
                vec![
                    "max_rel_dev".to_string(),
                    format!("{:.3e}", report.max_rel_dev),
                ],
                vec![
                    "omega_consistent".to_string(),
                    report.omega_consistent.to_string(),
                ],
                vec!["points_used".to_string(), report.points_used.to_string()],
                vec![
                    "result".to_string(),
                    if pass { "pass" } else { "fail" }.to_string(),
                ],
            ],
        );
    }
    Ok(if pass {
        Status::Ok
    } else {
        Status::CheckFailed
    })
}

fn cmd_fuzz(args: &FuzzArgs, buf: &mut String) -> Result<Status> {
    let mut cfg = FuzzConfig::default();
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(v) = args.cases {
        cfg.cases = v;
    }
    if let Some(v) = args.max_r {
        if v == 0 {
            bail!("--max-r must be at least 1");
        }
        cfg.max_r = v;
    }
    if let Some(v) = args.max_trace {
        cfg.max_trace = v;
    }
    if let Some(v) = args.max_m {
        if v == 0 {
            bail!("--max-m must be at least 1");
        }
        cfg.max_m = v;
    }
    if let Some(v) = args.bound {
        if v < 1 {
            bail!("--bound must be at least 1");
        }
        cfg.num_bound = v;
        cfg.den_bound = v;
    }
    if let Some(v) = args.depth {
        cfg.depth = v;
    }
    if let Some(v) = args.tol {
        if v.is_nan() || v <= 0.0 {
            bail!("--tol must be positive");
        }
        cfg.tolerance = v;
    }
    let summary = run_suite(&cfg);
    if args.out.json {
        let mut v = summary.to_json();
        v["seed"] = json!(format!("{:#x}", cfg.seed));
        emit(buf, &v);
    } else {
        let [e, c, s, m] = summary.move_counts;
        let _ = writeln!(buf, "seed      {:#x}", cfg.seed);
        let _ = writeln!(buf, "cases     {}", summary.cases_run);
        let _ = writeln!(buf, "steps     {}", summary.steps_checked);
        let _ = writeln!(buf, "moves     expand={e} contract={c} split={s} merge={m}");
        let _ = writeln!(buf, "failures  {}", summary.failures.len());
        for f in &summary.failures {
            let r = &f.reproducer;
            let _ = writeln!(buf);
            let _ = writeln!(
                buf,
                "case {} failed at step {} of {}; minimized to {} move(s): {}",
                f.case,
                f.original_step,
                f.original_trace_len,
                r.trace.len(),
                r.failure.kind
            );
            let _ = write!(buf, "{}", dsl::print(&r.gamma));
            let _ = writeln!(buf, "# script: {}", dsl::print_script(&r.trace));
        }
    }
    Ok(if summary.passed() {
        Status::Ok
    } else {
        Status::CheckFailed
    })
}

fn run(cli: Cli, buf: &mut String) -> Result<Status> {
    match &cli.command {
        Command::Invariants { file, depth, out } => cmd_invariants(file, *depth, out, buf),
        Command::Transform {
            file,
            script,
            depth,
            out,
        } => cmd_transform(file, script, *depth, out, buf),
        Command::Reduce { file, out } => cmd_reduce(file, out, buf),
        Command::Equiv { a, b, depth, out } => cmd_equiv(a, b, *depth, out, buf),
        Command::Verify { a, b, tol, out } => cmd_verify(a, b, *tol, out, buf),
        Command::Fuzz(args) => cmd_fuzz(args, buf),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut buf = String::new();
    let result = run(cli, &mut buf);
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let mut stdout = std::io::stdout().lock();
    let _ = stdout
        .write_all(buf.as_bytes())
        .and_then(|()| stdout.flush());
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
