use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

const ZETA: &str = "omega=tag; Q=pi^-1/2; G(1/2*s+0)\n";
const GAMMA_S: &str = "omega=tag;\nQ=1;\nG(1*s+0)\n";
const DECORATED: &str = "# shifted and decorated\n\
    omega=w*2^(i*1/2); Q=3^1/2;\n\
    G(1/2*s+5/2+3i) G(2*s+1)\n\
    R: kappa=-2; roots=[1/2]; poles=[i]\n";

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: TempDir::new().unwrap(),
        }
    }

    fn file(&self, name: &str, content: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, content).unwrap();
        p
    }
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gamma-invariants"));
    c.env_remove("GAMMA_INVARIANTS_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

/// Value column of a two-column table row.
fn row<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| {
            let mut it = l.split_whitespace();
            (it.next() == Some(key)).then(|| it.next().unwrap_or(""))
        })
        .unwrap_or_else(|| panic!("no row {key} in\n{text}"))
}

#[test]
fn zeta_invariants() {
    let ws = Workspace::new();
    let f = ws.file("zeta.gi", ZETA);
    let o = run(&["invariants", p(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(row(&text, "d"), "1");
    assert_eq!(row(&text, "q"), "1");
    assert_eq!(row(&text, "omega_F"), "tag");
    assert_eq!(row(&text, "H*(0)"), "1");
    assert_eq!(row(&text, "H*(12)"), "-1415168/1365");

    let o = run(&["invariants", p(&f), "--depth", "3", "--json"]);
    let v = json_out(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["degree"], "1");
    assert_eq!(v["conductor"], serde_json::json!([]));
    assert_eq!(v["h_star"].as_array().unwrap().len(), 4);
    assert_eq!(v["h_star"][0], serde_json::json!({"re": "1", "im": "0"}));
}

#[test]
fn duplication_has_zero_deltas() {
    let ws = Workspace::new();
    let f = ws.file("gamma.gi", GAMMA_S);
    let o = run(&["transform", p(&f), "--script", "split(0,2)"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    let header: Vec<&str> = lines[0].split_whitespace().collect();
    let step: Vec<&str> = lines[1].split_whitespace().collect();
    assert_eq!(header, ["step", "move", "Q", "Δd", "Δq", "Δω_F", "ΔH*"]);
    assert_eq!(step, ["0", "split(0,2)", "2^1", "0", "1", "1", "0"]);
    assert!(text.contains("G(1/2*s+0)\nG(1/2*s+1/2)\n"));

    let o = run(&[
        "transform",
        p(&f),
        "--script",
        "split(0,2),merge(0..1,2)",
        "--json",
    ]);
    let v = json_out(&o);
    assert_eq!(v["all_zero"], true);
    assert_eq!(v["steps"][0]["Q"], serde_json::json!([["2", "1"]]));
    assert_eq!(v["steps"][1]["delta"]["zero"], true);
    assert_eq!(v["result"]["factors"].as_array().unwrap().len(), 1);
}

#[test]
fn equiv_verdicts() {
    let ws = Workspace::new();
    let z = ws.file("zeta.gi", ZETA);
    let g = ws.file("gamma.gi", GAMMA_S);
    let o = run(&["equiv", p(&z), p(&z)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "fingerprint-equal(12)");

    let o = run(&["equiv", p(&z), p(&g), "--depth", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "distinct (degree differs)");

    let o = run(&["equiv", p(&z), p(&z), "--depth", "5", "--json"]);
    let v = json_out(&o);
    assert_eq!(v["verdict"], "fingerprint-equal");
    assert_eq!(v["depth"], 5);
}

#[test]
fn transformed_file_is_equivalent_and_verifies() {
    let ws = Workspace::new();
    let d = ws.file("d.gi", DECORATED);
    let o = run(&[
        "transform",
        p(&d),
        "--script",
        "split(1,3),expand(0),merge({3,2,1},3),contract(1)",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let moved = ws.file("moved.json", &stdout(&o));

    let o = run(&["equiv", p(&d), p(&moved)]);
    assert_eq!(stdout(&o).trim(), "fingerprint-equal(12)");

    let o = run(&["verify", p(&d), p(&moved)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(row(&stdout(&o), "result"), "pass");
    assert_eq!(row(&stdout(&o), "omega_consistent"), "true");
}

#[test]
fn reduce_prints_reduced_form_and_trace() {
    let ws = Workspace::new();
    let d = ws.file("d.gi", DECORATED);
    let o = run(&["reduce", p(&d)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("G(1/2*s+1/2+3i)\nG(2*s+0)\n"), "{text}");
    assert!(
        text.contains("R: kappa=-1; roots=[-3-6i,-1-6i,0,1/2]; poles=[i]"),
        "{text}"
    );
    assert!(
        text.ends_with("# trace: expand(0),expand(0),expand(1)\n"),
        "{text}"
    );

    // the printed form parses back to the same object
    let reduced = ws.file("r.gi", &text);
    let again = run(&["reduce", p(&reduced)]);
    assert!(stdout(&again).starts_with(text.lines().next().unwrap()));
    assert!(stdout(&again).ends_with("# trace: \n"));
}

#[test]
fn stdin_input() {
    let mut child = bin()
        .args(["invariants", "-", "--depth", "1"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(ZETA.as_bytes())
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(row(&stdout(&o), "H*(1)"), "-1");
}

#[test]
fn invalid_input_exits_one() {
    let ws = Workspace::new();
    let cases = [
        ("omega=tag; Q=1; G(0*s+1)", "λ must be positive"),
        ("omega=tag;\nQ=1;\nG(-1*s+0)", "λ must be positive"),
        ("omega=tag; Q=1; G(1*s-1)", "Re(μ) must be non-negative"),
        ("omega=tag; Q=1; G(1*s+0", "1:24"),
        ("{\"schema_version\": 7}", "schema"),
    ];
    for (i, (content, needle)) in cases.iter().enumerate() {
        let f = ws.file(&format!("bad{i}.gi"), content);
        let o = run(&["invariants", p(&f)]);
        assert_eq!(o.status.code(), Some(1), "{content}");
        assert!(stderr(&o).contains(needle), "{content}: {}", stderr(&o));
        assert!(stdout(&o).is_empty());
    }

    let g = ws.file("gamma.gi", GAMMA_S);
    for script in ["expand(0)", "split(3,2)", "merge(0..1,2)", "twist(0)"] {
        let o = run(&["transform", p(&g), "--script", script]);
        assert_eq!(o.status.code(), Some(1), "{script}");
    }
    assert_eq!(
        run(&["invariants", "/nonexistent/file.gi"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["invariants", p(&g), "--depth", "100000"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_failure_exits_two() {
    let ws = Workspace::new();
    let z = ws.file("zeta.gi", ZETA);
    let g = ws.file("gamma.gi", GAMMA_S);
    let o = run(&["verify", p(&z), p(&g), "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v = json_out(&o);
    assert_eq!(v["pass"], false);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn fuzz_exit_codes_and_seed() {
    let o = run(&["fuzz", "--cases", "20", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json_out(&o);
    assert_eq!(v["cases_run"], 20);
    assert_eq!(v["failures"], serde_json::json!([]));
    assert_eq!(v["seed"], "0x9e3779b97f4a7c15");

    let o = bin()
        .args(["fuzz", "--cases", "5", "--json"])
        .env("GAMMA_INVARIANTS_SEED", "0x2a")
        .output()
        .unwrap();
    assert_eq!(json_out(&o)["seed"], "0x2a");
    let explicit = run(&["fuzz", "--cases", "5", "--json", "--seed", "42"]);
    assert_eq!(o.stdout, explicit.stdout);

    // an impossible tolerance fails any step with rounding error
    let o = run(&["fuzz", "--cases", "3", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    let failures: usize = row(&text, "failures").parse().unwrap();
    assert!(failures > 0);
    assert_eq!(
        text.matches("minimized to 1 move(s)").count(),
        failures,
        "{text}"
    );

    assert_eq!(run(&["fuzz", "--seed", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["fuzz", "--max-m", "0"]).status.code(), Some(1));
}
