use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const PLUS: &str = r#"{"kind":"state","matrix":{"dim":2,"entries":[[0.5,0],[0.5,0],[0.5,0],[0.5,0]]}}"#;
const QUBIT: &str =
    r#"{"kind":"system","hamiltonian":{"dim":2,"entries":[[0,0],[0,0],[0,0],[1,0]]},"temperature":1.0}"#;
const REP: &str = r#"{"kind":"rep","type":"u1","weights":[0,1]}"#;

fn exe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_freesplit"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

struct Fixture {
    dir: tempfile::TempDir,
    state: String,
    system: String,
    rep: String,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let state = write(dir.path(), "plus.json", PLUS);
        let system = write(dir.path(), "qubit.json", QUBIT);
        let rep = write(dir.path(), "rep.json", REP);
        Self {
            dir,
            state,
            system,
            rep,
        }
    }

    fn file(&self, name: &str, text: &str) -> String {
        write(self.dir.path(), name, text)
    }

    fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn inputs(&self) -> Vec<&str> {
        vec!["--state", &self.state, "--system", &self.system, "--rep", &self.rep]
    }
}

fn run(args: &[&str]) -> Output {
    exe().args(args).output().unwrap()
}

#[test]
fn split_prints_both_parts() {
    let fx = Fixture::new();
    let mut args = vec!["split"];
    args.extend(fx.inputs());
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let asym = v["asym_energy"].as_f64().unwrap();
    let cov = v["covariant_f"].as_f64().unwrap();
    assert!((asym - std::f64::consts::LN_2).abs() < 1e-9);
    assert!((cov - 0.120115).abs() < 1e-5);
}

#[test]
fn chain_csv_has_a_row_per_term() {
    let fx = Fixture::new();
    let mut args = vec!["chain", "--format", "csv"];
    args.extend(fx.inputs());
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 2, "{text}");
}

#[test]
fn usage_errors_exit_with_validation_code() {
    assert_eq!(run(&["split", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_input_is_a_validation_error_without_output() {
    let fx = Fixture::new();
    let bad = fx.file(
        "bad.json",
        r#"{"kind":"state","matrix":{"dim":2,"entries":[[1,0],[0,0],[0,0],[1,0]]}}"#,
    );
    let out = fx.out("split.json");
    let status = exe()
        .args([
            "split", "--state", &bad, "--system", &fx.system, "--rep", &fx.rep, "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!out.exists());

    let missing = run(&[
        "split",
        "--state",
        "/nonexistent/state.json",
        "--system",
        &fx.system,
        "--rep",
        &fx.rep,
    ]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/state.json"));
}

#[test]
fn non_covariant_channel_fails_certification_without_output() {
    let fx = Fixture::new();
    // sigma_x swaps energy levels
    let channel = fx.file(
        "flip.json",
        r#"{"kind":"channel","dim_in":2,"dim_out":2,"kraus":[{"dim":2,"entries":[[0,0],[1,0],[1,0],[0,0]]}]}"#,
    );
    let out = fx.out("audit.json");
    let mut args = vec!["audit", "--channel", &channel];
    args.extend(fx.inputs());
    let status = exe().args(&args).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(3));
    assert!(!out.exists());

    let mut args = vec!["validate", "--channel", &channel];
    args.extend(fx.inputs());
    assert_eq!(run(&args).status.code(), Some(3));
}

#[test]
fn existing_output_survives_a_failed_run() {
    let fx = Fixture::new();
    let out = fx.out("keep.json");
    std::fs::write(&out, "previous").unwrap();
    let status = exe().args(["ncopy", "--n", "0", "--out"]).arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "previous");
}

#[test]
fn audit_with_delay_reports_loss_bound() {
    let fx = Fixture::new();
    let channel = fx.file(
        "delay.json",
        r#"{"gen":"delay","shifts":[0.0,3.141592653589793],"probs":[0.75,0.25]}"#,
    );
    let mut args = vec!["audit", "--channel", &channel, "--shift", "3.141592653589793"];
    args.extend(fx.inputs());
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("actual_loss"), "{text}");
}

#[test]
fn twirled_channel_round_trips_through_validate() {
    let fx = Fixture::new();
    let channel = fx.file("th.json", r#"{"gen":"thermalizing","p":0.4}"#);
    let twirled = fx.out("twirled.json");
    let mut args = vec!["twirl", "--channel", &channel];
    args.extend(fx.inputs());
    let status = exe().args(&args).arg("--out").arg(&twirled).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let twirled = twirled.to_str().unwrap();
    let mut args = vec!["validate", "--channel", twirled];
    args.extend(fx.inputs());
    assert_eq!(run(&args).status.code(), Some(0));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let a = run(&["superadd", "--trials", "25", "--seed", "3"]);
    let b = run(&["superadd", "--trials", "25", "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["superadd", "--trials", "25", "--seed", "4"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn ncopy_sweep_csv_header() {
    let out = run(&["ncopy", "--n", "4", "--sweep", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert!(
        header.starts_with("n,s_avg,binom_entropy,bound_nln2_minus_log,work_infinite_T"),
        "{header}"
    );
    assert_eq!(text.lines().count(), 5);
}
