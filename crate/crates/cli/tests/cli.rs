use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamlower"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .env("HAMLOWER_THREADS", "2")
        .output()
        .unwrap()
}

fn report(dir: &Path, command: &str) -> Value {
    let text = std::fs::read_to_string(dir.join(format!("{command}.report.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn path(name: &str) -> String {
    fixture(name).to_str().unwrap().to_string()
}

#[test]
fn compile_identity_circuit_has_one_clock_qubit() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["compile", &path("identity_circuit.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "compile");
    assert_eq!(r["result"]["T"], 1);
    assert_eq!(r["status"], "pass");
    assert!(dir.path().join("h5.json").exists());
    assert!(r["artifacts"]["layout.json"].as_str().unwrap().len() == 64);
}

#[test]
fn verify_bundled_plan_passes() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["verify", &path("subdivision_plan.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(dir.path(), "verify");
    assert_eq!(r["result"]["failed"], 0);
    assert_eq!(r["result"]["checks"], 3);
}

#[test]
fn verify_random_instances_are_seeded() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let out = run(d.path(), &["--seed", "7", "verify", "--random", "4"]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = |d: &TempDir| std::fs::read_to_string(d.path().join("verify.report.json")).unwrap();
    let (ra, rb) = (report(a.path(), "verify"), report(b.path(), "verify"));
    assert_eq!(ra["result"], rb["result"]);
    assert!(text(&a).ends_with("}\n"));
}

#[test]
fn gadgetize_with_epsilon_reports_the_chosen_delta() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--epsilon", "0.1", "gadgetize", &path("four_local.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "gadgetize");
    let first = &r["result"]["rounds"][0];
    let delta = first["delta"].as_f64().unwrap();
    let expected = hamlower_core::gadget::choose_delta(
        first["norm_h_else_prime"].as_f64().unwrap(),
        first["r"].as_f64().unwrap(),
        0.1,
        std::f64::consts::SQRT_2,
    )
    .unwrap();
    assert!((delta - expected).abs() <= 1e-9 * expected, "{delta} vs {expected}");
    assert!((first["epsilon_implied"].as_f64().unwrap() - 0.1).abs() < 1e-9);
    assert_eq!(r["result"]["locality"], 2);
    assert_eq!(r["params"]["epsilon"], 0.1);
}

#[test]
fn replay_reproduces_gadgetize_output() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["gadgetize", &path("four_local.json")]).status.code(), Some(0));
    let produced = report(dir.path(), "gadgetize")["result"]["output_sha256"].clone();
    let plan = dir.path().join("plan.json");
    let again = TempDir::new().unwrap();
    let out = run(again.path(), &["replay", plan.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(again.path(), "replay")["result"]["output_sha256"], produced);
    let bytes = |d: &Path| std::fs::read(d.join("hamiltonian.json")).unwrap();
    assert_eq!(bytes(dir.path()), bytes(again.path()));
}

#[test]
fn scan_gap_writes_curve() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["scan-gap", &path("toy_path.json"), "--points", "21"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path(), "scan-gap");
    assert!((r["result"]["min_gap"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-9);
    let csv = std::fs::read_to_string(dir.path().join("gap_curve.csv")).unwrap();
    assert!(csv.starts_with("s,lambda0,lambda1,gap\n"));
}

#[test]
fn embed_square_lands_on_the_lattice() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["embed", &path("square.json"), "--coords", &path("square_coords.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("lattice.json").exists());
}

#[test]
fn bad_input_exits_3() {
    let dir = TempDir::new().unwrap();
    let missing = run(dir.path(), &["compile", "does-not-exist.json"]);
    assert_eq!(missing.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error ["));

    let garbage = dir.path().join("bad.json");
    std::fs::write(&garbage, "{\"num_qubits\": 2, \"terms\": 5}").unwrap();
    assert_eq!(run(dir.path(), &["gadgetize", garbage.to_str().unwrap()]).status.code(), Some(3));

    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(dir.path(), &["--delta", "1", "--epsilon", "1", "gadgetize", "x"]).status.code(), Some(3));
}

#[test]
fn dense_cap_exits_4() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["--dense-cap", "2", "verify", &path("subdivision_plan.json")]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn help_exits_0() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
}
