use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tmnlcs::io::{read_state, state_from_json};
use tmnlcs::verify::fidelity;

fn tmnlcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmnlcs"))
        .args(args)
        .env_remove("TMNLCS_MAX_TRUNC")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = tmnlcs(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn construct_pair_ratio() {
    let s = state_from_json(&ok(&[
        "construct",
        "--kind",
        "pair",
        "--eigenvalue",
        "0.5,0",
        "--q",
        "1",
    ]))
    .unwrap();
    let a = s.amplitudes();
    assert!((a[1].re / a[0].re - 0.353_553).abs() < 1e-6);
}

#[test]
fn construct_zero_eigenvalue_is_ground() {
    let s = state_from_json(&ok(&[
        "construct",
        "--kind",
        "pair",
        "--eigenvalue",
        "0,0",
        "--q",
        "3",
    ]))
    .unwrap();
    assert_eq!(s.charge_q(), 3);
    assert_eq!(s.amplitudes()[0].re, 1.0);
    assert!(s.amplitudes()[1..].iter().all(|c| c.norm() == 0.0));
}

#[test]
fn construct_perelomov() {
    let s = state_from_json(&ok(&[
        "construct",
        "--kind",
        "perelomov",
        "--eigenvalue",
        "0.5,0",
        "--q",
        "0",
    ]))
    .unwrap();
    assert!((s.amplitudes()[0].re - 0.886_819).abs() < 1e-6);
}

#[test]
fn construct_from_spec_file_and_routes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"kind":"parity_pair","eigenvalue":[1.0,0.5],"charge_q":2,"truncation":{"mode":"adaptive","param":1e-15}}"#,
    )
    .unwrap();
    let a = state_from_json(&ok(&["construct", "--spec", p(&spec)])).unwrap();
    let b = state_from_json(&ok(&[
        "construct",
        "--spec",
        p(&spec),
        "--route",
        "superposition",
    ]))
    .unwrap();
    assert!((fidelity(&a, &b).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn output_is_byte_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let args = [
        "construct",
        "--kind",
        "pair",
        "--eigenvalue",
        "0.7,-0.2",
        "--q",
        "2",
        "-o",
        p(&out),
    ];
    ok(&args);
    let first = fs::read(&out).unwrap();
    ok(&args);
    assert_eq!(first, fs::read(&out).unwrap());
    let state = read_state(&out).unwrap();
    assert_eq!(
        tmnlcs::io::state_to_json(&state).unwrap().as_bytes(),
        &first[..]
    );
}

#[test]
fn transform_subtract_keeps_pair_state() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    ok(&[
        "construct",
        "--kind",
        "pair",
        "--eigenvalue",
        "1.1,0.3",
        "--q",
        "1",
        "-o",
        p(&input),
    ]);
    let out = state_from_json(&ok(&["transform", "-i", p(&input), "--sub", "1", "1"])).unwrap();
    let orig = read_state(&input).unwrap();
    assert!((fidelity(&out, &orig).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(out.provenance().len(), orig.provenance().len() + 1);
}

#[test]
fn transform_chain_infers_function() {
    let dir = tempfile::tempdir().unwrap();
    let s0 = dir.path().join("0.json");
    let s1 = dir.path().join("1.json");
    ok(&[
        "construct",
        "--kind",
        "perelomov",
        "--eigenvalue",
        "0.4,0",
        "--q",
        "0",
        "-o",
        p(&s0),
    ]);
    ok(&["transform", "-i", p(&s0), "--add", "1", "0", "-o", p(&s1)]);
    let s2 = state_from_json(&ok(&["transform", "-i", p(&s1), "--sub", "0", "1"])).unwrap();
    assert_eq!(s2.charge_q(), 2);
    assert_eq!(s2.provenance().len(), 3);
}

#[test]
fn evolve_by_pi_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    ok(&[
        "construct",
        "--kind",
        "pair",
        "--eigenvalue",
        "1.5,0",
        "--q",
        "0",
        "-o",
        p(&input),
    ]);
    let out = state_from_json(&ok(&[
        "evolve",
        "-i",
        p(&input),
        "--kerr",
        "3.141592653589793",
    ]))
    .unwrap();
    let orig = read_state(&input).unwrap();
    for (x, y) in out.amplitudes().iter().zip(orig.amplitudes()) {
        assert!((x - y).norm() < 1e-14);
    }
}

#[test]
fn stats_on_ground_state() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    ok(&[
        "construct",
        "--kind",
        "pair",
        "--eigenvalue",
        "0,0",
        "--q",
        "2",
        "-o",
        p(&input),
    ]);
    let v: serde_json::Value = serde_json::from_str(&ok(&["stats", "-i", p(&input)])).unwrap();
    assert_eq!(v["mean_na"].as_f64(), Some(2.0));
    assert_eq!(v["mean_nb"].as_f64(), Some(0.0));
    assert_eq!(v["var_na"].as_f64(), Some(0.0));
    assert!(v.get("mandel_q_b").is_none());
}

#[test]
fn verify_spec_file_passes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"kind":"perelomov","eigenvalue":[0.5,0.0],"charge_q":1}"#,
    )
    .unwrap();
    let v: serde_json::Value = serde_json::from_str(&ok(&["verify", "--spec", p(&spec)])).unwrap();
    assert_eq!(v["overall_passed"], true);
    assert!(!v["checks"].as_array().unwrap().is_empty());
}

#[test]
fn verify_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    ok(&[
        "construct",
        "--kind",
        "pair",
        "--eigenvalue",
        "1,0",
        "--q",
        "0",
        "-o",
        p(&input),
    ]);
    let out = tmnlcs(&[
        "verify",
        "-i",
        p(&input),
        "--function",
        "unity",
        "--eigenvalue",
        "2,0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_endpoints() {
    let csv = ok(&[
        "sweep",
        "--kind",
        "pair",
        "--eigenvalues",
        "1,0",
        "--charges",
        "0",
        "--gamma-t",
        "0,1.5707963267948966,3.141592653589793",
    ]);
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let header = rdr.headers().unwrap().clone();
    let col = header
        .iter()
        .position(|h| h == "fidelity_to_parity")
        .unwrap();
    let fid: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[col].parse().unwrap())
        .collect();
    assert_eq!(fid.len(), 3);
    assert!((fid[0] - fid[2]).abs() < 1e-12);
    assert!(fid[0] < 1.0 - 1e-3);
    assert!((fid[1] - 1.0).abs() < 1e-12);
}

#[test]
fn empty_sweep_is_header_only() {
    let csv = ok(&["sweep"]);
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn exit_codes() {
    let out = tmnlcs(&[
        "construct",
        "--kind",
        "custom",
        "--function",
        "na-1",
        "--eigenvalue",
        "1,0",
        "--q",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "FunctionZeroError");
    assert!(err["message"].as_str().unwrap().contains("rung"));

    let out = tmnlcs(&["stats", "-i", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"charge_q":0,"truncation_n":0,"amplitudes":[[1,0]],"converged":true,"extra":1}"#,
    )
    .unwrap();
    assert_eq!(tmnlcs(&["stats", "-i", p(&bad)]).status.code(), Some(3));

    assert_ne!(tmnlcs(&["stats", "--bogus"]).status.code(), Some(0));
    assert_ne!(
        tmnlcs(&[
            "construct",
            "--kind",
            "pair",
            "--eigenvalue",
            "1,0",
            "--q",
            "0",
            "--unknown-flag"
        ])
        .status
        .code(),
        Some(0)
    );
}

#[test]
fn truncation_cap_from_environment() {
    let run = |allow: bool| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_tmnlcs"));
        cmd.args([
            "construct",
            "--kind",
            "pair",
            "--eigenvalue",
            "3,0",
            "--q",
            "0",
        ])
        .env("TMNLCS_MAX_TRUNC", "5");
        if allow {
            cmd.arg("--allow-unconverged");
        }
        cmd.output().unwrap()
    };
    let out = run(false);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "ConvergenceError");

    let out = run(true);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let s = state_from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert!(!s.converged());
    assert_eq!(s.truncation_n(), 5);
}
