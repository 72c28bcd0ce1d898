use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ff-cli-{}-{name}", std::process::id()))
}

fn ff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ff"))
        .args(args)
        .env_remove("FF_TOL")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_succeeds_on_every_fixture() {
    for name in [
        "example_6_2.json",
        "example_6_3.json",
        "example_6_4.json",
        "orthonormal_basis.json",
        "offdiag_q.json",
    ] {
        let out = ff(&["analyze", path(&fixture(name))]);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stdout).contains("result: PASS"));
    }
}

#[test]
fn orthonormal_basis_is_classified() {
    let out = ff(&["analyze", path(&fixture("orthonormal_basis.json"))]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("orthonormal basis"), "{text}");
    assert!(text.contains("parseval"));
}

#[test]
fn given_duals_verify() {
    for name in ["example_6_2.json", "example_6_4.json", "offdiag_q.json"] {
        let out = ff(&["verify-dual", path(&fixture(name))]);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stdout));
    }
    let out = ff(&["verify-dual", path(&fixture("offdiag_q.json"))]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("Q classification: general"));
}

#[test]
fn canonical_dual_accepts_weights() {
    let out = ff(&["canonical-dual", path(&fixture("example_6_3.json")), "--weights", "1,3"]);
    assert_eq!(code(&out), 0);
    let out = ff(&[
        "canonical-dual",
        path(&fixture("example_6_3.json")),
        "--weights",
        "1,-3",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn malformed_input_exits_with_two() {
    let bad = scratch("malformed.json");
    std::fs::write(&bad, "{ \"field\": \"real\", ").unwrap();
    assert_eq!(code(&ff(&["analyze", path(&bad)])), 2);
    let wrong = scratch("wrong_length.json");
    let text = std::fs::read_to_string(fixture("example_6_3.json")).unwrap();
    std::fs::write(&wrong, text.replacen("\"dimension\": 3", "\"dimension\": 4", 1)).unwrap();
    assert_eq!(code(&ff(&["analyze", path(&wrong)])), 2);
    assert_eq!(code(&ff(&["analyze", "/nonexistent/input.json"])), 2);
    assert_eq!(code(&ff(&["frobnicate"])), 2);
    assert_eq!(
        code(&ff(&["optimal", path(&fixture("example_6_3.json")), "--p", "3"])),
        2
    );
    for p in [bad, wrong] {
        let _ = std::fs::remove_file(p);
    }
}

#[test]
fn broken_dual_exits_with_three() {
    let broken = scratch("broken_q.json");
    let text = std::fs::read_to_string(fixture("offdiag_q.json")).unwrap();
    std::fs::write(&broken, text.replace("0.5", "0.25")).unwrap();
    let out = ff(&["verify-dual", path(&broken)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("first failing certificate"));
    let _ = std::fs::remove_file(broken);
}

#[test]
fn exhausted_solver_exits_with_four() {
    let out = ff(&[
        "optimal",
        path(&fixture("example_6_4.json")),
        "--p",
        "inf",
        "--max-iters",
        "3",
        "--no-polish",
    ]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
    let out = ff(&[
        "local-optimal",
        path(&fixture("example_6_4.json")),
        "--p",
        "inf",
        "--max-iters",
        "3",
        "--no-polish",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn optimal_duals_certify() {
    for args in [
        ["optimal", "example_6_3.json", "--p", "2", "--r", "2"],
        ["optimal", "example_6_3.json", "--p", "inf", "--r", "1"],
        ["local-optimal", "orthonormal_basis.json", "--p", "2", "--r", "2"],
        ["local-optimal", "example_6_4.json", "--p", "inf", "--r", "1"],
    ] {
        let file = fixture(args[1]);
        let out = ff(&[args[0], path(&file), args[2], args[3], args[4], args[5]]);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn local_mse_needs_unit_vectors() {
    let out = ff(&["local-optimal", path(&fixture("example_6_4.json")), "--p", "2"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected 1"));
}

#[test]
fn ff_tol_overrides_the_default() {
    let file = fixture("example_6_2.json");
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_ff"))
            .args(["verify-dual", path(&file)])
            .env("FF_TOL", tol)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("1e-9")), 0);
    assert_eq!(code(&run("1e-30")), 3);
    assert_eq!(code(&run("not-a-number")), 2);
    assert_eq!(code(&ff(&["verify-dual", path(&file), "--tol", "1e-30"])), 3);
}

#[test]
fn json_reports_are_deterministic() {
    let first = scratch("first.json");
    let second = scratch("second.json");
    for out in [&first, &second] {
        let run = ff(&[
            "--json",
            path(out),
            "optimal",
            path(&fixture("example_6_3.json")),
            "--p",
            "inf",
            "--r",
            "2",
        ]);
        assert_eq!(code(&run), 0);
    }
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert_eq!(a, b);
    let value: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(value["command"], "optimal");
    assert_eq!(value["input_digest"].as_str().unwrap().len(), 64);
    for p in [first, second] {
        let _ = std::fs::remove_file(p);
    }
}

#[test]
fn json_to_stdout() {
    let out = ff(&["analyze", path(&fixture("example_6_3.json")), "--json", "-"]);
    let text = String::from_utf8_lossy(&out.stdout);
    let start = text.find('{').expect("json follows the summary");
    let value: serde_json::Value = serde_json::from_str(&text[start..]).unwrap();
    assert_eq!(value["classification"]["ambient_dim"], 3);
}

#[test]
fn every_example_reproduces() {
    for id in ["6.1", "6.2a", "6.2b", "6.3a", "6.3b", "6.3c", "6.3d", "6.4"] {
        let out = ff(&["reproduce", id]);
        assert_eq!(code(&out), 0, "{id}: {}", String::from_utf8_lossy(&out.stdout));
    }
    assert_eq!(code(&ff(&["reproduce", "9.9"])), 2);
}
