use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn plab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plab")).args(args).output().expect("run plab")
}

fn out_arg(dir: &Path) -> String {
    dir.to_string_lossy().into_owned()
}

#[test]
fn passing_suite_exits_zero_and_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = plab(&["solve", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["solve.csv", "solve.json", "solve.pass.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")), "{stdout}");
}

#[test]
fn config_constants_override_defaults_and_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    // A Carleson bound no nonzero ratio can meet.
    fs::write(&cfg, r#"{ "constants": { "c_carl": 1e-12 } }"#).unwrap();
    let o = plab(&["functionals", &cfg.to_string_lossy(), "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("FAIL ")), "{stdout}");
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("functionals.pass.json")).unwrap()).unwrap();
    assert_eq!(manifest["pass"], false);
}

#[test]
fn same_seed_gives_identical_csv() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = plab(&["bmo-scan", "--seed", "7", "--out", &out_arg(d.path())]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("bmo-scan.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn report_aggregates_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    assert_eq!(plab(&["solve", "--out", &out]).status.code(), Some(0));
    let o = plab(&["report", "--out", &out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS solve"));

    fs::write(dir.path().join("cfg.json"), r#"{ "constants": { "c_carl": 1e-12 } }"#).unwrap();
    let cfg = dir.path().join("cfg.json");
    assert_eq!(plab(&["functionals", &cfg.to_string_lossy(), "--out", &out]).status.code(), Some(1));
    let o = plab(&["report", "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL functionals"));
}

#[test]
fn invalid_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(plab(&["report", "--out", &out_arg(dir.path())]).status.code(), Some(2));
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{ "p_grid": [] }"#).unwrap();
    assert_eq!(plab(&["solve", &cfg.to_string_lossy()]).status.code(), Some(2));
    assert_eq!(plab(&["solve", "--grid", "2"]).status.code(), Some(2));
}
