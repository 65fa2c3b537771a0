use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pqkt"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pqkt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn emit(kind: &str) -> PathBuf {
    let out = bin().args(["catalog", "emit", kind, "--n", "2"]).output().unwrap();
    assert!(out.status.success());
    let path = scratch(&format!("{kind}.json"));
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

#[test]
fn catalog_list_names_every_model() {
    let out = bin().args(["catalog", "list"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for e in &pqkt::catalog::ENTRIES {
        assert!(text.contains(e.name));
    }
}

#[test]
fn passing_run_exits_zero_and_writes_canonical_json() {
    let m = emit("conformal");
    let out = scratch("conformal.report.json");
    let status = bin()
        .args(["run", m.to_str().unwrap(), "--suite", "conformal", "--points", "3", "--seed", "9", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["sampling"]["seed"], 9);
    assert_eq!(v["identities"]["eq.z5"]["status"], "pass");
    assert_eq!(text.trim_end(), pqkt::report::canonical_json(&v));
}

#[test]
fn failing_identity_exits_one() {
    let m = emit("conformal");
    let status = bin()
        .args(["run", m.to_str().unwrap(), "--suite", "conformal", "--points", "2", "--tol-scale", "1e-20"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(1));
}

#[test]
fn bad_manifest_is_reported() {
    let path = scratch("bad.json");
    std::fs::write(&path, r#"{"model": {"kind": "flat", "n": 2}, "suites": ["nope"]}"#).unwrap();
    let out = bin().args(["run", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("suites[0]"));
}
