use std::process::{Command, Output};

use tempfile::TempDir;

fn run(cache: &TempDir, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cliffordcs"))
        .args(args)
        .env("CLIFFORDCS_CACHE_DIR", cache.path())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_core_set() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, &["verify", "--set", "c17"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 30);
    assert!(out.contains("30 of 30 relations verified"));
}

#[test]
fn verify_level_set() {
    let dir = TempDir::new().unwrap();
    let o = run(
        &dir,
        &["verify", "--set", "u8", "--n", "3", "--format", "json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["failed"], 0);
}

#[test]
fn equiv_exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        run(&dir, &["equiv", "S0", "S0 S0 S0 S0 S0"]).status.code(),
        Some(0)
    );
    let o = run(&dir, &["--format", "json", "equiv", "S0", "S0 S0"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"]["NotEqual"]["row"], 4);
}

#[test]
fn factor_diagonal() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, &["factor", "--group", "D", "CCZ", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["form"]["n7"], 1);
    assert_eq!(v["form"]["n0"], 0);
    assert_eq!(
        run(&dir, &["factor", "--group", "D", "K0"]).status.code(),
        Some(1)
    );
}

#[test]
fn usage_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&dir, &["eval", "Q7"]).status.code(), Some(2));
    assert_eq!(
        run(&dir, &["eval", "S0", "--frobnicate"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&dir, &["verify", "--set", "nope"]).status.code(),
        Some(2)
    );
}

#[test]
fn tables_build_is_deterministic_and_stale_cache_rebuilds() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&dir, &["tables", "build"]).status.code(), Some(0));
    let path = dir.path().join("tables.json");
    let first = std::fs::read(&path).unwrap();
    run(&dir, &["tables", "build"]);
    assert_eq!(std::fs::read(&path).unwrap(), first);
    let stale = String::from_utf8(first.clone()).unwrap().replacen(
        "\"format_version\": 1",
        "\"format_version\": 0",
        1,
    );
    std::fs::write(&path, stale).unwrap();
    let o = run(&dir, &["normalize", "K1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn normalize_and_eval_agree() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, &["normalize", "K1 CS12 K2"]);
    assert_eq!(o.status.code(), Some(0));
    let flat = stdout(&o).lines().next().unwrap().to_string();
    assert_eq!(
        run(&dir, &["equiv", &flat, "K1 CS12 K2"]).status.code(),
        Some(0)
    );
}

#[test]
fn rs_commands() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, &["rs", "demo"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("s[1,a] s[1,a] = ε"));
    let file = dir.path().join("toy.json");
    std::fs::write(
        &file,
        r#"{"generators": ["a"], "relations": [[["a","a","a","a"], []]],
            "cosets": {"index": 2, "grading": {"a": 1}, "representatives": [[], ["a"]],
                       "inverse_witnesses": {"a": ["a","a","a"]}}}"#,
    )
    .unwrap();
    let o = run(
        &dir,
        &["--format", "json", "rs", "run", file.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["presentation"]["generators"][0], "s[1,a]");
}

#[test]
fn enumerate_command() {
    let dir = TempDir::new().unwrap();
    let o = run(&dir, &["enumerate", "--group", "CQ"]);
    assert_eq!(stdout(&o).trim(), "|CQ| = 384");
    assert_eq!(
        run(&dir, &["enumerate", "--group", "P", "--budget", "10"])
            .status
            .code(),
        Some(1)
    );
}
