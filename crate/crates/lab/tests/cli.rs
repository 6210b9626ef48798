use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbqc-lab")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stderr_line(out: &Output) -> String {
    let s = String::from_utf8_lossy(&out.stderr).to_string();
    assert_eq!(s.trim_end().lines().count(), 1, "one-line reason expected: {s:?}");
    s
}

#[test]
fn success_writes_report_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.conf", "[run]\ntrials = 3\n[protocol]\nkind = a\nn = 2\n[output]\ntables = schedule\n");
    let out_dir = dir.path().join("out");
    let out = lab(&["run-protocol", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--quiet"]);
    assert!(out.status.success(), "{out:?}");
    assert!(out.stdout.is_empty());
    assert!(out_dir.join("report.txt").exists());
    let table = std::fs::read_to_string(out_dir.join("schedule.csv")).unwrap();
    assert_eq!(table.lines().next(), Some("verifier,arrival,deadline,margin"));
}

#[test]
fn table_format_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.conf", "[protocol]\nkind = b\nn = 3\n[output]\ntables = table1\n");
    let out = lab(&["verify-stabilizers", "--config", &cfg, "--out", dir.path().to_str().unwrap(), "--format", "table"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# table1\nq2,q3,s2,s3,residual,dense_expectation\n"), "{text}");
    assert_eq!(text.lines().count(), 2 + 16);
}

#[test]
fn parse_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.conf", "[protocol]\nkind = a\nn two\n");
    let out = lab(&["run-protocol", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).starts_with("pbqc-lab: parse error: line 3"));
    let missing = lab(&["run-protocol", "--config", dir.path().join("nope.conf").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn validation_error_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "v.conf", "[protocol]\nkind = a\nn = 2\n[attack]\nkind = chain\n");
    let out = lab(&["run-attack", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_line(&out).contains("validation error: attack chain is not defined for protocol a"));
    // a T share cannot be walked along a Clifford chain
    let cfg = write(dir.path(), "t.conf", "[protocol]\nkind = modified\nn = 2\nprogram = gates\ngates = T\n[attack]\nkind = chain\n");
    assert_eq!(lab(&["run-attack", "--config", &cfg, "--out", dir.path().to_str().unwrap()]).status.code(), Some(3));
    let cfg = write(dir.path(), "sel.conf", "[protocol]\nkind = a\nn = 2\n[output]\ntables = nonsense\n");
    assert_eq!(lab(&["run-protocol", "--config", &cfg, "--out", dir.path().to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn runtime_error_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let cfg = write(dir.path(), "a.conf", "[protocol]\nkind = a\nn = 2\n");
    let out = lab(&["run-protocol", "--config", &cfg, "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_line(&out).starts_with("pbqc-lab: runtime error:"));
}

#[test]
fn config_flag_is_required() {
    let out = lab(&["rates"]);
    assert!(!out.status.success());
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.conf", "[run]\nseed = 1\n[protocol]\nkind = a\nn = 2\n");
    let out = lab(&["run-protocol", "--config", &cfg, "--seed", "99", "--out", dir.path().to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\n  seed = 99\n"), "{text}");
}
