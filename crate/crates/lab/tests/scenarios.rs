use std::path::{Path, PathBuf};

use pbqc_lab::config::ScenarioConfig;
use pbqc_lab::{emit_table, execute, Command, Overrides};

fn cfg(text: &str) -> ScenarioConfig {
    ScenarioConfig::parse(text).unwrap()
}

fn column(table: &str, name: &str) -> Vec<String> {
    let mut lines = table.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn honest_two_station_run_accepts_at_2d_over_c() {
    let r = execute(Command::RunProtocol, cfg("[run]\ntrials = 16\n[protocol]\nkind = a\nn = 2\n[geometry]\nd = 1.5\nc = 0.5\n")).unwrap();
    let schedule = emit_table(&r, "schedule").unwrap();
    for a in column(&schedule, "arrival") {
        assert!((num(&a) - 6.0).abs() < 1e-7);
    }
    assert!(column(&emit_table(&r, "trials").unwrap(), "verdict").iter().all(|v| v == "accept"));
}

#[test]
fn three_station_attack_finishes_early() {
    let (d, l, c) = (1.0, 0.1, 1.0);
    let r = execute(Command::RunAttack, cfg("[run]\ntrials = 8\n[protocol]\nkind = a\nn = 3\n[attack]\nkind = qss\n")).unwrap();
    let expected = (2.0 * d + (3f64.sqrt() - 2.0) * l) / c;
    for a in column(&emit_table(&r, "schedule").unwrap(), "arrival") {
        assert!((num(&a) - expected).abs() < 1e-7, "{a}");
    }
    assert!(column(&emit_table(&r, "trials").unwrap(), "success").iter().all(|v| v == "true"));
}

#[test]
fn rates_ladder() {
    let r = execute(Command::Rates, cfg("[run]\nseed = 3\n[protocol]\nkind = modified\nn = 2\n[analysis]\nsamples = 20000\nsweep = 9\nsweep_phi = 64\n")).unwrap();
    let table = emit_table(&r, "rates").unwrap();
    assert_eq!(table.lines().count(), 4);
    assert_eq!(table.lines().next(), Some("strategy,rate,stderr,n"));
    let rates: Vec<f64> = column(&table, "rate").iter().map(|s| num(s)).collect();
    let errs: Vec<f64> = column(&table, "stderr").iter().map(|s| num(s)).collect();
    for ((rate, se), target) in rates.iter().zip(&errs).zip([0.5, 0.75, (2.0 + 2f64.sqrt()) / 4.0]) {
        assert!((rate - target).abs() < 4.0 * se.max(1e-3), "{rate} vs {target}");
    }
    // measure-and-hold slices fall off monotonically toward the equator
    let sweep = emit_table(&r, "theta-sweep").unwrap();
    let hold: Vec<f64> = column(&sweep, "MeasureHold").iter().map(|s| num(s)).collect();
    assert!(hold[..5].windows(2).all(|w| w[1] < w[0]), "{hold:?}");
}

#[test]
fn table_one_has_sixteen_rows() {
    let r = execute(Command::VerifyStabilizers, cfg("[protocol]\nkind = b\nn = 3\n")).unwrap();
    let t = emit_table(&r, "table1").unwrap();
    assert_eq!(t.lines().count(), 17);
    assert!(r.body().contains("all_hold = true"));
    let residual = column(&t, "residual");
    assert_eq!(residual.iter().filter(|r| r.ends_with('X')).count(), 8);
}

#[test]
fn infeasible_layout_reports_witness() {
    let text = "[protocol]\nkind = a\nn = 3\n[geometry]\nlayout = custom\nverifiers = 0 1; -0.8660254037844386 -0.5; 0.8660254037844386 -0.5\nreceiver = 0 -2\n";
    let r = execute(Command::Feasibility, cfg(text)).unwrap();
    assert!(r.body().contains("feasible = false"));
    let t = emit_table(&r, "witness").unwrap();
    for (w, p) in column(&t, "to_witness").iter().zip(column(&t, "to_receiver")) {
        assert!(num(w) <= num(&p));
    }
}

#[test]
fn small_search_reaches_one_on_pauli_axes() {
    let r = execute(Command::Search2q, cfg("[run]\nseed = 2024\n[protocol]\nkind = modified\nn = 2\n[analysis]\nrestarts = 2\ngrid = pauli-axes\n")).unwrap();
    let body = r.body();
    assert!(body.contains("not a proof"));
    for s in column(&emit_table(&r, "points").unwrap(), "success") {
        assert!(num(&s) > 1.0 - 1e-6);
    }
}

#[test]
fn identical_config_gives_identical_body() {
    let text = "[run]\nseed = 8\ntrials = 20\n[protocol]\nkind = modified\nn = 2\n[attack]\nkind = modified\nstrategy = EntangleMemory\n";
    let a = execute(Command::RunAttack, cfg(text)).unwrap();
    let b = execute(Command::RunAttack, cfg(text)).unwrap();
    assert_eq!(a.body(), b.body());
    let c = execute(Command::RunAttack, cfg(&text.replace("seed = 8", "seed = 9"))).unwrap();
    assert_ne!(a.body(), c.body());
}

fn scenario_files() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|x| x == "conf")).collect();
    v.sort();
    v
}

#[test]
fn shipped_scenarios_parse_and_validate() {
    let files = scenario_files();
    assert!(files.len() >= 8);
    for f in files {
        let c = pbqc_lab::load_config(&f).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
        pbqc_lab::commands::validate(&c).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
        assert_eq!(ScenarioConfig::parse(&c.to_string()).unwrap(), c);
    }
}

#[test]
fn written_report_is_atomic_and_replaceable() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("a.conf");
    std::fs::write(&conf, "[protocol]\nkind = a\nn = 2\n[output]\ntables = trials\n").unwrap();
    let out = dir.path().join("out");
    let overrides = Overrides { seed: None, out: Some(out.clone()) };
    std::fs::create_dir_all(&out).unwrap();
    std::fs::write(out.join("report.txt"), "stale").unwrap();
    let (report, written) = pbqc_lab::run(Command::RunProtocol, &conf, &overrides).unwrap();
    assert_eq!(std::fs::read_to_string(&written.report).unwrap(), report.render());
    let mut names: Vec<String> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(names, vec!["report.txt", "trials.csv"]);
}
