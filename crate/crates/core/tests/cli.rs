use std::path::Path;
use std::process::{Command, Output};

use oscillator_complex::cli::Report;

const BIN: &str = env!("CARGO_BIN_EXE_oscillator-complex");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .env_remove("OSCILLATOR_COMPLEX_CONFIG")
        .args(args)
        .output()
        .expect("binary runs")
}

fn small(cmd: &str) -> Vec<&str> {
    vec![cmd, "--n", "3", "--grid", "4"]
}

fn read_report(path: &Path) -> Report {
    Report::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_module_passes_at_n2() {
    let out = run(&["verify-module", "--n", "2"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn tiny_tolerance_forces_exit_1() {
    let out = run(&[
        "verify-module",
        "--n",
        "3",
        "--tol",
        "module.cstar_identity=1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL module.cstar_identity"));
}

#[test]
fn bad_flags_and_configs_exit_2() {
    assert_eq!(run(&["verify-module", "--n", "1"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify-module", "--tol", "oops"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify-module", "--tol", "x=-1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["hodge", "--n", "100", "--grid", "200"]).status.code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "n = \"six\"\n").unwrap();
    assert_eq!(
        run(&["verify-module", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("r.json");
    std::fs::write(
        &cfg,
        "n = 3\ngrid = 5\nseed = 9\n[tolerances]\n\"module.cstar_identity\" = 1e-9\n",
    )
    .unwrap();
    let status = Command::new(BIN)
        .env("OSCILLATOR_COMPLEX_CONFIG", &cfg)
        .args([
            "verify-module",
            "--seed",
            "10",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let r = read_report(&out);
    assert_eq!((r.env.n, r.env.grid, r.env.seed), (3, 5, 10));
    let c = r
        .checks
        .iter()
        .find(|c| c.name == "module.cstar_identity")
        .unwrap();
    assert_eq!(c.threshold, 1e-9);
}

#[test]
fn cohomology_prints_rank_tuple() {
    let out = run(&["cohomology", "--n", "2", "--grid", "4", "--gauge", "random"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("ranks    [2, 4, 2]"));
    assert!(stdout.contains("expected [2, 4, 2]"));
}

#[test]
fn report_all_json_schema_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let mut args = small("report-all");
        args.extend(["--gauge", "random", "--out", p.to_str().unwrap()]);
        assert_eq!(run(&args).status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.ends_with('\n'));
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["env", "checks", "pass"] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    let (ra, mut rb) = (read_report(&a), read_report(&b));
    assert!(ra.checks.len() >= 25);
    assert_eq!(Report::from_json(&ra.to_json()).unwrap(), ra);
    let v: Vec<&str> = ra.env.version.split('.').collect();
    assert!(v.len() == 3 && v.iter().all(|p| p.parse::<u64>().is_ok()));
    rb.env.timestamp = ra.env.timestamp;
    assert_eq!(ra, rb);
    let names: Vec<&String> = ra.checks.iter().map(|c| &c.name).collect();
    let mut sorted = names.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(names, sorted);
}

#[test]
fn report_all_to_stdout() {
    let out = run(&small("report-all"));
    assert_eq!(out.status.code(), Some(0));
    assert!(
        Report::from_json(&String::from_utf8_lossy(&out.stdout))
            .unwrap()
            .pass
    );
}

#[test]
fn unwritable_output_exits_2() {
    let mut args = small("verify-module");
    args.extend(["--out", "/nonexistent-dir/report.json"]);
    assert_eq!(run(&args).status.code(), Some(2));
}
