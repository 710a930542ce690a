use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lambdavar_cli::run::{Outcome, RunOutput};
use lambdavar_core::IndemnityContract;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lambdavar"));
    c.env_remove("LAMBDAVAR_WORKERS");
    c
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run_config(path: &Path, extra: &[&str]) -> Output {
    bin().arg("--config").arg(path).args(extra).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn lambdavar_exponential_is_ln5() {
    let o = run_config(&config("example1_exponential_lambdavar.json"), &[]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value - 5f64.ln()).abs() < 1e-12);
    assert!((v["result"]["representation"].as_f64().unwrap() - value).abs() < 1e-9);
}

#[test]
fn pareto_example_matches_golden() {
    let o = run_config(&config("example1_pareto.json"), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out: RunOutput = serde_json::from_str(&stdout(&o)).unwrap();
    let RunOutput::Single(report) = out else { panic!("expected a single report") };
    let Outcome::Solve(s) = &report.result else { panic!("expected a solve report") };
    assert!((s.optimal_value - 0.975148093758).abs() < 1e-9);
    assert_eq!(s.effective_level, 0.9);
    match s.contract {
        IndemnityContract::TruncatedStopLoss { deductible, cap } => {
            assert!((deductible - (6f64.sqrt() - 2.0) / 2.0).abs() < 1e-12);
            assert!((cap - 1.937532788777).abs() < 1e-9);
        }
        ref c => panic!("unexpected contract {c:?}"),
    }
    let oracle = report.oracle.expect("oracle requested");
    assert!(oracle.dominance_pass);
    assert!(oracle.grid.unwrap().pass);
}

#[test]
fn json_reports_round_trip() {
    for name in [
        "example1_pareto.json",
        "example1_exponential_lambdavar.json",
        "robust_lr_beta_sweep.json",
        "robust_mv.json",
        "mixed_premium.json",
    ] {
        let o = run_config(&config(name), &["--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let text = stdout(&o);
        let parsed: RunOutput = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
        assert_eq!(again, text, "{name}");
    }
}

#[test]
fn sweep_csv_rows_are_ordered() {
    let o = run_config(&config("stoploss_theta_sweep.json"), &[]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(&r.headers().unwrap()[0], "param");
    let params: Vec<f64> = r.records().map(|x| x.unwrap()[0].parse().unwrap()).collect();
    assert_eq!(params.len(), 20);
    assert!(params.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(params[19], 1.0);
}

#[test]
fn worker_count_does_not_change_output() {
    let path = config("robust_lr_beta_sweep.json");
    let one = bin().env("LAMBDAVAR_WORKERS", "1").arg("--config").arg(&path).output().unwrap();
    let many = bin().env("LAMBDAVAR_WORKERS", "4").arg("--config").arg(&path).output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn malformed_lambda_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(
        &p,
        r#"{"problem": "lambdavar",
            "distribution": {"family": "exponential", "rate": 1.0},
            "lambda": {"kind": "two_level", "high": 0.8, "low": 0.9, "threshold": 1.0}}"#,
    )
    .unwrap();
    let o = run_config(&p, &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("monoton"), "{err}");
}

#[test]
fn validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("not json", "not json"),
        ("unknown field", r#"{"problem": "lambdavar", "bogus": 1}"#),
        (
            "reversed sweep",
            r#"{"problem": "expected_general",
                "distribution": {"family": "pareto", "alpha": 2.0},
                "lambda": {"kind": "constant", "level": 0.9},
                "premium": {"kind": "expected_value", "theta": 0.5},
                "sweep": {"parameter": "theta", "from": 1.0, "to": 0.5, "steps": 3}}"#,
        ),
        (
            "negative loading in sweep",
            r#"{"problem": "expected_general",
                "distribution": {"family": "pareto", "alpha": 2.0},
                "lambda": {"kind": "constant", "level": 0.9},
                "premium": {"kind": "expected_value", "theta": 0.5},
                "sweep": {"parameter": "theta", "from": -0.5, "to": 0.5, "steps": 3}}"#,
        ),
    ];
    for (what, text) in cases {
        let p = dir.path().join("c.json");
        std::fs::write(&p, text).unwrap();
        let o = run_config(&p, &[]);
        assert_eq!(o.status.code(), Some(2), "{what}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run_config(&dir.path().join("missing.json"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin()
        .env("LAMBDAVAR_WORKERS", "0")
        .arg("--config")
        .arg(config("robust_mv.json"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("nested/out.csv");
    let o = run_config(&config("robust_mv.json"), &["--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.starts_with("param,x_star"));
    assert!(text.contains("mv_low_loading_insured"));
}

#[test]
fn reproduce_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("fig5.csv");
    let o = bin().args(["--reproduce", "fig5", "--out"]).arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&p).unwrap();
    assert!(csv.starts_with("beta,x_star,lambda_beta_x_star,contract\n"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig5.csv.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], true);
    assert_eq!(summary["target"], "fig5");
}

#[test]
fn reproduce_example1_prints_both_columns() {
    let o = bin().args(["--reproduce", "example1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("case,quantity,stated,recomputed,difference\n"));
    assert!(text.contains("exponential,g_left_of_threshold,1.12,"));
    assert!(text.contains("exponential,x_star,1.18,1.10546510810816"));
}

#[test]
fn config_and_reproduce_are_exclusive() {
    let o = bin()
        .args(["--reproduce", "fig2", "--config"])
        .arg(config("robust_mv.json"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(bin().output().unwrap().status.code(), Some(2));
}
