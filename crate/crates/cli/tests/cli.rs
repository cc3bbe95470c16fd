use maitland::verify::{IdentityId, IdentityReport, SweepOutput, Verdict};
use maitland::{QuadResult, SeriesValue};
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maitland"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn eval_exponential_case() {
    let o = run(&["eval", "--fn", "ml1p", "--alpha", "1", "--z", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: SeriesValue = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v.value - 2f64.exp()).abs() <= 1e-13 * 2f64.exp());
}

#[test]
fn eval_accepts_negative_arguments() {
    let o = run(&["eval", "--fn", "ml1p", "--alpha", "1", "--z", "-2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: SeriesValue = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v.value - (-2f64).exp()).abs() <= 1e-13);
}

#[test]
fn eval_quadrature_prints_quad_result() {
    let o = run(&["eval", "--fn", "edward", "--lambda", "2", "--mu", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let q: QuadResult = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(q.converged);
    assert!((q.value - 0.5).abs() <= 1e-10);
}

#[test]
fn eval_rejects_flags_the_function_does_not_take() {
    let o = run(&["eval", "--fn", "ml1p", "--alpha", "1", "--beta", "2", "--z", "1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("beta"));
    let o = run(&["eval", "--fn", "ml2p", "--alpha", "1", "--z", "1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn eval_invalid_parameter_is_a_validation_error() {
    let o = run(&["eval", "--fn", "ml1p", "--alpha", "-1", "--z", "1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn verify_edward_passes() {
    let o = run(&["verify", "--id", "edward", "--lambda", "2", "--mu", "1", "--tol", "1e-8"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: IdentityReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.id, IdentityId::Edward);
    assert_eq!(r.verdict, Verdict::Pass);
    assert!((r.rhs.unwrap() - 0.5).abs() <= 1e-15);
}

#[test]
fn verify_negative_a() {
    let o = run(&[
        "verify", "--id", "thm21_wright", "--lambda", "1.5", "--mu", "0.75", "--a", "-2", "--eta", "2", "--p", "1",
        "--q", "1", "--gamma", "1", "--delta", "1", "--nu", "0.5",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: IdentityReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.params.a, -2.0);
    assert!(r.verdict.is_pass());
}

#[test]
fn verify_printed_form_fail_exits_two() {
    let o = run(&[
        "verify", "--id", "sc1", "--lambda", "1.5", "--mu", "0.75", "--a", "1", "--eta", "2", "--p", "1", "--q", "1",
        "--gamma", "1", "--delta", "1", "--nu", "0.5", "--variant", "asprinted",
    ]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let r: IdentityReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.verdict.is_fail());
}

#[test]
fn sweep_missing_config_names_the_file() {
    let o = run(&["sweep", "--config", "missing.json"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("missing.json"));
}

#[test]
fn unknown_subcommand_and_flag_exit_one() {
    let o = run(&["frobnicate"]);
    assert_eq!(code(&o), 1);
    assert!(!stderr(&o).is_empty());
    let o = run(&["eval", "--fn", "ml1p", "--alpha", "1", "--z", "1", "--bogus", "3"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("sweep"));
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn sweep_with_a_failure_exits_two_and_report_reads_it_back() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "cfg.json",
        r#"{"ids":["EDWARD","SC1"],"lambda":[1.5],"mu":[0.75],"a":[1.0],"eta":[2.0],
            "p":[1.0],"q":[1.0],"gamma":[1.0],"delta":[1.0],"nu":[0.5]}"#,
    );
    let out = dir.path().join("report.json");
    let csv = dir.path().join("report.csv");
    let o = run(&[
        "sweep",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(summary["total"]["fail"], 1);

    let saved: SweepOutput = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(saved.reports.len(), 3);
    assert!(saved.summary.has_failures());

    let o = run(&["report", "--in", out.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), std::fs::read_to_string(&csv).unwrap());

    let o = run(&["report", "--in", out.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let again: SweepOutput = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(again, saved);
}

#[test]
fn passing_sweep_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ok.json");
    let config = write(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{"ids":["TERMWISE"],"lambda":[0.5,2.0],"mu":[1.0],"n":[0,4],"output":{}}}"#,
            serde_json::to_string(out.to_str().unwrap()).unwrap()
        ),
    );
    let o = run(&["sweep", "--config", &config]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let saved: SweepOutput = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(saved.reports.len(), 4);
    assert_eq!(saved.summary.total.pass, 4);
}

#[test]
fn sweep_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "cfg.json", r#"{"ids":["EDWARD"],"lamda":[1.0]}"#);
    let o = run(&["sweep", "--config", &config, "--out", dir.path().join("x.json").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("lamda"));
}

#[test]
fn overflowing_series_exits_three() {
    let o = run(&[
        "eval", "--fn", "master", "--eta", "1.6875", "--beta", "0.3", "--gamma", "0.3", "--delta", "0.3", "--p", "0.5",
        "--q", "1.967", "--z", "2.7",
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("overflow"));
}
