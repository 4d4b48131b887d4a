//! The `regbridge` binary: exit codes, files, and report schemas.

use std::path::Path;
use std::process::{Command, Output};

use regbridge::dataset::{load_csv, Schema};
use regbridge::ols::fit_lse;
use serde_json::Value;

fn regbridge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regbridge")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn validate(schema_file: &str, doc: &Value) {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(schema_file)).unwrap())
            .unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

fn read_json(p: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap()
}

#[test]
fn simulate_writes_declared_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h0.csv");
    let o = regbridge(&["simulate", "--model", "h0", "--n", "100", "--seed", "7", "--out", path(&out)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,const,y"));
    assert_eq!(lines.count(), 100);
}

#[test]
fn zero_noise_is_linear_and_the_test_refuses_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exact.csv");
    let o = regbridge(&["simulate", "--n", "50", "--noise-var", "0", "--out", path(&out)]);
    assert!(o.status.success());
    let data = load_csv(&out, &Schema::new("y", &["x1"], Some("const"))).unwrap();
    let fit = fit_lse(&data).unwrap();
    assert!(fit.residuals.amax() < 1e-12);
    assert!((fit.theta_hat[0] - 2.0).abs() < 1e-12 && (fit.theta_hat[1] - 1.0).abs() < 1e-12);

    let o = regbridge(&["test", "--input", path(&out), "--response", "y", "--order-columns", "x1", "--intercept", "const"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sigma2_hat"));
}

#[test]
fn usage_errors_exit_one() {
    let o = regbridge(&["simulate", "--n", "10", "--copula", "frank"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = regbridge(&["verify", "--experiment", "theorem3"]);
    assert_eq!(o.status.code(), Some(1));
    let o = regbridge(&["test", "--input", "/nonexistent.csv", "--response", "y", "--order-columns", "x1", "--intercept", "const"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(regbridge(&["--help"]).status.code(), Some(0));
}

#[test]
fn singular_design_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("dup.csv");
    let mut text = String::from("x1,x2,const,y\n");
    for k in 0..20 {
        let x = k as f64 * 0.1;
        text.push_str(&format!("{x},{},1,{}\n", 2.0 * x, (k * 7 % 5) as f64));
    }
    std::fs::write(&input, text).unwrap();
    let o = regbridge(&["test", "--input", path(&input), "--response", "y", "--order-columns", "x1", "--intercept", "const"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn test_report_contract() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("h0.csv");
    assert!(regbridge(&["simulate", "--n", "500", "--seed", "3", "--regressors", "2", "--out", path(&input)]).status.success());
    let report = dir.path().join("report.json");
    let bridges = dir.path().join("bridges");
    let null = dir.path().join("null.csv");
    let o = regbridge(&[
        "test",
        "--input",
        path(&input),
        "--response",
        "y",
        "--order-columns",
        "x1,x2",
        "--intercept",
        "const",
        "--seed",
        "5",
        "--out",
        path(&report),
        "--emit-bridges",
        path(&bridges),
        "--emit-null",
        path(&null),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&report);
    validate("test_report.schema.json", &doc);
    let p = doc["p_value"].as_f64().unwrap();
    assert!(p > 0.0 && p <= 1.0);
    assert_eq!(doc["reject"].as_bool().unwrap(), p <= doc["level"].as_f64().unwrap());
    let q = &doc["null_quantiles"];
    let (q90, q95, q99) = (q["q90"].as_f64().unwrap(), q["q95"].as_f64().unwrap(), q["q99"].as_f64().unwrap());
    assert!(q90 <= q95 && q95 <= q99);
    assert_eq!(doc["replicates"], 10_000);
    assert_eq!(doc["grid"], 100);
    assert_eq!(doc["bridges"].as_array().unwrap().len(), 2);

    let b1 = std::fs::read_to_string(bridges.join("bridge_x1.csv")).unwrap();
    assert!(b1.starts_with("t,value\n"));
    assert_eq!(b1.lines().count(), 1 + 501);
    let samples = std::fs::read_to_string(&null).unwrap();
    assert_eq!(samples.lines().count(), 1 + 10_000);
}

#[test]
fn missing_intercept_warns_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("noint.csv");
    assert!(regbridge(&["simulate", "--n", "200", "--no-intercept", "--theta", "2", "--out", path(&input)]).status.success());
    let o = regbridge(&["test", "--input", path(&input), "--response", "y", "--order-columns", "x1", "--intercept", "none", "--replicates", "500"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["intercept"].is_null());
}

#[test]
fn verify_gram_identity_passes() {
    let o = regbridge(&["verify", "--experiment", "gram-identity"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    validate("verification_report.schema.json", &doc);
    assert!(doc["max_abs_error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn verify_exit_code_follows_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let cells = dir.path().join("cells.csv");
    let o = regbridge(&["verify", "--experiment", "theorem2", "--n", "10", "--replicates", "10", "--cells-csv", path(&cells)]);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    validate("verification_report.schema.json", &doc);
    let passed = doc["passed"].as_bool().unwrap();
    assert_eq!(o.status.code(), Some(if passed { 0 } else { 1 }));
    assert!(std::fs::read_to_string(&cells).unwrap().starts_with("label,target,empirical,abs_error\n"));

    let a = regbridge(&["verify", "--experiment", "lemma1", "--n", "100", "--replicates", "200", "--seed", "4"]);
    let b = regbridge(&["verify", "--experiment", "lemma1", "--n", "100", "--replicates", "200", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    validate("verification_report.schema.json", &serde_json::from_slice(&a.stdout).unwrap());
}

#[test]
fn size_at_level_one_always_rejects() {
    let o = regbridge(&[
        "verify",
        "--experiment",
        "size",
        "--level",
        "1",
        "--n",
        "60",
        "--replicates",
        "20",
        "--inner-replicates",
        "100",
        "--grid",
        "20",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    validate("verification_report.schema.json", &doc);
    assert_eq!(doc["rates"]["rows"][0]["rate"].as_f64().unwrap(), 1.0);
}
