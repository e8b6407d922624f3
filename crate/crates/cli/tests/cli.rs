use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wardlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wardlab"))
        .args(args)
        .env_remove("WARDLAB_DEFAULT_HORIZON")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

/// Parses stdout as a report and checks it against the shipped schema.
fn report(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    let errors: Vec<String> = validator().iter_errors(&v).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
    v
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    format!("@{}", path.display())
}

#[test]
fn classify_sqrt_is_stat_quasi_cauchy() {
    let out = wardlab(&["classify", "--seq", "sqrt", "--classes", "statQuasiCauchy"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["command"]["name"], "classify");
    assert_eq!(r["config"]["horizon"], 100_000);
    let entry = &r["results"][0]["entries"][0];
    assert_eq!(entry["class"], "statQuasiCauchy");
    assert_eq!(entry["verdict"]["status"], "satisfied");
}

#[test]
fn compact_half_line() {
    let out = wardlab(&["compact", "--set", "[0,inf)"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["results"][0]["statUpwardCompact"], true);
    assert_eq!(r["results"][0]["statDownwardCompact"], false);
}

#[test]
fn alternating_file_violates_half_stat() {
    let dir = tempfile::tempdir().unwrap();
    let body: String = std::iter::once("value\n".to_owned())
        .chain((0..500).map(|i| if i % 2 == 0 { "1\n".to_owned() } else { "-1\n".to_owned() }))
        .collect();
    let file = write(dir.path(), "vals.csv", &body);
    let out = wardlab(&["classify", "--seq", &file, "--classes", "halfStatQuasiCauchy"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("horizon clipped from 100000 to 499"), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["config"]["horizon"], 499);
    let v = &r["results"][0]["entries"][0]["verdict"];
    assert_eq!(v["status"], "violated");
    assert!(!v["witnessIndices"].as_array().unwrap().is_empty());
}

#[test]
fn csv_output_has_fixed_header() {
    let out = wardlab(&["classify", "--seq", "identity", "--classes", "statUpHalfQuasiCauchy,cauchy", "--horizon", "2000", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("class,status,epsilon,finalDensity,horizon"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // Summary row, then one row per epsilon in descending order.
    assert_eq!(rows[0], ["statUpHalfQuasiCauchy", "satisfied", "", "", "2000"]);
    let eps: Vec<&str> = rows[1..5].iter().map(|r| r[2]).collect();
    assert_eq!(eps, ["1", "0.5", "0.1", "0.01"]);
    assert!(rows[1..5].iter().all(|r| r[3] == "0"));
    assert_eq!(rows[5][..2], ["cauchy", "violated"]);
}

#[test]
fn reports_are_deterministic_apart_from_timestamp() {
    let args = ["classify", "--seq", "harmonic-partial", "--horizon", "5000"];
    let strip = |out: Output| {
        let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
        v.as_object_mut().unwrap().remove("timestamp");
        serde_json::to_vec(&v).unwrap()
    };
    assert_eq!(strip(wardlab(&args)), strip(wardlab(&args)));
}

#[test]
fn inconclusive_verdict_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let body: String = (1..=100).map(|k| format!("{}\n", 10 * k)).collect();
    let file = write(dir.path(), "tens.csv", &body);
    let out = wardlab(&["density", "--pred", &file, "--horizon", "1000"]);
    assert_eq!(code(&out), 2);
    assert_eq!(report(&out)["results"][0]["verdict"]["status"], "inconclusive");
}

#[test]
fn errors_exit_one_with_distinct_messages() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(Vec<String>, &str)> = vec![
        (vec!["classify".into(), "--seq".into(), "no-such-thing".into()], "unknown catalogue sequence"),
        (vec!["classify".into(), "--seq".into(), "sqrt".into(), "--horizon".into(), "ten".into()], "invalid value"),
        (vec!["classify".into(), "--seq".into(), write(dir.path(), "bad.csv", "1\n2\nx\n")], "is not a number"),
        (vec!["classify".into(), "--seq".into(), write(dir.path(), "wide.csv", "1,2\n3,4\n")], "one value per line"),
        (vec!["classify".into(), "--seq".into(), "@/nonexistent/file.csv".into()], "cannot open"),
        (vec!["limit".into(), "--seq".into(), "sqrt".into(), "--method".into(), "cesaro".into()], "invalid value"),
        (vec!["compact".into(), "--set".into(), "[3,1]".into()], "error"),
        (vec!["compact".into(), "--set".into(), "R".into(), "--format".into(), "csv".into()], "csv output"),
        (vec!["frobnicate".into()], "unrecognized subcommand"),
    ];
    for (args, needle) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = wardlab(&args);
        assert_eq!(code(&out), 1, "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).contains(needle), "{args:?}: {}", stderr(&out));
        assert!(out.stdout.is_empty(), "{args:?} wrote a report");
    }
}

#[test]
fn environment_sets_the_default_horizon() {
    let out = Command::new(env!("CARGO_BIN_EXE_wardlab"))
        .args(["classify", "--seq", "reciprocal", "--classes", "convergent"])
        .env("WARDLAB_DEFAULT_HORIZON", "1234")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["config"]["horizon"], 1234);
    // An explicit flag wins.
    let out = Command::new(env!("CARGO_BIN_EXE_wardlab"))
        .args(["classify", "--seq", "reciprocal", "--classes", "convergent", "--horizon", "321"])
        .env("WARDLAB_DEFAULT_HORIZON", "1234")
        .output()
        .unwrap();
    assert_eq!(report(&out)["config"]["horizon"], 321);
}

#[test]
fn out_directory_receives_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("reports");
    let out = wardlab(&["density", "--pred", "squares", "--horizon", "10000", "--format", "text", "--out", target.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(target.join("density.txt")).unwrap();
    assert!(text.contains("satisfied"), "{text}");
}

#[test]
fn every_command_produces_a_valid_report() {
    let runs: [&[&str]; 7] = [
        &["limit", "--seq", "fibonacci-ratio", "--method", "ordinary", "--horizon", "100"],
        &["limit", "--seq", "reciprocal", "--method", "ntheta", "--theta", "fib:20", "--ell", "0", "--horizon", "10000"],
        &["limit", "--seq", "ones-at-squares", "--method", "stat", "--horizon", "10000"],
        &["density", "--pred", "evens", "--horizon", "1000"],
        &["lattice", "--fn", "x^2", "--corpus", "sqrt", "identity", "reciprocal", "--horizon", "10000"],
        &["ucwitness", "--fn", "x^2", "--domain", "[0,inf)", "--eps0", "1", "--nmax", "10"],
        &["catalogue"],
    ];
    for args in runs {
        let out = wardlab(args);
        assert!(matches!(code(&out), 0 | 2), "{args:?}: {}", stderr(&out));
        report(&out);
    }
}

#[test]
fn limit_reports_the_golden_mean() {
    let out = wardlab(&["limit", "--seq", "fibonacci-ratio", "--method", "ordinary", "--horizon", "100"]);
    assert_eq!(code(&out), 0);
    let l = report(&out)["results"][0]["limitEstimate"].as_f64().unwrap();
    assert!((l - 1.618_033_988_7).abs() < 1e-9);
}

#[test]
fn ucwitness_lists_checked_pairs() {
    let out = wardlab(&["ucwitness", "--fn", "x^2", "--domain", "[0,inf)", "--eps0", "1", "--nmax", "50"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    let pairs = r["results"][0]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 50);
    for p in pairs {
        let (n, x, y) = (p["n"].as_f64().unwrap(), p["x"].as_f64().unwrap(), p["y"].as_f64().unwrap());
        assert!((x - y).abs() < 1.0 / n);
        assert!((x * x - y * y).abs() >= 1.0);
    }
}

#[test]
fn lattice_text_names_the_step_witness() {
    let out = wardlab(&["lattice", "--fn", "step(0)", "--format", "text", "--horizon", "20000"]);
    assert!(matches!(code(&out), 0 | 2), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.trim_start().starts_with("dS+ ")).unwrap();
    assert!(line.contains("violated") && line.contains("witness"), "{line}");
    assert!(!text.contains("CONTRADICTED"), "{text}");
}

#[test]
fn expressions_work_as_sequences() {
    let out = wardlab(&["classify", "--seq", "1/n", "--classes", "convergent,statQuasiCauchy", "--horizon", "10000"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["results"][0]["sequenceName"], "1/n");
    for e in r["results"][0]["entries"].as_array().unwrap() {
        assert_eq!(e["verdict"]["status"], "satisfied");
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let out = wardlab(&["compact", "--set", "[-1,1]"]);
    let good = report(&out);
    let v = validator();
    let mut missing = good.clone();
    missing.as_object_mut().unwrap().remove("timestamp");
    assert!(!v.is_valid(&missing));
    let mut bad_status = serde_json::json!({ "predicate": "p", "verdict": { "status": "maybe", "horizon": 1, "witnessIndices": [], "trace": { "checkpoints": [] }, "note": "" } });
    let mut doc = good.clone();
    doc["results"] = serde_json::json!([bad_status.take()]);
    assert!(!v.is_valid(&doc));
}
