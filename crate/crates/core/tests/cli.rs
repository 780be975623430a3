//! End-to-end runs of the `tsperm` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tsperm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsperm")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

/// Parses a report and drops every timing field.
fn without_timing(text: &str) -> Value {
    fn strip(v: &mut Value) {
        match v {
            Value::Object(map) => {
                map.remove("timing_secs");
                map.remove("elapsed_secs");
                map.values_mut().for_each(strip);
            }
            Value::Array(items) => items.iter_mut().for_each(strip),
            _ => {}
        }
    }
    let mut v: Value = serde_json::from_str(text).unwrap();
    strip(&mut v);
    v
}

#[test]
fn simulate_then_test() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("reg.csv");
    let d = data.to_str().unwrap();
    let out = tsperm(&["simulate", "--dgp", "mdep-reg", "--n", "60", "--m", "1", "--seed", "4", "--out", d]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&data).unwrap().starts_with("y,x1,x2,x3\n"));

    let out = tsperm(&["test", "regression", "--data", d, "--response", "y", "--permutations", "99"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["outcome"]["method"], "PERM_REG_STUD");
    assert_eq!(report["outcome"]["permutations"], 100);
    let pv = report["outcome"]["p_value"].as_f64().unwrap();
    assert!(pv > 0.0 && pv <= 1.0);

    let out = tsperm(&["test", "classical", "--data", d, "--response", "y"]);
    assert_eq!(code(&out), 0);

    let series = dir.path().join("s.csv");
    let s = series.to_str().unwrap();
    assert_eq!(code(&tsperm(&["simulate", "--dgp", "ar1", "--rho", "0.3", "--n", "40", "--out", s])), 0);
    for args in [
        vec!["test", "trend", "--data", s, "--column", "y", "--tail", "two-sided"],
        vec!["test", "ljung-box", "--data", s, "--column", "y", "--lags", "2"],
    ] {
        let out = tsperm(&args);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&tsperm(&["--help"])), 0);
    assert_eq!(code(&tsperm(&["--version"])), 0);
    assert_eq!(code(&tsperm(&["test", "regression"])), 1);
    let series = dir.path().join("s.csv");
    write(&series, "y\n1\n3\n2\n5\n4\n");
    let s = series.to_str().unwrap();
    assert_eq!(code(&tsperm(&["test", "trend", "--data", s, "--column", "y", "--alpha", "2"])), 1);
    assert_eq!(code(&tsperm(&["test", "trend", "--data", s, "--column", "z"])), 2);

    let missing = dir.path().join("missing.csv");
    let out = tsperm(&["test", "trend", "--data", missing.to_str().unwrap(), "--column", "y"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FILE_NOT_FOUND"));

    let bad = dir.path().join("bad.csv");
    write(&bad, "y,x\n1,2\n3,oops\n");
    assert_eq!(code(&tsperm(&["test", "classical", "--data", bad.to_str().unwrap(), "--response", "y"])), 2);

    // A constant covariate makes the covariance singular.
    let constant = dir.path().join("const.csv");
    write(&constant, "y,x\n1,5\n2,5\n0,5\n4,5\n3,5\n6,5\n");
    let out = tsperm(&["test", "regression", "--data", constant.to_str().unwrap(), "--response", "y"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("SINGULAR_COVARIANCE"));
}

#[test]
fn reports_reproduce_except_timing() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = tsperm(&[
            "reproduce", "--table", "3", "--scale", "0.005", "--permutations", "49", "--seed", "7", "--threads",
            threads, "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(path).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "2");
    // Only the outcome is compared; the invocation names different output files.
    assert_eq!(without_timing(&a)["outcome"], without_timing(&b)["outcome"]);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["outcome"]["type"], "study");
    assert_eq!(v["outcome"]["cells"].as_array().unwrap().len(), 4 * 5 * 2);
}

#[test]
fn study_from_json_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    write(
        &spec,
        r#"{"dgps": [{"kind": "ar1", "rho": 0.2}, {"kind": "ar1", "rho": 0.0, "trend": {"h": 4.0}}],
            "n_grid": [30], "replications": 5, "master_seed": 3,
            "methods": [{"method": "PERM_TREND_STUD", "config": {"permutations": 49}}]}"#,
    );
    let out_path = dir.path().join("out.json");
    let csv_path = dir.path().join("out.csv");
    let out = tsperm(&[
        "study", "--spec", spec.to_str().unwrap(), "--out", out_path.to_str().unwrap(), "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&csv_path).unwrap().lines().count(), 3);

    write(&spec, "{ not json");
    let out = tsperm(&["study", "--spec", spec.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("PARSE_ERROR"));
}
