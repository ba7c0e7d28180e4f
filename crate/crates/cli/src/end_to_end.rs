//! End-to-end checks of [`run`]: exit codes, report round trips, config
//! precedence and worker-count independence.

use std::io::Write;

use crate::{run, Outcome, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, SCHEMA};
use serde_json::Value;

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("alpha-forge").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let out = cli(args);
    assert_eq!(out.code, EXIT_OK, "{args:?}: {}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", out.stdout))
}

#[test]
fn documented_examples() {
    let out = cli(&["rho", "--u", "2"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.starts_with("0.30685281944005"), "{}", out.stdout);

    let out = cli(&["psi", "--x", "100", "--bound", "5"]);
    assert_eq!(out.stdout.trim(), "34");

    let v = json(&["alpha", "--poly", "1,0,1", "--cutoff", "1000000", "--json"]);
    for key in ["poly", "cutoff", "partial_sum", "tail_bound", "interval_lo", "interval_hi", "assumes_rh", "seconds"] {
        assert!(v["result"].get(key).is_some(), "missing {key}");
    }
    let r = &v["result"];
    assert!(r["interval_lo"].as_f64().unwrap() < r["partial_sum"].as_f64().unwrap());
    assert!(r["partial_sum"].as_f64().unwrap() < r["interval_hi"].as_f64().unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(cli(&["rho", "--u", "2", "--bogus"]).code, EXIT_USAGE);
    assert_eq!(cli(&["alpha", "--poly", "1,x", "--cutoff", "10"]).code, EXIT_USAGE);
    assert_eq!(cli(&["avg", "--degree", "2", "--box", "0:x"]).code, EXIT_USAGE);
    assert_eq!(cli(&["avg", "--degree", "2", "--box", "0:1"]).code, EXIT_DOMAIN);
    let out = cli(&["alpha", "--poly", "1,2,1", "--cutoff", "100"]);
    assert_eq!(out.code, EXIT_DOMAIN);
    assert!(!out.stderr.is_empty());
    assert_eq!(cli(&["psi", "--x", "1e12", "--bound", "10"]).code, EXIT_DOMAIN);
    assert_eq!(cli(&["field", "--disc", "-8", "--class-number"]).code, EXIT_OK);
    assert_eq!(cli(&["field", "--disc", "-12"]).code, EXIT_DOMAIN);
    assert_eq!(cli(&["--help"]).code, EXIT_OK);
}

#[test]
fn json_reports_round_trip_with_their_configuration() {
    let cases: [&[&str]; 7] = [
        &["alpha", "--poly", "-3,0,1,1", "--cutoff", "5000", "--local", "2,3"],
        &["rho", "--u", "3.5", "--deriv", "2"],
        &["predict", "--x", "1e9", "--bound", "1e4", "--alpha", "-1.25", "--saias"],
        &["census", "--poly", "5,0,1", "--norm-bound", "20000", "--smooth-bound", "50", "--oracle"],
        &["avg", "--degree", "2", "--box", "-5:5,-5:5", "--prime", "3"],
        &["field", "--disc", "-23", "--class-number", "--remainder", "1000", "--primitive-count", "1000"],
        &["psi", "--x", "10000", "--bound", "30"],
    ];
    for args in cases {
        let mut full = args.to_vec();
        full.push("--json");
        let v = json(&full);
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["command"], args[0]);
        let cfg = v["config"].as_object().unwrap();
        assert_eq!(cfg["format"], "json");
        assert!(cfg.contains_key("segment_size"));
        // every flag given on the command line is echoed back
        for a in args.iter().filter_map(|a| a.strip_prefix("--")) {
            assert!(cfg.contains_key(&a.replace('-', "_")) || a == "box" && cfg.contains_key("box"), "{a} missing from {cfg:?}");
        }
        // 17 significant digits preserve every float exactly
        let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(again, v);
    }
    let v = json(&["census", "--poly", "5,0,1", "--norm-bound", "20000", "--smooth-bound", "50", "--oracle", "--json"]);
    assert_eq!(v["result"]["oracle"]["agrees"], true);
}

fn numeric_fields(v: &Value) -> Value {
    let mut v = v.clone();
    if let Some(m) = v.as_object_mut() {
        m.remove("run");
    }
    strip(&mut v);
    v
}

fn strip(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("seconds");
            m.remove("runtime_seconds");
            m.values_mut().for_each(strip);
        }
        Value::Array(a) => a.iter_mut().for_each(strip),
        _ => {}
    }
}

#[test]
fn worker_count_does_not_change_numbers() {
    let cases: [&[&str]; 4] = [
        &["alpha", "--poly", "7,1,3", "--cutoff", "300000", "--segment-size", "4096"],
        &["census", "--poly", "1,1,1", "--norm-bound", "300000", "--smooth-bound", "100"],
        &["avg", "--degree", "2", "--sweep", "3,9", "--prime", "2"],
        &["field", "--disc", "-20", "--remainder", "100000", "--primitive-count", "100000"],
    ];
    for args in cases {
        let run_with = |w: &str| {
            let mut a = args.to_vec();
            a.extend(["--json", "--workers", w]);
            numeric_fields(&json(&a))
        };
        assert_eq!(run_with("1"), run_with("5"), "{args:?}");
    }
}

#[test]
fn reproducible_output_is_byte_identical() {
    let go = |w: &str| {
        let out = cli(&["alpha", "--poly", "1,0,1", "--cutoff", "100000", "--json", "--reproducible", "--workers", w]);
        assert_eq!(out.code, EXIT_OK);
        out.stdout
    };
    let a = go("1");
    assert_eq!(a, go("3"));
    assert!(!a.contains("seconds"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "format = \"json\"\nsegment_size = 8192\n\n[rho]\nu = 4.0\nderiv = 1\n\n[psi]\nx = 1000").unwrap();
    let path = f.path().to_str().unwrap();

    let v = json(&["rho", "--config", path]);
    assert_eq!(v["config"]["u"], 4.0);
    assert_eq!(v["config"]["deriv"], 1);
    assert_eq!(v["config"]["segment_size"], 8192);

    let v = json(&["rho", "--config", path, "--u", "2.5", "--segment-size", "1024"]);
    assert_eq!(v["config"]["u"], 2.5);
    assert_eq!(v["config"]["deriv"], 1);
    assert_eq!(v["config"]["segment_size"], 1024);

    let out = cli(&["psi", "--config", path, "--bound", "7", "--format", "text"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_eq!(out.stdout.trim(), "141");

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "[rho]\nwibble = 3").unwrap();
    let out = cli(&["rho", "--config", bad.path().to_str().unwrap(), "--u", "2"]);
    assert_eq!(out.code, EXIT_USAGE);
    assert_eq!(cli(&["rho", "--u", "2", "--config", "/nonexistent/x.toml"]).code, EXIT_USAGE);
}

#[test]
fn csv_exports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t42.csv");
    let out = cli(&[
        "experiment-t42",
        "--poly",
        "1,0,1",
        "--norm-bound",
        "20000,50000",
        "--smooth-bound",
        "30,100",
        "--alpha-cutoff",
        "10000",
        "--format",
        "csv",
        "--export",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, out.stdout);
    let mut lines = written.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(header.contains(&"empirical_ratio") && header.contains(&"predicted_exact"));
    assert_eq!(lines.count(), 4);

    let out = cli(&["avg", "--degree", "2", "--box", "-6:6,-6:6", "--histogram", "8", "--prime-bound", "30", "--format", "csv"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let rows: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(rows[0], "lo,hi,count");
    let total: u64 = rows[1..].iter().map(|r| r.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    // 13² boxes minus the squares X², (X ± 1)², (X ± 2)²
    assert_eq!(total, 169 - 5);
}
