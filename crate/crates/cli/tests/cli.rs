use std::f64::consts::LN_2;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/schema")
        .join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn jscc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jscc"))
        .args(args)
        .env_remove("JSC_BUDGET")
        .output()
        .unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = jscc(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn run_json(args: &[&str]) -> Value {
    serde_json::from_str(&run_ok(args)).unwrap()
}

fn with_spec<'a>(cmd: &'a str, path: &'a Path, rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd, "--spec", path.to_str().unwrap()];
    v.extend_from_slice(rest);
    v
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn analyze_matches_the_fair_coin_closed_form() {
    let path = spec("bsc_fair.json");
    let v = run_json(&with_spec("analyze", &path, &[]));
    assert_eq!(v["command"], "analyze");
    assert_eq!(v["units"], "nats");
    assert_eq!(v["report"]["phase"], "Paramagnetic");
    let mi = v["report"]["mi_rate"].as_f64().unwrap();
    assert!((mi - (LN_2 - h2(0.1))).abs() <= 1e-6, "{mi}");
}

#[test]
fn useless_channel_carries_nothing() {
    let path = spec("bsc_useless.json");
    let v = run_json(&with_spec("analyze", &path, &[]));
    assert!(v["report"]["mi_rate"].as_f64().unwrap().abs() <= 1e-9);
}

#[test]
fn bits_divides_information_by_ln2() {
    let path = spec("bsc_fair.json");
    let nats = run_json(&with_spec("analyze", &path, &[]));
    let bits = run_json(&with_spec("analyze", &path, &["--bits"]));
    assert_eq!(bits["units"], "bits");
    let (a, b) = (
        nats["report"]["mi_rate"].as_f64().unwrap(),
        bits["report"]["mi_rate"].as_f64().unwrap(),
    );
    assert!((b - a / LN_2).abs() <= 1e-15);
    assert_eq!(nats["report"]["epsilon0"], bits["report"]["epsilon0"]);
}

#[test]
fn csv_has_stable_headers() {
    let path = spec("bsc_fair.json");
    let text = run_ok(&with_spec("analyze", &path, &["--format", "csv"]));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "phase,epsilon0,epsilon_star,channel_share,mi_rate,source_entropy,sigma_at_eps0"
    );
    assert!(lines.next().unwrap().starts_with("Paramagnetic,"));
    assert!(lines.next().is_none());
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let path = spec("bsc_fair.json");
    let stdout = run_ok(&with_spec("analyze", &path, &["--out", target.to_str().unwrap()]));
    assert!(stdout.is_empty());
    let written = std::fs::read_to_string(&target).unwrap();
    assert_eq!(written, run_ok(&with_spec("analyze", &path, &[])));
}

#[test]
fn missing_lambda_is_a_spec_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(
        &dir,
        "bad.json",
        r#"{"uniform_source": {"k": 2}, "bsc": {"p": 0.1}, "ensemble": {"m": [0.5, 0.5]}}"#,
    );
    let out = jscc(&with_spec("analyze", &p, &[]));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("lambda"), "{err}");
}

#[test]
fn unknown_field_and_bad_values_are_spec_errors() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_temp(
        &dir,
        "unknown.json",
        r#"{"uniform_source": {"k": 2}, "bsc": {"p": 0.1}, "ensemble": {"m": [0.5, 0.5]},
            "lambda": {"num": 1}, "lamda": 3}"#,
    );
    let out = jscc(&with_spec("analyze", &unknown, &[]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lamda"));

    let range = write_temp(
        &dir,
        "range.json",
        r#"{"uniform_source": {"k": 2}, "bsc": {"p": 1.5}, "ensemble": {"m": [0.5, 0.5]},
            "lambda": {"num": 1}}"#,
    );
    assert_eq!(jscc(&with_spec("analyze", &range, &[])).status.code(), Some(2));

    let missing = dir.path().join("absent.json");
    assert_eq!(jscc(&with_spec("analyze", &missing, &[])).status.code(), Some(2));

    let path = spec("bsc_fair.json");
    let axis = jscc(&with_spec(
        "sweep",
        &path,
        &["--axis", "bsc.q", "--from", "0", "--to", "1"],
    ));
    assert_eq!(axis.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&axis.stderr).contains("bsc.p"));
}

#[test]
fn sweep_finds_one_ordered_to_paramagnetic_crossing() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(
        &dir,
        "l2.json",
        r#"{"uniform_source": {"k": 2}, "bsc": {"p": 0.1}, "ensemble": {"m": [0.5, 0.5]},
            "lambda": {"num": 2}}"#,
    );
    let steps = 30;
    let v = run_json(&with_spec(
        "sweep",
        &p,
        &["--axis", "bsc.p", "--from", "0.01", "--to", "0.3", "--steps", "30"],
    ));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), steps);
    let phases: Vec<&str> = rows.iter().map(|r| r["phase"].as_str().unwrap()).collect();
    let switches: Vec<usize> = (1..steps).filter(|&i| phases[i] != phases[i - 1]).collect();
    assert_eq!(switches.len(), 1, "{phases:?}");
    let i = switches[0];
    assert_eq!((phases[i - 1], phases[i]), ("Ordered", "Paramagnetic"));
    // H(S) = ln 2 = 2 (ln 2 - h(p_c)) puts p_c between the two rows
    let f = |p: f64| 2.0 * (LN_2 - h2(p)) - LN_2;
    let (lo, hi) = (
        rows[i - 1]["axis_value"].as_f64().unwrap(),
        rows[i]["axis_value"].as_f64().unwrap(),
    );
    assert!(f(lo) >= 0.0 && f(hi) <= 0.0, "{lo} {hi}");

    let single = run_json(&with_spec(
        "sweep",
        &p,
        &["--axis", "lambda", "--from", "1", "--to", "3", "--steps", "1"],
    ));
    assert_eq!(single["rows"].as_array().unwrap().len(), 1);
    assert_eq!(single["rows"][0]["axis_value"].as_f64(), Some(1.0));
}

#[test]
fn noiseless_simulation_has_zero_gap() {
    // identity channel over 8 letters, one source bit per use: every drawn
    // codebook with distinct codewords decodes perfectly
    let path = spec("noiseless.json");
    let v = run_json(&with_spec(
        "simulate",
        &path,
        &["--block-length", "1", "--seeds", "3"],
    ));
    let row = &v["rows"][0];
    assert_eq!(row["gap"].as_f64(), Some(0.0));
    for code in row["codes"].as_array().unwrap() {
        assert_eq!(code["h_s_given_y"].as_f64(), Some(0.0));
    }
}

#[test]
fn monte_carlo_tracks_exact_enumeration() {
    let path = spec("bsc_oracle.json");
    let exact = run_json(&with_spec("simulate", &path, &["--block-length", "3"]));
    let mc = run_json(&with_spec(
        "simulate",
        &path,
        &["--block-length", "3", "--mc", "--trials", "4000"],
    ));
    let e = exact["rows"][0]["mi_mean"].as_f64().unwrap();
    let m = mc["rows"][0]["mi_mean"].as_f64().unwrap();
    let se = mc["rows"][0]["codes"][0]["stderr"].as_f64().unwrap();
    assert_eq!(mc["rows"][0]["mode"], "monte_carlo");
    assert!((e - m).abs() <= 4.0 * se + 1e-12, "{e} {m} {se}");
}

#[test]
fn budget_errors_exit_3_and_suggest_monte_carlo() {
    let path = spec("bsc_oracle.json");
    let out = jscc(&with_spec(
        "simulate",
        &path,
        &["--block-length", "6", "--budget", "1000"],
    ));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--mc"));

    let env = Command::new(env!("CARGO_BIN_EXE_jscc"))
        .args(with_spec("simulate", &path, &["--block-length", "6"]))
        .env("JSC_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(3));
    // the flag takes precedence over the environment
    let both = Command::new(env!("CARGO_BIN_EXE_jscc"))
        .args(with_spec(
            "simulate",
            &path,
            &["--block-length", "2", "--budget", "100000"],
        ))
        .env("JSC_BUDGET", "1")
        .output()
        .unwrap();
    assert!(both.status.success());
}

#[test]
fn ordered_mac_user_rate_is_null_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(
        &dir,
        "mac_ordered.json",
        r#"{"binary_source": {"q": 0.02}, "ensemble": {"m": [0.5, 0.5]},
            "lambda": {"num": 4},
            "mac": {"source_t": {"hamiltonian": [0.0, 3.0]},
                    "ensemble_t": {"m": [0.5, 0.5]},
                    "binary_additive": {"p": 0.01}}}"#,
    );
    let v = run_json(&with_spec("mac", &p, &[]));
    assert_eq!(v["summary"]["phase"], "Ordered");
    assert!(v["summary"]["mi_user_s"].is_null());
}

#[test]
fn transparent_tap_has_zero_secrecy_capacity() {
    let path = spec("wiretap_transparent.json");
    let v = run_json(&with_spec("wiretap", &path, &[]));
    assert_eq!(v["secrecy_capacity"].as_f64(), Some(0.0));
    assert_eq!(v["curve"].as_array().unwrap().len(), 20);
    assert!(v["equivocation"].is_null());
}

#[test]
fn degraded_wiretap_reports_capacity_and_equivocation() {
    let path = spec("wiretap_degraded.json");
    let v = run_json(&with_spec("wiretap", &path, &["--points", "5"]));
    let conv = 0.05 * 0.9 + 0.1 * 0.95;
    let cs = v["secrecy_capacity"].as_f64().unwrap();
    assert!((cs - (h2(conv) - h2(0.05))).abs() <= 1e-8, "{cs}");
    let eq = v["equivocation"]["equivocation_bound"].as_f64().unwrap();
    assert!(eq > 0.0 && eq <= h2(0.11) + 1e-12);
    let gammas: Vec<f64> = v["curve"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["gamma"].as_f64().unwrap())
        .collect();
    assert!(gammas.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn mac_with_a_fair_second_user_gives_the_first_nothing() {
    let path = spec("mac_half.json");
    let v = run_json(&with_spec("mac", &path, &["--block-length", "2"]));
    assert!(v["summary"]["mi_user_s"].as_f64().unwrap().abs() <= 1e-9);
    let o = &v["oracle"][0];
    let (s, t, joint) = (
        o["mi_s"].as_f64().unwrap(),
        o["mi_t_given_s"].as_f64().unwrap(),
        o["mi_joint"].as_f64().unwrap(),
    );
    assert!((s + t - joint).abs() <= 1e-12);
    let csv = run_ok(&with_spec("mac", &path, &["--format", "csv"]));
    assert!(csv.starts_with(
        "n_source,seed,mi_s,mi_t_given_s,mi_joint,mi_user_s,mi_user_t,sum_rate,conditional_rate,epsilon_c,phase\n"
    ));
}

fn every_command() -> Vec<Vec<String>> {
    let s = |n: &str| spec(n).to_str().unwrap().to_string();
    let cases: Vec<(&str, String, Vec<&str>)> = vec![
        ("analyze", s("bsc_fair.json"), vec![]),
        ("analyze", s("ordered.json"), vec!["--format", "csv"]),
        ("analyze", s("noiseless.json"), vec!["--bits"]),
        (
            "sweep",
            s("bsc_fair.json"),
            vec!["--axis", "ensemble.m", "--from", "0.1", "--to", "0.5", "--steps", "5"],
        ),
        (
            "sweep",
            s("bsc_fair.json"),
            vec!["--axis", "beta", "--from", "0.5", "--to", "2", "--steps", "4", "--format", "csv"],
        ),
        ("simulate", s("bsc_oracle.json"), vec!["--block-length", "2,3", "--seeds", "3"]),
        (
            "simulate",
            s("bsc_oracle.json"),
            vec!["--block-length", "4", "--mc", "--trials", "300", "--seed", "7"],
        ),
        ("wiretap", s("wiretap_degraded.json"), vec!["--points", "6"]),
        ("wiretap", s("wiretap_transparent.json"), vec!["--format", "csv"]),
        ("mac", s("mac_binary.json"), vec!["--block-length", "1,2", "--seeds", "2"]),
        ("mac", s("mac_half.json"), vec!["--bits"]),
    ];
    cases
        .into_iter()
        .map(|(cmd, path, rest)| {
            let mut v = vec![cmd.to_string(), "--spec".into(), path];
            v.extend(rest.into_iter().map(String::from));
            v
        })
        .collect()
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    for args in every_command() {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run_ok(&a), run_ok(&a), "{args:?}");
    }
}

#[test]
fn json_outputs_validate_against_the_published_schema() {
    let validator = jsonschema::validator_for(&schema("output.json")).unwrap();
    for args in every_command() {
        if args.iter().any(|a| a == "csv") {
            continue;
        }
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let v = run_json(&a);
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
    let bogus = serde_json::json!({"command": "analyze", "units": "nats", "report": {}});
    assert!(!validator.is_valid(&bogus));
}

#[test]
fn shipped_specs_validate_against_the_input_schema() {
    let validator = jsonschema::validator_for(&schema("systemspec.json")).unwrap();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("specs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(validator.is_valid(&v), "{}", path.display());
        n += 1;
    }
    assert!(n >= 8);
    let two_sources = serde_json::json!({
        "uniform_source": {"k": 2}, "binary_source": {"q": 0.2},
        "bsc": {"p": 0.1}, "ensemble": {"m": [0.5, 0.5]}, "lambda": {"num": 1}
    });
    assert!(!validator.is_valid(&two_sources));
    let no_lambda = serde_json::json!({
        "uniform_source": {"k": 2}, "bsc": {"p": 0.1}, "ensemble": {"m": [0.5, 0.5]}
    });
    assert!(!validator.is_valid(&no_lambda));
}
