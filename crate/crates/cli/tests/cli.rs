use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bhclone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bhclone"))
        .args(args)
        .env("BHCLONE_THREADS", "2")
        .output()
        .expect("run bhclone")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(&bhclone(args))).unwrap()
}

fn schema_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas/bhclone-output.schema.json")
}

fn validator() -> jsonschema::Validator {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path()).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("valid schema")
}

fn single_line_error(out: &Output) -> String {
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "diagnostic: {err:?}");
    err
}

#[test]
fn analyze_perfect_cloner_point_as_json() {
    let v = json(&[
        "analyze", "--xi", "0.5", "--alpha2", "0.5", "--format", "json",
    ]);
    assert_eq!(v["command"], "analyze");
    assert_eq!(v["f_max"].as_f64(), Some(1.0));
    assert_eq!(v["violates_chsh"], Value::Bool(true));
    assert_eq!(v["entangled"], Value::Bool(true));
    assert_eq!(v["m_value"].as_f64(), Some(2.0));
}

#[test]
fn analyze_csv_has_the_documented_header() {
    let text = stdout(&bhclone(&["analyze", "--xi", "1/3", "--alpha2", "0.5"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "xi,alpha2,w3,w4,min_pt_eig,entangled,m_value,chsh_max,violates_chsh,n_value,f_max,useful"
    );
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields.len(), 12);
    assert_eq!(fields[0], "0.333333333333");
    assert_eq!(fields[10], "0.777777777778");
    assert_eq!(fields[11], "true");
}

#[test]
fn boundaries_report_three_targets() {
    let text = stdout(&bhclone(&["boundaries", "--tol", "1e-9"]));
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 3);
    let targets: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    let expected = [0.353553391, 0.25, 0.190983006];
    for (t, e) in targets.iter().zip(expected) {
        assert!((t - e).abs() < 1e-9, "{t} vs {e}");
    }
    assert!(rows.iter().all(|r| r[5] == "true"));
}

#[test]
fn out_of_range_xi_is_rejected() {
    let out = bhclone(&["analyze", "--xi", "0.05", "--alpha2", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    let err = single_line_error(&out);
    assert!(err.contains("[1/6, 1/2]"), "{err}");
}

#[test]
fn out_of_range_alpha2_in_a_sweep_is_rejected() {
    let out = bhclone(&["sweep", "--alpha2", "0:1.5:4"]);
    let err = single_line_error(&out);
    assert!(err.contains("alpha2"), "{err}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bhclone(&["analyze", "--xi", "0.3", "--alpha2", "0.5", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = single_line_error(&out);
    assert!(err.contains("--frobnicate"), "{err}");
}

#[test]
fn malformed_range_is_a_usage_error() {
    let out = bhclone(&["sweep", "--xi", "0.4:0.3:5"]);
    assert_eq!(out.status.code(), Some(2));
    single_line_error(&out);
}

#[test]
fn unwritable_output_path_fails() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.csv");
    let out = bhclone(&["boundaries", "--output", target.to_str().unwrap()]);
    let err = single_line_error(&out);
    assert!(err.contains("cannot write"), "{err}");
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("sweep.csv");
    let args = ["sweep", "--xi", "0.2:0.4:5", "--alpha2", "0:1:3"];
    let direct = stdout(&bhclone(&args));
    let mut with_file = args.to_vec();
    with_file.extend(["--output", target.to_str().unwrap()]);
    let out = bhclone(&with_file);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&target).unwrap(), direct);
}

#[test]
fn sweep_adds_landmarks_unless_disabled() {
    let with = stdout(&bhclone(&["sweep", "--xi", "0.3:0.4:3", "--alpha2", "0.5"]));
    let without = stdout(&bhclone(&[
        "sweep",
        "--xi",
        "0.3:0.4:3",
        "--alpha2",
        "0.5",
        "--no-landmarks",
    ]));
    assert_eq!(with.lines().count(), 1 + 4);
    assert_eq!(without.lines().count(), 1 + 3);
    assert!(with.contains("\n0.353553390593,"));
}

#[test]
fn sweep_is_byte_identical_across_runs_and_thread_counts() {
    let args = ["sweep", "--xi", "1/6:1/2:9", "--alpha2", "0:1:5"];
    let a = bhclone(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_bhclone"))
        .args(args)
        .env("BHCLONE_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn teleport_sim_is_reproducible_for_a_seed() {
    let args = [
        "teleport-sim",
        "--xi",
        "0.3",
        "--samples",
        "5000",
        "--seed",
        "7",
    ];
    let a = stdout(&bhclone(&args));
    let b = stdout(&bhclone(&args));
    assert_eq!(a, b);
    let other = stdout(&bhclone(&[
        "teleport-sim",
        "--xi",
        "0.3",
        "--samples",
        "5000",
        "--seed",
        "8",
    ]));
    assert_ne!(a, other);
    let fields: Vec<&str> = a.lines().nth(1).unwrap().split(',').collect();
    let exact: f64 = fields[5].parse().unwrap();
    let mc: f64 = fields[6].parse().unwrap();
    let se: f64 = fields[7].parse().unwrap();
    assert!((exact - 2.2 / 3.0).abs() < 1e-11);
    assert!((mc - exact).abs() < 5.0 * se);
}

#[test]
fn chsh_opt_matches_the_analytic_value() {
    let v = json(&[
        "chsh-opt",
        "--xi",
        "1/6:1/2:4",
        "--alpha2",
        "0:1:3",
        "--format",
        "json",
    ]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    for r in rows {
        let d = r["difference"].as_f64().unwrap();
        assert!(d.abs() < 1e-8, "{r}");
    }
}

#[test]
fn tolerance_below_the_floor_is_rejected() {
    let out = bhclone(&["chsh-opt", "--xi", "0.3", "--tol", "1e-12"]);
    single_line_error(&out);
    let out = bhclone(&["boundaries", "--tol", "1e-15"]);
    single_line_error(&out);
}

#[test]
fn regions_csv_carries_the_diff_count() {
    let text = stdout(&bhclone(&["regions", "--resolution", "9"]));
    let mut lines = text.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# resolution=9 cells="), "{meta}");
    assert!(meta.contains("genuine_diff_count=0"), "{meta}");
    assert!(lines.next().unwrap().starts_with("xi,alpha2,oracle_label"));
    // 9 grid values plus the two landmarks off the grid
    assert_eq!(lines.count(), 11 * 9);
}

#[test]
fn every_command_validates_against_the_schema() {
    let validator = validator();
    let runs: [&[&str]; 6] = [
        &["analyze", "--xi", "0.3", "--alpha2", "0.25"],
        &["sweep", "--xi", "1/6:1/2:5", "--alpha2", "0:1:3"],
        &["regions", "--resolution", "5"],
        &["boundaries"],
        &["teleport-sim", "--xi", "0.2:0.5:3", "--samples", "2000"],
        &["chsh-opt", "--xi", "0.4", "--alpha2", "0.5"],
    ];
    for args in runs {
        let mut full = args.to_vec();
        full.extend(["--format", "json"]);
        let v = json(&full);
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let validator = validator();
    let mut v = json(&[
        "analyze", "--xi", "0.3", "--alpha2", "0.25", "--format", "json",
    ]);
    assert!(validator.is_valid(&v));
    v["extra"] = Value::Bool(true);
    assert!(!validator.is_valid(&v));
    let mut v = json(&["boundaries", "--format", "json"]);
    v["boundaries"].as_array_mut().unwrap().pop();
    assert!(!validator.is_valid(&v));
}

#[test]
fn help_and_version_succeed() {
    let help = bhclone(&["--help"]);
    assert!(help.status.success());
    assert!(String::from_utf8_lossy(&help.stdout).contains("teleport-sim"));
    let version = bhclone(&["--version"]);
    assert!(version.status.success());
}
