use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tame-density"));
    cmd.env_remove("TAME_DENSITY_BUDGET");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn construct_to(path: &Path, args: &[&str]) {
    let mut full = vec!["construct"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--output", path.to_str().unwrap()]);
    let out = run(&full);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn threshold_reports_n() {
    let v = json(&run(&["threshold", "--m", "2", "--p", "3"]));
    assert_eq!(v["N"], 2);
    assert_eq!(v["config"]["command"], "threshold");
    assert_eq!(v["config"]["p"], 3);
}

#[test]
fn constructed_pair_round_trips_through_check_pair_and_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.json");
    construct_to(&pair, &["--q", "2", "--sign", "+1", "--t", "1", "--p", "3", "--n", "3"]);

    let checked = json(&run(&["check-pair", "--file", pair.to_str().unwrap()]));
    assert_eq!(checked["relation"], true);
    assert_eq!(checked["qtwist"], true);
    assert_eq!(checked["tau_is_identity"], false);
    // tau is exactly unipotent, so the threshold test cannot see the ramification
    assert_eq!(checked["detectably_ramified"], false);

    let crit = json(&run(&["criterion", "--file", pair.to_str().unwrap()]));
    assert_eq!(crit["gl2_ramified"], true);
    assert_eq!(crit["general_ramified"], true);
    assert_eq!(crit["invariant"], "0");
}

#[test]
fn negative_sign_construction() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.json");
    construct_to(&pair, &["--q", "2", "--sign", "-1", "--t", "1", "--p", "3", "--n", "2"]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&pair).unwrap()).unwrap();
    assert_eq!(v["sigma"], serde_json::json!([[7, 0], [0, 8]]));
    let checked = json(&run(&["check-pair", "--file", pair.to_str().unwrap()]));
    assert_eq!(checked["relation"], true);
}

#[test]
fn criterion_on_a_bare_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(&path, r#"{"p": 3, "n": 2, "m": 2, "entries": [1, 0, 0, 1]}"#).unwrap();
    let v = json(&run(&["criterion", "--file", path.to_str().unwrap(), "--q", "2"]));
    assert_eq!(v["gl2_ramified"], false);
    assert_eq!(v["degenerate"], false);
    // F(I, 2) = (1 - 2)^2 (1 - 2)^2 = 1
    assert_eq!(v["invariant"], "1");
    let missing_q = run(&["criterion", "--file", path.to_str().unwrap()]);
    assert_eq!(missing_q.status.code(), Some(2));
}

#[test]
fn count_locus_matches_the_exact_counts() {
    let v = json(&run(&["count-locus", "--spec", "detcoupled2", "--p", "3", "--n", "1"]));
    assert_eq!(v["group_size"], "48");
    assert_eq!(v["locus_size"], "12");
    assert_eq!(v["excluded_b1_size"], "18");
    assert_eq!(v["ratio_num"], "1");
    assert_eq!(v["ratio_den"], "4");
    assert_eq!(v["dimension"], 4);
}

#[test]
fn csv_output_has_config_header_and_schema() {
    let out = run(&["count-locus", "--spec", "detcoupled2", "--p", "3", "--n", "1", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(
        lines.next().unwrap(),
        "p,m,n,group_size,locus_size,excluded_b1_size,ratio_num,ratio_den,ratio_float"
    );
    assert_eq!(lines.next().unwrap(), "3,2,1,48,12,18,1,4,0.25");

    let out = run(&[
        "simulate", "--spec", "detcoupled2", "--p", "3", "--levels", "1,2", "--primes", "50", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "n,primes_streamed,flagged,degenerate,running_density,ci95,exact_reference"
    );
    assert_eq!(text.lines().count(), 2 + 100);
}

#[test]
fn budget_exhaustion_exits_3() {
    let out = run(&["count-locus", "--spec", "detcoupled2", "--p", "3", "--n", "2", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(3));

    let out = bin()
        .args(["count-locus", "--spec", "detcoupled2", "--p", "3", "--n", "2"])
        .env("TAME_DENSITY_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // the partial series is still written
    let out = run(&["decay", "--spec", "detcoupled2", "--p", "3", "--n-to", "3", "--budget", "5000"]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["series"].as_array().unwrap().len(), 2);
    assert_eq!(v["truncated_at"], 3);
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        vec!["threshold", "--m", "2", "--p", "4"],
        vec!["construct", "--q", "3", "--sign", "+1", "--t", "1", "--p", "3", "--n", "2"],
        vec!["construct", "--q", "2", "--sign", "+1", "--t", "9", "--p", "3", "--n", "2"],
        vec!["count-locus", "--spec", "nonsense", "--p", "3", "--n", "1"],
        vec!["count-locus", "--spec", "cong2-fullgl2", "--p", "3", "--n", "2"],
        vec!["check-pair", "--file", "/nonexistent/pair.json"],
        vec!["threshold", "--m", "2"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn decay_reports_a_fit() {
    let v = json(&run(&["decay", "--spec", "detcoupled2", "--p", "3", "--n-to", "3"]));
    assert_eq!(v["series"].as_array().unwrap().len(), 3);
    assert!(v["fitted_delta"].as_f64().unwrap() > 0.0);
    let single = json(&run(&["decay", "--spec", "detcoupled2", "--p", "3", "--n-from", "2", "--n-to", "2"]));
    assert!(single["fitted_delta"].is_null());
}

#[test]
fn simulate_is_byte_identical_across_runs_and_workers() {
    let args = [
        "simulate", "--spec", "detcoupled2", "--p", "3", "--levels", "1,2,3", "--primes", "400", "--seed", "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let with_workers = |w: &str| {
        let mut full: Vec<&str> = args.to_vec();
        full.extend_from_slice(&["--workers", w]);
        let out = run(&full);
        let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
        v["config"]["workers"] = Value::Null;
        v
    };
    assert_eq!(with_workers("1"), with_workers("3"));

    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let traces = v["traces"].as_array().unwrap();
    assert_eq!(traces.len(), 3);
    assert_eq!(traces[0]["primes_streamed"], 400);
    assert_eq!(traces[0]["running_density"].as_array().unwrap().len(), 400);
}
