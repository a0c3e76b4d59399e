use std::process::{Command, Output};

fn fqspread(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqspread"))
        .args(args)
        .env_remove("FQSPREAD_SEED")
        .env_remove("FQSPREAD_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn first_stderr_line(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap().lines().next().unwrap_or("").to_string()
}

#[test]
fn spread_eval_orthogonal_arms() {
    let o = fqspread(&["spread", "eval", "--field", "5^1", "--d", "2", "--apex", "0,0", "--b", "1,0", "--c", "0,1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "Value(1)\n");
    let o = fqspread(&["spread", "eval", "--field", "5^1", "--d", "2", "--apex", "0,0", "--b", "1,2", "--c", "0,1"]);
    assert_eq!(stdout(&o), "Undefined\n");
}

#[test]
fn constructions_experiment_passes() {
    let o = fqspread(&["experiment", "constructions", "--field", "5^1", "--d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert!(v["per_trial"][0]["measured"].as_u64().unwrap() <= 1);
}

#[test]
fn iso_triple_search_in_f3_6() {
    let o = fqspread(&["search", "iso-triple", "--field", "3^1", "--d", "6"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "NoneFound\n");
    let o = fqspread(&["search", "iso-triple", "--field", "5^1", "--d", "6"]);
    assert!(stdout(&o).starts_with("q=5 d=6\n"));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn error_codes_and_statuses() {
    let o = fqspread(&["construct", "con2", "--field", "7^1", "--d", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(first_stderr_line(&o), "error: BadResidue");

    let o = fqspread(&["field", "info", "--field", "2^3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(first_stderr_line(&o), "error: CharacteristicTwo");

    let o = fqspread(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(first_stderr_line(&o), "error: UsageError");

    let o = fqspread(&["sphere", "--field", "5^1", "--d", "6", "--budget", "100"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(first_stderr_line(&o), "error: BudgetExceeded");
}

#[test]
fn construct_then_census_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("con1.txt");
    let p = path.to_str().unwrap();
    let o = fqspread(&["construct", "con1", "--field", "5^1", "--d", "4", "--out", p]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("q=5 d=4\n"));
    assert_eq!(text.lines().count(), 26);

    let o = fqspread(&["census", "spreads", "--field", "5^1", "--points", p]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["defined_count"], 0);
    assert_eq!(v["n_points"], 25);
    assert!(v["elapsed_ms"].is_null());

    let o = fqspread(&["census", "lines", "--field", "5^1", "--points", p, "--format", "csv"]);
    assert_eq!(stdout(&o), "lines,max_degree\n30,6\n");

    let o = fqspread(&["census", "occurrences", "--field", "5^1", "--points", p]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sphere_and_distance_census() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s1.txt");
    let p = path.to_str().unwrap();
    assert!(fqspread(&["sphere", "--field", "5", "--d", "2", "--t", "1", "--out", p]).status.success());
    let o = fqspread(&["census", "distances", "--field", "5^1", "--points", p, "--format", "csv"]);
    assert_eq!(stdout(&o), "distance\n2\n4\n");
    let o = fqspread(&["kspread", "eval", "--field", "5^1", "--points", p]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(first_stderr_line(&o), "error: BadArity");
}

#[test]
fn mismatched_point_file_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.txt");
    std::fs::write(&path, "q=7 d=2\n0,0\n1,1\n2,5\n").unwrap();
    let o = fqspread(&["census", "spreads", "--field", "5^1", "--points", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(first_stderr_line(&o), "error: InvalidParameter");
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["experiment", "beck", "--field", "7^1", "--d", "2", "--trials", "12", "--seed", "5"];
    let (a, b) = (fqspread(&args), fqspread(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let env_seed = Command::new(env!("CARGO_BIN_EXE_fqspread"))
        .args(["experiment", "beck", "--field", "7^1", "--d", "2", "--trials", "12"])
        .env("FQSPREAD_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(env_seed.stdout, a.stdout);
}

#[test]
fn failing_experiment_exits_one_with_a_report() {
    let o = fqspread(&["experiment", "bode", "--field", "5^1", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["summary"]["plane_spread_count"], 3);
}

#[test]
fn field_info_documents_encoding() {
    let o = fqspread(&["field", "info", "--field", "3^2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["q"], 9);
    assert_eq!(v["modulus"], serde_json::json!([1, 0, 1]));
    assert!(v["encoding"].as_str().unwrap().contains("base-p"));
}
