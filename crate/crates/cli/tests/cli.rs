use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cycl_cli::input::parse_matrix;
use jsonschema::JSONSchema;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cycl"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cycl-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn schema(name: &str) -> JSONSchema {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema");
    let load = |n: &str| -> Value { serde_json::from_str(&std::fs::read_to_string(dir.join(n)).unwrap()).unwrap() };
    JSONSchema::options()
        .with_document(
            "json-schema:///condition-report.schema.json".to_string(),
            load("condition-report.schema.json"),
        )
        .compile(&load(name))
        .unwrap()
}

fn assert_valid(schema_name: &str, v: &Value) {
    let s = schema(schema_name);
    let msgs: Vec<String> = match s.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| e.to_string()).collect(),
    };
    panic!("{schema_name}: {msgs:?}");
}

#[test]
fn check_on_four_cycle_reports_witness() {
    let o = run(&["check", "--kappa", "0", path_str(&fixture("four_cycle.json"))]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert_eq!(v["passed"], false);
    let cycl4 = v["reports"].as_array().unwrap().iter().find(|r| r["condition"] == "cycl4").unwrap();
    assert_eq!(cycl4["verdict"], "fail");
    assert_eq!(cycl4["witness"]["indices"].as_array().unwrap().len(), 4);
    assert_valid("check.schema.json", &v);
}

#[test]
fn check_on_square_passes() {
    let o = run(&["check", "--kappa", "0", "--wir", "4", path_str(&fixture("square.csv"))]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["reports"].as_array().unwrap().len(), 4);
    assert_valid("check.schema.json", &v);
}

#[test]
fn majorize_reproduces_convex_pentagon() {
    let svg = tmp("pentagon.svg");
    let input = fixture("pentagon.json");
    let o = run(&[
        "majorize",
        "--kappa",
        "0",
        "--tuple",
        "0,1,2,3,4",
        path_str(&input),
        "--svg",
        path_str(&svg),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_valid("comparison-map.schema.json", &v);
    let m = parse_matrix(&input).unwrap().metric;
    let pts: Vec<(f64, f64)> = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect();
    for i in 0..5 {
        for j in 0..5 {
            let d = ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt();
            assert!((d - m.get(i, j)).abs() < 1e-9, "({i},{j})");
        }
    }
    let doc = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(doc.matches("<polyline").count(), 5);
    assert_eq!(doc.matches("<text").count(), 5);
}

#[test]
fn majorize_on_hemisphere_draws_orthographic_view() {
    let svg = tmp("hemisphere.svg");
    let o = run(&["majorize", "--kappa", "1", path_str(&fixture("hemisphere.json")), "--svg", path_str(&svg)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["model"], "sphere");
    assert_eq!(v["convexity_ok"], true);
    let doc = std::fs::read_to_string(&svg).unwrap();
    assert!(doc.contains(r#"stroke="gray""#), "disk outline expected");
}

#[test]
fn majorize_on_four_cycle_is_a_violation() {
    let o = run(&["majorize", path_str(&fixture("four_cycle.json"))]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert_eq!(v["error"], "not_quadruple");
}

#[test]
fn asymmetric_input_is_rejected_with_location() {
    let o = run(&["check", path_str(&fixture("asymmetric.csv"))]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("(1,2)"), "{err}");
}

#[test]
fn square_fixture_matches_golden_matrix() {
    let parsed = parse_matrix(&fixture("square.csv")).unwrap().metric;
    let golden = parse_matrix(&fixture("square_matrix.json")).unwrap().metric;
    assert_eq!(parsed, golden);
}

#[test]
fn verify_accepts_majorize_output_and_rejects_tampering() {
    let input = fixture("hemisphere.json");
    let o = run(&["majorize", "--kappa", "1", path_str(&input)]);
    let map = tmp("hemisphere-map.json");
    std::fs::write(&map, &o.stdout).unwrap();
    let ok = run(&["verify", path_str(&input), path_str(&map)]);
    assert_eq!(ok.status.code(), Some(0));
    assert_valid("polygon-check.schema.json", &stdout_json(&ok));

    let mut v = stdout_json(&o);
    v["points"][2][0] = Value::from(v["points"][2][0].as_f64().unwrap() + 0.05);
    let bad = tmp("hemisphere-bad.json");
    std::fs::write(&bad, serde_json::to_vec(&v).unwrap()).unwrap();
    let o = run(&["verify", path_str(&input), path_str(&bad)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oracle_suite_report_validates() {
    let o = run(&["oracle", "angle_calculus", "--kappa", "-1", "--trials", "200", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["passed"], 200);
    assert_valid("suite-report.schema.json", &v);
}

#[test]
fn gen_and_snowflake_are_deterministic() {
    let a = run(&["gen", "--model", "sphere", "--n", "6", "--seed", "42"]);
    let b = run(&["gen", "--model", "sphere", "--n", "6", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let file = tmp("gen.json");
    std::fs::write(&file, &a.stdout).unwrap();
    let s = run(&["snowflake", "--alpha", "0.5", path_str(&file)]);
    assert_eq!(s.status.code(), Some(0));
    let orig = stdout_json(&a);
    let snow = stdout_json(&s);
    let (d, e) = (orig["matrix"][0][1].as_f64().unwrap(), snow["matrix"][0][1].as_f64().unwrap());
    assert!((d.sqrt() - e).abs() < 1e-15);
    let csv = run(&["snowflake", "--alpha", "0.5", "--format", "csv", path_str(&file)]);
    assert!(String::from_utf8_lossy(&csv.stdout).starts_with("6\n"));
}

#[test]
fn input_errors_exit_two() {
    let gen = run(&["gen", "--model", "plane", "--n", "3", "--kappa", "1"]);
    assert_eq!(gen.status.code(), Some(2));
    let proj = run(&["majorize", "--projection", "poincare", path_str(&fixture("pentagon.json"))]);
    assert_eq!(proj.status.code(), Some(2));
    let missing = run(&["check", "no-such-file.csv"]);
    assert_eq!(missing.status.code(), Some(2));
    let tol = bin()
        .env("KM_TOL", "-1")
        .args(["check", path_str(&fixture("square.csv"))])
        .output()
        .unwrap();
    assert_eq!(tol.status.code(), Some(2));
}

#[test]
fn tolerance_override_is_applied() {
    // a loose tolerance lets a slightly long diagonal pass
    let file = tmp("near-square.json");
    let r = 2f64.sqrt() + 1e-6;
    let body = format!(r#"{{"matrix": [[0,1,{r},1],[1,0,1,{r}],[{r},1,0,1],[1,{r},1,0]]}}"#);
    std::fs::write(&file, body).unwrap();
    let strict = run(&["check", path_str(&file)]);
    assert_eq!(strict.status.code(), Some(1));
    let loose = bin().env("KM_TOL", "1e-5").args(["check", path_str(&file)]).output().unwrap();
    assert_eq!(loose.status.code(), Some(0));
}
