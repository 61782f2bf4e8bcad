use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use subspace_core::experiments::DefectReport;
use subspace_core::quang::CombinationCertificate;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subspace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "status {:?}, stderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

const P1_CONFIG: &str = r#"{
  "ambient_dim": 1,
  "arrangements": [
    {"place": "inf", "targets": [{"linear": [1, 0]}, {"linear": [0, 1]}, {"linear": [1, -1]}]},
    {"place": "2", "targets": [{"linear": [1, 0]}, {"linear": [0, 1]}, {"linear": [1, -1]}]}
  ],
  "l": 2,
  "epsilon": "1/2",
  "height_window": [0.0, 4.0],
  "sample_count": 300,
  "seed": 11
}"#;

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn height_prints_canonical_point_and_log_5() {
    let v = json(&run(&["height", "[4,6,10]"]));
    assert_eq!(v["canonical"], "[2:3:5]");
    assert_eq!(v["point"], serde_json::json!(["2", "3", "5"]));
    assert!((v["height"].as_f64().unwrap() - 5f64.ln()).abs() < 1e-15);
}

#[test]
fn negative_position_verdict_is_data() {
    let out = run(&["position", "check", "--forms", "[[1,0,0],[0,1,0],[1,1,0]]", "--l", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"], false);
    assert_eq!(v["witnesses"][0]["indices"], serde_json::json!([1, 2, 3]));
}

#[test]
fn rejected_arrangement_exits_2() {
    let out = run(&["quang", "combine", "--forms", "[[1,0,0],[0,1,0],[1,1,0]]"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("subgeneral"));
}

#[test]
fn error_classes_map_to_exit_codes() {
    assert_eq!(code(&run(&["no-such-command"])), 64);
    assert_eq!(code(&run(&["height", "[1,"])), 64);
    assert_eq!(code(&run(&["norm", "abc"])), 64);
    assert_eq!(code(&run(&["height", "[0,0,0]"])), 65);
    assert_eq!(code(&run(&["norm", "0"])), 65);
    assert_eq!(code(&run(&["weil", "--point", "[0,1]", "--hyperplane", "[1,0]"])), 65);
    assert_eq!(code(&run(&["height", "/nonexistent/point.json"])), 66);
    assert_eq!(code(&run(&["height", "[1,2]", "--out", "/nonexistent/dir/x.json"])), 66);
}

#[test]
fn help_lists_every_subcommand() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in [
        "norm", "height", "weil", "position", "quang", "seshadri", "experiment", "chain", "delta",
    ] {
        assert!(text.contains(&format!("  {cmd} ")), "{cmd} missing from help");
    }
}

#[test]
fn norm_reports_exact_product_formula() {
    let v = json(&run(&["norm", "-12/35"]));
    assert_eq!(v["product_formula_exact"], true);
    assert_eq!(v["finite_ledger"], serde_json::json!([[2, 2], [3, 1], [5, -1], [7, -1]]));
    let places: Vec<&str> = v["norms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["place"].as_str().unwrap())
        .collect();
    assert_eq!(places, ["inf", "p=2", "p=3", "p=5", "p=7"]);
}

#[test]
fn weil_single_and_batch() {
    let v = json(&run(&[
        "weil", "--point", "[1,4]", "--hyperplane", "[1,0]", "--place", "inf", "--place", "2",
    ]));
    assert!((v["values"][0]["value"].as_f64().unwrap() - 4f64.ln()).abs() < 1e-15);
    assert_eq!(v["values"][1]["exact"], serde_json::json!({"prime": 2, "exponent": 0}));

    let dir = tempfile::tempdir().unwrap();
    let manifest = write(
        dir.path(),
        "m.json",
        r#"{"points": [[2,1],[0,1]], "targets": [{"linear": [1,-1]}, {"linear": [1,0]}], "places": ["inf", "p=2"]}"#,
    );
    let out = run(&["weil", "--manifest", &manifest, "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "point,target,place,value,exact_ledger");
    assert_eq!(lines.len(), 1 + 2 * 2 * 2);
    assert!(lines.contains(&"[0:1],x0,inf,inf,support"));

    let v = json(&run(&["weil", "--manifest", &manifest]));
    assert_eq!(v.as_array().unwrap().len(), 8);
}

#[test]
fn strict_mode_rejects_points_on_a_component() {
    let sub = r#"{"label": "Y", "components": [
        {"dim": 2, "degree": 1, "terms": [{"exponents": [1,0,0], "coeff": 1}]},
        {"dim": 2, "degree": 1, "terms": [{"exponents": [0,1,0], "coeff": 1}]}]}"#;
    assert_eq!(code(&run(&["weil", "--point", "[0,1,1]", "--subscheme", sub])), 0);
    assert_eq!(code(&run(&["weil", "--point", "[0,1,1]", "--subscheme", sub, "--strict"])), 65);
}

#[test]
fn quang_certificate_round_trips_and_verifies() {
    let out = run(&[
        "quang", "combine", "--forms", "[[1,0,0],[0,1,0],[1,-1,0]]", "--subvariety", "[[0,0,1]]",
        "--place", "inf", "--place", "3",
    ]);
    assert_eq!(code(&out), 0);
    let cert: CombinationCertificate = serde_json::from_slice(&out.stdout).unwrap();
    cert.verify().unwrap();
    assert_eq!((cert.l, cert.n), (2, 1));
    assert_eq!(cert.constants.len(), 2);
}

#[test]
fn chain_check_passes_on_worked_example() {
    let v = json(&run(&[
        "chain", "check", "--forms", "[[1,0,0],[0,1,0],[1,-1,0]]", "--subvariety", "[[0,0,1]]",
        "--point", "[1,2,0]", "--points", "[[3,5,0],[4,-1,0]]", "--place", "inf", "--place", "2",
    ]));
    let recs = v.as_array().unwrap();
    assert_eq!(recs.len(), 6);
    assert!(recs.iter().all(|r| r["pass"] == true && r["sorted"] == true));
}

#[test]
fn seshadri_and_delta() {
    let v = json(&run(&["seshadri", "--target", r#"{"linear": [1,2,3]}"#]));
    assert_eq!(v["value"], "1");
    let v = json(&run(&["delta", "--l", "3", "--n", "2", "--epsilon", "1/10"]));
    assert_eq!(v["delta"], "1/128");
    assert_eq!(code(&run(&["delta", "--l", "1", "--n", "2", "--epsilon", "1/10"])), 65);
}

#[test]
fn experiment_is_byte_stable_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", P1_CONFIG);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let out_a = run(&["experiment", "run", "--config", &cfg, "--out", a.to_str().unwrap()]);
    let out_b = run(&[
        "experiment", "run", "--config", &cfg, "--out", b.to_str().unwrap(), "--workers", "3",
    ]);
    assert_eq!(code(&out_a), 0);
    assert_eq!(code(&out_b), 0);
    let (ba, bb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ba, bb);
    let report: DefectReport = serde_json::from_slice(&ba).unwrap();
    assert_eq!(report.seed, 11);
    assert!(report.evaluated > 0);
    assert_eq!(report.chain_check.failed, 0);

    let c = dir.path().join("c.json");
    run(&["experiment", "run", "--config", &cfg, "--out", c.to_str().unwrap(), "--seed", "12"]);
    let other: DefectReport = serde_json::from_slice(&fs::read(&c).unwrap()).unwrap();
    assert_eq!(other.seed, 12);

    let out = run(&["experiment", "run", "--config", &cfg, "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("point,height,weighted_sum,ratio,violator\n"));
}

#[test]
fn baseline_runs_on_general_arrangements() {
    let cfg = r#"{"ambient_dim": 1,
        "arrangements": [{"place": "inf", "targets": [{"linear": [1,0]}, {"linear": [0,1]}]}],
        "l": 1, "epsilon": "1", "height_window": [0.0, 3.0], "sample_count": 100, "seed": 2}"#;
    let v = json(&run(&["experiment", "baseline", "--config", cfg]));
    assert_eq!(v["kind"], "baseline");
}

#[test]
fn partial_sample_exits_3_with_report() {
    let cfg = r#"{"ambient_dim": 2,
        "arrangements": [{"place": "inf", "targets": [
            {"linear": [1,0,0]}, {"linear": [0,1,0]}, {"linear": [0,0,1]}, {"linear": [1,1,1]}]}],
        "l": 3, "epsilon": "1/2", "height_window": [0.0, 0.5], "sample_count": 100, "seed": 1}"#;
    let out = run(&["experiment", "run", "--config", cfg]);
    assert_eq!(code(&out), 3);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sample"]["partial"], true);
}

#[test]
fn unknown_config_fields_are_rejected() {
    let cfg = P1_CONFIG.replacen("\"l\": 2", "\"l\": 2, \"bogus\": 1", 1);
    assert_eq!(code(&run(&["experiment", "run", "--config", &cfg])), 65);
}
