use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(args: &[&str]) -> (i32, String) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = Command::new(env!("CARGO_BIN_EXE_gkdeform")).args(args).arg("--out").arg(&out).output().unwrap();
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    (status.status.code().unwrap(), text)
}

fn run_file(mode: &str, file: &str) -> (i32, Value) {
    let p = scenario(file);
    let (code, text) = run(&[mode, "--scenario", p.to_str().unwrap()]);
    (code, serde_json::from_str(&text).unwrap_or(Value::Null))
}

fn write_tmp(dir: &tempfile::TempDir, body: &str) -> String {
    let p = dir.path().join("s.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn identities_mode_passes() {
    let (code, r) = run_file("identities", "identities.json");
    assert_eq!(code, 0);
    assert_eq!(r["schema_version"], 1);
    let checks = r["result"]["checks"].as_array().unwrap();
    assert!(checks.len() >= 5);
    assert!(checks.iter().all(|c| c["passed"] == true && c["trials"] == 50 && c["cite"].is_string()));
}

#[test]
fn mc_mode_rows_have_zero_residual() {
    let (code, r) = run_file("mc", "mc_constant.json");
    assert_eq!(code, 0);
    let rows = r["result"]["orders"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|x| x["residual_zero"] == true && x["fixed_point_zero"] == true));
    assert!(r["result"]["majorant"]["rows"].as_array().unwrap().iter().all(|x| x["dominance"] == true));
    assert!(r["result"]["majorant"]["c"]["num"].is_string());
}

#[test]
fn kuranishi_obstruction_is_data() {
    let (code, r) = run_file("kuranishi", "kuranishi_constant.json");
    assert_eq!(code, 0);
    assert_eq!(r["result"]["all_vanishing"], true);
    let (code, r) = run_file("kuranishi", "kuranishi_obstructed.json");
    assert_eq!(code, 0);
    assert_eq!(r["result"]["all_vanishing"], false);
}

#[test]
fn biherm_constant_scenario() {
    let (code, r) = run_file("biherm", "constant_beta_n2.json");
    assert_eq!(code, 0);
    let res = &r["result"];
    assert_eq!(res["first_order"]["pass"], true);
    assert_eq!(res["bihermitian"]["torsion_pm"], true);
    assert_eq!(res["bihermitian"]["torsion_db"], true);
    assert_eq!(res["conditions"].as_array().unwrap().len(), 4);
    assert_eq!(res["first_order"]["coefficient"]["re"]["num"], "4");
    assert_eq!(res["first_order"]["stated_coefficient_matches"], false);
    assert_eq!(r["non_reproducible"].as_array().unwrap().len(), 2);
}

#[test]
fn surfaces_mode_and_alias() {
    let (code, r) = run_file("surfaces", "surfaces.json");
    assert_eq!(code, 0);
    assert_eq!(r["result"]["all_match"], true);
    let rows = r["result"]["rows"].as_array().unwrap();
    assert!(rows.iter().all(|x| x["matches"] == true && !x["chain"].as_array().unwrap().is_empty()));
    let (code, _) = run(&["surface-invariants"]);
    assert_eq!(code, 0);
}

#[test]
fn reports_are_deterministic() {
    let p = scenario("identities.json");
    let a = run(&["identities", "--scenario", p.to_str().unwrap(), "--seed", "3"]);
    let b = run(&["identities", "--scenario", p.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap(), a.1);
}

#[test]
fn schema_violations_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        r#"{"n": 2, "colour": 1}"#,
        r#"{"n": 7}"#,
        r#"{"schema": 2}"#,
        r#"{"order": 0}"#,
        r#"{"beta": [{"k": [0, 0], "word": 3, "re": {"num": "1"}}]}"#,
        r#"{"omega": [{"i": 0, "j": 1, "value": {"num": "-1"}}]}"#,
        r#"{"mode": "mc"}"#,
        r#"not json"#,
    ] {
        let p = write_tmp(&dir, body);
        let (code, _) = run(&["biherm", "--scenario", &p]);
        assert_eq!(code, 2, "{body}");
    }
    let (code, _) = run(&["mc"]);
    assert_eq!(code, 2);
}

#[test]
fn mode_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // A nonconstant (2,0) wave is not d_L-closed.
    let p = write_tmp(&dir, r#"{"beta": [{"k": [1, 0, 0, 0], "word": 3, "re": {"num": "1"}}]}"#);
    let (code, text) = run(&["mc", "--scenario", &p]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["passed"], false);
}
