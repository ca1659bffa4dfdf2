use std::path::PathBuf;
use std::process::{Command, Output};

fn qcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr"))
        .args(args)
        .output()
        .unwrap()
}

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn run_separable_json_has_unit_entanglement() {
    let out = qcorr(&["--format", "json", "run", &scenario("separable.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rho_e = v["splits"][0]["rho_e"]["values"].as_array().unwrap();
    assert!(rho_e
        .iter()
        .all(|x| (x.as_f64().unwrap() - 1.0).abs() < 1e-12));
}

#[test]
fn paper_example_table_has_residual_line() {
    let out = qcorr(&["paper-example", "iii", "--decomposition", "mixed-basis"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("product_rule_residual: <1e-7: PASS"),
        "{text}"
    );
    assert!(text.contains("0.666667"), "{text}");
}

#[test]
fn params_override_defaults() {
    let out = qcorr(&[
        "--format",
        "json",
        "paper-example",
        "ii",
        "--params",
        "w1=1,w2=0,w3=0,w4=0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rho_t: Vec<f64> = v["splits"][0]["rho_t"]["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    for (x, y) in rho_t.iter().zip([2.0, 0.0, 0.0, 2.0]) {
        assert!((x - y).abs() < 1e-9, "{rho_t:?}");
    }
}

#[test]
fn validation_errors_exit_one_with_json_object() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = std::fs::read_to_string(scenario("separable.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["state"][0][0][0] = 0.3.into();
    std::fs::write(&path, v.to_string()).unwrap();
    let out = qcorr(&["--format", "json", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(err["error"]["kind"], "validation");
    assert!(err["error"]["message"]
        .as_str()
        .unwrap()
        .contains("trace ≠ 1"));

    let out = qcorr(&["paper-example", "iv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_and_selftest_succeed() {
    let out = qcorr(&["validate", &scenario("fuzzy_classical.json")]);
    assert_eq!(out.status.code(), Some(0));
    let out = qcorr(&["selftest", "--seed", "3", "--trials", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("seed 3"));
}

#[test]
fn emit_scenario_matches_bundled_file() {
    let out = qcorr(&["paper-example", "iii-mixed", "--emit-scenario"]);
    assert_eq!(out.status.code(), Some(0));
    let bundled = std::fs::read_to_string(scenario("degenerate_mixed.json")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), bundled);
}
