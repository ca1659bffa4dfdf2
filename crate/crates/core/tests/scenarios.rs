use std::path::PathBuf;
use std::time::{Duration, Instant};

use qcorr::report::{emit_report, Format, ReportDocument};
use qcorr::scenario::{
    bundled_scenarios, load_scenario, parse_params, parse_scenario, run_paper_example,
    run_scenario, scenario_to_json, DecompositionFilter, Scenario, ScenarioError,
};

fn scenarios_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

/// Set `QCORR_BLESS=1` to regenerate the bundled files from the builders.
#[test]
fn bundled_files_match_builders() {
    let bless = std::env::var_os("QCORR_BLESS").is_some();
    for (name, file) in bundled_scenarios() {
        let path = scenarios_dir().join(name);
        let expected = scenario_to_json(&file);
        if bless {
            std::fs::write(&path, &expected).unwrap();
            continue;
        }
        let on_disk =
            std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(
            parse_scenario(&on_disk).unwrap(),
            file,
            "{name} is stale; rerun with QCORR_BLESS=1"
        );
    }
}

#[test]
fn bundled_scenarios_run_quickly_and_pass_product_rule() {
    for (name, _) in bundled_scenarios() {
        let start = Instant::now();
        let s = load_scenario(scenarios_dir().join(name)).unwrap();
        let r = run_scenario(&s, &DecompositionFilter::All).unwrap();
        assert!(
            start.elapsed() < Duration::from_secs(1),
            "{name} took {:?}",
            start.elapsed()
        );
        for split in &r.splits {
            let check = split
                .product_rule
                .as_ref()
                .unwrap_or_else(|| panic!("{name}: no residual"));
            assert!(
                check.pass,
                "{name}/{}: residual {}",
                split.decomposition, check.residual
            );
        }
        assert!(!r.has_engine_failure(), "{name}");
    }
}

#[test]
fn json_report_round_trips() {
    for (name, _) in bundled_scenarios() {
        let s = load_scenario(scenarios_dir().join(name)).unwrap();
        let r = run_scenario(&s, &DecompositionFilter::All).unwrap();
        let json = emit_report(&r, Format::Json);
        let parsed: ReportDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, r, "{name}");
        let reloaded =
            Scenario::from_file(parse_scenario(&scenario_to_json(&parsed.scenario)).unwrap())
                .unwrap();
        assert_eq!(
            run_scenario(&reloaded, &DecompositionFilter::All).unwrap(),
            r,
            "{name}"
        );
    }
}

#[test]
fn params_equal_editing_the_file() {
    let w = [0.1, 0.2, 0.3, 0.4];
    let text = std::fs::read_to_string(scenarios_dir().join("separable.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for (k, wk) in w.iter().enumerate() {
        v["decompositions"][0]["source"]["components"][k]["weight"] = (*wk).into();
    }
    // Diagonal order is row-major: ++, +-, -+, --; weights are for ++, --, +-, -+.
    for (idx, wk) in [(0, w[0]), (3, w[1]), (1, w[2]), (2, w[3])] {
        v["state"][idx][idx][0] = wk.into();
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edited.json");
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    let edited = run_scenario(&load_scenario(&path).unwrap(), &DecompositionFilter::All).unwrap();
    let flagged =
        run_paper_example("i", &parse_params("w1=0.1,w2=0.2,w3=0.3,w4=0.4").unwrap()).unwrap();
    assert_eq!(edited.measures, flagged.measures);
    assert_eq!(edited.splits, flagged.splits);
    assert_eq!(edited.notes, flagged.notes);
}

#[test]
fn trace_not_one_is_a_validation_error() {
    let text = std::fs::read_to_string(scenarios_dir().join("separable.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["state"][0][0][0] = 0.3.into();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let err = load_scenario(&path).unwrap_err();
    assert!(matches!(err, ScenarioError::Validation(_)), "{err:?}");
    assert!(err.to_string().contains("trace ≠ 1"), "{err}");
    assert!(err.to_string().contains("0.9"), "{err}");
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(
        &path,
        "{\n  \"schema\": \"qcorr/1\",\n  \"name\": \"x\",\n  \"mode\": \"quantum\" \"dim\": 4\n}",
    )
    .unwrap();
    match load_scenario(&path).unwrap_err() {
        ScenarioError::Parse { line, column, .. } => {
            assert_eq!(line, 4);
            assert!(column > 1);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn table_output_marks_off_support_cells() {
    let r = run_paper_example("appendix-px", &parse_params("w=1").unwrap()).unwrap();
    let table = emit_report(&r, Format::Table);
    assert!(table.contains("—"), "{table}");
    assert!(
        table.contains("product_rule_residual: <1e-7: PASS"),
        "{table}"
    );
}
