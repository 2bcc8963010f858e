use gcrf::catalog;
use gcrf::cli::{run, Outcome, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};
use gcrf::io::{DefinitionFile, InputError};
use std::path::Path;

fn gcrf(args: &[&str]) -> Outcome {
    run(std::iter::once("gcrf").chain(args.iter().copied()))
}

fn json_reports(out: &Outcome) -> Vec<serde_json::Value> {
    serde_json::from_str::<Vec<serde_json::Value>>(&out.stdout).expect("json report")
}

const R3_TEMPLATE: &str = r#"{
  "manifold": {"dim": 3, "box": [[-1, 1], [-1, 1], [-1, 1]], "periodic": [false, false, false]},
  "fields": {
    "A": [["0", "-1", "0"], ["1", "0", "0"], ["0", "0", "0"]],
    "pi": [["0", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]],
    "sigma": SIGMA
  },
  "checks": ["axioms", "integrability"],
  "samples": 20
}"#;

fn with_sigma(sigma: &str) -> String {
    R3_TEMPLATE.replace("SIGMA", sigma)
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn catalog_list_names_every_fixture() {
    let out = gcrf(&["catalog", "list"]);
    assert_eq!(out.code, EXIT_PASS);
    for name in catalog::list() {
        assert!(out.stdout.contains(name), "{name}");
    }
}

#[test]
fn crfk_torus_passes_the_metric_checks() {
    let out = gcrf(&["check", "catalog:crfk-torus", "--checks", "axioms,integrability,metric-compat,crfk"]);
    assert_eq!(out.code, EXIT_PASS, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("4 checks, 0 failed"));
}

#[test]
fn antiholomorphic_nirenberg_fails_classical_crf() {
    let out = gcrf(&["check", "catalog:nirenberg-antiholo", "--checks", "classical-crf", "--report", "json"]);
    assert_eq!(out.code, EXIT_FAIL);
    let reports = json_reports(&out);
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["check"], "classical-crf");
    assert_eq!(reports[0]["pass"], false);
    assert!(reports[0]["residual"].as_f64().unwrap() > 1e-9);
    let keys: Vec<&str> = reports[0].as_object().unwrap().keys().map(|k| k.as_str()).collect();
    for key in ["check", "residual", "point", "pass", "millis"] {
        assert!(keys.contains(&key), "{key}");
    }
}

#[test]
fn fixed_seed_reports_are_byte_identical() {
    let args = ["check", "catalog:bihermitian-r4", "--samples", "30", "--seed", "9", "--report", "json", "--no-timing"];
    let a = gcrf(&args);
    let b = gcrf(&args);
    assert_eq!(a.code, EXIT_PASS);
    assert_eq!(a.stdout, b.stdout);
    let c = gcrf(&["check", "catalog:bihermitian-r4", "--samples", "30", "--seed", "10", "--report", "json", "--no-timing"]);
    assert_ne!(a.stdout, c.stdout, "a different seed samples different points");
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["check".into(), dir.path().join("missing.json").to_string_lossy().into_owned()],
        vec!["check".into(), "catalog:no-such-fixture".into()],
        vec!["check".into(), "catalog:flat-kahler-r2".into(), "--checks".into(), "warp-drive".into()],
        vec!["check".into(), "catalog:flat-kahler-r2".into(), "--samples".into(), "0".into()],
        vec!["check".into(), "catalog:flat-kahler-r2".into(), "--tol".into(), "0".into()],
        vec!["check".into(), write(dir.path(), "broken.json", "{ not json")],
        vec!["catalog".into(), "run".into(), "nope".into()],
        vec!["frobnicate".into()],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let out = gcrf(&refs);
        assert_eq!(out.code, EXIT_INPUT, "{args:?}: {}", out.stdout);
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unmet_preconditions_are_input_errors() {
    // the torus reductions have a kernel, so the Gualtieri form does not apply
    let out = gcrf(&["check", "catalog:crfk-torus", "--checks", "gualtieri", "--samples", "10"]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("precondition"), "{}", out.stderr);
}

#[test]
fn non_antisymmetric_sigma_is_a_schema_error_naming_sigma() {
    let src = with_sigma(r#"[["0", "1", "0"], ["1", "0", "0"], ["0", "0", "0"]]"#);
    let err = DefinitionFile::from_json(&src).and_then(|f| f.validate()).unwrap_err();
    match &err {
        InputError::Schema { path, .. } => assert!(path.contains("sigma"), "{path}"),
        other => panic!("expected schema error, got {other}"),
    }
    let dir = tempfile::tempdir().unwrap();
    let out = gcrf(&["check", &write(dir.path(), "sym.json", &src)]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("sigma"));
}

#[test]
fn dimension_mismatch_is_a_schema_error() {
    let src = with_sigma(r#"[["0", "1"], ["-1", "0"]]"#);
    let err = DefinitionFile::from_json(&src).and_then(|f| f.validate()).unwrap_err();
    assert!(matches!(err, InputError::Schema { .. }), "{err}");
    assert!(err.to_string().contains("sigma"), "{err}");
}

#[test]
fn unknown_keys_are_rejected() {
    let src = with_sigma(r#"[["0", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]]"#).replace("\"samples\"", "\"sampels\"");
    assert!(matches!(DefinitionFile::from_json(&src), Err(InputError::Json(_))));
}

#[test]
fn expression_errors_carry_path_and_position() {
    let src = with_sigma(r#"[["0", "x1 +* x2", "0"], ["0", "0", "0"], ["0", "0", "0"]]"#);
    let err = DefinitionFile::from_json(&src).and_then(|f| f.validate()).unwrap_err();
    match &err {
        InputError::Expression { path, .. } => assert!(path.contains("sigma"), "{path}"),
        other => panic!("expected expression error, got {other}"),
    }
    assert!(err.to_string().contains("position"), "{err}");
}

#[test]
fn valid_file_runs_its_own_checks() {
    let dir = tempfile::tempdir().unwrap();
    let src = with_sigma(r#"[["0", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]]"#);
    let out = gcrf(&["check", &write(dir.path(), "ok.json", &src), "--report", "json"]);
    assert_eq!(out.code, EXIT_PASS, "{}", out.stderr);
    let names: Vec<String> = json_reports(&out).iter().map(|r| r["check"].as_str().unwrap().to_string()).collect();
    assert_eq!(names, vec!["axioms", "integrability"]);
}

#[test]
fn exported_fixtures_reproduce_catalog_results() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["crfk-torus", "nirenberg-antiholo", "contact-r3", "sasaki-r3-broken", "bihermitian-r4", "cosymplectic-t3"] {
        let path = dir.path().join(format!("{name}.json")).to_string_lossy().into_owned();
        let target = format!("catalog:{name}");
        assert_eq!(gcrf(&["export", &target, &path]).code, EXIT_PASS);
        let common = ["--samples", "25", "--report", "json", "--no-timing"];
        let direct = gcrf(&[&["check", target.as_str()][..], &common[..]].concat());
        let reloaded = gcrf(&[&["check", path.as_str()][..], &common[..]].concat());
        assert_eq!(direct.code, reloaded.code, "{name}");
        assert_eq!(direct.stdout, reloaded.stdout, "{name}");
        // a second export of the reloaded file is a fixpoint
        let again = dir.path().join(format!("{name}-again.json")).to_string_lossy().into_owned();
        assert_eq!(gcrf(&["export", &path, &again]).code, EXIT_PASS);
        assert_eq!(std::fs::read_to_string(&path).unwrap(), std::fs::read_to_string(&again).unwrap());
    }
}

#[test]
fn catalog_run_reports_expected_verdicts() {
    let out = gcrf(&["catalog", "run", "nirenberg-antiholo", "--samples", "20"]);
    assert_eq!(out.code, EXIT_PASS, "{}", out.stdout);
    assert!(out.stdout.contains("expected fail ok"));
    assert!(!out.stdout.contains("MISMATCH"));
}
