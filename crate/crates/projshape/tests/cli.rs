use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn data(name: &str) -> String {
    manifest_dir().join("tests/data").join(name).to_string_lossy().into_owned()
}

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn projshape(args: &[&str]) -> Output {
    projshape_env(args, &[])
}

fn projshape_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_projshape"));
    cmd.args(args).env_remove("PROJSHAPE_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Output {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json_ok(args: &[&str]) -> Value {
    let out = projshape(args);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    assert!(out.stderr.is_empty());
    assert_eq!(out.stdout.lines().count(), 1, "one document per invocation");
    serde_json::from_str(&out.stdout).unwrap()
}

fn close(a: &Value, b: &Value, path: &str) -> Result<(), String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            if (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())) {
                Ok(())
            } else {
                Err(format!("{path}: {x} != {y}"))
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                return Err(format!("{path}: lengths {} != {}", x.len(), y.len()));
            }
            x.iter().zip(y).enumerate().try_for_each(|(i, (a, b))| close(a, b, &format!("{path}[{i}]")))
        }
        (Value::Object(x), Value::Object(y)) => {
            if x.keys().ne(y.keys()) {
                return Err(format!("{path}: keys differ"));
            }
            x.iter().try_for_each(|(k, v)| close(v, &y[k], &format!("{path}.{k}")))
        }
        _ if a == b => Ok(()),
        _ => Err(format!("{path}: {a} != {b}")),
    }
}

/// Compares against `tests/golden/<name>.json`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, actual: &Value) {
    let path = manifest_dir().join("tests/golden").join(format!("{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, serde_json::to_string_pretty(actual).unwrap() + "\n").unwrap();
    }
    let expected: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    if let Err(e) = close(actual, &expected, name) {
        panic!("golden mismatch: {e}");
    }
}

fn schema(name: &str) -> Value {
    let path = manifest_dir().join("schemas").join(format!("{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn validates(name: &str, doc: &Value) {
    let validator = jsonschema::validator_for(&schema(name)).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

#[test]
fn published_schemas_are_current() {
    for (name, schema) in projshape::report::schemas() {
        let path = manifest_dir().join("schemas").join(format!("{name}.schema.json"));
        let text = serde_json::to_string_pretty(&schema).unwrap() + "\n";
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::write(&path, &text).unwrap();
        }
        assert_eq!(std::fs::read_to_string(&path).unwrap(), text, "{name} schema is stale");
    }
}

#[test]
fn tyler_numbers_2_6() {
    let v = json_ok(&["tyler-numbers", "2", "6"]);
    assert_eq!(v["t"], serde_json::json!([1, 3]));
    assert_eq!(v["hausdorff"], true);
    assert_eq!(v["maximal"], false);
    assert_eq!(v["gcd"], 3);
    validates("tyler-numbers", &v);
    golden("tyler_numbers_2_6", &v);
}

#[test]
fn tyler_numbers_maximal_when_gcd_small() {
    let v = json_ok(&["tyler-numbers", "3", "6"]);
    assert_eq!(v["t"], serde_json::json!([1, 2, 4]));
    assert_eq!(v["maximal"], true);
    assert_eq!(v["gcd"], 2);
}

#[test]
fn check_sn_violation() {
    let v = json_ok(&["check-sn", "2", "6", "2,4"]);
    assert_eq!(v["hausdorff"], false);
    assert_eq!(v["violating_j"], 2);
    assert_eq!(v["maximal"], Value::Null);
    validates("subspace-numbers", &v);
    golden("check_sn_2_6_2_4", &v);
}

#[test]
fn check_sn_accepts_tyler_numbers() {
    let v = json_ok(&["check-sn", "2", "6", "1,3"]);
    assert_eq!(v["hausdorff"], true);
    assert_eq!(v["maximal"], false);
    validates("subspace-numbers", &v);
}

#[test]
fn analyze_concurrent_lines() {
    let v = json_ok(&["analyze", &data("concurrent_lines.json")]);
    assert_eq!(v["free"], true);
    assert_eq!(v["splittable"], false);
    assert_eq!(v["frame"], Value::Null);
    assert_eq!(v["pseudo_frame"]["base"], serde_json::json!([1, 2, 3, 4]));
    assert_eq!(v["chart"]["dimension"], 6);
    assert_eq!(
        v["flats"]["2"],
        serde_json::json!([
            {"indices": [1, 2, 5], "rank": 2},
            {"indices": [1, 3, 6], "rank": 2},
            {"indices": [1, 4, 7], "rank": 2}
        ])
    );
    validates("analysis", &v);
    golden("analyze_concurrent_lines", &v);
}

#[test]
fn analyze_standard_frame() {
    let v = json_ok(&["analyze", &data("standard_frame.json")]);
    assert_eq!(v["general_position"], true);
    assert_eq!(v["frame"], serde_json::json!([1, 2, 3, 4, 5]));
    assert_eq!(v["chart"]["dimension"], 0);
    validates("analysis", &v);
    golden("analyze_standard_frame", &v);
}

#[test]
fn csv_and_json_inputs_agree() {
    let a = json_ok(&["analyze", &data("concurrent_lines.json")]);
    let b = json_ok(&["analyze", &data("concurrent_lines.csv")]);
    assert_eq!(a, b);
}

#[test]
fn analyze_splittable_reports_witness() {
    let v = json_ok(&["analyze", &data("double_pair.json"), "--sn", "1"]);
    assert_eq!(v["splittable"], true);
    assert_eq!(v["free"], false);
    assert_eq!(v["graph"]["connected"], false);
    assert_eq!(v["pseudo_frame"], Value::Null);
    assert_eq!(v["standardizable"]["class"], "balanced_splittable");
    assert_eq!(v["subspace_numbers"]["satisfied"], false);
    validates("analysis", &v);
}

#[test]
fn analyze_writes_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    json_ok(&["analyze", &data("concurrent_lines.json"), "--dot", dot.to_str().unwrap()]);
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.starts_with("graph G {"));
    assert_eq!(text.matches(" -- ").count(), 3);
}

#[test]
fn witness_pair() {
    let v = json_ok(&["witness", "1", "4"]);
    assert_eq!(v["p_free"], true);
    assert_eq!(v["q_free"], true);
    assert_eq!(v["shape_equal"], false);
    assert_eq!(v["speeds"], serde_json::json!({"rows": [0, 1], "cols": [0, 1]}));
    validates("block-pair", &v);
    golden("witness_1_4", &v);
}

#[test]
fn merge_residuals_shrink() {
    let v = json_ok(&["merge", "1", "4", "--terms", "4"]);
    validates("sequence", &v);
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 4);
    for t in terms {
        let n = t["n"].as_f64().unwrap();
        for r in t["residuals"].as_array().unwrap() {
            assert!((r.as_f64().unwrap() - 1.0 / n).abs() < 1e-12);
        }
    }
    golden("merge_1_4", &v);
}

#[test]
fn blur_of_double_pair() {
    let v = json_ok(&["blur", &data("double_pair.json"), "--terms", "3"]);
    validates("sequence", &v);
    assert_eq!(v["kind"], "blur");
    assert_eq!(v["terms"].as_array().unwrap().len(), 3);
}

#[test]
fn standardize_and_distance() {
    let v = json_ok(&["standardize", &data("standard_frame.json")]);
    validates("standardization", &v);
    assert!(v["residual"].as_f64().unwrap() < 1e-10);
    let d = json_ok(&["distance", &data("concurrent_lines.json"), &data("concurrent_lines.csv")]);
    validates("distance", &d);
    assert_eq!(d["distance"], 0.0);
    assert_eq!(d["metric_regime"], true);
}

#[test]
fn generate_round_trips_through_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let out = projshape(&["generate", "2", "7", "--seed", "5", "--constraint", "1,2,3:2"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let g: Value = serde_json::from_str(&out.stdout).unwrap();
    validates("generated", &g);
    validates("configuration", &g);
    std::fs::write(&path, &out.stdout).unwrap();
    let v = json_ok(&["analyze", path.to_str().unwrap()]);
    assert_eq!(v["flats"]["2"], serde_json::json!([{"indices": [1, 2, 3], "rank": 2}]));
    assert_eq!(projshape(&["generate", "2", "7", "--seed", "5", "--constraint", "1,2,3:2"]).stdout, out.stdout);
}

#[test]
fn help_and_version_exit_zero() {
    for args in [&["--help"][..], &["--version"], &["analyze", "--help"]] {
        let out = projshape(args);
        assert_eq!(out.code, 0);
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let cases: Vec<Vec<String>> = vec![
        vec!["bogus".into()],
        vec!["tyler-numbers".into(), "two".into(), "6".into()],
        vec!["check-sn".into(), "2".into(), "6".into(), "1".into()],
        vec!["check-sn".into(), "2".into(), "6".into(), "3,3".into()],
        vec!["analyze".into(), data("zero_row.json")],
        vec!["analyze".into(), data("ragged.csv")],
        vec!["analyze".into(), "/nonexistent/file.json".into()],
        vec!["generate".into(), "2".into(), "6".into(), "--constraint".into(), "0,1:1".into()],
        vec!["witness".into(), "2".into(), "4".into()],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = projshape(&args);
        assert_eq!(out.code, 2, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn domain_errors_exit_one() {
    let out = projshape(&["standardize", &data("single_pair.json"), "--max-iter", "50"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.starts_with("error: not standardizable"));
    let out = projshape(&["blur", &data("standard_frame.json")]);
    assert_eq!(out.code, 1);
}

#[test]
fn tolerance_from_environment() {
    let out = projshape_env(&["tyler-numbers", "2", "6"], &[("PROJSHAPE_TOL", "nope")]);
    assert_eq!(out.code, 2);
    let out = projshape_env(&["analyze", &data("concurrent_lines.json")], &[("PROJSHAPE_TOL", "1e-6")]);
    assert_eq!(out.code, 0);
}

#[test]
fn golden_files_exist() {
    for name in ["tyler_numbers_2_6", "check_sn_2_6_2_4", "analyze_concurrent_lines", "analyze_standard_frame", "witness_1_4", "merge_1_4"] {
        assert!(Path::new(&manifest_dir().join("tests/golden").join(format!("{name}.json"))).exists());
    }
}
