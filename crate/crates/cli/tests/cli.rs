use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn symval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symval"))
        .args(args)
        .env_remove("SYMVAL_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> Value {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("symval-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn check_golden(args: &[&str], name: &str) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = symval(&full);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let got: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(got, golden(name), "{args:?}");
}

#[test]
fn critical_text() {
    let o = symval(&["critical", "--n", "1", "--k", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1 2 3 4 5 6 7 8 9 10 11");
}

#[test]
fn cohomology_range_text() {
    let o = symval(&["cohomology", "--range", "4"]);
    assert_eq!(stdout(&o).trim(), "b=4 t=5");
}

#[test]
fn golden_documents() {
    check_golden(&["critical", "--n", "1", "--k", "12"], "critical_n1_k12.json");
    check_golden(&["cohomology", "--range", "4"], "cohomology_range4.json");
    check_golden(&["predict", "--n", "2", "--k", "12", "--m", "12"], "predict_n2_k12_m12.json");
    check_golden(&["coeffs", "--n", "1", "--count", "10"], "coeffs_delta_10.json");
    check_golden(&["euler", "--n", "2", "--p", "2"], "euler_sym2_p2.json");
    check_golden(&["character", "--char", "5:[2]", "--prec", "96"], "character_5_2.json");
    check_golden(
        &["verify", "twist", "--n", "1", "--char", "5:[2]", "--m", "11", "--prec", "150"],
        "twist_n1_m11.json",
    );
}

#[test]
fn report_schema() {
    let o = symval(&[
        "verify", "deligne", "--n", "3", "--pairs", "12,14;14,16", "--prec", "150", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["test", "inputs", "recognized", "status", "precision"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["status"], "pass");
    assert_eq!(v["recognized"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(symval(&["bogus"]).status.code(), Some(64));
    assert_eq!(symval(&["critical", "--n", "1", "--k", "12", "--nope"]).status.code(), Some(64));
    assert_eq!(symval(&["critical", "--n", "x", "--k", "12"]).status.code(), Some(64));
    assert_eq!(symval(&["--help"]).status.code(), Some(0));
}

#[test]
fn errors_exit_1() {
    let o = symval(&["character", "--char", "5:[x]"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    assert_eq!(symval(&["critical", "--n", "1", "--k", "12", "--prec", "32"]).status.code(), Some(1));
}

#[test]
fn large_n_is_inconclusive() {
    let o = symval(&["verify", "deligne", "--n", "9", "--pairs", "10,12", "--format", "json"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "inconclusive");
}

#[test]
fn fault_injection_fails() {
    let base = ["verify", "dihedral", "--n", "2", "--s", "3", "--bound", "300"];
    assert_eq!(symval(&base).status.code(), Some(0));
    let mut omit = base.to_vec();
    omit.push("--omit-abelian");
    assert_eq!(symval(&omit).status.code(), Some(1));
}

#[test]
fn config_precedence() {
    let p = scratch("prec.toml");
    std::fs::write(&p, "precision_bits = 300\noutput_format = \"json\"\n").unwrap();
    let cfg = p.to_str().unwrap();
    let v: Value = serde_json::from_str(&stdout(&symval(&["--config", cfg, "lvalue", "--zeta", "--s", "2"]))).unwrap();
    assert_eq!(v["precision"], 300);
    let o = Command::new(env!("CARGO_BIN_EXE_symval"))
        .args(["lvalue", "--zeta", "--s", "2", "--prec", "150"])
        .env("SYMVAL_CONFIG", cfg)
        .output()
        .unwrap();
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["precision"], 150);

    let bad = scratch("bad.toml");
    std::fs::write(&bad, "precision_bits = 200\nheight_cap = [\n").unwrap();
    let o = symval(&["--config", bad.to_str().unwrap(), "critical", "--n", "1", "--k", "12"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn lvalue_csv_export() {
    let p = scratch("zeta.csv");
    let o = symval(&["lvalue", "--zeta", "--s", "2", "--s", "4", "--csv", p.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&p).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let re: Vec<f64> = rows.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    let pi = std::f64::consts::PI;
    assert!((re[0] - pi * pi / 6.0).abs() < 1e-14);
    assert!((re[1] - pi.powi(4) / 90.0).abs() < 1e-14);
}

#[test]
fn fecheck_passes() {
    let o = symval(&["fecheck", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn form_from_file() {
    let p = scratch("delta.json");
    let listed: Value = serde_json::from_slice(&symval(&["coeffs", "--count", "60", "--format", "json"]).stdout).unwrap();
    let doc = serde_json::json!({"level": 1, "weight": 12, "coefficients": listed["coefficients"]});
    std::fs::write(&p, doc.to_string()).unwrap();
    let o = symval(&["euler", "--form", p.to_str().unwrap(), "--n", "2", "--p", "2", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v, golden("euler_sym2_p2.json"));
}
