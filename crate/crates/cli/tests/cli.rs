use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nilsoliton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilsoliton")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn catalog_file(dir: &Path, name: &str, params: &[&str]) -> String {
    let path = dir.join(format!("{name}.json"));
    let mut args = vec!["catalog", "get", name];
    if !params.is_empty() {
        args.push("--params");
        args.extend_from_slice(params);
    }
    let out = nilsoliton(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    fs::write(&path, &out.stdout).unwrap();
    path.to_string_lossy().into_owned()
}

fn verdict(path: &str) -> String {
    stdout_json(&nilsoliton(&["check", path]))["verdict"].as_str().unwrap().to_string()
}

#[test]
fn check_verdicts_on_catalog_files() {
    let dir = tempfile::tempdir().unwrap();
    let h3 = catalog_file(dir.path(), "h3", &[]);
    assert_eq!(verdict(&h3), "einstein_nilradical_certified");
    let will9 = catalog_file(dir.path(), "will9", &["2"]);
    assert_eq!(verdict(&will9), "not_einstein_nilradical_certified");
    // ex7 is nice in the graded form, so positivity decides it exactly
    let ex7 = catalog_file(dir.path(), "ex7", &["2"]);
    assert_eq!(verdict(&ex7), "einstein_nilradical_certified");
}

#[test]
fn float_input_gets_numeric_evidence() {
    let out = stdout_json(&nilsoliton(&["--mode", "float", "check", "catalog:l4_plus"]));
    assert_eq!(out["verdict"], "numeric_evidence_positive");
    assert_eq!(out["input"]["scalar_mode"], "float");
}

#[test]
fn report_has_stable_fields() {
    let r = stdout_json(&nilsoliton(&["report", "catalog:h3"]));
    for key in ["input", "gate", "ricci", "certificate", "phi", "type", "necessary", "nikolayevsky", "nice", "U", "upos", "stratum", "descent", "flow", "verdict", "evidence"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    for key in ["ric", "scal", "F", "einstein"] {
        assert!(r["ricci"].get(key).is_some(), "ricci.{key}");
    }
    for key in ["c", "D", "residual", "type"] {
        assert!(r["certificate"].get(key).is_some(), "certificate.{key}");
    }
}

#[test]
fn parse_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ \"dim\": 3, \"brackets\": [").unwrap();
    let out = nilsoliton(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_lie_bracket_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nonlie.json");
    // [e1,e2] = e3, [e2,e3] = e1, [e1,e3] = e1 fails Jacobi
    fs::write(
        &path,
        r#"{"dim": 3, "scalar_mode": "rational", "brackets": [
            {"i": 1, "j": 2, "k": 3, "c": "1"},
            {"i": 2, "j": 3, "k": 1, "c": "1"},
            {"i": 1, "j": 3, "k": 1, "c": "1"}]}"#,
    )
    .unwrap();
    let out = nilsoliton(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn catalog_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = catalog_file(dir.path(), "ex7", &["-1/2"]);
    let first = fs::read_to_string(&a).unwrap();
    // reading a file and writing it back through the catalog path gives the same text
    let out = stdout_json(&nilsoliton(&["nice", &a]));
    let direct = stdout_json(&nilsoliton(&["nice", "catalog:ex7:-1/2"]));
    assert_eq!(out["upos"], direct["upos"]);
    let b = catalog_file(dir.path(), "ex7", &["-1/2"]);
    assert_eq!(first, fs::read_to_string(&b).unwrap());
    let list = stdout_json(&nilsoliton(&["catalog", "list"]));
    assert!(list.as_array().unwrap().iter().any(|e| e["name"] == "will9"));
}

#[test]
fn will9_sweep_is_certified_negative() {
    let out = nilsoliton(&["sweep", "will9", "--values", "3/2,2,3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param,verdict,F,phi_type,error"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    for (row, t) in rows.iter().zip(["3/2", "2", "3"]) {
        let mut cols = row.split(',');
        assert_eq!(cols.next(), Some(t));
        assert_eq!(cols.next(), Some("not_einstein_nilradical_certified"));
    }
}

#[test]
fn ex7_sweep_fails_exactly_at_zero_and_one() {
    let out = nilsoliton(&["sweep", "ex7", "--from", "-1", "--to", "2", "--step", "1/4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 13);
    for row in rows {
        let mut cols = row.split(',');
        let t = cols.next().unwrap();
        let v = cols.next().unwrap();
        let want = if t == "0" || t == "1" { "not_einstein_nilradical_certified" } else { "einstein_nilradical_certified" };
        assert_eq!(v, want, "t = {t}");
    }
}

#[test]
fn reports_are_deterministic() {
    let a = nilsoliton(&["report", "catalog:l4_plus"]);
    let b = nilsoliton(&["report", "catalog:l4_plus"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = nilsoliton(&["--out", path.to_str().unwrap(), "check", "catalog:h3"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["verdict"], "einstein_nilradical_certified");
}

#[test]
fn flow_writes_csv() {
    let out = nilsoliton(&["flow", "catalog:l4_plus", "--max-t", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,F,grad_norm\n"));
    let fs: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(fs.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn pfaffian_and_poly_subcommands() {
    let sum = stdout_json(&nilsoliton(&["pfaffian", "catalog:h3_sum"]));
    let complex = stdout_json(&nilsoliton(&["pfaffian", "catalog:h3_complex"]));
    assert_ne!(sum["sign"], complex["sign"]);
    let p = stdout_json(&nilsoliton(&["poly", "x1*x2*x3"]));
    assert_eq!(p["critical"], true);
    assert_eq!(p["F"], "0");
    let l = stdout_json(&nilsoliton(&["poly", "--locus"]));
    assert_eq!(l["locus"]["computed"], "3/14");
}
