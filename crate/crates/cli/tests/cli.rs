use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dixmier(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dixmier"))
        .args(args)
        .arg("--output")
        .arg(dir.join("out"))
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out").join(name)).unwrap()).unwrap()
}

fn csv(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join("out").join(name)).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn model_list() {
    let d = TempDir::new().unwrap();
    let o = dixmier(d.path(), &["model", "list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for m in ["harmonic", "separable", "torus", "nctorus", "blocks"] {
        assert!(text.contains(m), "{text}");
    }
}

#[test]
fn zeta_values_and_empty_list() {
    let d = TempDir::new().unwrap();
    let o = dixmier(d.path(), &["zeta", "--s", "2,3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = csv(d.path(), "zeta.csv");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,value,error"));
    // π²/6 and ζ(3)
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!((values[0] - 1.6449340668482264).abs() < 1e-12);
    assert!((values[1] - 1.2020569031595942).abs() < 1e-12);

    let o = dixmier(d.path(), &["zeta"]);
    assert!(o.status.success());
    assert_eq!(csv(d.path(), "zeta.csv"), "s,value,error\n");
}

#[test]
fn bad_input_exits_with_2_and_names_the_field() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("cfg.json"), r#"{"N_min": 10, "ratio": "two"}"#).unwrap();
    let o = dixmier(d.path(), &["zeta", "--config", "cfg.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ratio"), "{}", stderr(&o));

    fs::write(d.path().join("cfg.json"), "{ not json").unwrap();
    assert_eq!(dixmier(d.path(), &["zeta", "--config", "cfg.json"]).status.code(), Some(2));

    fs::write(d.path().join("a.json"), r#"{"theta": 0.2, "coeffs": [{"m": 0}]}"#).unwrap();
    let o = dixmier(d.path(), &["dixmier", "--model", "nctorus", "--element", "a.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("'element'"), "{}", stderr(&o));

    let o = dixmier(d.path(), &["zeta", "--n-min", "100", "--n-max", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("N_max"));

    assert_eq!(dixmier(d.path(), &["dixmier", "--model", "nope"]).status.code(), Some(2));
    assert_eq!(dixmier(d.path(), &["proptest", "nope"]).status.code(), Some(2));
    assert_eq!(dixmier(d.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn torus_both_routes_measurable_two() {
    let d = TempDir::new().unwrap();
    let o = dixmier(d.path(), &["dixmier", "--model", "torus", "--size", "262144", "--observable", "one", "--route", "both"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(d.path(), "measurable.json");
    assert_eq!(r["verdict"]["kind"], "measurable");
    assert!((r["value"].as_f64().unwrap() - 2.0).abs() < 1e-3);
    assert!(r["config_echo"]["N_min"].is_u64());
    assert!(csv(d.path(), "residue_curve.csv").starts_with("k,s,value,error\n"));
    assert!(csv(d.path(), "gamma_curve.csv").starts_with("N,gamma_N\n"));
}

#[test]
fn nctorus_element_gives_pi_times_trace() {
    let d = TempDir::new().unwrap();
    fs::write(
        d.path().join("a.json"),
        r#"{"theta": 0.1, "coeffs": [{"m": 0, "n": 0, "re": 0.7}, {"m": 2, "n": -1, "re": 3, "im": 1}]}"#,
    )
    .unwrap();
    let o = dixmier(d.path(), &["dixmier", "--model", "nctorus", "--theta", "0.3", "--element", "a.json", "--route", "residue"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(d.path(), "dixmier.json");
    assert_eq!(r["inputs"]["theta"], 0.3);
    let v = r["value"].as_f64().unwrap();
    assert!((v / (0.7 * std::f64::consts::PI) - 1.0).abs() < 0.05, "{v}");
}

#[test]
fn separable_part_vanishes() {
    let d = TempDir::new().unwrap();
    let o = dixmier(d.path(), &["dixmier", "--model", "separable", "--strict"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(d.path(), "measurable.json");
    assert!(r["value"].as_f64().unwrap().abs() < 1e-3);
}

#[test]
fn blocks_are_flagged_and_strict_fails() {
    let d = TempDir::new().unwrap();
    let o = dixmier(d.path(), &["measurable", "--model", "blocks"]);
    assert!(o.status.success());
    let r = report(d.path(), "measurable.json");
    assert_eq!(r["verdict"]["kind"], "non_measurable");
    let band = r["band"].as_array().unwrap();
    assert!(band[1].as_f64().unwrap() - band[0].as_f64().unwrap() >= 0.1);
    assert_eq!(dixmier(d.path(), &["measurable", "--model", "blocks", "--strict"]).status.code(), Some(1));
}

#[test]
fn structure_reports() {
    let d = TempDir::new().unwrap();
    let o = dixmier(d.path(), &["structure", "--observable", "convergent"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(d.path(), "structure.json");
    assert_eq!(r["verdict"], "agreement");
    assert!((r["value"].as_f64().unwrap() - 0.7).abs() < 1e-2);
    assert!(csv(d.path(), "diagonal.csv").starts_with("m,value\n"));

    let o = dixmier(d.path(), &["structure", "--observable", "blocks"]);
    assert!(o.status.success());
    let r = report(d.path(), "structure.json");
    assert_eq!(r["verdict"], "overlapping_bands");
    assert!(r["band"].is_array());
}

#[test]
fn proptest_is_reproducible() {
    let d = TempDir::new().unwrap();
    let a = dixmier(d.path(), &["proptest", "algebra", "--seed", "7"]);
    assert!(a.status.success(), "{}", stderr(&a));
    let first = csv(d.path(), "proptest.json");
    let b = dixmier(d.path(), &["proptest", "algebra", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(first, csv(d.path(), "proptest.json"));
    assert_eq!(report(d.path(), "proptest.json")["report"]["seed"], 7);
}

#[test]
fn normality_on_both_tori() {
    let d = TempDir::new().unwrap();
    for args in [["--model", "torus", "--size", "65536"], ["--model", "nctorus", "--size", "200"]] {
        let mut full = vec!["normality", "--strict"];
        full.extend(args);
        let o = dixmier(d.path(), &full);
        assert!(o.status.success(), "{}", stderr(&o));
        let r = report(d.path(), "normality.json");
        assert_eq!(r["verdict"], "normal");
        assert_eq!(r["domination"]["status"], "dominated");
    }
}
