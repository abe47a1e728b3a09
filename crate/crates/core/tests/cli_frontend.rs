use std::process::{Command, Output};

use serde_json::Value;

fn ehi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ehi")).args(args).current_dir(env!("CARGO_MANIFEST_DIR")).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn catalog_path(name: &str) -> String {
    format!("../../catalog/{name}.json")
}

fn temp_spec(tag: &str, text: &str) -> String {
    let p = std::env::temp_dir().join(format!("ehi-cli-{tag}-{}.json", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn validate_catalog_file() {
    let out = ehi(&["validate", "--spec", &catalog_path("iss")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["tr_r"], "7/5");
    assert_eq!(v["passed"], true);
}

#[test]
fn validate_reports_broken_charges() {
    let text = std::fs::read_to_string(format!("{}/{}", env!("CARGO_MANIFEST_DIR"), catalog_path("su2_sqcd_nf3")))
        .unwrap()
        .replace("\"1/3\"", "\"1/2\"");
    let out = ehi(&["validate", "--spec", &temp_spec("half", &text)]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert!(v["failures"][0].as_str().unwrap().contains("R-gauge^2 anomaly (0,0)"), "{v}");

    let empty = temp_spec("empty", r#"{"group":[{"type":"SU","n":2}],"chirals":[]}"#);
    assert_eq!(code(&ehi(&["validate", "--spec", &empty])), 1);
}

#[test]
fn malformed_spec_is_a_usage_error() {
    let bad = temp_spec("bad", r#"{"group":[{"type":"SU","n":2}],"chirals":[{"rep":"fund","r":"x"}]}"#);
    let out = ehi(&["validate", "--spec", &bad]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("chirals[0]"));
    assert_eq!(code(&ehi(&["validate", "--spec", "no_such_theory"])), 2);
    assert_eq!(code(&ehi(&["frobnicate"])), 2);
}

#[test]
fn rains_min_outputs() {
    let v = json(&ehi(&["rains-min", "--spec", &catalog_path("iss")]));
    assert_eq!((v["l_min"].as_str(), v["dim_hqu"].as_u64(), v["mode"].as_str()), (Some("-2/15"), Some(0), Some("exact")));
    assert_eq!(v["vertices"], serde_json::json!([["-1/3"], ["1/3"]]));
    let v = json(&ehi(&["rains-min", "--spec", "so5_sqcd_nf4"]));
    assert_eq!((v["l_min"].as_str(), v["dim_hqu"].as_u64()), (Some("0"), Some(1)));
    let v = json(&ehi(&["rains-min", "--spec", "class_s_g2", "--mode", "grid", "--resolution", "40"]));
    assert_eq!((v["l_min"].as_str(), v["dim_hqu"].as_u64()), (Some("0"), Some(3)));
    let v = json(&ehi(&["rains-min", "--spec", "iss", "--mode", "grid", "--resolution", "600"]));
    assert!((v["l_min"].as_f64().unwrap() + 2.0 / 15.0).abs() < 1e-9);
}

#[test]
fn identity_line() {
    let out = ehi(&["identity", "--b", "1", "--beta", "1"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS identity"));
    let out = ehi(&["identity", "--beta", "0.3", "--grid-n", "16"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("FAIL"));
}

#[test]
fn z3d_and_index() {
    let v = json(&ehi(&["z3d", "--name", "y_iss", "--b", "1"]));
    assert!((v["value_re"].as_f64().unwrap() - 0.423).abs() < 0.002);
    assert_eq!(code(&ehi(&["z3d", "--name", "y_nope"])), 2);
    let v = json(&ehi(&["index", "--spec", "iss", "--beta", "12"]));
    assert!((v["value_re"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(code(&ehi(&["index", "--spec", "iss", "--beta", "0"])), 3);
    assert_eq!(code(&ehi(&["index", "--spec", "class_s_g2", "--beta", "1"])), 2);
}

#[test]
fn asymptotics_csv() {
    let out = ehi(&["asymptotics", "--spec", "iss", "--beta-ladder", "0.5,0.35,0.25", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("beta,measured,predicted,residual"));
    assert_eq!(text.lines().count(), 4);
    let v = json(&ehi(&["asymptotics", "--spec", "iss", "--beta-ladder", "0.5,0.35"]));
    assert_eq!(v["l_min"], "-2/15");
    assert_eq!(code(&ehi(&["asymptotics", "--spec", "iss", "--beta-ladder", "0.25,0.5"])), 2);
}

fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn plot_data_grids() {
    let out = ehi(&["plot-data", "--builtin", "vartheta", "--resolution", "1000"]);
    let r = rows(&String::from_utf8(out.stdout).unwrap());
    let max = r.iter().map(|x| x[1]).fold(f64::MIN, f64::max);
    assert_eq!(max, 0.25);
    let at: Vec<f64> = r.iter().filter(|x| x[1] == max).map(|x| x[0]).collect();
    assert_eq!(at, vec![-0.5, 0.5]);

    let out = ehi(&["plot-data", "--spec", &catalog_path("iss"), "--resolution", "300"]);
    let r = rows(&String::from_utf8(out.stdout).unwrap());
    let min = r.iter().map(|x| x[1]).fold(f64::MAX, f64::min);
    assert!((min + 2.0 / 15.0).abs() < 1e-12);
    let at: Vec<f64> = r.iter().filter(|x| x[1] - min < 1e-12).map(|x| x[0]).collect();
    assert_eq!(at.len(), 2);
    assert!(at.iter().all(|x| (x.abs() - 1.0 / 3.0).abs() < 1e-12));

    let out = ehi(&["plot-data", "--spec", "su3_sqcd_nf4", "--resolution", "40"]);
    let r = rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(r.len(), 41 * 41);
    let zeros: Vec<&Vec<f64>> = r.iter().filter(|x| x[2].abs() < 1e-12).collect();
    assert_eq!(zeros, vec![&vec![0.0, 0.0, 0.0]]);

    assert_eq!(code(&ehi(&["plot-data", "--spec", "class_s_g2"])), 2);
    assert_eq!(code(&ehi(&["plot-data", "--builtin", "kappa", "--resolution", "8"])), 2);
}

#[test]
fn out_flag_and_determinism() {
    let p = std::env::temp_dir().join(format!("ehi-cli-out-{}.json", std::process::id()));
    let ps = p.to_string_lossy().into_owned();
    let args = ["--threads", "1", "--out", ps.as_str(), "asymptotics", "--spec", "su2_sqcd_nf3"];
    assert_eq!(code(&ehi(&args)), 0);
    let first = std::fs::read_to_string(&p).unwrap();
    assert_eq!(code(&ehi(&args)), 0);
    assert_eq!(first, std::fs::read_to_string(&p).unwrap());
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["tr_r"], "-5");
}
