use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use nanolens::io::{parse_contours_csv, parse_vectors_csv, RunConfig, DEFAULT_CONFIG_TOML};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nanolens"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn config_with_bias(dir: &Path, bias: f64) -> String {
    let mut cfg = RunConfig::from_toml_str(DEFAULT_CONFIG_TOML).unwrap();
    cfg.bias_gauss = bias;
    let path = dir.join("run.toml");
    std::fs::write(&path, cfg.to_toml_string().unwrap()).unwrap();
    path.display().to_string()
}

#[test]
fn focus_report() {
    let out = run(&["focus"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((num(&v, "z_nm") - 23.8).abs() < 0.5);
    assert!((num(&v, "bmin_gauss") - 99.5).abs() < 2.0);
    assert_eq!(v["classification"], "minimum");
}

#[test]
fn focus_output_is_byte_identical() {
    let a = run(&["focus"]);
    let b = run(&["focus"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn field_at_the_focus_and_far_away() {
    let v = json(&run(&["field", "--at", "0,0,23.8"]));
    assert!((num(&v, "bmag_gauss") - 99.5).abs() < 2.0);
    let far = json(&run(&["field", "--at", "0,0,1000"]));
    assert!((num(&far, "bmag_gauss") - 650.0).abs() < 1.0, "{far}");
    let off = json(&run(&["field", "--at", "-10,20,30"]));
    assert_eq!(num(&off, "x_nm"), -10.0);
}

#[test]
fn malformed_point_names_the_flag() {
    for bad in ["0,0", "0,0,z", "1,2,3,4"] {
        let out = run(&["field", "--at", bad]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("--at"), "{bad}");
    }
}

#[test]
fn point_inside_the_magnet_is_a_precondition_error() {
    let out = run(&["field", "--at", "0,0,0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_config_is_a_precondition_error() {
    let out = run(&["--config", "/nonexistent/run.toml", "focus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analysis_failure_gives_json_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_with_bias(dir.path(), -400.0);
    let focus = json(&run(&["--config", &cfg, "focus"]));
    assert_eq!(focus["classification"], "saddle");
    let out = run(&["--config", &cfg, "selectivity"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "analysis");
    assert!(v["error"]["message"].as_str().unwrap().contains("minimum"));
}

#[test]
fn sweep_reports_the_window() {
    let out = run(&["sweep", "--from", "-800", "--to", "-500", "--step", "25"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["points"].as_array().unwrap().len(), 13);
    assert_eq!(v["minimum_window_gauss"], serde_json::json!([-750.0, -575.0]));
    let t = v["transitions"].as_array().unwrap();
    assert_eq!(t.len(), 2);
    assert_eq!(t[0]["from"], "saddle");
    assert_eq!(t[1]["to"], "saddle");
}

#[test]
fn tensor_eigenvalues() {
    let v = json(&run(&["tensor"]));
    let ev: Vec<f64> = v["eigenvalues_gauss_per_angstrom"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((ev[0] - 2.4438).abs() < 1e-3 && ev[1].abs() < 1e-3 && (ev[2] + 2.4438).abs() < 1e-3, "{ev:?}");
    assert_eq!(v["diagonal_frame"], "rotated-45deg");
}

#[test]
fn selectivity_report() {
    let v = json(&run(&["selectivity", "--linewidth", "1"]));
    assert!((num(&v, "focus_frequency_khz") - 423.78).abs() < 0.01);
    for axis in ["p45", "m45", "z"] {
        assert!(v["axes"][axis]["extent_nm"].as_f64().unwrap() > 0.5, "{axis}");
    }
    let e = json(&run(&["selectivity", "--species", "electron"]));
    assert!(num(&e, "focus_frequency_khz") > 1e5);
    assert_eq!(run(&["selectivity", "--species", "muon"]).status.code(), Some(2));
}

#[test]
fn validate_passes() {
    let out = run(&["validate"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 5);
}

#[test]
fn contour_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p45.csv");
    let p = path.to_str().unwrap();
    let out = run(&["--out", p, "contours", "--plane", "p45", "--n", "41"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l == "level_gauss,polyline_id,u_nm,v_nm"));
    let set = parse_contours_csv(&text).unwrap();
    assert_eq!(set.levels.first().map(|l| l * 1e4), Some(100.5));
    assert_eq!(nanolens::io::contours_to_csv(&set), text);
}

#[test]
fn vector_file_has_grid_rows() {
    let out = run(&["vectors", "--plane", "horizontal", "--n", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = parse_vectors_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 121);
    let center = &rows[60];
    assert_eq!((center.u_nm, center.v_nm), (0.0, 0.0));
    assert!((center.bmag_gauss - 99.53).abs() < 0.01);
    assert!(String::from_utf8_lossy(&out.stderr).contains("-1"));
}

#[test]
fn default_config_parses() {
    let out = run(&["default-config"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(RunConfig::from_toml_str(&text).unwrap(), RunConfig::default());
}

#[test]
fn save_uses_the_output_block() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::from_toml_str(DEFAULT_CONFIG_TOML).unwrap();
    cfg.output.directory = dir.path().join("out").display().to_string();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, cfg.to_toml_string().unwrap()).unwrap();
    let out = run(&["--config", path.to_str().unwrap(), "vectors", "--plane", "m45", "--n", "5", "--save"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("out").join("vectors_m45.csv")).unwrap();
    assert_eq!(parse_vectors_csv(&text).unwrap().len(), 25);
}
