//! End-to-end tests driving the `spinroute` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn spinroute(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinroute"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("spinroute-cli-{}-{name}", std::process::id()));
    p
}

#[test]
fn net_build_and_validate_round_trip() {
    let path = tmp_path("net.json");
    let out = spinroute(&[
        "net",
        "build",
        "--builder",
        "diamond",
        "--cells",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = spinroute(&["net", "validate", "--net", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout_str(&out).starts_with("ok:"));

    // Corrupt the document: out-of-range coupling site.
    let text = std::fs::read_to_string(&path).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["couplings"][0][1] = serde_json::json!(60);
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let out = spinroute(&["net", "validate", "--net", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(&path).ok();
}

#[test]
fn transfer_pst_chain_peaks_at_pi() {
    let out = spinroute(&[
        "transfer",
        "--builder",
        "pst",
        "--n",
        "8",
        "--t-max",
        "10",
        "--format",
        "document",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let peak_t = doc["peak"]["t"].as_f64().unwrap();
    let magnitude = doc["peak"]["magnitude"].as_f64().unwrap();
    assert!((peak_t - std::f64::consts::PI).abs() < 1e-6);
    assert!((magnitude - 1.0).abs() < 1e-9);
}

#[test]
fn transfer_csv_has_header_and_peak_line() {
    let out = spinroute(&[
        "transfer",
        "--builder",
        "uniform",
        "--n",
        "4",
        "--t-max",
        "5",
        "--grid",
        "10",
    ]);
    assert!(out.status.success());
    let body = stdout_str(&out);
    let mut lines = body.lines();
    assert_eq!(lines.next().unwrap(), "t,re_g,im_g,abs_g,fbar,fbar_star");
    assert_eq!(lines.count(), 10);
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.starts_with("peak:"));
}

#[test]
fn transfer_long_heisenberg_chain_beats_classical_bound() {
    let path = tmp_path("bose80.csv");
    let out = spinroute(&[
        "transfer",
        "--builder",
        "uniform",
        "--n",
        "80",
        "--delta",
        "1",
        "--field",
        "1",
        "--t-max",
        "4000",
        "--grid",
        "400000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    let peak: serde_json::Value =
        serde_json::from_str(err.trim().strip_prefix("peak:").unwrap().trim()).unwrap();
    assert!(peak["fbar_star"].as_f64().unwrap() > 2.0 / 3.0);
    std::fs::remove_file(&path).ok();
}

#[test]
fn transfer_rejects_bad_window() {
    let out = spinroute(&[
        "transfer",
        "--builder",
        "uniform",
        "--n",
        "4",
        "--t-max",
        "-1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("--t-max"));
}

#[test]
fn pst_verify_document() {
    let out = spinroute(&["pst", "verify", "--n", "12"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(doc["mirror_ok"].as_bool().unwrap());
    assert!(doc["eigenphase_ok"].as_bool().unwrap());
    assert!((doc["magnitude"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn diamond_run_delivers() {
    let out = spinroute(&["diamond", "run", "--cells", "4"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!((doc["magnitude"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(doc["end_site"].as_u64().unwrap(), 12);
}

#[test]
fn hex_route_cross_layer() {
    let chip_path = tmp_path("chip.json");
    let out = spinroute(&[
        "hex",
        "build",
        "--layers",
        "2",
        "--rows",
        "3",
        "--cols",
        "3",
        "--junction",
        "0,1,1",
        "--out",
        chip_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = spinroute(&[
        "hex",
        "route",
        "--chip",
        chip_path.to_str().unwrap(),
        "--from",
        "0,0,0",
        "--to",
        "1,2,2",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let magnitude = doc["outcome"]["magnitude"].as_f64().unwrap();
    assert!(magnitude >= 1.0 - 1e-8);
    let hops = doc["route"]["hops"].as_array().unwrap().len() as f64;
    let duration = doc["outcome"]["duration"].as_f64().unwrap();
    let expect = std::f64::consts::PI + hops * std::f64::consts::PI / 2f64.sqrt();
    assert!((duration - expect).abs() < 1e-12);
    std::fs::remove_file(&chip_path).ok();
}

#[test]
fn hex_route_unroutable_exit_code() {
    // The center of a 3×3 brick-wall lattice articulates the corner.
    let out = spinroute(&[
        "hex", "route", "--layers", "1", "--rows", "3", "--cols", "3", "--defect", "0,1,1",
        "--from", "0,0,0", "--to", "0,2,2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("no defect-free path"));
}

#[test]
fn hex_check_document() {
    let out = spinroute(&["hex", "check", "--layers", "1", "--rows", "2", "--cols", "2"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(doc["ok"].as_bool().unwrap());
    assert!(doc["pulse_table"].as_bool().unwrap());
}

#[test]
fn dualrail_run_pst_pair_single_attempt() {
    let out = spinroute(&[
        "dualrail", "run", "--n", "8", "--builder", "pst", "--target", "0.99",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc["attempts"].as_array().unwrap().len(), 1);
    assert_eq!(doc["outcome"]["success"]["attempts"].as_u64().unwrap(), 1);
}

#[test]
fn dualrail_rejects_unreachable_target() {
    let out = spinroute(&["dualrail", "run", "--n", "6", "--target", "1.0"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("target"));
}

#[test]
fn dualrail_sweep_documents_are_byte_identical() {
    let run = || {
        let out = spinroute(&[
            "dualrail", "sweep", "--n", "6", "--epsilon", "0.05", "--seeds", "12", "--target",
            "0.9",
        ]);
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn verify_battery_runs_clean() {
    let out = spinroute(&["verify", "--max-sites", "6"]);
    assert!(out.status.success());
    let body = stdout_str(&out);
    assert!(body.contains("check pulse-table: ok"));
    assert!(body.contains("check oracle-equivalence: ok"));
    assert!(!body.contains("FAIL"));
}

#[test]
fn verify_respects_oracle_cap() {
    let out = spinroute(&["verify", "--max-sites", "16"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("cap"));
}
