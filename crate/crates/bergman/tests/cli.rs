//! The command-line front end: exit codes, outputs and determinism.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use bergman::experiments::Report;
use bergman::operator::read_exported;

fn bergman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bergman")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, json: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_owned()
}

fn report_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let name = p.file_name().unwrap().to_str().unwrap();
            name != "timing.json" && name != "config.json"
        })
        .map(|p| (p.file_name().unwrap().to_str().unwrap().to_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn verify_list_names_every_check() {
    let out = bergman(&["verify", "list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().collect();
    assert_eq!(names, bergman::experiments::CHECKS);
}

#[test]
fn reports_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let status = bergman(&["--out", out.to_str().unwrap(), "--seed", "11", "verify", "geometry-identities"]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stdout));
    }
    let (fa, fb) = (report_files(&a), report_files(&b));
    assert!(fa.keys().any(|k| k.ends_with(".json")) && fa.keys().any(|k| k.ends_with(".csv")));
    assert_eq!(fa, fb);
    assert!(a.join("timing.json").exists());

    let json = std::fs::read_to_string(a.join("geometry-identities.json")).unwrap();
    let report = Report::from_json(&json).unwrap();
    assert_eq!(report.config.seed, 11);
    assert_eq!(report.to_json().unwrap() + "\n", json);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"gamma": 1.0, "lamda": 0.1}"#);
    let out = bergman(&["--config", &cfg, "--out", dir.path().to_str().unwrap(), "mo", "eval"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lamda"));
}

#[test]
fn invalid_values_and_unknown_checks_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"gamma": -1.5}"#);
    assert_eq!(bergman(&["--config", &cfg, "mo", "eval"]).status.code(), Some(2));
    assert_eq!(bergman(&["--out", dir.path().to_str().unwrap(), "verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn tree_build_writes_one_line_per_node() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"dyadic_level": 2, "depth": 5, "neighbor_radius": 1.1}"#);
    let out = bergman(&["--config", &cfg, "--out", dir.path().to_str().unwrap(), "tree", "build"]);
    assert!(out.status.success());
    let tree = bergman::tree::BergmanTree::dyadic(2, 5).unwrap();
    let text = std::fs::read_to_string(dir.path().join("tree.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), tree.len());
    for key in ["level", "index", "anchor", "center", "parent", "children"] {
        assert!(lines[1].get(key).is_some(), "missing {key}");
    }
    let levels: Vec<u64> = lines.iter().map(|l| l["level"].as_u64().unwrap()).collect();
    assert!(levels.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn op_spectrum_exports_readable_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"degree_cap": 16, "gamma": 1.0}"#);
    let out = bergman(&["--config", &cfg, "--out", dir.path().to_str().unwrap(), "op", "spectrum"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let (rows, cols, m) = read_exported(&dir.path().join("hankel")).unwrap();
    assert_eq!((m.nrows(), m.ncols()), (rows.len(), cols.len()));
    assert!(m.iter().any(|c| c.norm() > 0.0));
    assert!(dir.path().join("hankel_conj.json").exists());
}

#[test]
fn cutoff_runs_and_passes_for_the_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = bergman(&["--out", dir.path().to_str().unwrap(), "cutoff"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("PASS cutoff/T_plateau_p1.5")));
    assert!(!text.contains("FAIL"));
}
