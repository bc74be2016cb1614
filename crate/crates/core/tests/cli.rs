use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str], config: Option<&str>, dir: &TempDir, out: &str) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hull-lab"));
    cmd.args(args).arg("--out").arg(dir.path().join(out));
    if let Some(text) = config {
        let path = dir.path().join(format!("{out}.config.json"));
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn read(dir: &TempDir, out: &str, name: &str) -> String {
    fs::read_to_string(dir.path().join(out).join(name)).unwrap()
}

fn data_lines(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn dir_bytes(path: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(path)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn converge_is_deterministic_and_annotated() {
    let dir = TempDir::new().unwrap();
    let a = run(&["converge", "--grid-scale", "0.5"], None, &dir, "a");
    let b = run(&["converge", "--grid-scale", "0.5"], None, &dir, "b");
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(dir_bytes(&dir.path().join("a")), dir_bytes(&dir.path().join("b")));

    let csv = read(&dir, "a", "converge.csv");
    assert!(csv.starts_with("# config_hash="));
    assert!(csv.contains("# quadrature={"));
    assert!(csv.lines().any(|l| l == "nu,label,Tnu,T,gap"));
    let rows = data_lines(&csv);
    assert_eq!(rows.len(), 9 * 9);
    let w2 = rows.iter().find(|r| r[0] == "256" && r[1] == "|w|^2").unwrap();
    let t: f64 = w2[3].parse().unwrap();
    assert!((t - 0.5).abs() < 1e-12);
    assert!(w2[4].parse::<f64>().unwrap() < 1e-2);
    // 17 significant digits
    assert_eq!(w2[2].split('e').next().unwrap().len(), 18);

    let pol = read(&dir, "a", "poletsky.csv");
    assert!(pol.lines().any(|l| l == "nu,r_nu,center_gap,hull_excess,bad_measure"));
    let json: serde_json::Value = serde_json::from_str(&read(&dir, "a", "converge.json")).unwrap();
    let hash = csv.lines().next().unwrap().trim_start_matches("# config_hash=");
    assert_eq!(json["metadata"]["config_hash"], hash);
    assert_eq!(json["data"]["final_gaps"].as_array().unwrap().len(), 9);
}

#[test]
fn vertical_point_has_vanishing_gaps() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"point": {"z": [0.0, 1.0], "w": [0.3, 0.2]}, "nus": [1, 4, 16]}"#;
    let out = run(&["converge"], Some(cfg), &dir, "v");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for row in data_lines(&read(&dir, "v", "converge.csv")) {
        assert!(row[4].parse::<f64>().unwrap() < 1e-12, "{row:?}");
    }
}

#[test]
fn hull_certificate_and_refusals() {
    let dir = TempDir::new().unwrap();
    let ok = run(&["hull"], Some(r#"{"point": {"z": [0.0, -1.0], "w": [0.9, 0.0]}}"#), &dir, "ok");
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let json: serde_json::Value = serde_json::from_str(&read(&dir, "ok", "certificate.json")).unwrap();
    assert!(json["data"]["certificate"]["margin"].as_f64().unwrap() >= 1.27);
    assert!(json["data"]["verification"]["worst_value"].as_f64().unwrap() <= 1.0 + 1e-9);

    for (name, cfg) in [
        ("origin", r#"{"point": {"z": [0.0, 0.0], "w": [0.0, 0.0]}}"#),
        ("fiber", r#"{"point": {"z": [6.123233995736766e-17, 1.0], "w": [0.5, 0.0]}}"#),
        ("k1", r#"{"variant": "K1", "point": {"z": [0.0, -1.0], "w": [0.9, 0.0]}}"#),
    ] {
        let out = run(&["hull"], Some(cfg), &dir, name);
        assert_eq!(out.status.code(), Some(1), "{name}");
        assert!(!dir.path().join(name).join("certificate.json").exists());
    }

    let cfg = r#"{"point": {"z": [0.0, -0.5], "w": [0.01, 0.0]}, "certificate": {"max_degree": 2}}"#;
    let out = run(&["hull"], Some(cfg), &dir, "weak");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no certificate"));
}

#[test]
fn averaging_tables() {
    let dir = TempDir::new().unwrap();
    let out = run(&["averaging"], None, &dir, "p");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&dir, "p", "moments.csv");
    assert!(csv.lines().any(|l| l == "nu,k,re,im,abs"));
    for row in data_lines(&csv).iter().filter(|r| r[1] == "1") {
        let nu: i32 = row[0].parse().unwrap();
        let abs: f64 = row[4].parse().unwrap();
        assert!((abs - 0.4f64.powi(nu)).abs() < 1e-15, "{row:?}");
    }

    let cfg = r#"{"averaging": {"measure": {"kind": "uniform"}, "nus": [1, 2, 3], "order": 64}}"#;
    let out = run(&["averaging"], Some(cfg), &dir, "u");
    assert_eq!(out.status.code(), Some(0));
    for row in data_lines(&read(&dir, "u", "gaps.csv")) {
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
    }

    let cfg = r#"{"averaging": {"nus": [1, 100], "order": 64}}"#;
    assert_eq!(run(&["averaging"], Some(cfg), &dir, "t").status.code(), Some(1));
}

#[test]
fn obstruction_histogram_and_seed_override() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"obstruction": {"trials": 60}}"#;
    let a = run(&["obstruction"], Some(cfg), &dir, "a");
    let b = run(&["obstruction", "--seed", "7"], Some(cfg), &dir, "b");
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(b.status.code(), Some(0));
    let ja: serde_json::Value = serde_json::from_str(&read(&dir, "a", "obstruction.json")).unwrap();
    let jb: serde_json::Value = serde_json::from_str(&read(&dir, "b", "obstruction.json")).unwrap();
    assert_eq!(ja["data"]["histogram"], serde_json::json!({"0": 60}));
    assert_eq!(jb["data"]["histogram"], serde_json::json!({"0": 60}));
    assert_eq!(jb["metadata"]["seed"], 7);
    assert_ne!(ja["metadata"]["config_hash"], jb["metadata"]["config_hash"]);
}

#[test]
fn selftest_passes() {
    let dir = TempDir::new().unwrap();
    let out = run(&["selftest"], None, &dir, "s");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&read(&dir, "s", "selftest.json")).unwrap();
    assert!(json["data"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn config_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    for (name, cfg) in [
        ("empty", r#"{"nus": []}"#),
        ("unsorted", r#"{"nus": [4, 2, 8]}"#),
        ("unknown", r#"{"colour": "blue"}"#),
        ("arcs", r#"{"arcs": [[0.0, 1.0]]}"#),
        ("outside", r#"{"point": {"z": [0.5, 0.5], "w": [0.5, 0.0]}}"#),
        ("label", r#"{"battery": ["sin w"]}"#),
        ("syntax", "{"),
    ] {
        let out = run(&["converge"], Some(cfg), &dir, name);
        assert_eq!(out.status.code(), Some(1), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).contains("config error"), "{name}");
    }
    let out = run(&["converge", "--grid-scale", "0"], None, &dir, "scale");
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["nonsense"], None, &dir, "cmd");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exhausted_schedule_is_a_verification_failure() {
    let dir = TempDir::new().unwrap();
    let out = run(&["converge"], Some(r#"{"schedule": {"eps": 1e-12}, "nus": [1, 2]}"#), &dir, "x");
    assert_eq!(out.status.code(), Some(2));
}
