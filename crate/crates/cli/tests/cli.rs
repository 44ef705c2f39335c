use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rotgp_core::field_io::load_field;
use rotgp_core::{DomainSpec, Grid};

fn rotgp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotgp"))
        .args(args)
        .output()
        .expect("failed to launch rotgp")
}

fn quickcheck() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/quickcheck.json")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn error_kind(out: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap_or_else(|_| {
        panic!(
            "stderr is not JSON: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    });
    v["error"]["kind"].as_str().unwrap().to_string()
}

fn header(path: &Path) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.headers().unwrap().iter().map(str::to_string).collect()
}

const SMALL: &str = r#"{
  "domain": { "kind": "disk", "radius": 4.0 },
  "resolution": [33, 33],
  "potential": { "Lambda": 2.0, "Omega": 1.0 },
  "a_values": { "fractions": [0.3, 0.6] }
}"#;

#[test]
fn selftest_passes() {
    let out = rotgp(&["selftest"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn quickcheck_report_passes_and_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = rotgp(&[
        "report",
        "--config",
        quickcheck().to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "townes.csv",
        "townes.json",
        "sweep.csv",
        "blowup.csv",
        "testfn.csv",
        "verdict.json",
    ] {
        assert!(dir.path().join(name).is_file(), "{name} missing");
    }
    assert_eq!(
        header(&dir.path().join("sweep.csv"))[..3],
        ["a", "a_over_astar", "total"]
    );
    assert_eq!(
        header(&dir.path().join("blowup.csv"))[..3],
        ["a", "e_a", "scaled_energy"]
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verdict.json")).unwrap())
            .unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["checks"].get("multiplier-law").is_none());
    assert_eq!(v["checks"]["energy-law"]["status"], "pass");
    assert_eq!(
        csv::Reader::from_path(dir.path().join("sweep.csv"))
            .unwrap()
            .records()
            .count(),
        2
    );
}

#[test]
fn supercritical_request_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("[0.3, 0.6]", "[0.5, 1.2]"));
    for cmd in ["solve", "sweep", "testfn"] {
        let out = rotgp(&[
            cmd,
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert_eq!(error_kind(&out), "supercritical-rejected", "{cmd}");
    }
    assert!(!dir.path().join("solve.csv").exists());
}

#[test]
fn missing_and_malformed_configs() {
    let out = rotgp(&["sweep", "--config", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "config-not-found");

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{ not json");
    assert_eq!(
        error_kind(&rotgp(&["sweep", "--config", cfg.to_str().unwrap()])),
        "config-parse"
    );

    let cfg = write_config(
        dir.path(),
        &SMALL.replace("\"resolution\"", "\"resolutoin\""),
    );
    assert_eq!(
        error_kind(&rotgp(&["sweep", "--config", cfg.to_str().unwrap()])),
        "config-parse"
    );
}

#[test]
fn sweep_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = rotgp(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--seed",
            "7",
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        std::fs::read(out_dir.join("sweep.csv")).unwrap()
    };
    assert_eq!(run("first"), run("second"));
}

#[test]
fn townes_without_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = rotgp(&["townes", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        header(&dir.path().join("townes.csv")),
        ["r", "w", "w_prime"]
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("townes.json")).unwrap())
            .unwrap();
    let a_star = v["a_star"].as_f64().unwrap();
    assert!((a_star - 11.70089653).abs() < 1e-6, "{a_star}");
}

#[test]
fn testfn_with_explicit_scales() {
    let dir = tempfile::tempdir().unwrap();
    let body = SMALL.replace("[33, 33]", "[129, 129]").replace(
        "\"a_values\": { \"fractions\": [0.3, 0.6] }",
        "\"a_values\": { \"fractions\": [0.5] }, \"testfn\": { \"taus\": [2.0, 4.0] }",
    );
    let cfg = write_config(dir.path(), &body);
    let out = rotgp(&[
        "testfn",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path = dir.path().join("testfn.csv");
    assert_eq!(
        header(&path),
        [
            "a",
            "tau",
            "kinetic",
            "potential",
            "interaction",
            "rotation",
            "total"
        ]
    );
    let rows: Vec<csv::StringRecord> = csv::Reader::from_path(&path)
        .unwrap()
        .records()
        .map(Result::unwrap)
        .collect();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        let parts: Vec<f64> = (2..7).map(|k| r[k].parse().unwrap()).collect();
        let total = parts[0] + parts[1] - parts[2] - parts[3];
        assert!(
            (total - parts[4]).abs() < 1e-10 * parts[0].abs().max(1.0),
            "{r:?}"
        );
    }
}

#[test]
fn dumped_fields_load_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = rotgp(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--dump-fields",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows: Vec<csv::StringRecord> = csv::Reader::from_path(dir.path().join("sweep.csv"))
        .unwrap()
        .records()
        .map(Result::unwrap)
        .collect();
    let grid = std::sync::Arc::new(Grid::new(DomainSpec::disk(4.0), 33, 33).unwrap());
    for r in &rows {
        let name = &r[17];
        assert!(!name.is_empty());
        let u = load_field(&dir.path().join(name), &grid).unwrap();
        assert!((u.mass() - 1.0).abs() < 1e-10);
    }
}
