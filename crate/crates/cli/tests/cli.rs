// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_mmrabi");

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .env_remove("RABI_MM_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.toml");
    fs::write(&p, text).unwrap();
    p
}

const TWO_QUBIT: &str = r#"
[model]
modes = 2
qubits = 2
n_max = 3
omega = [1.0, 1.0]
delta = [0.7, 0.3]
g = [[0.4, 0.4], [0.2, 0.2]]
"#;

#[test]
fn malformed_config_exits_2_with_key_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &TWO_QUBIT.replace("n_max = 3", "n_max = \"three\""),
    );
    let out = run(&["--config", cfg.to_str().unwrap(), "basis"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("model.n_max"), "{err}");
}

#[test]
fn unknown_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{TWO_QUBIT}\n[noise]\nkapa_in = 1e-4\n"),
    );
    let out = run(&["--config", cfg.to_str().unwrap(), "spectrum"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("noise") && err.contains("kapa_in"), "{err}");
}

#[test]
fn semantic_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &TWO_QUBIT.replace("g = [[0.4, 0.4], [0.2, 0.2]]", "g = [[0.4, 0.4]]"),
    );
    let out = run(&["--config", cfg.to_str().unwrap(), "spectrum"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model.g"));
}

#[test]
fn missing_table_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TWO_QUBIT);
    let out = run(
        &["--config", cfg.to_str().unwrap(), "dark-verify"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`dark`"));
}

#[test]
fn bad_thread_cap_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["--quiet", "--out"])
        .arg(dir.path())
        .args(["reproduce", "fig1a"])
        .env("RABI_MM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("RABI_MM_THREADS"));
}

#[test]
fn numerical_failure_exits_3_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let text = TWO_QUBIT.replace("delta = [0.7, 0.3]", "delta = [0.5, 0.5]")
        + "[schedule]\nduration = 20.0\n[noise]\nkappa_in = 1e-4\ngamma = 1e-5\ngamma_phi = 1e-4\n[solver]\nopen_rtol = 0.5\n";
    let cfg = write_config(dir.path(), &text);
    let out = run(&["--config", cfg.to_str().unwrap(), "lindblad"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let diag: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("diagnostic.json")).unwrap())
            .unwrap();
    assert_eq!(diag["subcommand"], "lindblad");
    assert!(diag["error"].as_str().unwrap().contains("positivity"));
}

#[test]
fn dark_verify_is_deterministic_per_seed() {
    let cfg = configs().join("dark_two_qubit.toml");
    let cfg = cfg.to_str().unwrap();
    let read = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = run(
            &["--config", cfg, "--seed", seed, "dark-verify"],
            dir.path(),
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        fs::read(dir.path().join("dark_verify.json")).unwrap()
    };
    let a = read("11");
    assert_eq!(a, read("11"));
    assert_ne!(a, read("12"));
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["verified"], true);
    assert_eq!(v["random"]["samples"].as_array().unwrap().len(), 20);
    assert!(v["random"]["max_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn basis_dump_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &TWO_QUBIT.replace("n_max = 3", "n_max = 2\nparity = \"even\""),
    );
    let out = run(&["--config", cfg.to_str().unwrap(), "basis"], dir.path());
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("basis.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("index,n_1,n_2,s_1,s_2,parity"));
    let rows: Vec<&str> = lines.collect();
    // (1 + 2 + 3) photon states times 4 spin states, half of them even.
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0], "0,0,0,u,u,+1");
    assert!(rows.iter().all(|r| r.ends_with(",+1")));
}

#[test]
fn cutoff_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TWO_QUBIT);
    let out = run(
        &["--config", cfg.to_str().unwrap(), "--cutoff", "1", "basis"],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("basis.json")).unwrap()).unwrap();
    assert_eq!(v["dims"]["n_max"], 1);
    assert_eq!(v["dim"], 12);
}

#[test]
fn fig1a_even_sector_holds_the_flat_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["reproduce", "fig1a"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("fig1a.csv")).unwrap();
    let mut per_g: std::collections::BTreeMap<String, f64> = Default::default();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[1] == "+1" {
            let d = (f[3].parse::<f64>().unwrap() - 1.0).abs();
            let e = per_g.entry(f[0].to_string()).or_insert(f64::INFINITY);
            *e = e.min(d);
        }
    }
    assert_eq!(per_g.len(), 50);
    assert!(per_g.values().all(|d| *d < 1e-8));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig1a.json")).unwrap()).unwrap();
    assert_eq!(v["dark_line"]["points_on_line"], 50);
    assert!(v["dark_line"]["max_weight_two_plus"].as_f64().unwrap() < 1e-12);
}

#[test]
fn circuit_map_emits_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("circuit_symmetric.toml");
    let out = run(
        &["--config", cfg.to_str().unwrap(), "circuit-map"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("circuit_map.json")).unwrap())
            .unwrap();
    let g = &v["model"]["g"];
    assert_eq!(g[0][0], g[1][1]);
    assert_eq!(
        v["effective"]["rabi_couplings"].as_array().unwrap().len(),
        4
    );
}

#[test]
fn shipped_configs_load() {
    for entry in fs::read_dir(configs()).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let dir = tempfile::tempdir().unwrap();
        // `basis` needs a model; circuit-only configs go through circuit-map.
        let text = fs::read_to_string(&p).unwrap();
        let cmd = if text.contains("[model]") {
            "basis"
        } else {
            "circuit-map"
        };
        let out = run(&["--config", p.to_str().unwrap(), cmd], dir.path());
        assert!(
            out.status.success(),
            "{}: {}",
            p.display(),
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
