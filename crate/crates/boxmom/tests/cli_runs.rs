//! End-to-end CLI tests: artifacts are byte-identical across reruns, the
//! manifest hashes every file, and error classes map to the documented exit
//! codes.

use std::fs;
use std::path::Path;
use std::process::Command;

fn boxmom_bin() -> &'static str {
    env!("CARGO_BIN_EXE_boxmom")
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(boxmom_bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn spectrum_rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "rect.json",
        r#"{
          "experiment": "spectrum",
          "region": {"kind": "rectangle", "lx": 2.0, "ly": 1.0},
          "boundary": {
            "lambda": [
              {"direction": [1, 0], "default": 0.0, "per_segment": {"4": 0.5, "2": -0.25}}
            ]
          },
          "spectrum": {"direction": [1, 0], "anchors": [0.25, 0.5], "n_min": -6, "n_max": 6}
        }"#,
    );
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    for out in [&out_a, &out_b] {
        let st = run(&["spectrum", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(
            st.status.success(),
            "{}",
            String::from_utf8_lossy(&st.stderr)
        );
    }
    for name in ["spectrum.csv", "report.json", "manifest.json"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
}

#[test]
fn manifest_hashes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "evolve.json",
        r#"{
          "experiment": "evolve",
          "region": {"kind": "interval", "a": 0.0, "b": 1.0},
          "boundary": {"dirichlet_segments": [1, 2]},
          "state": {"kind": "gaussian", "center": [0.4, 0.0], "width": 0.08, "momentum": [5, 0]},
          "numerics": {"h": 0.0078125, "dt": 0.001, "steps": 20, "mass": 2.0}
        }"#,
    );
    let out = tmp.path().join("out");
    let st = run(&["evolve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(
        st.status.success(),
        "{}",
        String::from_utf8_lossy(&st.stderr)
    );

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let files = manifest["files"].as_array().unwrap();
    let names: Vec<&str> = files.iter().map(|f| f["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"series.csv"));
    assert!(names.contains(&"final_state.csv"));
    assert!(names.contains(&"report.json"));
    for f in files {
        let data = fs::read(out.join(f["name"].as_str().unwrap())).unwrap();
        let mut hasher = <sha2::Sha256 as sha2::Digest>::new();
        sha2::Digest::update(&mut hasher, &data);
        let digest: String = sha2::Digest::finalize(hasher)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        assert_eq!(digest, f["sha256"].as_str().unwrap(), "hash mismatch");
        assert_eq!(data.len() as u64, f["bytes"].as_u64().unwrap());
    }
    assert!(manifest["config_sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn config_schema_violations_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    // unknown key
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        r#"{
          "experiment": "spectrum",
          "region": {"kind": "rectangle", "lx": 2.0, "ly": 1.0},
          "unknown_key": true
        }"#,
    );
    let st = run(&[
        "spectrum",
        "--config",
        &cfg,
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(st.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&st.stderr);
    assert!(
        msg.contains("unknown_key") || msg.contains("unknown field"),
        "{msg}"
    );

    // experiment/subcommand mismatch
    let cfg = write_config(
        tmp.path(),
        "mismatch.json",
        r#"{
          "experiment": "modes",
          "region": {"kind": "rectangle", "lx": 2.0, "ly": 1.0}
        }"#,
    );
    let st = run(&[
        "spectrum",
        "--config",
        &cfg,
        "--out",
        tmp.path().join("o2").to_str().unwrap(),
    ]);
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    // a state with no support in the region: normalization fails numerically
    let cfg = write_config(
        tmp.path(),
        "numfail.json",
        r#"{
          "experiment": "evolve",
          "region": {"kind": "interval", "a": 0.0, "b": 1.0},
          "state": {"kind": "gaussian", "center": [80.0, 0.0], "width": 0.01, "momentum": [0, 0]},
          "numerics": {"h": 0.015625, "dt": 0.001, "steps": 5}
        }"#,
    );
    let st = run(&[
        "evolve",
        "--config",
        &cfg,
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(
        st.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&st.stderr)
    );
}

#[test]
fn uncertainty_report_passes_and_threads_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "unc.json",
        r#"{
          "experiment": "uncertainty",
          "seed": 5,
          "region": {"kind": "rectangle", "lx": 2.0, "ly": 1.0},
          "boundary": {"gamma": {"default": 0.8}},
          "numerics": {"lines": 48, "modes": 48},
          "uncertainty": {"count": 3, "m_direction": [1, 0]}
        }"#,
    );
    let out1 = tmp.path().join("t1");
    let out2 = tmp.path().join("t2");
    let st = run(&[
        "uncertainty",
        "--config",
        &cfg,
        "--out",
        out1.to_str().unwrap(),
    ]);
    assert!(
        st.status.success(),
        "{}",
        String::from_utf8_lossy(&st.stderr)
    );
    let st = run(&[
        "uncertainty",
        "--config",
        &cfg,
        "--out",
        out2.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert!(st.status.success());
    let a = fs::read(out1.join("report.json")).unwrap();
    let b = fs::read(out2.join("report.json")).unwrap();
    assert_eq!(a, b, "thread count changed the artifact bytes");
    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert!(report["min_slack"].as_f64().unwrap() >= -1e-8);
}

#[test]
fn commute_verdicts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "rounded.json",
        r#"{
          "experiment": "commute",
          "region": {"kind": "rounded_rectangle", "lx": 2.0, "ly": 1.0, "radius": 0.01},
          "boundary": {
            "lambda": [
              {"direction": [1, 0], "default": 0.4},
              {"direction": [0, 1], "default": -0.7}
            ]
          },
          "commute": {"l_direction": [1, 0], "m_direction": [0, 1], "n_x": [1], "n_y": [1]}
        }"#,
    );
    let out = tmp.path().join("o");
    let st = run(&["commute", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(
        st.status.success(),
        "{}",
        String::from_utf8_lossy(&st.stderr)
    );
    let verdict: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["verdict"]["verdict"], "incompatible_bc");
    assert!(verdict["verdict"]["corner_density"].as_f64().unwrap() > 0.05);
    assert!(!verdict["mode_residuals"].as_array().unwrap().is_empty());
}
