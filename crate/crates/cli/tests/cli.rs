use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn qcollide(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcollide")).args(args).env_remove("QCOLLIDE_WORKERS").output().unwrap()
}

fn run_ok(args: &[&str]) {
    let out = qcollide(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_column(path: &Path, name: &str) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let k = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

fn rho(report: &Value) -> Vec<f64> {
    ["re", "im"]
        .iter()
        .flat_map(|part| report["rho"][part].as_array().unwrap().iter().flat_map(|row| row.as_array().unwrap().clone()))
        .map(|x| x.as_f64().unwrap())
        .collect()
}

fn steady(dir: &TempDir, name: &str, spec: &str) -> Value {
    let out = dir.path().join(name);
    run_ok(&["steady-state", "--unitary", spec, "--outdir", out.to_str().unwrap()]);
    json(&out.join("steady_state.json"))
}

#[test]
fn swap_sweep_finds_mode_switch_and_full_swap_minimum() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep");
    run_ok(&["swap-sweep", "--outdir", out.to_str().unwrap()]);
    let csv = out.join("sweep.csv");
    let phi = csv_column(&csv, "phi");
    let w = csv_column(&csv, "W_partial");
    assert_eq!(phi.len(), 201);
    let first = (1..w.len()).find(|&i| w[i - 1] * w[i] < 0.0).unwrap();
    assert!(phi[first - 1] > 0.24 * PI && phi[first] < 0.26 * PI, "{} {}", phi[first - 1], phi[first]);

    let summary = json(&out.join("summary.json"));
    assert!((summary["min_w_complete_phi"].as_f64().unwrap() - PI / 2.0).abs() < 1e-12);

    let again = dir.path().join("again");
    run_ok(&["swap-sweep", "--outdir", again.to_str().unwrap()]);
    for f in ["sweep.csv", "summary.json", "config.toml"] {
        assert_eq!(fs::read(out.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn sweep_rejects_bad_grid() {
    assert_eq!(qcollide(&["swap-sweep", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(qcollide(&["swap-sweep", "--phi-min", "1", "--phi-max", "0.5"]).status.code(), Some(2));
}

#[test]
fn steady_state_unitary_specs() {
    let dir = TempDir::new().unwrap();
    let ii = rho(&steady(&dir, "ii", "II"));
    let exact = rho(&steady(&dir, "half_pi", "swap(pi/2)"));
    let decimal = rho(&steady(&dir, "decimal", "swap(1.570796)"));
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(diff(&ii, &exact) <= 1e-12);
    // seven decimals leave the angle off by about 3e-7
    assert!(diff(&ii, &decimal) < 1e-6);

    let near_quarter = steady(&dir, "quarter", "swap(0.785398)");
    let w = near_quarter["thermo"]["w_partial"].as_f64().unwrap();
    let w0 = steady(&dir, "zero", "swap(0)")["thermo"]["w_partial"].as_f64().unwrap();
    assert!(w.abs() < 0.05 * w0.abs(), "{w} vs {w0}");

    let a = steady(&dir, "haar_a", "haar(42)");
    let b = steady(&dir, "haar_b", "haar(42)");
    assert_eq!(a, b);
    assert_eq!(a["discord"]["measurement"], "projective");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(qcollide(&["steady-state", "--unitary", "swap(x)", "--outdir", out]).status.code(), Some(2));
    assert_eq!(qcollide(&["steady-state", "--gamma", "0", "--outdir", out]).status.code(), Some(3));
    assert_eq!(qcollide(&["steady-state", "--n1", "-1", "--outdir", out]).status.code(), Some(2));
    assert_eq!(qcollide(&["random-ensemble", "--workers", "0", "--outdir", out]).status.code(), Some(2));
    assert_eq!(qcollide(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(qcollide(&["--help"]).status.code(), Some(0));
}

#[test]
fn lindblad_check_shrinks_with_tau() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("l");
    run_ok(&["lindblad-check", "--tau-list", "0.1,0.05,0.025", "--outdir", out.to_str().unwrap()]);
    let d = csv_column(&out.join("lindblad.csv"), "trace_distance");
    assert!(d[1] < d[0] && d[2] < d[1], "{d:?}");
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["monotone"], true);
    assert!(summary["equilibrium_distance"].as_f64().unwrap() <= 1e-6);

    let bad = qcollide(&["lindblad-check", "--tau-list", "0.1,-0.05", "--outdir", out.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn ensemble_is_independent_of_worker_count() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        run_ok(&[
            "random-ensemble", "--samples", "64", "--bins", "8", "--seed", "5", "--workers", workers, "--outdir",
            out.to_str().unwrap(),
        ]);
        out
    };
    let one = run("one", "1");
    let four = run("four", "4");
    for f in ["records.csv", "summary.json", "octagon.json", "hist_W_partial.csv", "hist_Q2_complete_W_complete.csv"] {
        assert_eq!(fs::read(one.join(f)).unwrap(), fs::read(four.join(f)).unwrap(), "{f}");
    }
    let manifest = json(&one.join("manifest.json"));
    assert_eq!(manifest["seed"], 5);
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 9);
    for entry in files {
        let bytes = fs::read(one.join(entry["path"].as_str().unwrap())).unwrap();
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(entry["sha256"].as_str().unwrap(), digest);
    }
    assert_eq!(csv_column(&one.join("records.csv"), "W_partial").len(), 64);
}

#[test]
fn octagon_writes_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    run_ok(&["octagon", "--outdir", out.to_str().unwrap()]);
    let report = json(&out.join("octagon.json"));
    assert_eq!(report["vertices"].as_array().unwrap().len(), 8);
    assert_eq!(report["permutation_points"].as_array().unwrap().len(), 24);
}

#[test]
fn config_file_and_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "B2 = 0.6\ntau = 0.05\n").unwrap();
    let out = dir.path().join("s");
    run_ok(&["steady-state", "--config", cfg.to_str().unwrap(), "--n2", "3", "--outdir", out.to_str().unwrap()]);
    let params = &json(&out.join("steady_state.json"))["params"];
    assert_eq!(params["B2"].as_f64(), Some(0.6));
    assert_eq!(params["tau"].as_f64(), Some(0.05));
    assert_eq!(params["n2"].as_f64(), Some(3.0));
    assert_eq!(params["B1"].as_f64(), Some(0.1));

    fs::write(&cfg, "B3 = 1\n").unwrap();
    assert_eq!(qcollide(&["octagon", "--config", cfg.to_str().unwrap(), "--outdir", out.to_str().unwrap()]).status.code(), Some(2));
}
