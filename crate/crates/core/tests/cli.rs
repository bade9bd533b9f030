// Copyright 2026 The detector-efficiency Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! End-to-end tests of the `deteff` command line, driven in-process.

use std::fs;
use std::path::{Path, PathBuf};

use detector_efficiency::cli::run_with;
use detector_efficiency::io::{load_povm, save_povm, LoadedPovm};
use detector_efficiency::{click_detector, discard_detector, pnr_detector, DiagonalPovm};
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn deteff(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("deteff").chain(args.iter().copied()), &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write_diag(dir: &Path, name: &str, p: DiagonalPovm) -> PathBuf {
    let path = dir.join(name);
    save_povm(&path, &LoadedPovm::Diagonal(p), Default::default()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn diagonals(path: &Path) -> DiagonalPovm {
    match load_povm(path).unwrap().0 {
        LoadedPovm::Diagonal(d) => d,
        LoadedPovm::Dense(_) => panic!("expected a diagonal file"),
    }
}

#[test]
fn validate_accepts_click_detector() {
    let dir = TempDir::new().unwrap();
    let f = write_diag(dir.path(), "c.json", click_detector(0.7, 5).unwrap());
    let r = deteff(&["validate", s(&f)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("result: pass"), "{}", r.out);
}

#[test]
fn validate_reports_negative_element() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("bad.json");
    fs::write(
        &f,
        r#"{"schema":1,"cutoff":1,"outcomes":[
            {"label":"a","diagonal":[1.2,0.5]},
            {"label":"b","diagonal":[-0.2,0.5]}]}"#,
    )
    .unwrap();
    let r = deteff(&["validate", s(&f)]);
    assert_eq!(r.code, 1);
    assert!(r.out.contains("-2.000000e-1") && r.out.contains("result: fail"), "{}", r.out);
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("broken.json");
    fs::write(&f, "{\"schema\": 1, \"cutoff\": ").unwrap();
    let r = deteff(&["validate", s(&f)]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("line"), "{}", r.err);
}

#[test]
fn loss_composes_click_detectors() {
    let dir = TempDir::new().unwrap();
    let f = write_diag(dir.path(), "c.json", click_detector(0.8, 6).unwrap());
    let o = dir.path().join("out.json");
    let r = deteff(&["loss", s(&f), "--eta", "0.5", "-o", s(&o)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let got = diagonals(&o);
    assert!(got.max_abs_diff(&click_detector(0.4, 6).unwrap()).unwrap() < 1e-12);
}

#[test]
fn unit_loss_leaves_content_unchanged() {
    let dir = TempDir::new().unwrap();
    let f = write_diag(dir.path(), "p.json", pnr_detector(0.37, 5).unwrap());
    let r = deteff(&["loss", s(&f), "--eta", "1"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.out, fs::read_to_string(&f).unwrap());
}

#[test]
fn inverse_loss_is_flagged_unphysical() {
    let dir = TempDir::new().unwrap();
    let f = write_diag(dir.path(), "c.json", click_detector(0.6, 4).unwrap());
    let r = deteff(&["loss", s(&f), "--eta", "0.5", "--invert"]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["metadata"]["unphysical"], Value::Bool(true));
    let off = v["outcomes"][0]["diagonal"][1].as_f64().unwrap();
    assert!((off - (-0.2)).abs() < 1e-12, "{off}");

    let r = deteff(&["validate", s(&f)]);
    assert_eq!(r.code, 0);
}

#[test]
fn loss_rejects_bad_transmissivity() {
    let dir = TempDir::new().unwrap();
    let f = write_diag(dir.path(), "c.json", click_detector(0.6, 4).unwrap());
    assert_eq!(deteff(&["loss", s(&f), "--eta", "1.5"]).code, 2);
    assert_eq!(deteff(&["loss", s(&f), "--eta", "0"]).code, 2);
    assert_eq!(deteff(&["loss", s(&f)]).code, 2);
}

fn estimate(out: &str) -> (f64, f64) {
    let v: Value = serde_json::from_str(out).unwrap();
    (
        v["estimate"]["lower"].as_f64().unwrap(),
        v["estimate"]["upper"].as_f64().unwrap(),
    )
}

#[test]
fn eff_brackets_known_efficiencies() {
    let dir = TempDir::new().unwrap();
    let c = write_diag(dir.path(), "c.json", click_detector(0.5, 8).unwrap());
    let r = deteff(&["eff", s(&c)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let (lo, hi) = estimate(&r.out);
    assert!(lo <= 0.5 + 1e-9 && 0.5 <= hi + 1e-9 && hi - lo <= 1e-6, "{lo} {hi}");

    let p = write_diag(dir.path(), "p.json", pnr_detector(0.75, 6).unwrap());
    let (lo, hi) = estimate(&deteff(&["eff", s(&p)]).out);
    assert!(lo - 1e-6 <= 0.75 && 0.75 <= hi + 1e-6, "{lo} {hi}");

    let d = dir.path().join("d.json");
    save_povm(&d, &LoadedPovm::Dense(discard_detector(4)), Default::default()).unwrap();
    let (lo, hi) = estimate(&deteff(&["eff", s(&d)]).out);
    assert_eq!(lo, 0.0);
    assert!(hi <= 1e-6);
}

#[test]
fn eff_cutoff_sweep_lists_every_cutoff() {
    let dir = TempDir::new().unwrap();
    let c = write_diag(dir.path(), "c.json", click_detector(0.3, 5).unwrap());
    let r = deteff(&["eff", s(&c), "--cutoff-sweep", "--tol", "1e-4"]);
    assert_eq!(r.code, 0);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    let sweep = v["cutoff_sweep"].as_array().unwrap();
    assert_eq!(sweep.len(), 5);
    for e in sweep {
        let (lo, hi) = (e["lower"].as_f64().unwrap(), e["upper"].as_f64().unwrap());
        assert!(lo - 1e-4 <= 0.3 && 0.3 <= hi + 1e-4);
    }
}

#[test]
fn eff_rejects_invalid_povm() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("bad.json");
    fs::write(
        &f,
        r#"{"schema":1,"cutoff":1,"outcomes":[{"label":"a","diagonal":[0.5,0.5]}]}"#,
    )
    .unwrap();
    let r = deteff(&["eff", s(&f)]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("invalid POVM"), "{}", r.err);
}

fn simulate(config: &str) -> (Run, Value) {
    let r = deteff(&["simulate", config]);
    let v = serde_json::from_str(&r.out).unwrap_or(Value::Null);
    (r, v)
}

#[test]
fn simulate_passthrough_returns_detector() {
    let (r, v) = simulate("configs/passthrough.json");
    assert_eq!(r.code, 0, "{}", r.err);
    let text = serde_json::to_string(&v["povm"]).unwrap();
    let got = match detector_efficiency::io::parse_povm(&text).unwrap().0 {
        LoadedPovm::Diagonal(d) => d,
        _ => panic!("diagonal expected"),
    };
    assert!(got.max_abs_diff(&click_detector(0.7, 4).unwrap()).unwrap() < 1e-14);
}

#[test]
fn simulate_beamsplitter_gives_lossy_click() {
    let dir = TempDir::new().unwrap();
    let o = dir.path().join("eff.json");
    let r = deteff(&["simulate", "configs/beamsplitter_click.json", "-o", s(&o)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let got = load_povm(&o).unwrap().0.to_povm();
    assert!(got.max_abs_diff(&click_detector(0.3, 6).unwrap().to_povm()).unwrap() < 1e-10);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    let upper = v["efficiency"]["upper"].as_f64().unwrap();
    assert!((upper - 0.3).abs() < 2e-6, "{upper}");
}

#[test]
fn simulate_adaptive_sample_respects_bound() {
    let (r, v) = simulate("configs/adaptive_m3.json");
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(v["validation"]["positive"], Value::Bool(true));
    let upper = v["efficiency"]["upper"].as_f64().unwrap();
    let max_nominal = v["max_nominal_efficiency"].as_f64().unwrap();
    assert_eq!(max_nominal, 0.9);
    assert!(upper <= 0.9 + 2e-6, "{upper}");
}

#[test]
fn nogo_passes_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b, j) = (dir.path().join("a.csv"), dir.path().join("b.csv"), dir.path().join("s.json"));
    let r = deteff(&["nogo", "configs/nogo_pools.json", "--csv", s(&a), "--json", s(&j)]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    let r2 = deteff(&["nogo", "configs/nogo_pools.json", "--csv", s(&b)]);
    assert_eq!(r2.code, 0);
    let csv = fs::read(&a).unwrap();
    assert_eq!(csv, fs::read(&b).unwrap());
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 101);
    let summary: Value = serde_json::from_str(&fs::read_to_string(&j).unwrap()).unwrap();
    assert_eq!(summary["violations"], 0);
    assert!(summary["worst_margin"].as_f64().unwrap() >= -summary["slack"].as_f64().unwrap());
}

#[test]
fn nogo_handles_several_virtual_detectors() {
    let r = deteff(&["nogo", "configs/nogo_two_detectors.json", "--trials", "10"]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["trials"], 10);
}

#[test]
fn nogo_flags_mislabeled_pool() {
    let r = deteff(&["nogo", "configs/nogo_mislabeled.json"]);
    assert_eq!(r.code, 1, "{}{}", r.out, r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert!(v["worst_margin"].as_f64().unwrap() < -0.3);
}

#[test]
fn nogo_rejects_shared_detectors() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("shared.json");
    fs::write(
        &f,
        r#"{"signal_cutoff":2,"total_cutoff":4,"nogo":{"trials":2,"virtual_detectors":[
            {"interferometer":"haar","pool":[{"id":"x","kind":"click","efficiency":0.5}]},
            {"interferometer":"haar","pool":[{"id":"x","kind":"click","efficiency":0.5}]}]}}"#,
    )
    .unwrap();
    let r = deteff(&["nogo", s(&f)]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("x"), "{}", r.err);
}

#[test]
fn config_file_sets_flags_and_explicit_flags_win() {
    let dir = TempDir::new().unwrap();
    let j = dir.path().join("s.json");
    let r = deteff(&["--config", "configs/flags.json", "nogo", "configs/nogo_pools.json", "--json", s(&j)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["trials"], 20);
    assert_eq!(v["seed"], 5);
    let r = deteff(&["--config", "configs/flags.json", "nogo", "configs/nogo_pools.json", "--trials", "3"]);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["trials"], 3);

    let c = write_diag(dir.path(), "c.json", click_detector(0.5, 4).unwrap());
    let r = deteff(&["--config", "configs/flags.json", "eff", s(&c)]);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["estimate"]["bisection_tol"], 1e-7);
}

#[test]
fn help_and_usage_errors() {
    let r = deteff(&["--help"]);
    assert_eq!(r.code, 0);
    for cmd in ["validate", "loss", "eff", "simulate", "nogo"] {
        assert!(r.out.contains(cmd), "{cmd} missing from help");
    }
    assert_eq!(deteff(&["frobnicate"]).code, 2);
    assert_eq!(deteff(&["validate", "/nonexistent/file.json"]).code, 2);
}
