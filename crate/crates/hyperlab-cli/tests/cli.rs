use assert_cmd::Command;
use predicates::prelude::*;
use std::path::Path;

use hyperlab_core::curve::{save_herm_csv, save_point_csv, SampledCurve};
use hyperlab_core::spectral::HermMatrix;
use hyperlab_core::HomPoly;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn hyperlab() -> Command {
    Command::cargo_bin("hyperlab").unwrap()
}

fn gen_lorentzian(dir: &Path, n: usize) -> std::path::PathBuf {
    hyperlab()
        .args(["generate", "lorentzian", "--n", &n.to_string(), "--out"])
        .arg(dir)
        .assert()
        .success();
    dir.join(format!("lorentzian_n{}.json", n))
}

#[test]
fn check_hyperbolic_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let poly = gen_lorentzian(tmp.path(), 4);

    hyperlab()
        .args(["check-hyperbolic", "--poly"])
        .arg(&poly)
        .args(["--dir", "1,0,0,0"])
        .assert()
        .success()
        .stdout(predicate::str::contains("passed-sampling"));

    hyperlab()
        .args(["check-hyperbolic", "--poly"])
        .arg(&poly)
        .args(["--dir", "0,1,0,0"])
        .assert()
        .code(2)
        .stdout(predicate::str::contains("counterexample-found"));

    hyperlab()
        .args(["check-hyperbolic", "--poly"])
        .arg(tmp.path().join("no_such_file.json"))
        .args(["--dir", "1,0,0,0"])
        .assert()
        .code(1);
}

#[test]
fn usage_errors_exit_one() {
    hyperlab().arg("frobnicate").assert().code(1);
    hyperlab()
        .args(["track", "--mode", "poly", "--curve", "/nonexistent.csv"])
        .assert()
        .code(1)
        .stderr(predicate::str::contains("--poly"));
}

#[test]
fn generate_writes_loadable_polynomials_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    hyperlab()
        .args(["generate", "gk", "--d", "3", "--k", "2", "--out"])
        .arg(tmp.path())
        .assert()
        .success();
    let f = HomPoly::load(&tmp.path().join("gk_d3_k2.json")).unwrap();
    assert_eq!(f.nvars(), 3);
    assert_eq!(f.degree(), 3); // C(3,2) subset factors

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["construction"], "gk");
    assert_eq!(manifest["files"][0], "gk_d3_k2.json");
    assert_eq!(manifest["params"]["d"], 3);
}

#[test]
fn generated_determinantal_is_stable_and_seeded_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    for sub in ["a", "b"] {
        hyperlab()
            .args(["generate", "determinantal", "--m", "3", "--n", "2", "--seed", "7", "--out"])
            .arg(tmp.path().join(sub))
            .assert()
            .success();
    }
    let name = "determinantal_m3_n2_seed7.json";
    let a = std::fs::read(tmp.path().join("a").join(name)).unwrap();
    let b = std::fs::read(tmp.path().join("b").join(name)).unwrap();
    assert_eq!(a, b);

    hyperlab()
        .args(["check-stable", "--poly"])
        .arg(tmp.path().join("a").join(name))
        .assert()
        .success()
        .stdout(predicate::str::contains("passed-sampling"));
}

#[test]
fn track_herm_curve_writes_branches_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let curve = SampledCurve::sample(-1.0, 1.0, 400, |t| {
        HermMatrix::new(DMatrix::from_diagonal(&nalgebra::dvector![
            Complex64::new(t, 0.0),
            Complex64::new(-t, 0.0)
        ]))
        .unwrap()
    })
    .unwrap();
    let csv = tmp.path().join("diag.csv");
    save_herm_csv(&curve, &csv).unwrap();

    let prefix = tmp.path().join("run");
    hyperlab()
        .args(["track", "--mode", "herm", "--curve"])
        .arg(&csv)
        .arg("--out")
        .arg(&prefix)
        .assert()
        .success();

    let branches = std::fs::read_to_string(tmp.path().join("run.branches.csv")).unwrap();
    let mut lines = branches.lines();
    assert_eq!(lines.next().unwrap(), "t,lam1,lam2,perm");
    assert_eq!(lines.count(), 401);

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("run.report.json")).unwrap())
            .unwrap();
    let swaps = report["crossing_log"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["action"] == "swap")
        .count();
    assert_eq!(swaps, 1);
    assert!(report["regularity"]["tv_derivative"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn track_poly_mode_with_refinement_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let poly = gen_lorentzian(tmp.path(), 3);
    let curve = SampledCurve::sample(-1.0, 1.0, 256, |t| vec![0.0, t, 0.0]).unwrap();
    let csv = tmp.path().join("line.csv");
    save_point_csv(&curve, &csv).unwrap();

    let out = hyperlab()
        .args(["track", "--mode", "poly", "--poly"])
        .arg(&poly)
        .args(["--dir", "1,0,0", "--curve"])
        .arg(&csv)
        .args(["--refine", "3..8"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let report: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let trace = report["regularity"]["refinement_trace"].as_array().unwrap();
    assert_eq!(trace.len(), 6);
    assert_eq!(trace[0]["nsteps"], 8);
    assert_eq!(trace[5]["nsteps"], 256);
    for entry in trace {
        assert!(entry["tv_derivative"].as_f64().unwrap() <= 1e-9);
    }
}

#[test]
fn roots_modes_and_counterexample_exit() {
    let tmp = tempfile::tempdir().unwrap();
    let poly = gen_lorentzian(tmp.path(), 4);

    let out = hyperlab()
        .args(["roots", "--poly"])
        .arg(&poly)
        .args(["--dir", "1,0,0,0", "--point", "0,3,4,0"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let roots: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let vals = roots["values"].as_array().unwrap();
    assert!((vals[0].as_f64().unwrap() - 5.0).abs() < 1e-9);
    assert!((vals[1].as_f64().unwrap() + 5.0).abs() < 1e-9);

    hyperlab()
        .args(["roots", "--coeffs", "0,-1"])
        .assert()
        .success();
    // Z^2 + 1 has no real roots: mathematical failure, not usage.
    hyperlab().args(["roots", "--coeffs", "0,1"]).assert().code(2);
    // Neither form given.
    hyperlab().arg("roots").assert().code(1);
}

#[test]
fn sv_rank_deficiency_is_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let curve = SampledCurve::sample(-1.0, 1.0, 100, |t| {
        DMatrix::from_element(1, 1, Complex64::new(t, 0.0))
    })
    .unwrap();
    let csv = tmp.path().join("scalar.csv");
    hyperlab_core::curve::save_complex_csv(&curve, &csv).unwrap();

    hyperlab()
        .args(["track", "--mode", "sv", "--curve"])
        .arg(&csv)
        .assert()
        .code(2)
        .stderr(predicate::str::contains("rank deficient"));
}

#[test]
fn regularity_report_on_plain_data() {
    let tmp = tempfile::tempdir().unwrap();
    let curve =
        SampledCurve::sample(-1.0, 1.0, 200, |t| vec![t.abs(), -t.abs()]).unwrap();
    let csv = tmp.path().join("pts.csv");
    save_point_csv(&curve, &csv).unwrap();

    let out = hyperlab()
        .args(["regularity-report", "--pair", "--curve"])
        .arg(&csv)
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let report: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let lip = report["regularity"]["lipschitz"].as_f64().unwrap();
    assert!((lip - 1.0).abs() < 1e-9);
    assert!(report["regularity"]["tv_derivative"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn sweep_family_table() {
    let tmp = tempfile::tempdir().unwrap();
    let family = tmp.path().join("family.json");
    std::fs::write(
        &family,
        r#"{
  "mode": "herm",
  "t0": -1.0, "t1": 1.0, "nsteps": 200,
  "param_start": -1.0, "param_stop": 1.0, "param_count": 5,
  "matrix_base": {"m": 2, "n": 2, "re": [[0, 0], [0, 0]], "im": [[0, 0], [0, 0]]},
  "matrix_t":    {"m": 2, "n": 2, "re": [[1, 0], [0, -1]], "im": [[0, 0], [0, 0]]},
  "matrix_r":    {"m": 2, "n": 2, "re": [[0, 0], [0, 1]], "im": [[0, 0], [0, 0]]}
}"#,
    )
    .unwrap();

    let table = tmp.path().join("table.csv");
    hyperlab()
        .args(["sweep", "--family"])
        .arg(&family)
        .arg("--out")
        .arg(&table)
        .assert()
        .success();

    let text = std::fs::read_to_string(&table).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "param,c1_bound,w21_norm,status");
    assert_eq!(lines.len(), 7); // header + 5 rows + sup
    assert!(lines[6].starts_with("sup,"));
    assert!(lines[1..6].iter().all(|l| l.ends_with(",ok")));
}

#[test]
fn reports_are_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let poly = gen_lorentzian(tmp.path(), 4);
    for name in ["r1.json", "r2.json"] {
        hyperlab()
            .args(["check-hyperbolic", "--poly"])
            .arg(&poly)
            .args(["--dir", "1,0.2,0.1,0", "--samples", "300", "--seed", "42", "--out"])
            .arg(tmp.path().join(name))
            .assert()
            .success();
    }
    let a = std::fs::read(tmp.path().join("r1.json")).unwrap();
    let b = std::fs::read(tmp.path().join("r2.json")).unwrap();
    assert_eq!(a, b);
}
