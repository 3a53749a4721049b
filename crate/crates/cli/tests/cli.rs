use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_majorana");

struct Run {
    code: i32,
    out: PathBuf,
    stderr: String,
    _dir: tempfile::TempDir,
}

fn run(config: &str, args: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let result = Command::new(BIN)
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    Run {
        code: result.status.code().unwrap(),
        out,
        stderr: String::from_utf8(result.stderr).unwrap(),
        _dir: dir,
    }
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// `(t, x, rho)` rows of a density CSV.
fn density_rows(path: &Path) -> Vec<(f64, f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,rho"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect()
}

const LINEAR: &str = r#"{"potential": {"kind": "linear", "k": 1}, "shape_invariant": true}"#;

#[test]
fn linear_spectrum_matches_oracle() {
    let r = run(LINEAR, &["spectrum"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report = json(&r.out.join("spectrum.json"));
    let levels = report["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 11);
    for level in levels {
        let n = level["n"].as_u64().unwrap() as f64;
        let e = level["energy_algebraic"].as_f64().unwrap();
        assert!((e - (2.0 * n).sqrt()).abs() < 1e-15);
        assert!(level["abs_diff"].as_f64().unwrap() <= 1e-3);
    }
    assert_eq!(report["potential"]["kind"], "linear");
    assert_eq!(report["params"]["hbar"], 1.0);
}

#[test]
fn hyperbolic_and_expression_families() {
    for cfg in [
        r#"{"potential": {"kind": "rosen_morse", "a": 4, "b": 2, "alpha": 1}, "shape_invariant": true, "n_max": 3}"#,
        r#"{"potential": {"kind": "poschl_teller", "a": 4, "alpha": 1}, "shape_invariant": true, "n_max": 3}"#,
        r#"{"potential": {"kind": "scarf", "a": 4, "b": 1, "alpha": 1}, "shape_invariant": true, "n_max": 3}"#,
        r#"{"potential": {"kind": "expression", "expr": "k*x", "parameters": {"k": 2},
            "family": {"parameter": "k", "map": "k", "remainder": "2*c*hbar*k"}},
            "grid": {"x_min": -10, "x_max": 8, "n_points": 3001}, "shape_invariant": true, "n_max": 6}"#,
    ] {
        let r = run(cfg, &["spectrum"]);
        assert_eq!(r.code, 0, "{cfg}: {}", r.stderr);
    }
}

#[test]
fn free_massive_shape_invariance_is_a_physics_error() {
    let r = run(
        r#"{"potential": {"kind": "constant", "value": 0}, "shape_invariant": true}"#,
        &["spectrum"],
    );
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("broken"), "{}", r.stderr);
}

#[test]
fn config_errors_exit_one() {
    assert_eq!(run("{", &["spectrum"]).code, 1);
    assert_eq!(
        run(
            r#"{"potential": {"kind": "linear", "k": 1}, "n_points": 3}"#,
            &["spectrum"]
        )
        .code,
        1
    );
    assert_eq!(
        run(
            r#"{"potential": {"kind": "expression", "expr": "3*tanh(x"}}"#,
            &["classify"]
        )
        .code,
        1
    );
    assert_eq!(run(LINEAR, &["frobnicate"]).code, 1);
    assert_eq!(run(LINEAR, &["spectrum", "--tol", "-1"]).code, 1);
}

#[test]
fn tight_tolerance_exits_two() {
    let r = run(LINEAR, &["spectrum", "--tol", "1e-9"]);
    assert_eq!(r.code, 2);
    assert!(r.out.join("spectrum.json").exists());
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let cfg = r#"{"potential": {"kind": "linear", "k": 1}, "shape_invariant": true,
                  "grid": {"x_min": -9, "x_max": 7, "n_points": 401}, "evolve": {"n": 2, "periods": 0.5}}"#;
    for args in [&["spectrum"][..], &["evolve", "--pde"], &["verify"]] {
        let a = run(cfg, args);
        let b = run(cfg, args);
        let mut names: Vec<_> = std::fs::read_dir(&a.out)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            assert_eq!(
                std::fs::read(a.out.join(&name)).unwrap(),
                std::fs::read(b.out.join(&name)).unwrap(),
                "{name:?}"
            );
        }
    }
}

#[test]
fn evolve_first_excited_state() {
    let r = run(
        r#"{"potential": {"kind": "linear", "k": 1}, "evolve": {"n": 1, "periods": 1}}"#,
        &["evolve", "--pde"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = density_rows(&r.out.join("density.csv"));
    // y = x + 1 vanishes at x = −1, a grid node of the default grid
    let (_, x, rho) = rows
        .iter()
        .find(|(t, x, _)| *t == 0.0 && (x + 1.0).abs() < 1e-9)
        .unwrap();
    assert!((x + 1.0).abs() < 1e-9 && *rho <= 1e-30);
    for w in rows.windows(2) {
        assert!(
            (w[0].0, w[0].1) < (w[1].0, w[1].1),
            "rows must be sorted by (t, x)"
        );
    }
    let summary = json(&r.out.join("evolve_summary.json"));
    assert!(summary["pde"]["max_component_error"].as_f64().unwrap() <= 1e-3);
    assert!(summary["pde"]["norm_drift"].as_f64().unwrap() <= 1e-6);
    assert_eq!(
        density_rows(&r.out.join("density_pde.csv")).len(),
        rows.len()
    );
}

#[test]
fn evolve_ground_state_is_stationary_and_warns() {
    let r = run(
        r#"{"potential": {"kind": "linear", "k": 1}, "evolve": {"n": 0, "periods": 1, "t_final": 2}}"#,
        &["evolve"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stderr.contains("warning"));
    let summary = json(&r.out.join("evolve_summary.json"));
    assert_eq!(summary["t_final"], 2.0);
    assert_eq!(summary["warnings"].as_array().unwrap().len(), 1);
    let rows = density_rows(&r.out.join("density.csv"));
    let first: Vec<f64> = rows.iter().filter(|r| r.0 == 0.0).map(|r| r.2).collect();
    for chunk in rows.chunks(first.len()) {
        assert_eq!(chunk.iter().map(|r| r.2).collect::<Vec<_>>(), first);
    }
}

#[test]
fn evolve_second_excited_state_has_two_nodes() {
    let r = run(
        r#"{"potential": {"kind": "linear", "k": 1}, "evolve": {"n": 2, "t_final": 0}}"#,
        &["evolve"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rho: Vec<f64> = density_rows(&r.out.join("density.csv"))
        .iter()
        .map(|r| r.2)
        .collect();
    let peak = rho.iter().copied().fold(0.0, f64::max);
    let nodes = (1..rho.len() - 1)
        .filter(|&i| {
            rho[i] <= rho[i - 1]
                && rho[i] < rho[i + 1]
                && rho[i] < 1e-3 * peak
                && rho[i - 1] > 1e-6 * peak
        })
        .count();
    assert_eq!(nodes, 2);
}

#[test]
fn evolve_non_linear_potential_uses_oracle_states() {
    let r = run(
        r#"{"potential": {"kind": "poschl_teller", "a": 3, "alpha": 1}, "evolve": {"n": 1, "periods": 1}}"#,
        &["evolve", "--pde"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let summary = json(&r.out.join("evolve_summary.json"));
    assert!(summary["pde"]["norm_drift"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn verify_default_linear_passes() {
    let r = run(LINEAR, &["verify"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report = json(&r.out.join("verify.json"));
    assert_eq!(report["pass"], true);
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for expected in [
        "zero_mode",
        "isospectral",
        "shape_invariance",
        "algebraic_spectrum",
        "ladder_mapping",
        "norm_pde",
        "coupling_audit",
        "oracle_convergence",
    ] {
        assert!(
            names.contains(&expected),
            "{expected} missing from {names:?}"
        );
    }
}

#[test]
fn verify_flags_coarse_grid() {
    let r = run(
        r#"{"potential": {"kind": "linear", "k": 1}, "grid": {"x_min": -13, "x_max": 11, "n_points": 101}}"#,
        &["verify"],
    );
    assert_eq!(r.code, 2);
    let report = json(&r.out.join("verify.json"));
    let check = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "oracle_convergence")
        .unwrap();
    assert_eq!(check["pass"], false);
    assert!(check["measured"].as_f64().unwrap() > 1e-3);
}

#[test]
fn verify_reports_incompatible_couplings() {
    let r = run(
        r#"{"potential": {"kind": "linear", "k": 1}, "couplings": {"f1": {"kind": "constant", "value": 1}}}"#,
        &["verify"],
    );
    assert_eq!(r.code, 2);
    let report = json(&r.out.join("verify.json"));
    let check = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "coupling_audit")
        .unwrap();
    assert_eq!(check["pass"], false);
    assert!(check["detail"].as_str().unwrap().contains("incompatible"));
}

#[test]
fn audit_accepts_scalar_and_rejects_pseudoscalar() {
    let ok = run(LINEAR, &["audit"]);
    assert_eq!(ok.code, 0);
    assert_eq!(json(&ok.out.join("audit.json"))["compatible"], true);

    let bad = run(
        r#"{"potential": {"kind": "linear", "k": 1}, "couplings": {"f3": {"kind": "expression", "expr": "x^2"}}}"#,
        &["audit"],
    );
    assert_eq!(bad.code, 3);
    let report = json(&bad.out.join("audit.json"));
    assert_eq!(report["compatible"], false);
    assert_eq!(report["offending"][0]["coupling"], "f3");
}

#[test]
fn classify_sectors() {
    let r = run(LINEAR, &["classify"]);
    let report = json(&r.out.join("classify.json"));
    assert_eq!(
        (report["susy"].as_str(), report["sector"].as_str()),
        (Some("unbroken"), Some("minus"))
    );

    let r = run(
        r#"{"potential": {"kind": "linear", "k": -1}}"#,
        &["classify"],
    );
    assert_eq!(json(&r.out.join("classify.json"))["sector"], "plus");

    let r = run(
        r#"{"potential": {"kind": "constant", "value": 0}}"#,
        &["classify"],
    );
    let report = json(&r.out.join("classify.json"));
    assert_eq!(report["susy"], "broken");
    assert!(report["sector"].is_null());
}

#[test]
fn negative_k_spectrum_matches_positive() {
    let a = run(LINEAR, &["spectrum"]);
    let b = run(
        r#"{"potential": {"kind": "linear", "k": -1}, "shape_invariant": true}"#,
        &["spectrum"],
    );
    assert_eq!(b.code, 0, "{}", b.stderr);
    let (a, b) = (
        json(&a.out.join("spectrum.json")),
        json(&b.out.join("spectrum.json")),
    );
    for (la, lb) in a["levels"]
        .as_array()
        .unwrap()
        .iter()
        .zip(b["levels"].as_array().unwrap())
    {
        assert!(
            (la["energy_oracle"].as_f64().unwrap() - lb["energy_oracle"].as_f64().unwrap()).abs()
                <= 1e-9
        );
    }
}
