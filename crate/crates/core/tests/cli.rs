//! End-to-end tests of the duality-lab binary: subcommands, flags, scenario
//! files, output formats, and the selfcheck exit status.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_duality-lab"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "duality-lab {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn duality_curve_csv_to_file_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        run_ok(&[
            "duality-curve",
            "--tan2a",
            "0.2,0.6,1.0",
            "--sin2n",
            "0.2",
            "--strategy",
            "both",
            "--photons",
            "20000",
            "--seed",
            "99",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "same seed must give byte-identical files");
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "tan2a,sin2n,strategy,phi,quantity,closed_form,estimate,sigma,n_photons,seed"
    );
    assert_eq!(text.lines().count(), 1 + 3 * 2 * 3);
}

#[test]
fn different_seed_changes_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for (out, seed) in [(&out_a, "1"), (&out_b, "2")] {
        run_ok(&[
            "duality-curve",
            "--tan2a",
            "0.5",
            "--photons",
            "5000",
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    assert_ne!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap()
    );
}

#[test]
fn phase_sweep_json_output() {
    let out = run_ok(&[
        "phase-sweep",
        "--tan2a",
        "0.38",
        "--sin2n",
        "0.2",
        "--photons",
        "5000",
        "--phases",
        "8",
        "--format",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 8 * 4);
    for row in rows {
        assert!(row["phi"].is_number());
        assert!(row["closed_form"].is_number());
        assert!(row["sigma"].is_number());
        assert_eq!(row["strategy"], "uqsd");
    }
}

#[test]
fn scenario_file_drives_run_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("overlap09.scenario");
    std::fs::write(
        &scenario,
        "# strong-overlap mutual information\nscenario = mutual-info\nsin2n = 0.9\ntan2a = 0.3, 0.9\nphotons = 10000\nseed = 5\n",
    )
    .unwrap();
    let out = run_ok(&[
        "mutual-info",
        "--scenario",
        scenario.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2 * 2); // 2 grid points x 2 strategies
    for row in rows {
        assert_eq!(row["sin2n"], 0.9);
        assert_eq!(row["seed"], 5);
    }
    // CLI flag overrides the file
    let out = run_ok(&[
        "mutual-info",
        "--scenario",
        scenario.to_str().unwrap(),
        "--tan2a",
        "1.0",
        "--format",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    // file for the wrong subcommand is rejected
    let out = bin()
        .args(["duality-curve", "--scenario", scenario.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn selfcheck_passes_and_negative_control_fails() {
    let out = run_ok(&["selfcheck"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!text.contains("FAIL"));
    assert!(text.contains("OK"));

    let out = bin()
        .args(["selfcheck", "--perturb-hwp", "0.02"])
        .output()
        .unwrap();
    assert!(
        !out.status.success(),
        "perturbed convention must fail the suite"
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL first-loop pipeline"));
}

#[test]
fn selfcheck_json_mode() {
    let out = run_ok(&["selfcheck", "--json"]);
    let checks: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = checks.as_array().unwrap();
    assert!(checks.len() >= 10);
    for c in checks {
        assert_eq!(c["passed"], true, "{}", c["name"]);
    }
}

#[test]
fn raw_plate_angles_match_ratio_parameterization() {
    // tan(2·10.385°) ≈ 0.38 and sin(2·5.770°) ≈ 0.2; the ratio route and
    // the raw-angle route must agree on the closed forms
    let theta_a_deg = (0.38_f64.atan() / 2.0).to_degrees();
    let theta_n_deg = (0.2_f64.asin() / 2.0).to_degrees();
    let by_angle = run_ok(&[
        "duality-curve",
        "--theta-a",
        &format!("{theta_a_deg}"),
        "--theta-n",
        &format!("{theta_n_deg}"),
        "--photons",
        "3000",
        "--format",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_slice(&by_angle.stdout).unwrap();
    let row = rows
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["quantity"] == "visibility")
        .unwrap();
    assert!((row["closed_form"].as_f64().unwrap() - 0.132_820_692).abs() < 1e-6);
    // the two parameterizations may not be mixed
    let out = bin()
        .args(["duality-curve", "--tan2a", "0.5", "--theta-a", "10.0"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn invalid_arguments_are_rejected() {
    for args in [
        vec!["duality-curve", "--tan2a", "1.5"],
        vec!["duality-curve", "--sin2n", "-0.1"],
        vec!["phase-sweep", "--strategy", "med"],
        vec!["duality-curve", "--photons", "0"],
        vec!["duality-curve", "--loop-visibility", "1.2"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert!(!out.status.success(), "{args:?} should be rejected");
    }
    assert!(!Path::new("nonexistent.csv").exists());
}
