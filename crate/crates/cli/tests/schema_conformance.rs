//! Structural conformance of every emitted JSON document with the schemas
//! shipped in docs/: key sets, types, and the "inf" string sentinel rule.

use std::io::Write as _;
use std::path::Path;
use std::process::{Command, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_driftfield"));
    cmd.env_remove("DRIFTFIELD_CONFIG");
    cmd
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn assert_number_or_inf(v: &Value, what: &str) {
    match v {
        Value::Number(_) => {}
        Value::String(s) => assert!(
            s == "inf" || s == "-inf",
            "{what}: bad sentinel string {s:?}"
        ),
        other => panic!("{what}: expected number or inf sentinel, got {other}"),
    }
}

fn assert_keys_subset(object: &serde_json::Map<String, Value>, allowed: &[&str], what: &str) {
    for key in object.keys() {
        assert!(allowed.contains(&key.as_str()), "{what}: stray key {key}");
    }
}

fn check_config_echo(echo: &Value) {
    let object = echo.as_object().expect("config_echo must be an object");
    assert_keys_subset(
        object,
        &[
            "fade_k",
            "alpha",
            "beta",
            "threshold",
            "bandwidth_override",
            "reduce_dims",
            "kl_floor",
            "eig_tol",
            "seed",
        ],
        "config_echo",
    );
    for key in ["fade_k", "alpha", "beta", "reduce_dims", "kl_floor", "eig_tol", "seed"] {
        assert!(object[key].is_number(), "config_echo.{key}");
    }
    assert_number_or_inf(&object["threshold"], "config_echo.threshold");
}

fn check_report(report: &Value, expect_full: bool) {
    let object = report.as_object().expect("report must be an object");
    assert_keys_subset(
        object,
        &[
            "schema_version",
            "average_displacement",
            "eigen_ratios",
            "rotation_angles_rad",
            "degenerate_flags",
            "d_mu",
            "d_sigma",
            "d_total",
            "drifted",
            "kl_estimate",
            "wasserstein_per_feature",
            "wasserstein_mean",
            "strain",
            "partial",
            "skipped_rows",
            "config_echo",
        ],
        "report",
    );
    assert_eq!(object["schema_version"].as_u64(), Some(1));
    assert!(object["average_displacement"].is_number());
    assert!(object["partial"].is_boolean());
    check_config_echo(&object["config_echo"]);

    let partial = object["partial"].as_bool().unwrap();
    if expect_full {
        assert!(!partial);
    }
    if partial {
        for key in ["eigen_ratios", "d_mu", "drifted", "kl_estimate", "strain"] {
            assert!(!object.contains_key(key), "partial report carries {key}");
        }
        return;
    }

    let d = object["eigen_ratios"].as_array().unwrap().len();
    for ratio in object["eigen_ratios"].as_array().unwrap() {
        assert_number_or_inf(ratio, "eigen_ratios[]");
    }
    assert_eq!(object["rotation_angles_rad"].as_array().unwrap().len(), d);
    for angle in object["rotation_angles_rad"].as_array().unwrap() {
        let a = angle.as_f64().unwrap();
        assert!((0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&a));
    }
    assert_eq!(object["degenerate_flags"].as_array().unwrap().len(), d);
    for flag in object["degenerate_flags"].as_array().unwrap() {
        assert!(flag.is_boolean());
    }
    for key in ["d_mu", "d_sigma", "d_total", "kl_estimate", "wasserstein_mean"] {
        assert!(object[key].is_number(), "{key} must be a number");
    }
    assert!(object["drifted"].is_boolean());
    assert_eq!(
        object["wasserstein_per_feature"].as_array().unwrap().len(),
        d
    );

    let strain = object["strain"].as_object().unwrap();
    assert_keys_subset(
        strain,
        &["mean_abs_normal", "mean_abs_shear", "mean_volumetric"],
        "strain",
    );
    assert_eq!(strain["mean_abs_normal"].as_array().unwrap().len(), d);
    let shear = strain["mean_abs_shear"].as_array().unwrap();
    assert_eq!(shear.len(), d * (d - 1) / 2, "shear entries are axis pairs");
    for triple in shear {
        let triple = triple.as_array().unwrap();
        assert_eq!(triple.len(), 3);
        assert!(triple[0].is_u64() && triple[1].is_u64() && triple[2].is_number());
    }
    assert!(strain["mean_volumetric"].is_number());
}

#[test]
fn detect_and_stream_reports_conform() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.csv");
    write(&base, "0,0\n1,0\n0,1\n1,1\n2,0.5\n-1,0.5\n");
    let baseline = dir.path().join("baseline.json");
    bin()
        .args([
            "baseline",
            "--input",
            base.to_str().unwrap(),
            "--out",
            baseline.to_str().unwrap(),
        ])
        .status()
        .unwrap();

    // Full report. A constant-ish baseline would exercise the inf sentinel
    // through the spread ratio, but eigen_ratios carry it here: compare a
    // rank-deficient baseline with spread-out new data.
    let out = bin()
        .args([
            "detect",
            "--baseline",
            baseline.to_str().unwrap(),
            "--new",
            base.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    check_report(&serde_json::from_slice(&out.stdout).unwrap(), true);

    // Rank-deficient baseline: the second eigen ratio must be the "inf"
    // string sentinel, never a JSON null.
    let flat = dir.path().join("flat.csv");
    write(&flat, "0,0\n1,1\n2,2\n3,3\n");
    let flat_baseline = dir.path().join("flat_baseline.json");
    bin()
        .args([
            "baseline",
            "--input",
            flat.to_str().unwrap(),
            "--out",
            flat_baseline.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    let out = bin()
        .args([
            "detect",
            "--baseline",
            flat_baseline.to_str().unwrap(),
            "--new",
            base.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    check_report(&report, true);
    let ratios = report["eigen_ratios"].as_array().unwrap();
    assert!(
        ratios.iter().any(|r| r == "inf"),
        "expected an inf sentinel in {ratios:?}"
    );
    assert!(!out.stdout.windows(4).any(|w| w == b"null"));

    // Streaming: the trailing single row yields a partial report.
    let mut child = bin()
        .args([
            "stream",
            "--baseline",
            baseline.to_str().unwrap(),
            "--batch-size",
            "4",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(b"0,0\n0.5,0.5\n1,0\n0,1\n2,2\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    let lines: Vec<&str> = std::str::from_utf8(&out.stdout)
        .unwrap()
        .lines()
        .collect();
    assert_eq!(lines.len(), 2);
    check_report(&serde_json::from_str(lines[0]).unwrap(), true);
    let tail: Value = serde_json::from_str(lines[1]).unwrap();
    check_report(&tail, false);
    assert_eq!(tail["partial"].as_bool(), Some(true));
}

#[test]
fn baseline_file_conforms() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.csv");
    write(&base, "x,y\n0,0\n1,0\n0,1\n1,1\n");
    let baseline = dir.path().join("baseline.json");
    bin()
        .args([
            "baseline",
            "--input",
            base.to_str().unwrap(),
            "--out",
            baseline.to_str().unwrap(),
            "--has-header",
        ])
        .status()
        .unwrap();
    let file: Value =
        serde_json::from_str(&std::fs::read_to_string(&baseline).unwrap()).unwrap();
    let object = file.as_object().unwrap();
    assert_keys_subset(
        object,
        &[
            "schema_version",
            "mean",
            "covariance",
            "eigenvalues",
            "eigenvectors",
            "stds",
            "bandwidths",
            "count",
            "feature_names",
            "retained_points",
            "config_echo",
        ],
        "baseline file",
    );
    assert_eq!(object["schema_version"].as_u64(), Some(1));
    assert_eq!(object["count"].as_u64(), Some(4));
    assert_eq!(object["mean"].as_array().unwrap().len(), 2);
    assert_eq!(object["covariance"].as_array().unwrap().len(), 2);
    assert_eq!(object["retained_points"].as_array().unwrap().len(), 4);
    assert_eq!(
        object["feature_names"],
        serde_json::json!(["x", "y"])
    );
    check_config_echo(&object["config_echo"]);
}

#[test]
fn text_report_and_frames_conform() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    write(&a, "economy inflation markets economy\n");
    let b = dir.path().join("b.txt");
    write(&b, "economy rivers geography\n");
    let out = bin()
        .args([
            "text-drift",
            "--original",
            a.to_str().unwrap(),
            "--drifted",
            b.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let object = report.as_object().unwrap();
    let required = [
        "original_length_chars",
        "drifted_length_chars",
        "length_change_pct",
        "deformation_cosine",
        "shape_change_l2",
        "wasserstein",
    ];
    assert_eq!(object.len(), required.len());
    for key in required {
        assert!(object[key].is_number(), "{key}");
    }

    let base = dir.path().join("base.csv");
    write(&base, "0,0\n1,0\n0,1\n1,1\n");
    let frames = dir.path().join("frames");
    bin()
        .args([
            "snapshots",
            "--baseline",
            base.to_str().unwrap(),
            "--new",
            base.to_str().unwrap(),
            "--out",
            frames.to_str().unwrap(),
            "--fractions",
            "0,0.5,1",
        ])
        .status()
        .unwrap();
    for index in 0..3 {
        let text =
            std::fs::read_to_string(frames.join(format!("frame_{index:03}.json"))).unwrap();
        let frame: Value = serde_json::from_str(&text).unwrap();
        let object = frame.as_object().unwrap();
        assert_keys_subset(
            object,
            &["t", "points", "hull_baseline", "hull_new", "arrows"],
            "frame",
        );
        assert!(object["t"].is_number());
        for key in ["points", "hull_baseline", "hull_new"] {
            for p in object[key].as_array().unwrap() {
                assert_eq!(p.as_array().unwrap().len(), 2, "{key} entries are [x, y]");
            }
        }
        for arrow in object["arrows"].as_array().unwrap() {
            assert_eq!(arrow.as_array().unwrap().len(), 4);
        }
    }
}
