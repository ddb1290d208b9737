use std::process::{Command, Output};

fn kronecker(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kronecker"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn linear_spectrum_is_the_euclidean_norm() {
    let o = kronecker(&[
        "spectrum",
        "--operator",
        "linear",
        "--pyth",
        "3,4",
        "--N",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 4 * 121);
    for r in &rows {
        let (k, l): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let ev: f64 = r[4].parse().unwrap();
        assert!((ev.abs() - (k * k + l * l).sqrt()).abs() < 1e-12, "{r:?}");
    }
    let evs: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(evs.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn mixed_spectrum_at_origin() {
    let rows = csv_rows(&stdout(&kronecker(&[
        "spectrum",
        "--operator",
        "mixed",
        "--N",
        "0",
    ])));
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .all(|r| r[0] == "0" && r[1] == "0" && r[4].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn dirac_spectrum_is_fourth_root() {
    let (a, b) = (0.6, 0.8);
    for r in csv_rows(&stdout(&kronecker(&[
        "spectrum",
        "--operator",
        "dirac",
        "--N",
        "3",
    ]))) {
        let (k, l): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let want = ((a * k + b * l).powi(4) + (b * k - a * l).powi(2)).powf(0.25);
        let ev: f64 = r[4].parse().unwrap();
        assert!((ev.abs() - want).abs() < 1e-12);
        assert_eq!(ev < 0.0, r[3] == "-" && want > 0.0);
    }
}

#[test]
fn csv_is_byte_identical_across_runs() {
    let args = ["spectrum", "--operator", "torus", "--N", "4", "--seed", "3"];
    assert_eq!(kronecker(&args).stdout, kronecker(&args).stdout);
    let args = ["verify", "torus", "--format", "csv"];
    assert_eq!(kronecker(&args).stdout, kronecker(&args).stdout);
}

#[test]
fn relations_pass_with_schema() {
    let o = kronecker(&["verify", "relations"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["passed"], true);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["status"] == "exact"));
}

#[test]
fn tampered_operator_fails_with_witness() {
    let o = kronecker(&["verify", "relations", "--tamper"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let bad: Vec<_> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "violated")
        .collect();
    assert!(!bad.is_empty());
    assert!(bad.iter().all(|c| c["witness"].is_string()));
    assert_eq!(
        kronecker(&["verify", "torus", "--tamper"]).status.code(),
        Some(1)
    );
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["spectrum", "--operator", "bogus"],
        vec!["spectrum", "--operator", "linear", "--a", "0.6"],
        vec![
            "spectrum",
            "--operator",
            "linear",
            "--a",
            "0.6",
            "--b",
            "0.7",
        ],
        vec!["verify", "relations", "--pyth", "1,1", "--mode", "exact"],
        vec!["verify", "everything"],
        vec!["dimension", "--operator", "linear", "--rmax", "5"],
    ] {
        assert_eq!(kronecker(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numeric_mode_accepts_irrational_slopes() {
    let o = kronecker(&[
        "verify",
        "relations",
        "--pyth",
        "1,1",
        "--mode",
        "numeric",
        "--N",
        "2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn config_file_with_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sweep\nN = 2\nformat = json\npyth = 5,12\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v: serde_json::Value = serde_json::from_slice(
        &kronecker(&["spectrum", "--operator", "linear", "--config", c]).stdout,
    )
    .unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4 * 25);
    assert_eq!(v["config"]["slope"]["pythagorean"]["p"], 5);
    let o = kronecker(&[
        "spectrum",
        "--operator",
        "linear",
        "--config",
        c,
        "--N",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 4 * 9);
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(
        kronecker(&["spectrum", "--operator", "linear", "--config", c])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn dimension_fits_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let o = kronecker(&[
        "dimension",
        "--operator",
        "linear",
        "--rmax",
        "200",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert!((v["counts"]["exponent"].as_f64().unwrap() - 2.0).abs() < 0.1);
    let v: serde_json::Value =
        serde_json::from_slice(&kronecker(&["dimension", "--operator", "dirac"]).stdout).unwrap();
    assert!((v["counts"]["exponent"].as_f64().unwrap() - 3.0).abs() < 0.15);
    let v: serde_json::Value =
        serde_json::from_slice(&kronecker(&["dimension", "--operator", "torus"]).stdout).unwrap();
    assert!((v["counts"]["exponent"].as_f64().unwrap() - 2.0).abs() < 0.1);
}

#[test]
fn hankel_suite_reports_minimum_and_witness() {
    let o = kronecker(&["verify", "hankel", "--kmax", "3", "--range", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let scans: Vec<_> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["min_abs_det"].is_number())
        .collect();
    assert_eq!(scans.len(), 3);
    let strict = kronecker(&[
        "verify",
        "hankel",
        "--kmax",
        "3",
        "--range",
        "10",
        "--det-threshold",
        "1e-6",
    ]);
    assert_eq!(strict.status.code(), Some(1));
}
