use std::fs;
use std::process::{Command, Output};

fn apstrip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apstrip")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const LOG_ONE_MINUS_HALF: &str =
    r#"{"logabs":{"terms":[{"freq":0.0,"coef":[1.0,0.0]},{"freq":1.0,"coef":[-0.5,0.0]}]}}"#;

#[test]
fn coeffs_row_for_log_one_minus_half() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("u.json");
    fs::write(&spec, LOG_ONE_MINUS_HALF).unwrap();
    let o = apstrip(&["coeffs", "--spec", spec.to_str().unwrap(), "--lambda", "1", "--y", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,y,re,im"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|t| t.parse().unwrap()).collect();
    assert_eq!(&row[..2], &[1.0, 0.0]);
    assert!((row[2] + 0.25).abs() < 1e-3, "re = {}", row[2]);
    assert!(row[3].abs() < 1e-3);
}

#[test]
fn green_of_unit_atom() {
    let o = apstrip(&["green", "--atoms", "[0,0,1]", "--R", "1", "--z", "0.5,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn eval_and_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("u.json");
    fs::write(&spec, LOG_ONE_MINUS_HALF).unwrap();
    let out = dir.path().join("out");
    let o = apstrip(&[
        "eval",
        "--spec",
        spec.to_str().unwrap(),
        "--z",
        "0,0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = fs::read_to_string(out.join("eval.txt"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert_eq!(v, 0.5f64.ln());
}

#[test]
fn coefficient_plot_is_svg() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("u.json");
    fs::write(&spec, LOG_ONE_MINUS_HALF).unwrap();
    let out = dir.path().join("out");
    let o = apstrip(&[
        "coeffs",
        "--spec",
        spec.to_str().unwrap(),
        "--lambda",
        "1",
        "--y",
        "0,0.5,1",
        "--out",
        out.to_str().unwrap(),
        "--plot",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(out.join("coeffs_0.svg"))
        .unwrap()
        .starts_with("<svg"));
    assert_eq!(fs::read_to_string(out.join("coeffs.csv")).unwrap().lines().count(), 4);
}

#[test]
fn malformed_spec_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    fs::write(&spec, "{\"logabs\":\n {\"terms\": [ {\"freq\": 1.0}]}}").unwrap();
    let o = apstrip(&["eval", "--spec", spec.to_str().unwrap(), "--z", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("coef") && err.contains("line 2"), "{err}");
}

#[test]
fn usage_and_domain_errors_exit_2() {
    assert_eq!(apstrip(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(apstrip(&["verify", "thm9"]).status.code(), Some(2));
    assert_eq!(
        apstrip(&["green", "--atoms", "[0,0,1]", "--R", "1", "--z", "2,0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        apstrip(&["kernel", "--gamma", "5", "--w", "0.1,0", "--alpha", "-1", "--beta", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn kernel_split_sums_to_kernel() {
    let o = apstrip(&[
        "kernel", "--gamma", "0.5", "--w", "0.3,0.1", "--n", "10", "--alpha", "-1", "--beta", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (k, k1, k2) = (
        v["k"].as_f64().unwrap(),
        v["k1"].as_f64().unwrap(),
        v["k2"].as_f64().unwrap(),
    );
    assert!((k1 + k2 - k).abs() <= f64::EPSILON * k.abs().max(1.0));
    assert!(k2 <= 0.0);
}

#[test]
fn verify_exit_codes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lem4");
    let o = apstrip(&["verify", "lem4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("experiment,corpus_item,verdict,key_metric\n"));
    assert_eq!(summary.lines().count(), 4);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("lemma4__exp_scale.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");

    let out = dir.path().join("lem12");
    let o = apstrip(&["verify", "lem12", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("moving_atom"));
}
