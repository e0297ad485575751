use std::process::{Command, Output};

use serde_json::Value;

fn pplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pplab"))
        .args(args)
        .env_remove("PPLAB_DIGITS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = pplab(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn num(v: &Value) -> f64 {
    v.as_str().expect("decimal string").parse().unwrap()
}

#[test]
fn stokes_mu_15_over_7() {
    let v = json(&["stokes", "--mu", "15/7", "--n", "15", "--terms", "15", "--digits", "12"]);
    assert!((num(&v["result"]["k_minus_re"]) - 0.07069725039).abs() < 1e-11);
    assert!((num(&v["result"]["k_minus_im"]) - 0.01439846034).abs() < 1e-11);
    assert_eq!(v["config"]["mu"], "15/7");
    assert_eq!(v["config"]["digits"], 12);
}

#[test]
fn walk_on_the_exact_solution() {
    // μ = 2 has the solution y = −x/√6
    let v = json(&["walk", "--mu", "2", "--from", "10", "--to", "5", "--steps", "20", "--terms", "20"]);
    let y = num(&v["result"]["y_re"]);
    assert!((y + 5.0 / 6f64.sqrt()).abs() < 1e-14);
    let s = v["result"]["y_re"].as_str().unwrap();
    assert!(s.starts_with("-2.0412414523193150818310700622"), "{s}");
}

#[test]
fn explicit_seed_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let y0 = format!("{}", -1.0 / 6f64.sqrt());
    let out = pplab(&[
        "walk", "--mu", "2", "--from", "1", "--y0", &y0, "--dy0", &y0, "--to", "1+i", "--steps", "8", "--terms", "10",
        "--trace", trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x_re,x_im,y_re,y_im,dy_re,dy_im");
    assert_eq!(lines.count(), 9);
}

#[test]
fn eval_reports_truncation() {
    let v = json(&["eval", "--mu", "1", "--x", "33", "--digits", "60"]);
    assert_eq!(v["result"]["level"], 0);
    assert!(v["result"]["N"].as_u64().unwrap() > 100);
    assert!(num(&v["result"]["y_re"]) < 0.0);
}

#[test]
fn identical_config_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = pplab(&["eval", "--mu", "15/7", "--x", "6", "--level", "1", "-o", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn digits_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_pplab"))
        .args(["stokes", "--mu", "4"])
        .env("PPLAB_DIGITS", "14")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["digits"], 14);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["stokes", "--mu", "-5"],
        vec!["stokes", "--mu", "1", "--digits", "5"],
        vec!["frobnicate"],
        vec!["locate", "--mu", "1", "--from", "33", "--center", "-2", "--radius", "0"],
        vec!["borel-bound", "--nu", "1", "--c", "1.2"],
    ] {
        let out = pplab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numeric_failures_exit_with_one() {
    // one step across the whole interval trips the step guard
    let out = pplab(&["walk", "--mu", "1", "--from", "33", "--to", "-40", "--steps", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("convergence radius"));
    let out = pplab(&["predict", "--mu", "1", "--window", "50", "51", "50", "51"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pade_scan_csv() {
    let out = pplab(&[
        "pade-scan", "--mu", "4", "--from", "10", "--center", "0", "--steps", "400", "--order", "9", "10",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["root_re", "root_im", "type", "residual", "doublet_flag"]
    );
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.iter().filter(|r| &r[2] == "pole").count(), 10);
    assert_eq!(rows.iter().filter(|r| &r[2] == "zero").count(), 9);
}

#[test]
fn locate_first_zero() {
    let v = json(&[
        "locate", "--mu", "1", "--from", "33", "--via", "0", "--center", "-0.5", "--nodes", "60", "--functional",
        "zero",
    ]);
    let est = &v["result"][0];
    assert_eq!(est["kind"], "zero");
    let x: f64 = num(&est["x_re"]);
    assert!((x + 0.4999125536).abs() < 1e-9, "{x}");
}

#[test]
fn predict_lists_roots() {
    let v = json(&["predict", "--mu", "15/7", "--window", "-3", "-2.4", "1.4", "2.0"]);
    let roots = v["result"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert!((num(&roots[0]["x_re"]) + 2.736).abs() < 1e-3);
}

#[test]
fn borel_curve_and_point() {
    let out = pplab(&["borel-bound", "--curve", "-10", "2", "25"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "nu,c,sigma,mu,sigma_tilde");
    assert_eq!(text.lines().count(), 26);

    let v = json(&["borel-bound", "--nu", "-1000", "--c", "0.7"]);
    let b = &v["result"]["bound"];
    assert_eq!(b["c"], 0.7);
    assert!(b["lhs1"].as_f64().unwrap().max(b["lhs2"].as_f64().unwrap()) > 1.0 - 1e-12);
}

#[test]
fn coefficient_table() {
    let out = pplab(&["coeffs", "--mu", "1", "--n-max", "6", "--k-max", "1", "--digits", "12"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,k,re,im");
    assert_eq!(lines.next().unwrap(), "0,0,-1.00000000000,0");
    assert_eq!(text.lines().count(), 1 + 2 * 7);
}

#[test]
fn reproduce_reports_matches() {
    let out = pplab(&["reproduce", "mu157-stokes"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1/1 values match"), "{text}");

    let out = pplab(&["reproduce", "--list"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("mu1-origin"));

    let out = pplab(&["reproduce", "no-such-case"]);
    assert_eq!(out.status.code(), Some(1));
}
