use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperkg")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

/// Header plus numeric rows.
fn csv(args: &[&str]) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = stdout(args);
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn spherical_rows() {
    let (header, rows) = csv(&["spherical", "--n", "3", "--lambda", "2", "--r", "0,1,2.5"]);
    assert_eq!(header, ["r", "re", "im", "phi0", "envelope"]);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][1], 1.0);
    let exact = 2f64.sin() / (2.0 * 1f64.sinh());
    assert!(close(rows[1][1], exact, 1e-12));
    let o = run(&["spherical", "--n", "4", "--lambda", "0.7", "--r", "0:8:0.5"]);
    let meta = String::from_utf8(o.stderr).unwrap();
    assert!(meta.contains("envelope_bound_holds = true"), "{meta}");
}

#[test]
fn spherical_json_round_trips() {
    let text = stdout(&["spherical", "--n", "2", "--lambda", "1.5", "--r", "0:2:0.5", "--format", "json"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert!(v["meta"]["envelope_constant"].as_f64().unwrap() > 0.0);
}

#[test]
fn kernel_rows_and_conjugation() {
    let args = |t: &'static str, tol: &'static str| ["kernel", "--n", "3", "--t", t, "--r", "0,0.5,1.5", "--tol", tol];
    let (header, fwd) = csv(&args("1.5", "1e-10"));
    assert_eq!(header, ["t", "r", "re", "im", "abs", "err"]);
    assert_eq!(fwd.len(), 3);
    let (_, back) = csv(&args("-1.5", "1e-10"));
    for (a, b) in fwd.iter().zip(&back) {
        assert!(close(a[2], b[2], 1e-12) && close(a[3], -b[3], 1e-12), "{a:?} vs {b:?}");
    }
    let (_, half) = csv(&args("1.5", "5e-11"));
    for (a, b) in fwd.iter().zip(&half) {
        assert!((a[4] - b[4]).abs() < 10.0 * 1e-10, "{a:?} vs {b:?}");
    }
}

#[test]
fn kernel_parts_add_up() {
    let part = |p: &'static str| csv(&["kernel", "--n", "2", "--t", "3", "--r", "0.5,2", "--part", p]).1;
    let (a, b, s) = (part("w0"), part("winf"), part("sum"));
    for k in 0..2 {
        assert!(close(a[k][2] + b[k][2], s[k][2], 1e-9) && close(a[k][3] + b[k][3], s[k][3], 1e-9));
    }
}

#[test]
fn decay_expected_slopes() {
    let small = json(&["decay", "--n", "3", "--regime", "small", "--q", "4"]);
    assert_eq!(small["proxy"]["expected"].as_f64(), Some(-0.5));
    assert_eq!(small["kernel"]["expected"].as_f64(), Some(-1.0));
    assert_eq!(small["log_correction"], Value::Bool(false));
    let two = json(&["decay", "--n", "2", "--regime", "small", "--t", "2,1,0.5"]);
    assert_eq!(two["log_correction"], Value::Bool(true));
    assert!(two["kernel_log_corrected"].is_object());
    let large = json(&["decay", "--n", "3", "--regime", "large", "--t", "8,16"]);
    assert_eq!(large["kunze_stein"]["expected"].as_f64(), Some(-1.5));
    assert_eq!(large["kernel"]["tolerance"].as_f64(), Some(0.15));
    assert_eq!(large["kunze_stein"]["tolerance"].as_f64(), Some(0.2));
    assert_eq!(large["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn decay_rejects_mixed_regimes() {
    let o = run(&["decay", "--regime", "large", "--t", "1,8"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exponent_rows() {
    let (header, rows) = csv(&["exponents", "--ns", "3,4,5"]);
    assert_eq!(header[4], "gamma_conf");
    assert_eq!((rows[0][4], rows[0][6]), (3.0, 5.0));
    assert!(close(rows[1][2], 1.75, 1e-15));
    assert!(close(rows[2][5], (6.0 + 21f64.sqrt()) / 5.0, 1e-14));
    let o = run(&["exponents", "--check-table"]);
    assert!(o.status.success());
    assert!(String::from_utf8(o.stderr).unwrap().contains("table_matches = true"));
}

#[test]
fn regularity_reports() {
    let r = json(&["regularity", "--n", "3", "--gamma", "2.5"]);
    assert_eq!(r["branch"], "sigma2");
    assert!(close(r["sigma_min"].as_f64().unwrap(), 1.0 / 3.0, 1e-12));
    let r = json(&["regularity", "--n", "4", "--gamma", "1.2"]);
    assert_eq!(r["branch"], "near_one");
    assert_eq!(r["infimum_open"], Value::Bool(true));
    let r = json(&["regularity", "--n", "5", "--gamma", "2.05", "--oracle", "--resolution", "0.005"]);
    assert!(r["oracle_gap"].as_f64().unwrap() <= 6.0 * 0.005);
}

#[test]
fn regularity_out_of_range_exit_code() {
    let o = run(&["regularity", "--n", "4", "--gamma", "3.5"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn invalid_parameters_exit_code() {
    assert_eq!(run(&["spherical", "--n", "1"]).status.code(), Some(1));
    assert_eq!(run(&["spherical", "--n", "3", "--kappa-tilde", "0.5"]).status.code(), Some(1));
    assert_eq!(run(&["spherical", "--r", "2:1:0.5"]).status.code(), Some(2));
}

#[test]
fn admissible_report() {
    let r = json(&["admissible", "--n", "4", "--inv-p", "0.5", "--inv-q", "0.2"]);
    assert_eq!(r["admissible"], Value::Bool(true));
    assert!(close(r["sigma"].as_f64().unwrap(), 0.75, 1e-15));
    let r = json(&["admissible", "--n", "4", "--inv-p", "0.1", "--inv-q", "0.1"]);
    assert_eq!(r["admissible"], Value::Bool(false));
    let r = json(&["admissible", "--n", "3", "--inv-p", "0.1", "--inv-q", "0.7"]);
    assert_eq!(r["sigma"], Value::Null);
}

#[test]
fn admissibility_figure_corner() {
    let (_, rows) = csv(&["figure", "admissibility", "--n", "4"]);
    assert!(rows.iter().any(|r| close(r[0], 0.5, 1e-15) && close(r[1], 0.5 - 1.0 / 3.0, 1e-15)));
}

#[test]
fn gwp_figure_is_continuous() {
    let v = json(&["figure", "gwp", "--n", "3", "--samples", "800", "--format", "json"]);
    let rows: Vec<Vec<f64>> = v["rows"].as_array().unwrap().iter().map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()).collect();
    let k = rows.iter().position(|r| r[0] == 3.0).expect("gamma_conf is sampled");
    assert!((rows[k + 1][1] - rows[k - 1][1]).abs() < 0.02);
    for w in rows.windows(2) {
        assert!(w[1][1] >= w[0][1] - 1e-12, "{w:?}");
    }
    let two = json(&["figure", "gwp", "--n", "2", "--samples", "50", "--format", "json"]);
    assert_eq!(two["meta"]["gamma_conf"].as_f64(), Some(5.0));
    assert!(two["meta"]["joins"].as_array().unwrap().contains(&serde_json::json!(5.0)));
}

#[test]
fn lwp_figure_is_display_only() {
    let v = json(&["figure", "lwp", "--n", "4", "--samples", "20", "--format", "json"]);
    assert_eq!(v["meta"]["display_only"], Value::Bool(true));
    assert_eq!(v["columns"].as_array().unwrap().len(), 4);
}

#[test]
fn output_is_deterministic_and_written_to_file() {
    let args = ["figure", "gwp", "--n", "5", "--samples", "60"];
    assert_eq!(stdout(&args), stdout(&args));
    let dir = std::env::temp_dir().join(format!("hyperkg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("exp.json");
    let o = run(&["exponents", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn report_csv_is_flattened() {
    let text = stdout(&["regularity", "--n", "3", "--gamma", "2.5", "--format", "csv"]);
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("branch,sigma2") && text.contains("witness.inv_q,"));
}
