//! End-to-end tests of the binary: envelopes, CSV schemas, exit codes,
//! determinism and round-tripping.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_xisym"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn write_csv(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

fn json_result(output: &Output) -> Value {
    let v: Value = serde_json::from_str(&stdout_str(output)).expect("valid JSON envelope");
    v["result"].clone()
}

#[test]
fn xi_on_monotone_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_csv(dir.path(), "mono.csv", "x,y\n1,1\n2,2\n3,3\n4,4\n5,5\n");
    let out = run(&["xi", &path]);
    assert!(out.status.success());
    let result = json_result(&out);
    assert_eq!(result["xi_sym"], 0.5);
    assert_eq!(result["xi_xy"], 0.5);
    assert_eq!(result["n"], 5);
}

#[test]
fn xi_direction_flag_reports_single_direction() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_csv(dir.path(), "f.csv", "1,20\n2,40\n3,10\n4,30\n");
    let out = run(&["xi", &path, "--direction", "yx"]);
    assert!(out.status.success());
    let result = json_result(&out);
    assert_eq!(result["xi"], -0.4);
    assert_eq!(result["xi_yx"], -0.4);
}

#[test]
fn xi_rejects_ties_with_exit_3() {
    // Duplicate y values under the default reject policy.
    let dir = tempfile::tempdir().unwrap();
    let path = write_csv(dir.path(), "t.csv", "1,5\n2,5\n3,7\n");
    let out = run(&["xi", &path]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("ties") && err.contains('y'), "stderr: {err}");
    // Random tie breaking turns the same file into a success.
    let out = run(&["xi", &path, "--ties", "random", "--tie-seed", "4"]);
    assert!(out.status.success());
}

#[test]
fn xi_reports_parse_errors_with_row_and_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_csv(dir.path(), "bad.csv", "1,2\n2,oops\n3,4\n");
    let out = run(&["xi", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("row 2") && err.contains("oops"), "stderr: {err}");
}

#[test]
fn xi_reads_stdin_dash() {
    let mut child = bin()
        .args(["xi", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(b"1,1\n2,2\n3,3\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["result"]["n"], 3);
}

#[test]
fn test_finite_reports_null_params_at_n_10() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (1..=10)
        .zip([2, 9, 5, 1, 10, 8, 6, 7, 4, 3])
        .map(|(x, y)| format!("{x},{y}\n"))
        .collect();
    let path = write_csv(dir.path(), "ten.csv", &rows);
    let out = run(&["test", &path, "--method", "finite"]);
    assert!(out.status.success());
    let result = json_result(&out);
    let scale = result["null_params"]["scale"].as_f64().unwrap();
    let shape = result["null_params"]["shape"].as_f64().unwrap();
    assert!((scale * scale - 0.296296).abs() < 1e-5);
    assert!((shape - 0.637947).abs() < 1e-5);
}

#[test]
fn test_asymptotic_zero_statistic_gives_three_quarters() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_csv(dir.path(), "zero.csv", "1,10\n2,30\n3,20\n4,40\n");
    let out = run(&["test", &path, "--method", "asymptotic"]);
    assert!(out.status.success());
    let result = json_result(&out);
    assert_eq!(result["statistic"], 0.0);
    assert_eq!(result["p_value"], 0.75);
}

#[test]
fn test_permutation_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_csv(dir.path(), "m.csv", "1,1\n2,2\n3,3\n4,4\n5,5\n6,6\n");
    let a = run(&["test", &path, "--method", "permutation", "--seed", "7"]);
    let b = run(&["test", &path, "--method", "permutation", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_str(&stdout_str(&a)).unwrap();
    assert_eq!(v["seed"], 7);
}

#[test]
fn test_finite_too_small_exits_4_with_hint() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_csv(dir.path(), "three.csv", "1,2\n2,1\n3,3\n");
    let out = run(&["test", &path, "--method", "finite"]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("permutation"), "stderr: {err}");
}

#[test]
fn moments_table_shape_and_values() {
    let out = run(&["moments", "--n-min", "4", "--n-max", "100"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,var,cov,rho,alpha");
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 97);

    // var at n = 10.
    let r10 = rows.iter().find(|r| r[0] == "10").unwrap();
    let var10: f64 = r10[1].parse().unwrap();
    assert!((var10 - 0.296296296296).abs() < 1e-9);

    // cov column maximized at n = 6.
    let argmax = rows
        .iter()
        .max_by(|a, b| {
            a[2].parse::<f64>()
                .unwrap()
                .partial_cmp(&b[2].parse::<f64>().unwrap())
                .unwrap()
        })
        .unwrap()[0]
        .clone();
    assert_eq!(argmax, "6");

    // cov at n = 4 equals the enumeration fixture 2/15.
    let r4 = rows.iter().find(|r| r[0] == "4").unwrap();
    assert!((r4[2].parse::<f64>().unwrap() - 2.0 / 15.0).abs() < 1e-10);
}

#[test]
fn moments_bad_range_exits_2() {
    assert_eq!(
        run(&["moments", "--n-min", "3", "--n-max", "10"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["moments", "--n-min", "10", "--n-max", "4"]).status.code(),
        Some(2)
    );
}

#[test]
fn produced_csv_round_trips_byte_identically() {
    let out = run(&["moments", "--n-min", "4", "--n-max", "40"]);
    let text = stdout_str(&out);
    // Re-serialize each float field through the same 12-digit format.
    let mut rebuilt = String::from("n,var,cov,rho,alpha\n");
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        rebuilt.push_str(fields[0]);
        for field in &fields[1..] {
            let value: f64 = field.parse().unwrap();
            rebuilt.push_str(&format!(",{value:.11e}"));
        }
        rebuilt.push('\n');
    }
    assert_eq!(text, rebuilt);
}

#[test]
fn simulate_moments_deterministic_and_consistent() {
    let args = ["simulate-moments", "--n", "4,6", "--reps", "4000", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout_str(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,var_hat,se_var,cov_hat,se_cov,var_closed,cov_closed"
    );
    for line in lines {
        let f: Vec<f64> = line.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        let (var_hat, se_var, cov_hat, se_cov, var_closed, cov_closed) =
            (f[0], f[1], f[2], f[3], f[4], f[5]);
        assert!((var_hat - var_closed).abs() < 5.0 * se_var);
        assert!((cov_hat - cov_closed).abs() < 5.0 * se_cov);
    }
}

#[test]
fn simulate_bias_single_run_layout() {
    let out = run(&[
        "simulate-bias",
        "--scenario",
        "independent",
        "--n",
        "10",
        "--runs",
        "1",
        "--permutations",
        "50",
        "--seed",
        "3",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "kind,scenario,n,run_index,p_asymptotic,p_finite,p_permutation,bias_asymptotic,bias_finite"
    );
    assert_eq!(lines.len(), 3, "one run row plus one median row");
    assert!(lines[1].starts_with("run,independent,10,0,"));
    assert!(lines[2].starts_with("median,independent,10,,"));

    // Bias columns are differences of the p columns (exact in the library;
    // the CSV rounds each field to 12 significant digits independently).
    let fields: Vec<&str> = lines[1].split(',').collect();
    let p_asym: f64 = fields[4].parse().unwrap();
    let p_perm: f64 = fields[6].parse().unwrap();
    let bias_asym: f64 = fields[7].parse().unwrap();
    assert!((bias_asym - (p_asym - p_perm)).abs() < 1e-11);

    let again = run(&[
        "simulate-bias",
        "--scenario",
        "independent",
        "--n",
        "10",
        "--runs",
        "1",
        "--permutations",
        "50",
        "--seed",
        "3",
    ]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn oracle_table_matches_within_tolerance() {
    let out = run(&["oracle", "--n", "4"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    for line in text.lines().skip(2) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let delta: f64 = fields[3].parse().unwrap();
        assert!(delta < 1e-10, "line: {line}");
    }

    // n = 2: both variance readings are zero.
    let out = run(&["oracle", "--n", "2"]);
    let text = stdout_str(&out);
    let var_line = text.lines().find(|l| l.starts_with("var_sqrtn_xi")).unwrap();
    let fields: Vec<&str> = var_line.split_whitespace().collect();
    assert_eq!(fields[1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(fields[2].parse::<f64>().unwrap(), 0.0);

    assert_eq!(run(&["oracle", "--n", "9"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("moments.csv");
    let out = run(&["moments", "--n-min", "4", "--n-max", "6", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let content = std::fs::read_to_string(&path).unwrap();
    assert!(content.starts_with("n,var,cov,rho,alpha\n"));
    assert_eq!(content.lines().count(), 4);
}

#[test]
fn no_header_flag_rejects_non_numeric_first_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_csv(dir.path(), "h.csv", "x,y\n1,2\n2,3\n");
    assert!(run(&["xi", &path]).status.success());
    let out = run(&["xi", &path, "--no-header"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("row 1"), "stderr: {err}");
}
