use std::process::{Command, Output};

use serde_json::Value;

const Z3: &str = r#"{"m":3,"divisors":[3,3]}"#;
const H39: &str = r#"{"m":9,"divisors":[3,9,3,9]}"#;

fn weil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weil")).args(args).output().expect("binary runs")
}

fn eval_json(module: &str, g: &str, extra: &[&str]) -> Value {
    let mut args = vec!["eval", "--module", module, "--g", g];
    args.extend_from_slice(extra);
    let out = weil(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn eval_identity() {
    let v = eval_json(Z3, "[[1,0],[0,1]]", &[]);
    assert_eq!(v["c"], 9);
    assert_eq!(v["eps"], "+1");
    assert_eq!(v["complex"], "3");
    assert_eq!(v["order_of_g"], 1);
}

#[test]
fn eval_minus_one() {
    let v = eval_json(Z3, "[[-1,0],[0,-1]]", &[]);
    assert_eq!(v["c"], 1);
    assert_eq!(v["eps"], "-1");
}

#[test]
fn eval_transvection_both_methods() {
    let v = eval_json(Z3, "[[1,1],[0,1]]", &["--method", "both"]);
    assert_eq!(v["c"], 3);
    assert_eq!(v["eps"], "-i");
    assert_eq!(v["complex"], "-1.73205080757i");
    assert!(v["residual"].as_f64().unwrap() < 1e-6);
    let o = eval_json(Z3, "[[1,1],[0,1]]", &["--method", "oracle"]);
    assert_eq!(o["eps"], "-i");
}

#[test]
fn eval_csv_and_twist() {
    let out = weil(&["eval", "--module", Z3, "--g", "[[1,1],[0,1]]", "--lambda-s", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("c,complex,"));
    // twisting by a non-square flips the sign on a line of order 3
    assert!(lines.next().unwrap().contains("+i"));
}

#[test]
fn table_enumerates_sl2_f3() {
    let out = weil(&["table", "--module", Z3]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "g,order,c,eps,psi");
    assert_eq!(lines.len(), 25);
    assert_eq!(lines[1], "\"[[1,0],[0,1]]\",1,9,+1,3");
}

#[test]
fn table_samples_are_reproducible() {
    let a = weil(&["table", "--module", H39, "--samples", "10", "--seed", "5"]);
    let b = weil(&["table", "--module", H39, "--samples", "10", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 11);
}

#[test]
fn table_refuses_large_enumeration() {
    let out = weil(&["table", "--module", H39]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_fixture_z3() {
    let out = weil(&["verify", "--module", Z3, "--seed", "42", "--samples", "100"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for line in String::from_utf8(out.stdout).unwrap().lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        for key in ["check", "params", "expected", "got", "residual", "pass"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["pass"], true);
    }
}

#[test]
fn verify_fixture_h39() {
    let out = weil(&["verify", "--module", H39, "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_is_deterministic() {
    let a = weil(&["verify", "--module", Z3, "--seed", "3", "--samples", "5"]);
    let b = weil(&["verify", "--module", Z3, "--seed", "3", "--samples", "5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sabotaged_omega_fails() {
    let out = weil(&["verify", "--module", r#"{"m":3,"divisors":[3,3],"omega":[[0,1],[1,0]]}"#]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(weil(&["eval", "--module", Z3, "--g", "[[1,1"]).status.code(), Some(2));
    assert_eq!(weil(&["eval", "--module", "{\"m\":3}", "--g", "[[1,0],[0,1]]"]).status.code(), Some(2));
    assert_eq!(weil(&["bogus"]).status.code(), Some(2));
    assert_eq!(weil(&[]).status.code(), Some(2));
}

#[test]
fn non_symplectic_element_fails() {
    let out = weil(&["eval", "--module", Z3, "--g", "[[2,0],[0,1]]"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn module_from_file() {
    let dir = std::env::temp_dir().join(format!("weil-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("module.json");
    std::fs::write(&path, Z3).unwrap();
    let v = eval_json(path.to_str().unwrap(), "[[0,1],[-1,0]]", &[]);
    assert_eq!(v["c"], 1);
    assert_eq!(v["eps"], "+1");
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn selftest_passes() {
    let out = weil(&["--selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
