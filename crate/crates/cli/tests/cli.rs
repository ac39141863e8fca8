#![allow(clippy::approx_constant)]

use std::process::{Command, Output};

fn qent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qent"))
        .args(args)
        .env_remove("QENT_SEED")
        .output()
        .expect("run qent")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).filter(|r| r.starts_with(' ')))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn entropy_of_equal_mixture() {
    let o = qent(&["entropy", "--spectrum", "0.5 0.5"]);
    assert!(o.status.success());
    let t = stdout(&o);
    assert_eq!(field(&t, "S_H"), 0.69314718056);
    assert_eq!(field(&t, "S_F"), 0.19314718056);
    assert_eq!(field(&t, "S"), 0.69314718056);
}

#[test]
fn entropy_of_matrix_file_and_bits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mixed.json");
    let q = [0.25, 0.0];
    let z = [0.0, 0.0];
    let mut entries = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            entries.push(if i == j { q } else { z });
        }
    }
    let json = format!(r#"{{"dim": 4, "matrix": {entries:?}}}"#);
    std::fs::write(&path, json).unwrap();
    let t = stdout(&qent(&["entropy", "--input", path.to_str().unwrap()]));
    assert!((field(&t, "S") - 4f64.ln()).abs() < 1e-11);
    let t = stdout(&qent(&["entropy", "--input", path.to_str().unwrap(), "--bits"]));
    assert_eq!(field(&t, "S"), 2.0);
}

#[test]
fn two_level_entropy_in_csv() {
    let t = stdout(&qent(&["entropy", "--spectrum", "0.75,0.25", "--format", "csv", "--quadrature"]));
    let mut lines = t.lines();
    assert_eq!(lines.next().unwrap(), "dim,S_H,S0,S_F,S,S_quadrature");
    let values: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((values[4] - 0.650355536368).abs() < 1e-12);
    assert!((values[5] - values[4]).abs() < 1e-11);
    assert!(!t.contains('\r'));
}

#[test]
fn exit_codes() {
    assert_eq!(qent(&["entropy", "--spectrum", "0.5 x"]).status.code(), Some(2));
    assert_eq!(qent(&["entropy", "--input", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(qent(&["entropy", "--spectrum", "0.5 0.6"]).status.code(), Some(3));
    assert_eq!(qent(&["entropy", "--spectrum", "1.2 -0.2"]).status.code(), Some(3));
    let o = qent(&["pdensity", "--spectrum", "0.25 0.25 0.25 0.25"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--perturb"));
    assert_eq!(qent(&["mc", "--spectrum", "1 0", "--samples", "10"]).status.code(), Some(3));
}

#[test]
fn pdensity_of_pure_qubit_is_flat() {
    let o = qent(&["pdensity", "--spectrum", "1 0", "--bins", "11"]);
    assert!(o.status.success());
    let t = stdout(&o);
    let rows: Vec<&str> = t.lines().skip(1).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r.ends_with(",1")), "{t}");
}

#[test]
fn perturbation_unblocks_the_density() {
    let o = qent(&["pdensity", "--spectrum", "0.25 0.25 0.25 0.25", "--perturb", "1e-4", "--bins", "11"]);
    assert!(o.status.success());
    let t = stdout(&qent(&["perturb", "--spectrum", "0.5 0.5", "--perturb", "0.01"]));
    assert_eq!(t.trim(), "0.505 0.495");
}

#[test]
fn monte_carlo_reports() {
    let t = stdout(&qent(&["mc", "--spectrum", "1 0", "--samples", "100000"]));
    assert!((field(&t, "mean") - 0.5).abs() < 0.005);
    assert!(field(&t, "z").abs() <= 4.0);
    let t = stdout(&qent(&["mc", "--spectrum", "0.5 0.5", "--mode", "basis", "--samples", "1000"]));
    assert!((field(&t, "mean") - 2f64.ln()).abs() < 1e-12);
    assert!(field(&t, "stderr") < 1e-12);
    let t = stdout(&qent(&["mc", "--spectrum", "0.75 0.25", "--samples", "100000"]));
    assert!(field(&t, "z").abs() <= 4.0);
}

#[test]
fn seed_precedence() {
    let run = |args: &[&str], env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_qent"));
        c.args(args).env_remove("QENT_SEED");
        if let Some(v) = env {
            c.env("QENT_SEED", v);
        }
        stdout(&c.output().unwrap())
    };
    let base = ["random-state", "--dim", "3", "--kind", "spectrum"];
    let default = run(&base, None);
    assert_eq!(default, run(&[&base[..], &["--seed", "0x5EED"]].concat(), None));
    let env = run(&base, Some("7"));
    assert_ne!(default, env);
    assert_eq!(env, run(&[&base[..], &["--seed", "7"]].concat(), None));
    assert_eq!(default, run(&[&base[..], &["--seed", "0x5eed"]].concat(), Some("7")));
}

#[test]
fn random_state_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let o = qent(&["random-state", "--dim", "3", "--seed", "9", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let rho = qent_core::io::read_density(&text).unwrap().unwrap();
    let spectrum = qent_core::state::spectrum_of(&rho).unwrap();
    let direct = qent_core::entropy::absolute_entropy(&spectrum, 3).unwrap();
    let t = stdout(&qent(&["entropy", "--input", path.to_str().unwrap(), "--precision", "17"]));
    assert!((field(&t, "S") - direct.s_total).abs() < 1e-12);
    assert!((field(&t, "S_H") - direct.s_h).abs() < 1e-12);
}

#[test]
fn check_arithmetic_inequalities() {
    let o = qent(&["check", "--ids", "ei3a,harmonic_chain"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ei3a"));
    let o = qent(&["check", "--ids", "bogus"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn fig1_and_inset_are_deterministic() {
    let a = qent(&["fig1", "--samples", "50"]);
    let b = qent(&["fig1", "--samples", "50", "--workers", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("label,n,dim,s_h,s_f\n"));
    let t = stdout(&qent(&["inset", "--max-n", "10"]));
    assert_eq!(t.lines().count(), 11);
}
