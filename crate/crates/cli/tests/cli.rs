use std::path::Path;
use std::process::{Command, Output};

fn fim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fim")).args(args).output().expect("run fim")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn meta(text: &str, key: &str) -> String {
    let prefix = format!("# {key}=");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in output"))
        .to_string()
}

/// Data rows as string cells, keyed by the header.
fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let body = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, body)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn fisher_toy_sub_has_negative_excess() {
    let text = stdout(&fim(&["fisher", "--model", "toy-sub", "--theta", "0.5", "--n", "8"]));
    assert!(text.starts_with("# fim-schema v1\n"));
    let excess: f64 = meta(&text, "excess").parse().unwrap();
    assert!(excess < 0.0, "{excess}");
    let (_, body) = rows(&text);
    assert_eq!(body.len(), 8);
}

#[test]
fn fisher_iid_joint_is_additive() {
    let text = stdout(&fim(&["fisher", "--model", "iid-bernoulli", "--theta", "0.3", "--n", "5"]));
    let (h, body) = rows(&text);
    let f1: f64 = body[0][col(&h, "F_joint")].parse().unwrap();
    let f5: f64 = body[4][col(&h, "F_joint")].parse().unwrap();
    assert!((f5 - 5.0 * f1).abs() < 1e-9 * f5);
}

#[test]
fn fisher_json_carries_report() {
    let text = stdout(&fim(&["fisher", "--model", "toy-super", "--theta", "0.7", "--n", "4", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], "fim-schema v1");
    assert_eq!(v["data"]["joint_by_length"].as_array().unwrap().len(), 4);
    assert!(v["data"]["excess"]["entries"][0].as_f64().unwrap() > 0.0);
}

#[test]
fn missing_model_file_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let r = fim(&["fisher", "--model", "nowhere/model.json", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(fim(&["fisher", "--model", "toy-sub"]).status.code(), Some(2));
    assert_eq!(fim(&["fisher", "--model", "toy-sub", "--theta", "1.5"]).status.code(), Some(2));
    assert_eq!(fim(&["mse", "--model", "toy-sub", "--theta", "0.5", "--estimator", "magic"]).status.code(), Some(2));
    assert_eq!(fim(&["fisher", "--nonsense"]).status.code(), Some(2));
}

#[test]
fn enumeration_overflow_exits_3_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("big.csv");
    let r = fim(&["fisher", "--model", "toy-sub", "--theta", "0.5", "--n", "40", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn table_model_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(
        &path,
        r#"{"kind":"table","alphabet_size":2,"order":1,"table":{"0":[0.9,0.1],"1":[0.2,0.8]}}"#,
    )
    .unwrap();
    let text = stdout(&fim(&["entropy", "--model", path.to_str().unwrap(), "--n-max", "5"]));
    let residual: f64 = meta(&text, "residual").parse().unwrap();
    assert!(residual < 1e-12);
}

fn run_to(dir: &Path, name: &str, seed: &str, extra: &[&str]) -> Vec<u8> {
    let out = dir.join(name);
    let mut args = vec![
        "mse", "--model", "toy-sub", "--theta", "0.5", "--estimator", "mle,uncorrelated-mle", "--replicas", "6",
        "--n-grid", "100,400", "--seed", seed, "--out",
    ];
    args.push(out.to_str().unwrap());
    args.extend_from_slice(extra);
    let r = fim(&args);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    std::fs::read(out).unwrap()
}

#[test]
fn mse_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_to(dir.path(), "a.csv", "11", &[]);
    let b = run_to(dir.path(), "b.csv", "11", &[]);
    let c = run_to(dir.path(), "c.csv", "11", &["--threads", "1"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let (h, body) = rows(std::str::from_utf8(&a).unwrap());
    assert_eq!(body.len(), 4);
    assert_eq!(body[2][col(&h, "estimator_id")], "uncorrelated-mle");
    let other = run_to(dir.path(), "d.csv", "12", &[]);
    assert_ne!(a, other);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"model":"toy-sub","theta":[0.5],"n":3,"format":"json"}"#).unwrap();
    let text = stdout(&fim(&["fisher", "--config", cfg.to_str().unwrap(), "--n", "5", "--format", "csv"]));
    assert_eq!(meta(&text, "n"), "5");
    let text = stdout(&fim(&["fisher", "--config", cfg.to_str().unwrap()]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["data"]["n"], 3);

    std::fs::write(&cfg, r#"{"modle":"toy-sub"}"#).unwrap();
    assert_eq!(fim(&["fisher", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn gaussian_rows_per_rho() {
    let text = stdout(&fim(&["gaussian", "--replicas", "10", "--n-grid", "100,1000"]));
    let (h, body) = rows(&text);
    assert_eq!(body.len(), 6);
    let rhos: Vec<&str> = body.iter().map(|r| r[col(&h, "rho")].as_str()).collect();
    assert_eq!(rhos, ["-0.9", "-0.9", "0.0", "0.0", "0.9", "0.9"]);
}

#[test]
fn ising_zero_field_column_is_diverged() {
    let text = stdout(&fim(&["ising", "--b-over-j", "0,0.5", "--t-points", "12"]));
    let (h, body) = rows(&text);
    assert_eq!(body.len(), 24);
    for r in &body {
        let b: f64 = r[col(&h, "B")].parse().unwrap();
        assert_eq!(r[col(&h, "flags")] == "xi_diverged", b == 0.0, "{r:?}");
    }
}

#[test]
fn nnn_alpha_zero_matches_nearest_neighbour() {
    let nnn = stdout(&fim(&["nnn", "--b", "1", "--j-over-b", "-2", "--alpha", "0", "--temps", "0.7,2"]));
    let ising = stdout(&fim(&["ising", "--j", "-2", "--b-over-j", "-0.5", "--temps", "0.7,2"]));
    let (h1, a) = rows(&nnn);
    let (h2, b) = rows(&ising);
    for (x, y) in a.iter().zip(&b) {
        for name in ["F1", "F12", "f", "delta_F"] {
            let u: f64 = x[col(&h1, name)].parse().unwrap();
            let v: f64 = y[col(&h2, name)].parse().unwrap();
            assert!((u - v).abs() <= 1e-10 * v.abs().max(1e-300), "{name}: {u} vs {v}");
        }
    }
}

#[test]
fn markov_order_of_chain_and_model() {
    let text = stdout(&fim(&["markov-order", "--couplings", "1", "--b", "0.5", "--t", "1"]));
    let (h, body) = rows(&text);
    assert_eq!(body[0][col(&h, "measured")], "1");
    assert_eq!(body[0][col(&h, "verified")], "true");
    let text = stdout(&fim(&["markov-order", "--couplings", "0", "--b", "0.5"]));
    let (h, body) = rows(&text);
    assert_eq!(body[0][col(&h, "measured")], "0");
    let text = stdout(&fim(&["markov-order", "--model", "order-two", "--theta", "0.4"]));
    let (h, body) = rows(&text);
    assert_eq!(body[0][col(&h, "measured")], "2");
}
