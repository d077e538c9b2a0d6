use serde_json::Value;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn riesz(args: &[&str]) -> Output {
    riesz_env(args, &[])
}

fn riesz_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_riesz"));
    c.args(args).env_remove("RIESZ_THREADS");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("run riesz")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("bad stdout ({e}): {}", String::from_utf8_lossy(&o.stdout))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    let mut f = std::fs::File::create(&p).unwrap();
    f.write_all(text.as_bytes()).unwrap();
    p.to_str().unwrap().to_string()
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn disk_potential() {
    let dir = tempfile::tempdir().unwrap();
    let body = write(dir.path(), "disk.json", r#"{"dimension":2,"core_vertices":[[0,0]],"delta":1}"#);
    let o = riesz(&["potential", "--body", &body, "--point", "0,0", "--alpha", "1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!((num(&v["value"]) - 2.0 * PI).abs() < 1e-9);
    assert_eq!(v["grad"].as_array().unwrap().len(), 2);
    for h in v["hessian_diag"].as_array().unwrap() {
        assert!((num(h) + PI).abs() < 1e-9);
    }
    assert!(v["error_estimates"]["value"].is_number());
}

#[test]
fn ball_center() {
    let dir = tempfile::tempdir().unwrap();
    let body = write(dir.path(), "ball.json", r#"{"dimension":3,"core_vertices":[[1,2,3]],"delta":1}"#);
    let o = riesz(&["center", "--body", &body, "--alpha", "4"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let p: Vec<f64> = v["point"].as_array().unwrap().iter().map(num).collect();
    for (a, b) in p.iter().zip([1.0, 2.0, 3.0]) {
        assert!((a - b).abs() < 1e-9);
    }
    assert_eq!(v["mode"], "min");
}

#[test]
fn phi_planar() {
    let o = riesz(&["constants", "--n", "2", "--what", "phi"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!((num(&v["value"]) - 3f64.sqrt()).abs() < 1e-15);
    assert!((num(&v["aux"]["computed_sup"]) - 0.75f64.sqrt()).abs() < 1e-9);
}

#[test]
fn psi_value() {
    let o = riesz(&["constants", "--n", "3", "--what", "psi", "--alpha", "2", "--c", "1"]);
    assert_eq!(code(&o), 0);
    let v = num(&json(&o)["value"]);
    assert!((v - (2.0 + 15.0 * 5f64.sqrt())).abs() < 1e-12 * v);
}

#[test]
fn floats_have_seventeen_digits() {
    let o = riesz(&["constants", "--n", "3", "--what", "psi", "--alpha", "2", "--c", "1"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mantissa = text.split("\"value\":").nth(1).unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17, "{text}");
}

#[test]
fn verify_planar_default_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let o = riesz(&["verify", "--lemma", "3.2", "--sweep", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["cases"].as_array().unwrap().len(), 60);
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("lemma_id,a,alpha,xi,value,error,verdict"));
    assert_eq!(lines.filter(|l| l.contains(",pass,")).count(), 60);
}

#[test]
fn verify_named_ids() {
    for id in ["3.3", "3.4", "3.5", "change_of_variables"] {
        let o = riesz(&["verify", "--lemma", id]);
        assert_eq!(code(&o), 0, "{id}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn coarse_settings_stay_decisive() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", r#"{"quad_tol":0.3,"sphere_res":4}"#);
    let o = riesz(&["verify", "--lemma", "main", "--params", &p]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["verdict"], "pass");
    for c in v["cases"].as_array().unwrap() {
        assert!(10.0 * num(&c["error"]) < num(&c["value"]).abs(), "{c}");
    }
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 inconclusive"));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let body = write(dir.path(), "bad.json", "{\"dimension\":2,\n\"core_vertices\":[[0,0]],,}");
    let o = riesz(&["potential", "--body", &body, "--point", "0,0", "--alpha", "1"]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2 column"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_keys_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let body = write(dir.path(), "b.json", r#"{"dimension":2,"core_vertices":[[0,0]],"delta":1,"radius":2}"#);
    let o = riesz(&["potential", "--body", &body, "--point", "0,0", "--log"]);
    assert_eq!(code(&o), 1);
    let cfg = write(dir.path(), "c.json", r#"{"sphere_res":64,"speed":1}"#);
    let o = riesz(&["--config", &cfg, "constants", "--n", "2", "--what", "phi"]);
    assert_eq!(code(&o), 1);
    let p = write(dir.path(), "p.json", r#"{"alphas":[1.5],"betas":[1]}"#);
    let o = riesz(&["verify", "--lemma", "3.2", "--params", &p]);
    assert_eq!(code(&o), 1);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&riesz(&["frobnicate"])), 1);
    assert_eq!(code(&riesz(&["verify", "--lemma", "9.9"])), 1);
    assert_eq!(code(&riesz(&["constants", "--n", "3", "--what", "psi", "--alpha", "2"])), 1);
    assert_eq!(code(&riesz_env(&["constants", "--n", "2", "--what", "phi"], &[("RIESZ_THREADS", "zero")])), 1);
    assert_eq!(code(&riesz(&["--help"])), 0);
}

#[test]
fn identical_runs_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let body = write(
        dir.path(),
        "tri.json",
        r#"{"dimension":2,"core_vertices":[[0,0],[1,0],[0.2,0.7]],"delta":0.3}"#,
    );
    let runs: Vec<Vec<u8>> = ["1", "1", "3"]
        .iter()
        .map(|t| {
            let o = riesz_env(&["center", "--body", &body, "--alpha", "1.5"], &[("RIESZ_THREADS", t)]);
            assert_eq!(code(&o), 0);
            o.stdout
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn unfolded_shape() {
    let dir = tempfile::tempdir().unwrap();
    let body = write(
        dir.path(),
        "tri.json",
        r#"{"dimension":2,"core_vertices":[[0,0],[1,0],[0.2,0.7]],"delta":0.3}"#,
    );
    let o = riesz(&["unfolded", "--body", &body, "--dirs", "64"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["directions"].as_array().unwrap().len(), 64);
    assert_eq!(v["offsets"].as_array().unwrap().len(), 64);
    assert!(v["hull_points"].as_array().unwrap().len() >= 3);
    let o = riesz(&["--output", "csv", "unfolded", "--body", &body, "--dirs", "64"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 65);
    assert_eq!(text.lines().next().unwrap(), "direction.0,direction.1,offset");
}

#[test]
fn sweep_rows_in_order() {
    let o = riesz(&["sweep", "--n", "2", "--what", "f", "--from", "1.5", "--to", "2.5", "--steps", "5"]);
    assert_eq!(code(&o), 0);
    let rows = json(&o);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for (k, r) in rows.iter().enumerate() {
        let a = 1.5 + 0.25 * k as f64;
        assert_eq!(num(&r["alpha"]), a);
        assert!((num(&r["value"]) - 0.5 * (4.0 - a).sqrt()).abs() < 1e-12);
    }
}
