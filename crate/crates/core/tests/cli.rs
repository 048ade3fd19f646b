use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use p1tr::cli::{exit_code, Cache, CurveConfig, ResultEnvelope, CACHE_ENV};
use p1tr::error::Error;
use serde_json::{json, Value};

fn run(args: &[&str], cache: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_p1tr"));
    c.args(args).env_remove(CACHE_ENV);
    if let Some(d) = cache {
        c.env(CACHE_ENV, d);
    }
    c.output().expect("run p1tr")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, v: Value) -> String {
    let p = dir.join("curve.json");
    fs::write(&p, v.to_string()).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn omega_both_reports_equality() {
    let o = run(&["omega", "--g", "0", "--n", "3", "--method", "both"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("equal: true"));
}

#[test]
fn lambert_omega_tensor_payload() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), json!({"kind": "lambert", "w1": -1}));
    let o = run(&["--config", &cfg, "--format", "json", "omega", "--g", "1", "--n", "1"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["payload"]["tensor"]["g"], json!(1));
    assert!(!v["payload"]["tensor"]["terms"].as_array().unwrap().is_empty());
    let o = run(&["--config", &cfg, "omega", "--g", "1", "--n", "2", "--method", "both"], None);
    assert!(stdout(&o).contains("equal: true"));
}

#[test]
fn hurwitz_and_psi_values() {
    let o = run(&["hurwitz", "--g", "0", "--mu", "2"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1/2"));
    let o = run(&["hurwitz", "--g", "1", "--mu", "1,2"], None);
    assert!(stdout(&o).contains("= 40"));
    assert!(stdout(&o).contains("equal: true"));
    let o = run(&["psi", "--g", "1", "--k", "1"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1/24"));
}

#[test]
fn gw_stationary_table() {
    let o = run(&["gw", "--g", "1", "--n", "1"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("<tau_0(H)>_{1,1} = -1/24"));
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), json!({"kind": "p1", "w1": 1, "w2": 0, "sigma": {"rt2": "1"}}));
    let o = run(&["--config", &cfg, "gw", "--g", "1", "--n", "1"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unstable_input_exit_two() {
    let o = run(&["omega", "--g", "0", "--n", "1"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ω_{0,1}=0"));
    let o = run(&["omega", "--g", "0", "--n", "2"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn floats_rejected() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), json!({"kind": "p1", "w1": 0.5, "w2": 0, "sigma": 1}));
    let o = run(&["--config", &cfg, "omega", "--g", "0", "--n", "3"], None);
    assert_eq!(o.status.code(), Some(2));
    let cfg = write_config(d.path(), json!({"kind": "p1", "w1": "1.5", "w2": 0, "sigma": 1}));
    assert_eq!(run(&["--config", &cfg, "omega", "--g", "0", "--n", "3"], None).status.code(), Some(2));
}

#[test]
fn config_number_encodings() {
    let a = CurveConfig::from_json(&json!({"kind": "p1", "w1": "3", "w2": {"re": "1/2"}, "sigma": 2})).unwrap();
    let b = CurveConfig::from_json(&json!({"kind": "p1", "w1": 3, "w2": "1/2", "sigma": {"re": "2", "im": "0"}})).unwrap();
    assert_eq!(a, b);
    assert!(CurveConfig::from_json(&json!({"kind": "p1", "w1": 0, "w2": 0})).is_err());
    assert!(CurveConfig::from_json(&json!({"kind": "torus"})).is_err());
    assert!(CurveConfig::from_json(&json!({"kind": "lambert", "w1": -1, "sigma": 1})).is_err());
}

#[test]
fn envelope_is_deterministic_and_hashed() {
    let args = ["--format", "json", "omega", "--g", "1", "--n", "1", "--method", "both"];
    let a = stdout(&run(&args, None));
    let b = stdout(&run(&args, None));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    for k in ["version", "params", "orders", "payload", "hash"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }
    let env = ResultEnvelope {
        command: v["command"].as_str().unwrap().into(),
        params: v["params"].clone(),
        orders: v["orders"].clone(),
        payload: v["payload"].clone(),
    };
    assert_eq!(v["hash"].as_str().unwrap(), env.hash());
}

#[test]
fn warm_cache_equals_cold_cache() {
    let d = tempfile::tempdir().unwrap();
    let args = ["--format", "json", "omega", "--g", "0", "--n", "4", "--method", "both"];
    let cold = stdout(&run(&args, Some(d.path())));
    let entries: Vec<_> = fs::read_dir(d.path()).unwrap().filter_map(|e| e.ok()).filter(|e| e.path().extension().is_some_and(|x| x == "json")).collect();
    assert_eq!(entries.len(), 1);
    let warm = stdout(&run(&args, Some(d.path())));
    assert_eq!(cold, warm);
    let uncached = stdout(&run(&["--no-cache", "--format", "json", "omega", "--g", "0", "--n", "4", "--method", "both"], None));
    assert_eq!(cold, uncached);
    // a corrupt entry is discarded and recomputed
    fs::write(entries[0].path(), "{ not json").unwrap();
    let again = stdout(&run(&args, Some(d.path())));
    assert_eq!(cold, again);
    let v: Value = serde_json::from_str(&fs::read_to_string(entries[0].path()).unwrap()).unwrap();
    assert_eq!(v["format"], json!(1));
}

#[test]
fn cache_rejects_mismatched_key() {
    let d = tempfile::tempdir().unwrap();
    let c = Cache::new(d.path().to_path_buf()).unwrap();
    let k1 = Cache::key("abc", "omega", &json!([0, 3]), &json!({}));
    let k2 = Cache::key("abd", "omega", &json!([0, 3]), &json!({}));
    c.put(&k1, &json!({"x": 1})).unwrap();
    assert_eq!(c.get(&k1), Some(json!({"x": 1})));
    // an entry stored under another key's file name is not trusted
    fs::copy(c.path_for(&k1), c.path_for(&k2)).unwrap();
    assert_eq!(c.get(&k2), None);
    assert!(!c.path_for(&k2).exists());
}

#[test]
fn rmatrix_routes_tagged() {
    let o = run(&["rmatrix", "--order", "4"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o).rsplit_once("\nhash:").unwrap().0).unwrap();
    let routes: Vec<&str> = v["routes"].as_array().unwrap().iter().map(|r| r["route"].as_str().unwrap()).collect();
    assert_eq!(routes, ["curve", "ode"]);
    assert_eq!(v["agree"], json!(true));
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), json!({"kind": "p1", "w1": 0, "w2": 0, "sigma": 1}));
    let o = run(&["--config", &cfg, "--format", "json", "rmatrix", "--route", "closed", "--order", "3"], None);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["payload"]["routes"][0]["route"], json!("closed-form"));
    assert_eq!(v["payload"]["routes"][0]["coefficients"].as_array().unwrap().len(), 4);
    let o = run(&["rmatrix", "--route", "closed"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_suites() {
    for s in ["intersections", "bessel", "rmatrix"] {
        let o = run(&["verify", "--suite", s], None);
        assert_eq!(o.status.code(), Some(0), "{s}: {}", stdout(&o));
        assert!(stdout(&o).contains(": pass"));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(exit_code(&Error::Verification("x".into())), 1);
    assert_eq!(exit_code(&Error::InvalidInput("x".into())), 2);
    assert_eq!(exit_code(&Error::Unstable { g: 0, n: 2 }), 2);
    assert_eq!(exit_code(&Error::EscalationExhausted("x".into())), 3);
    assert_eq!(run(&["omega", "--g", "x", "--n", "3"], None).status.code(), Some(2));
}
