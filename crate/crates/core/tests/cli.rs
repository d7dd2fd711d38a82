use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotoseen"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("ROTOSEEN_OUT")
        .output()
        .unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn resonance_rational() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["resonance", "--alpha", "3", "--omega", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["schema"], "v1");
    assert_eq!(v["command"], "resonance");
    assert_eq!(v["results"]["rational"]["c"], 3);
    assert_eq!(v["results"]["rational"]["d"], 2);
    assert_eq!(v["results"]["min_positive"].as_f64(), Some(1.0));
    assert!(v["provenance"]["results.min_positive"].as_str().unwrap().starts_with("resonance."));
    let on_disk: Value = serde_json::from_slice(&std::fs::read(dir.path().join("resonance.json")).unwrap()).unwrap();
    assert_eq!(on_disk, v);
}

#[test]
fn counterexample_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["counterexample", "--n-max", "64"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["results"]["all_certified_pass"], true);
    let mut rdr = csv::Reader::from_path(dir.path().join("counterexample.csv")).unwrap();
    let h = rdr.headers().unwrap().clone();
    let col = |name: &str| h.iter().position(|c| c == name).unwrap();
    let (n, k, l, ratio, pass) = (col("n"), col("k_n"), col("ell_n"), col("ratio"), col("pass"));
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 64);
    let mut certified = 0;
    for r in &rows {
        if !r[pass].is_empty() {
            assert_eq!(&r[pass], "true");
            certified += 1;
        }
        if &r[n] == "8" {
            assert_eq!((&r[k], &r[l]), ("-19", "27"));
            let x: f64 = r[ratio].parse().unwrap();
            assert!((x - 3.7372).abs() < 1e-3);
        }
    }
    assert!(certified >= 57);
}

#[test]
fn irrational_tp_is_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["tp-assemble", "--ratio", "sqrt2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["solve", "--lambda", "0"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["resonance", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"alpha_unused": 1}"#).unwrap();
    let bad = run(dir.path(), &["resonance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));

    std::fs::write(&cfg, r#"{"omega": 5.0, "ratio": "3/2"}"#).unwrap();
    let o = run(dir.path(), &["resonance", "--config", cfg.to_str().unwrap(), "--omega", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["config"]["common"]["omega"].as_f64(), Some(2.0));
    assert_eq!(v["config"]["common"]["ratio"], "3/2");
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_rotoseen"))
        .args(["resonance", "--ratio", "sqrt2"])
        .env("ROTOSEEN_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("resonance.json").exists());
}

#[test]
fn summaries_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["counterexample", "--n-max", "20", "--variant", "a-norm"];
    let x = run(a.path(), &args);
    let y = run(b.path(), &args);
    assert_eq!(x.status.code(), Some(0));
    assert_eq!(x.stdout, y.stdout);
    for f in ["counterexample.csv", "divergence.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn csv_numbers_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["counterexample", "--n", "16"]);
    let v = json(&o);
    let item = &v["results"]["items"][0];
    let mut rdr = csv::Reader::from_path(dir.path().join("counterexample.csv")).unwrap();
    let h = rdr.headers().unwrap().clone();
    let r = rdr.records().next().unwrap().unwrap();
    let s_col = h.iter().position(|c| c == "s_n").unwrap();
    let s: f64 = r[s_col].parse().unwrap();
    assert_eq!(s, item["s_n"].as_f64().unwrap());
}

#[test]
fn solve_dump_is_readable() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["solve", "--grid-n", "9", "--grid-l", "2.5", "--time-nodes", "12", "--dump"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!(v["results"]["solve"]["residual_interior"].as_f64().unwrap() < 1e-6);
    let f = rotoseen::spectral::dump::read_dump(&dir.path().join("velocity.json")).unwrap();
    assert_eq!(f.components, 3);
    assert_eq!(f.values.len(), 3 * 9 * 9 * 9);
    assert!(f.values.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
}
