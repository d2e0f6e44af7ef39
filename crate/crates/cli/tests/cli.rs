use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rwsre::{Dist, EnvironmentSpec};
use rwsre_cli::RunConfig;
use serde_json::Value;

fn rwsre(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwsre")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, cfg: &RunConfig) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn kappa_config() -> RunConfig {
    RunConfig::new(EnvironmentSpec::new(Dist::xi_two_point(4.0, 1.0 / 3.0, 0.25), Dist::constant(1.0)).unwrap(), 9)
}

fn speed_config() -> RunConfig {
    let mut cfg = RunConfig::new(EnvironmentSpec::new(Dist::constant(2.0 / 3.0), Dist::uniform_on(&[1.0, 3.0])).unwrap(), 17);
    cfg.run.replicas = 6;
    cfg.run.horizon = 20_000;
    cfg.run.dual_samples = 2_000;
    cfg
}

#[test]
fn kappa_exits_zero_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &kappa_config());
    let out = dir.path().join("out");
    let res = rwsre(&["kappa", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let report = read_json(&out.join("kappa.json"));
    let kappa = report["aggregates"]["kappa"].as_f64().unwrap();
    assert!((kappa - 0.5).abs() < 1e-10);
    assert!(String::from_utf8_lossy(&res.stderr).contains("PASS"));
}

#[test]
fn invalid_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(
        &path,
        r#"
seed = 1
[spec]
lambda = { kind = "constant", params = { value = 1.5 } }
gap = { kind = "constant", params = { value = 1.0 } }
"#,
    )
    .unwrap();
    let res = rwsre(&["speed", "--config", path.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(rwsre(&["kappa", "--config", dir.path().join("missing.toml").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn wrong_regime_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    // Transient right, so the Sinai experiment does not apply.
    let config = write_config(dir.path(), &speed_config());
    assert_eq!(rwsre(&["sinai", "--config", &config]).status.code(), Some(2));
}

#[test]
fn speed_writes_csv_and_is_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &speed_config());
    let mut aggregates = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(format!("w{workers}"));
        let res = rwsre(&["speed", "--config", &config, "--workers", workers, "--out", out.to_str().unwrap()]);
        assert!(res.status.code().is_some_and(|c| c <= 1), "{}", String::from_utf8_lossy(&res.stderr));
        assert!(out.join("speed.csv").exists());
        aggregates.push((read_json(&out.join("speed.json"))["aggregates"].clone(), fs::read_to_string(out.join("speed.csv")).unwrap()));
    }
    assert_eq!(aggregates[0], aggregates[1]);
}

#[test]
fn report_regenerates_from_embedded_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &speed_config());
    let first = dir.path().join("first");
    rwsre(&["speed", "--config", &config, "--seed", "23", "--out", first.to_str().unwrap()]);
    let report = read_json(&first.join("speed.json"));
    // The embedded config already carries the seed override.
    let embedded: RunConfig = serde_json::from_value(report["config"].clone()).unwrap();
    assert_eq!(embedded.master_seed, 23);
    let again_cfg = dir.path().join("again.toml");
    fs::write(&again_cfg, embedded.to_toml().unwrap()).unwrap();
    let second = dir.path().join("second");
    rwsre(&["speed", "--config", again_cfg.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    let again = read_json(&second.join("speed.json"));
    assert_eq!(report["aggregates"], again["aggregates"]);
    assert_eq!(report["records"], again["records"]);
}
