use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rankone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankone")).args(args).env_remove("RANKONE_CONFIG").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn leading_value(o: &Output) -> f64 {
    stdout(o).split_whitespace().next().and_then(|t| t.parse().ok()).expect("numeric output")
}

#[test]
fn eval_normalization_is_circle_length() {
    let o = rankone(&["eval", "c", "H2R", "z=rho"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((leading_value(&o) - std::f64::consts::TAU).abs() < 1e-7, "{}", stdout(&o));
}

#[test]
fn eval_beta_vanishes_at_minus_rho() {
    let o = rankone(&["eval", "beta", "ell=1", "lambda=-rho"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(leading_value(&o), 0.0);
}

#[test]
fn eval_scattering_near_zero_is_identity() {
    let o = rankone(&["eval", "scattering", "ell=1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((leading_value(&o) - 1.0).abs() < 1e-4, "{}", stdout(&o));
}

#[test]
fn eval_usage_errors_exit_two() {
    assert_eq!(rankone(&["eval", "nope"]).status.code(), Some(2));
    assert_eq!(rankone(&["eval", "beta", "foo=1"]).status.code(), Some(2));
    assert_eq!(rankone(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(rankone(&[]).status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[tolerances]\nbogus = 1.0\n").unwrap();
    let o =
        rankone(&["verify", "boundary", "--config", cfg.to_str().unwrap(), "--report", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tolerances.bogus"));
}

#[test]
fn config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[run]\nmodel = \"H3R\"\nseed = 11\n").unwrap();
    let out = dir.path().join("reports");
    let o = Command::new(env!("CARGO_BIN_EXE_rankone"))
        .args(["verify", "regularization", "--report", out.to_str().unwrap()])
        .env("RANKONE_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(out.join("regularization-H3R-seed11.json").exists());

    fs::write(&cfg, "[run]\nworkers = 0\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_rankone"))
        .args(["verify", "regularization", "--report", out.to_str().unwrap()])
        .env("RANKONE_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

fn run_into(dir: &Path, workers: &str) {
    let o = rankone(&[
        "verify",
        "boundary",
        "--model",
        "H2C",
        "--seed",
        "7",
        "--workers",
        workers,
        "--report",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn reports_are_byte_deterministic() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_into(a.path(), "1");
    run_into(b.path(), "1");
    run_into(c.path(), "2");
    for file in ["boundary-H2C-seed7.json", "index.json"] {
        let x = fs::read_to_string(a.path().join(file)).unwrap();
        let y = fs::read_to_string(b.path().join(file)).unwrap();
        assert!(x == y, "{file} differs between identical runs");
    }
    let file = "boundary-H2C-seed7.json";
    assert_eq!(read_json(&a.path().join(file))["records"], read_json(&c.path().join(file))["records"]);
    let index = read_json(&a.path().join("index.json"));
    assert_eq!(index["reports"][0]["file"], file);
    assert_eq!(index["reports"][0]["passed"], true);
}

#[test]
fn index_accumulates_runs() {
    let dir = tempfile::tempdir().unwrap();
    for seed in ["1", "2"] {
        let o = rankone(&["verify", "regularization", "--seed", seed, "--report", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(read_json(&dir.path().join("index.json"))["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.toml");
    fs::write(&cfg, "[tolerances]\nrecursion = 0.0\n").unwrap();
    let o = rankone(&[
        "verify",
        "regularization",
        "--config",
        cfg.to_str().unwrap(),
        "--report",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}
