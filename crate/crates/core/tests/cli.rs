use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_duelbandit"))
}

#[test]
fn run_writes_artifacts_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"algorithm": {"kind": "cce_db"},
            "environment": {"kind": "fixed_matrix", "fixture": {"name": "rps3"}},
            "horizon": 100, "seeds": [1]}"#,
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let status = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--seeds", "1,2", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    assert!(out_dir.join("seed_2.csv").is_file());

    let agg = bin().args(["aggregate", "--in"]).arg(&out_dir).output().unwrap();
    assert_eq!(agg.status.code(), Some(0));
    assert!(out_dir.join("aggregate.json").is_file());
}

#[test]
fn bad_config_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"algorithm": {"kind": "cce_db"}}"#).unwrap();
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["accept", "--suite", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solver_failure_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"algorithm": {"kind": "cce_db"},
            "environment": {"kind": "fixed_matrix", "fixture": {"name": "rps3"}},
            "benchmark": {"q_star": "uniform"},
            "solver": {"max_iterations": 0, "violation_tolerance": 1e-8},
            "horizon": 20, "seeds": [1]}"#,
    )
    .unwrap();
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn single_criterion_and_solvers() {
    let out = bin().args(["accept", "--suite", "hardness_sanity"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("[PASS] criterion 10"));

    let tmp = tempfile::tempdir().unwrap();
    let m = tmp.path().join("m.json");
    std::fs::write(&m, "[[0, 1, -1], [-1, 0, 1], [1, -1, 0]]").unwrap();
    let igw = bin().args(["solve-igw", "--gamma", "12", "--matrix"]).arg(&m).output().unwrap();
    assert_eq!(igw.status.code(), Some(0));
    let cce = bin().args(["solve-cce", "--matrix"]).arg(&m).output().unwrap();
    assert_eq!(cce.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&cce.stdout).unwrap();
    assert!(v["max_violation"].as_f64().unwrap() <= 1e-8);
}
