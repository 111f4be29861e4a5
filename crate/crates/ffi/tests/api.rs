use std::ffi::{c_char, CStr, CString};
use std::ptr;

use duelbandit_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    unsafe {
        db_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

const RPS: [f64; 9] = [0.0, 1.0, -1.0, -1.0, 0.0, 1.0, 1.0, -1.0, 0.0];

fn condorcet3() -> [f64; 9] {
    [0.0, 0.4, 0.4, -0.4, 0.0, 0.1, -0.4, -0.1, 0.0]
}

#[test]
fn nash_of_rps_is_uniform() {
    let mut q = [0.0; 3];
    let mut v = f64::NAN;
    let s = unsafe { db_solve_nash(3, RPS.as_ptr(), q.as_mut_ptr(), &mut v) };
    assert_eq!(s, DbStatus::Ok);
    for x in q {
        assert!((x - 1.0 / 3.0).abs() < 1e-9);
    }
    assert!(v.abs() < 1e-8);
}

#[test]
fn cce_and_igw_solutions_are_distributions() {
    let mut joint = [0.0; 9];
    let mut v = 0.0;
    assert_eq!(unsafe { db_solve_cce(3, RPS.as_ptr(), joint.as_mut_ptr(), &mut v) }, DbStatus::Ok);
    assert!((joint.iter().sum::<f64>() - 1.0).abs() < 1e-9 && v <= 1e-8);

    let mut p = [0.0; 3];
    assert_eq!(
        unsafe { db_solve_igw(3, condorcet3().as_ptr(), 12.0, p.as_mut_ptr(), &mut v) },
        DbStatus::Ok
    );
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(v <= 3.0 / 12.0 + 1e-6);
}

#[test]
fn br_regret_of_a_losing_duel() {
    // duel (1, 2) against a condorcet winner: (0.4 + 0.4) / 2
    let mut joint = [0.0; 9];
    joint[5] = 1.0;
    let mut out = 0.0;
    assert_eq!(
        unsafe { db_br_regret_step(3, condorcet3().as_ptr(), joint.as_ptr(), &mut out) },
        DbStatus::Ok
    );
    assert!((out - 0.4).abs() < 1e-12);
}

#[test]
fn errors_set_status_and_message() {
    let bad = [0.0, 1.0, 1.0, 0.0];
    let mut q = [0.0; 2];
    let s = unsafe { db_solve_nash(2, bad.as_ptr(), q.as_mut_ptr(), ptr::null_mut()) };
    assert_eq!(s, DbStatus::InvalidArgument);
    assert!(last_error().contains("skew"));
    assert_eq!(db_last_error_length(), last_error().len());

    let s = unsafe { db_solve_nash(3, ptr::null(), q.as_mut_ptr(), ptr::null_mut()) };
    assert_eq!(s, DbStatus::NullPointer);
    let s = unsafe { db_solve_nash(1, RPS.as_ptr(), q.as_mut_ptr(), ptr::null_mut()) };
    assert_eq!(s, DbStatus::InvalidArgument);

    let mut learner = ptr::null_mut();
    assert_eq!(unsafe { db_learner_new_ccedb(3, 2.0, &mut learner) }, DbStatus::ConfigError);
    assert!(learner.is_null());
}

#[test]
fn ccedb_learner_round_trip() {
    let mut learner = ptr::null_mut();
    assert_eq!(unsafe { db_learner_new_ccedb(3, 0.01, &mut learner) }, DbStatus::Ok);
    assert_eq!(unsafe { db_learner_k(learner) }, 3);
    let rng = db_rng_new(7);
    let truth = condorcet3();
    let mut joint = [0.0; 9];
    let (mut a, mut b) = (0usize, 0usize);
    let mut winner_plays = 0;
    for t in 0..400 {
        let s = unsafe { db_learner_select(learner, 0, rng, joint.as_mut_ptr(), &mut a, &mut b) };
        assert_eq!(s, DbStatus::Ok, "{}", last_error());
        assert!((joint.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        // deterministic feedback from the sign of the truth, ties to the left arm
        let outcome = if truth[a * 3 + b] >= 0.0 { 1 } else { -1 };
        assert_eq!(unsafe { db_learner_observe(learner, 0, a, b, outcome) }, DbStatus::Ok);
        if t >= 300 && a == 0 && b == 0 {
            winner_plays += 1;
        }
    }
    assert!(winner_plays > 50, "winner played {winner_plays} times late");
    assert_eq!(unsafe { db_learner_observe(learner, 0, 0, 1, 3) }, DbStatus::InvalidArgument);
    unsafe {
        db_learner_free(learner);
        db_rng_free(rng);
    }
}

#[test]
fn minmaxdb_learner_from_tables() {
    let mut tables = condorcet3().to_vec();
    tables.extend(RPS);
    let mut learner = ptr::null_mut();
    let s = unsafe { db_learner_new_minmaxdb_finite(3, 2, tables.as_ptr(), 20.0, &mut learner) };
    assert_eq!(s, DbStatus::Ok, "{}", last_error());
    let root = db_rng_new(1);
    let rng = unsafe { db_rng_substream(root, 2) };
    let (mut a, mut b) = (0usize, 0usize);
    for _ in 0..50 {
        let s = unsafe { db_learner_select(learner, 0, rng, ptr::null_mut(), &mut a, &mut b) };
        assert_eq!(s, DbStatus::Ok);
        assert!(a < 3 && b < 3);
        assert_eq!(unsafe { db_learner_observe(learner, 0, a, b, 1) }, DbStatus::Ok);
    }
    let s = unsafe { db_learner_new_minmaxdb_finite(3, 2, tables.as_ptr(), 1.0, &mut learner) };
    assert_eq!(s, DbStatus::InvalidArgument);
    unsafe {
        db_learner_free(learner);
        db_rng_free(rng);
        db_rng_free(root);
        db_rng_free(ptr::null_mut());
    }
}

#[test]
fn experiment_from_json() {
    let cfg = CString::new(
        r#"{"algorithm": {"kind": "constant_duel", "a": 2, "b": 2},
            "environment": {"kind": "fixed_matrix", "fixture": {"name": "hardness", "epsilon": 0.2}},
            "horizon": 50, "seeds": [3, 4]}"#,
    )
    .unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { db_run_experiment(cfg.as_ptr(), &mut out) }, DbStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { db_string_free(out) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert!((v[0]["br_regret"].as_f64().unwrap() - 10.0).abs() < 1e-9);

    let bad = CString::new("{").unwrap();
    assert_eq!(unsafe { db_run_experiment(bad.as_ptr(), &mut out) }, DbStatus::ConfigError);
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/duelbandit.h");
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", header])
        .status()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success());
}

#[test]
fn c_program_links_against_the_static_library() {
    // target/<profile>/deps/api-* -> target/<profile>/libduelbandit_ffi.a
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().unwrap().parent().unwrap().join("libduelbandit_ffi.a");
    if !lib.is_file() || std::process::Command::new("cc").arg("--version").output().is_err() {
        eprintln!("static library or C compiler unavailable; skipping");
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "duelbandit.h"
int main(void) {
    double p[9] = {0, 1, -1, -1, 0, 1, 1, -1, 0};
    double q[3];
    if (db_solve_nash(3, p, q, NULL) != DB_STATUS_OK) return 1;
    DbLearner *l = NULL;
    DbRng *rng = db_rng_new(5);
    if (db_learner_new_ccedb(3, 0.05, &l) != DB_STATUS_OK) return 2;
    size_t a, b;
    for (int t = 0; t < 20; t++) {
        if (db_learner_select(l, 0, rng, NULL, &a, &b) != DB_STATUS_OK) return 3;
        if (db_learner_observe(l, 0, a, b, a <= b ? 1 : -1) != DB_STATUS_OK) return 4;
    }
    char msg[64];
    if (db_solve_nash(1, p, q, NULL) != DB_STATUS_INVALID_ARGUMENT) return 5;
    db_last_error_message(msg, sizeof msg);
    db_learner_free(l);
    db_rng_free(rng);
    printf("%.6f %.6f %.6f|%s\n", q[0], q[1], q[2], msg);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = tmp.path().join("main");
    let status = std::process::Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("0.333333 0.333333 0.333333|k must be at least 2"), "{text}");
}
