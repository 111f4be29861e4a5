//! C interface to duelbandit.
//!
//! Every fallible call returns a [`DbStatus`]; on anything other than
//! `DB_STATUS_OK` the thread's last error message is set and can be copied
//! out with [`db_last_error_message`]. Learners and generators are opaque
//! heap handles released by their `_free` function. Matrices are passed as
//! row-major `k * k` arrays of doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use duelbandit::algorithms::{AnyLearner, CceDbState, Learner, MinMaxDbState};
use duelbandit::domain::{Context, GeneralMatrix, JointActionDistribution, Outcome, PreferenceMatrix, RngHandle};
use duelbandit::evaluation::br_regret_step;
use duelbandit::games::{solve_cce, solve_minmax_feasibility, solve_zero_sum_nash, SolverConfig};
use duelbandit::harness::{run_experiment, ExperimentConfig};
use duelbandit::oracles::{FiniteClassAggregator, Hypothesis, Oracle};
use duelbandit::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SolverFailure = 3,
    ConfigError = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> DbStatus {
    match e {
        _ if e.is_solver_failure() => DbStatus::SolverFailure,
        Error::Config(_) | Error::Io(_) | Error::HorizonTooShort { .. } | Error::UnsupportedOracle(_) => {
            DbStatus::ConfigError
        }
        _ => DbStatus::InvalidArgument,
    }
}

struct Failure(DbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DbStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DbStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside duelbandit");
            DbStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn check_k(k: usize) -> Result<(), Failure> {
    if k < 2 {
        return Err(Failure(DbStatus::InvalidArgument, format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

/// Length in bytes of the last error message on this thread.
#[no_mangle]
pub extern "C" fn db_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message into `buf` as a NUL-terminated string,
/// truncating to `len - 1` bytes. Returns the bytes written, excluding the NUL.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn db_last_error_message(buf: *mut c_char, len: usize) -> usize {
    if buf.is_null() || len == 0 {
        return 0;
    }
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let n = msg.len().min(len - 1);
        ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
        *buf.add(n) = 0;
        n
    })
}

/// Seeded ChaCha20 generator.
pub struct DbRng(RngHandle);

#[no_mangle]
pub extern "C" fn db_rng_new(seed: u64) -> *mut DbRng {
    Box::into_raw(Box::new(DbRng(RngHandle::new(seed))))
}

/// Independent child stream `id` of `rng`; null if `rng` is null.
///
/// # Safety
/// `rng` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn db_rng_substream(rng: *const DbRng, id: u64) -> *mut DbRng {
    match rng.as_ref() {
        Some(r) => Box::into_raw(Box::new(DbRng(r.0.substream(id)))),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `rng` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn db_rng_free(rng: *mut DbRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// A dueling learner over a finite context set.
pub struct DbLearner(AnyLearner);

fn emit(out: *mut *mut DbLearner, learner: AnyLearner) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(DbLearner(learner))) };
    Ok(())
}

/// CCE-DB with confidence level `delta` in (0, 1).
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn db_learner_new_ccedb(k: usize, delta: f64, out: *mut *mut DbLearner) -> DbStatus {
    guard(|| {
        check_k(k)?;
        let state = CceDbState::new(k, delta, SolverConfig::default())?;
        emit(out, AnyLearner::CceDb(state))
    })
}

/// MinMaxDB with an exponential-weights oracle over `n_hypotheses`
/// single-context preference matrices stored back to back in `tables`
/// (`n_hypotheses * k * k` doubles).
///
/// # Safety
/// `tables` must hold `n_hypotheses * k * k` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn db_learner_new_minmaxdb_finite(
    k: usize,
    n_hypotheses: usize,
    tables: *const f64,
    gamma: f64,
    out: *mut *mut DbLearner,
) -> DbStatus {
    guard(|| {
        check_k(k)?;
        if n_hypotheses == 0 {
            return Err(Failure(DbStatus::InvalidArgument, "empty hypothesis class".into()));
        }
        let flat = slice(tables, n_hypotheses * k * k, "tables")?;
        let hyps = flat
            .chunks(k * k)
            .map(|m| Ok(Hypothesis::Table(vec![PreferenceMatrix::from_flat(k, m.to_vec())?])))
            .collect::<Result<Vec<_>, Error>>()?;
        let oracle = Oracle::FiniteClass(FiniteClassAggregator::new(hyps)?);
        let state = MinMaxDbState::new(k, oracle, gamma, SolverConfig::default())?;
        emit(out, AnyLearner::MinMaxDb(state))
    })
}

/// # Safety
/// `learner` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn db_learner_k(learner: *const DbLearner) -> usize {
    learner.as_ref().map_or(0, |l| l.0.k())
}

/// Picks this round's joint distribution and duel. `joint_out` receives
/// `k * k` doubles; `a_out` and `b_out` the sampled arms.
///
/// # Safety
/// All pointers must be valid; `joint_out` may be null to skip it.
#[no_mangle]
pub unsafe extern "C" fn db_learner_select(
    learner: *mut DbLearner,
    context_id: usize,
    rng: *mut DbRng,
    joint_out: *mut f64,
    a_out: *mut usize,
    b_out: *mut usize,
) -> DbStatus {
    guard(|| {
        let l = learner.as_mut().ok_or_else(|| null("learner"))?;
        let r = rng.as_mut().ok_or_else(|| null("rng"))?;
        if a_out.is_null() || b_out.is_null() {
            return Err(null("arm output"));
        }
        let k = l.0.k();
        let sel = l.0.select(&Context::Id(context_id), &mut r.0)?;
        if !joint_out.is_null() {
            slice_mut(joint_out, k * k, "joint_out")?.copy_from_slice(sel.joint.weights());
        }
        *a_out = sel.duel.0;
        *b_out = sel.duel.1;
        Ok(())
    })
}

/// Feeds back the outcome of duel `(a, b)`: `+1` if `a` won, `-1` if `b` won.
///
/// # Safety
/// `learner` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn db_learner_observe(
    learner: *mut DbLearner,
    context_id: usize,
    a: usize,
    b: usize,
    outcome: i32,
) -> DbStatus {
    guard(|| {
        let l = learner.as_mut().ok_or_else(|| null("learner"))?;
        let outcome = Outcome::from_sign(outcome)?;
        l.0.observe(&Context::Id(context_id), (a, b), outcome)?;
        Ok(())
    })
}

/// # Safety
/// `learner` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn db_learner_free(learner: *mut DbLearner) {
    if !learner.is_null() {
        drop(Box::from_raw(learner));
    }
}

/// Coarse correlated equilibrium of the general-sum game `payoff`.
///
/// # Safety
/// `payoff` and `joint_out` must hold `k * k` doubles; `violation_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn db_solve_cce(
    k: usize,
    payoff: *const f64,
    joint_out: *mut f64,
    violation_out: *mut f64,
) -> DbStatus {
    guard(|| {
        check_k(k)?;
        let u = GeneralMatrix::from_flat(k, slice(payoff, k * k, "payoff")?.to_vec())?;
        let out = slice_mut(joint_out, k * k, "joint_out")?;
        let report = solve_cce(&u, &SolverConfig::default())?;
        out.copy_from_slice(report.point.weights());
        if let Some(v) = violation_out.as_mut() {
            *v = report.max_violation;
        }
        Ok(())
    })
}

/// Inverse-gap feasibility point for the skew-symmetric prediction `y_hat`.
///
/// # Safety
/// `y_hat` must hold `k * k` doubles and `p_out` `k`; `violation_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn db_solve_igw(
    k: usize,
    y_hat: *const f64,
    gamma: f64,
    p_out: *mut f64,
    violation_out: *mut f64,
) -> DbStatus {
    guard(|| {
        check_k(k)?;
        let y = PreferenceMatrix::from_flat(k, slice(y_hat, k * k, "y_hat")?.to_vec())?;
        let out = slice_mut(p_out, k, "p_out")?;
        let report = solve_minmax_feasibility(&y, gamma, &SolverConfig::default())?;
        out.copy_from_slice(report.point.weights());
        if let Some(v) = violation_out.as_mut() {
            *v = report.max_violation;
        }
        Ok(())
    })
}

/// Maximin strategy of the skew-symmetric game `p`.
///
/// # Safety
/// `p` must hold `k * k` doubles and `q_out` `k`; `violation_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn db_solve_nash(
    k: usize,
    p: *const f64,
    q_out: *mut f64,
    violation_out: *mut f64,
) -> DbStatus {
    guard(|| {
        check_k(k)?;
        let m = PreferenceMatrix::from_flat(k, slice(p, k * k, "p")?.to_vec())?;
        let out = slice_mut(q_out, k, "q_out")?;
        let report = solve_zero_sum_nash(&m, &SolverConfig::default())?;
        out.copy_from_slice(report.point.weights());
        if let Some(v) = violation_out.as_mut() {
            *v = report.max_violation;
        }
        Ok(())
    })
}

/// Best-response regret of playing `joint` against `f_star` for one round.
///
/// # Safety
/// `f_star` and `joint` must hold `k * k` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn db_br_regret_step(
    k: usize,
    f_star: *const f64,
    joint: *const f64,
    out: *mut f64,
) -> DbStatus {
    guard(|| {
        check_k(k)?;
        let f = PreferenceMatrix::from_flat(k, slice(f_star, k * k, "f_star")?.to_vec())?;
        let j = JointActionDistribution::new(k, slice(joint, k * k, "joint")?.to_vec())?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = br_regret_step(&f, &j)?;
        Ok(())
    })
}

/// Runs an experiment described by a JSON config. On success `summary_out`
/// receives a JSON array of per-seed summaries, to be released with
/// [`db_string_free`]. A seed that failed mid-run is reported in its summary
/// and also turns the status into `DB_STATUS_SOLVER_FAILURE`.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `summary_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn db_run_experiment(config_json: *const c_char, summary_out: *mut *mut c_char) -> DbStatus {
    guard(|| {
        if config_json.is_null() {
            return Err(null("config_json"));
        }
        if summary_out.is_null() {
            return Err(null("summary_out"));
        }
        let text = CStr::from_ptr(config_json)
            .to_str()
            .map_err(|e| Failure(DbStatus::InvalidArgument, e.to_string()))?;
        let config = ExperimentConfig::from_json(text)?;
        let output = run_experiment(&config)?;
        let json = serde_json::to_string(&output.summaries()).map_err(|e| Error::Config(e.to_string()))?;
        *summary_out = CString::new(json).expect("json has no NUL").into_raw();
        match output.first_error() {
            Some(e) => Err(e.clone().into()),
            None => Ok(()),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn db_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
