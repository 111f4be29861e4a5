use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{build_learner, ExperimentConfig, Instance};
use super::output::{write_experiment, CsvRow};
use crate::algorithms::{per_round_bound, AnyLearner, Learner};
use crate::domain::{sample_outcome, RngHandle};
use crate::error::{Error, Result};
use crate::evaluation::{dominance_report, RegretLedger};
use crate::oracles::RegressionOracle;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "DUELBANDIT_THREADS";

/// Slack allowed on the per-round diagnostic inequalities.
pub const DIAGNOSTIC_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub algorithm: String,
    pub horizon: usize,
    pub k: usize,
    /// Rounds completed; below `horizon` only when the seed failed.
    pub rounds: usize,
    pub br_regret: f64,
    pub fb_regret: f64,
    pub policy_regret: f64,
    /// `BR_T / sqrt(K T RegSq(T))`
    pub normalized_br: f64,
    /// Oracle regret budget at `T`; 1 for learners without an oracle.
    pub reg_sq: f64,
    pub solver_iterations: u64,
    pub gamma: Option<f64>,
    /// Rounds on which `f*` left the learner's confidence set.
    pub confidence_violations: Option<usize>,
    /// Rounds on which the learner's per-round regret inequality failed.
    pub bound_violations: Option<usize>,
    pub fb_dominated: bool,
    pub policy_within_slack: bool,
    pub failure: Option<String>,
    pub wall_clock_secs: f64,
}

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub summary: RunSummary,
    pub rows: Vec<CsvRow>,
    pub error: Option<Error>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    /// The resolved config the runs used.
    pub config: ExperimentConfig,
    pub runs: Vec<SeedRun>,
    pub wall_clock_secs: f64,
}

impl ExperimentOutput {
    pub fn summaries(&self) -> Vec<RunSummary> {
        self.runs.iter().map(|r| r.summary.clone()).collect()
    }

    pub fn solver_failures(&self) -> usize {
        self.runs
            .iter()
            .filter(|r| r.error.as_ref().is_some_and(Error::is_solver_failure))
            .count()
    }

    pub fn first_error(&self) -> Option<&Error> {
        self.runs.iter().find_map(|r| r.error.as_ref())
    }
}

/// Worker count: `DUELBANDIT_THREADS` if set, otherwise the machine's
/// parallelism, further capped by `requested`.
pub fn worker_count(requested: Option<usize>) -> usize {
    let from_env = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0);
    let base = from_env.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    requested.map_or(base, |r| r.min(base)).max(1)
}

/// Runs one seed of a resolved config. Errors inside the loop end the seed
/// early and are reported in the summary rather than returned.
pub fn run_seed(config: &ExperimentConfig, instance: &Instance, seed: u64) -> Result<SeedRun> {
    let start = Instant::now();
    let env = &instance.env;
    let k = env.k();
    let mut learner = build_learner(config, instance)?;
    let q_star = instance.q_star(&config.benchmark.q_star, &config.solver)?;
    let mut ledger = RegretLedger::new(Some(q_star), instance.policies(&config.benchmark.policies));

    let root = RngHandle::new(seed);
    let mut env_rng = root.substream(1);
    let mut learner_rng = root.substream(2);
    let mut outcome_rng = root.substream(3);

    let reg_sq = match &learner {
        AnyLearner::MinMaxDb(l) => l.oracle().budget().at(config.horizon),
        _ => 1.0,
    };
    let gamma = match &learner {
        AnyLearner::MinMaxDb(l) => Some(l.gamma()),
        _ => None,
    };
    let tracks_bounds = config.diagnostic
        && matches!(learner, AnyLearner::CceDb(_) | AnyLearner::MinMaxDb(_));
    let mut confidence_violations = matches!(learner, AnyLearner::CceDb(_))
        .then_some(0usize)
        .filter(|_| config.diagnostic);
    let mut bound_violations = tracks_bounds.then_some(0usize);

    let mut rows = Vec::with_capacity(config.horizon);
    let mut solver_total: u64 = 0;
    let mut error = None;

    for t in 1..=config.horizon {
        let step = (|| -> Result<CsvRow> {
            let draw = env.sample_round(&mut env_rng);
            let f_star = env.ground_truth(&draw.context)?;
            let bounds = match (&learner, config.diagnostic) {
                (AnyLearner::CceDb(l), true) => Some(l.confidence_matrices()),
                _ => None,
            };
            let sel = learner.select(&draw.context, &mut learner_rng)?;
            let (a, b) = sel.duel;
            let outcome = sample_outcome(draw.preference.get(a, b), &mut outcome_rng)?;
            learner.observe(&draw.context, sel.duel, outcome)?;
            let regret = ledger.record(&f_star, &draw.context, &sel.joint, sel.duel)?;

            if let Some(cb) = bounds {
                if cb.covers(&f_star) {
                    if 2.0 * regret.br_step > cb.exploration_bonus(&sel.joint) + DIAGNOSTIC_TOLERANCE {
                        *bound_violations.as_mut().expect("tracked") += 1;
                    }
                } else {
                    *confidence_violations.as_mut().expect("tracked") += 1;
                }
            }
            if let (AnyLearner::MinMaxDb(l), true) = (&learner, config.diagnostic) {
                let p = sel.joint.left_marginal();
                let y_hat = l.last_prediction().expect("select ran");
                let (lhs, rhs) = per_round_bound(&f_star, y_hat, p.weights(), l.gamma());
                if lhs > rhs + DIAGNOSTIC_TOLERANCE {
                    *bound_violations.as_mut().expect("tracked") += 1;
                }
            }

            Ok(CsvRow {
                seed,
                t,
                arm_a: a,
                arm_b: b,
                outcome: outcome.sign(),
                br_step: regret.br_step,
                br_cum: regret.br_cum,
                fb_step: regret.fb_step,
                fb_cum: regret.fb_cum,
                policy_cum: regret.policy_cum,
                gamma: sel.gamma.unwrap_or(f64::NAN),
                solver_iters: sel.solver_iterations,
            })
        })();
        match step {
            Ok(row) => {
                solver_total += row.solver_iters as u64;
                rows.push(row);
            }
            Err(e) => {
                warn!("seed {seed} stopped at round {t}: {e}");
                error = Some(e);
                break;
            }
        }
    }

    let report = dominance_report(&ledger);
    let horizon = config.horizon as f64;
    let summary = RunSummary {
        seed,
        algorithm: config.algorithm.name().to_string(),
        horizon: config.horizon,
        k,
        rounds: rows.len(),
        br_regret: ledger.final_br(),
        fb_regret: ledger.final_fb(),
        policy_regret: ledger.final_policy(),
        normalized_br: ledger.final_br().max(0.0) / (k as f64 * horizon * reg_sq).sqrt(),
        reg_sq,
        solver_iterations: solver_total,
        gamma,
        confidence_violations,
        bound_violations,
        fb_dominated: report.fb_dominated,
        policy_within_slack: report.policy_within_slack,
        failure: error.as_ref().map(|e| e.to_string()),
        wall_clock_secs: start.elapsed().as_secs_f64(),
    };
    Ok(SeedRun {
        summary,
        rows,
        error,
    })
}

/// Resolves the config, fans seeds out over a worker pool and, when the
/// config names an output directory, writes the artifacts there.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    run_experiment_with(config, None)
}

pub fn run_experiment_with(config: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentOutput> {
    let start = Instant::now();
    let resolved = config.resolve()?;
    let instance = Instance::build(&resolved.environment)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(threads))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let runs = pool.install(|| {
        resolved
            .seeds
            .par_iter()
            .map(|&seed| run_seed(&resolved, &instance, seed))
            .collect::<Result<Vec<_>>>()
    })?;
    let output = ExperimentOutput {
        config: resolved,
        runs,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    };
    if let Some(dir) = &output.config.output_dir {
        write_experiment(dir, &output)?;
        info!("wrote {} seeds to {}", output.runs.len(), dir.display());
    }
    Ok(output)
}
