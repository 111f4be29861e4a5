//! The acceptance criteria, runnable one by one (`accept --suite <name>`)
//! or all together.

use std::fmt;
use std::time::Instant;

use serde::Serialize;

use super::config::{BenchmarkSpec, EnvironmentSpec, ExperimentConfig, Instance, PolicySpec, QStarRule};
use super::output::write_rows;
use super::run::{run_experiment_with, ExperimentOutput};
use super::aggregate::median;
use crate::algorithms::{per_round_bound, AlgorithmSpec};
use crate::domain::{
    pairs, sample_outcome, ActionDistribution, GeneralMatrix, JointActionDistribution, PreferenceMatrix,
    RngHandle,
};
use crate::environments::{make_finite_class, NamedFixture};
use crate::error::Result;
use crate::evaluation::br_regret_step;
use crate::games::{cce_violation, igw_slack, solve_cce, solve_minmax_feasibility, solve_zero_sum_nash, SolverConfig};
use crate::oracles::{FiniteClassAggregator, OracleInput, OracleSpec, RegressionOracle, VawForecaster};

/// Criterion ids and the names `accept --suite` understands.
pub const CRITERIA: [(u8, &str); 11] = [
    (1, "igw_feasibility"),
    (2, "per_round_inequality"),
    (3, "cce_validity"),
    (4, "confidence_coverage"),
    (5, "ccedb_scaling"),
    (6, "minmaxdb_scaling"),
    (7, "oracle_budgets"),
    (8, "fb_dominance"),
    (9, "nash_certificate"),
    (10, "hardness_sanity"),
    (11, "determinism"),
];

pub fn criterion_id(name: &str) -> Option<u8> {
    CRITERIA
        .iter()
        .find(|(id, n)| *n == name || id.to_string() == name)
        .map(|(id, _)| *id)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_secs: f64,
    pub time_limit_secs: Option<f64>,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let limit = self
            .time_limit_secs
            .map(|l| format!(", limit {l:.0}s"))
            .unwrap_or_default();
        write!(
            f,
            "[{}] criterion {:>2} {}: {} ({:.2}s{})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed_secs,
            limit
        )
    }
}

pub fn random_skew(k: usize, rng: &mut RngHandle) -> PreferenceMatrix {
    PreferenceMatrix::from_upper_fn(k, |_, _| rng.uniform_range(-1.0, 1.0)).0
}

/// Uniform point of the simplex (normalized exponentials).
pub fn random_simplex(k: usize, rng: &mut RngHandle) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.uniform()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

fn random_general(k: usize, bound: f64, rng: &mut RngHandle) -> GeneralMatrix {
    let data: Vec<f64> = (0..k * k).map(|_| rng.uniform_range(-bound, bound)).collect();
    GeneralMatrix::from_flat(k, data).expect("finite entries")
}

/// Smallest achievable largest CCE deviation gain of a 2×2 game, found by
/// brute force: `(p00, p01)` on a grid of spacing `h`, `p10` minimized
/// exactly (every deviation gain is affine in it), `p11` the remainder.
pub fn grid_cce_value(u: &GeneralMatrix, h: f64) -> f64 {
    assert_eq!(u.k(), 2);
    // deviation gains as linear forms over (p00, p01, p10, p11)
    let mut forms = Vec::new();
    for dev in 0..2 {
        let mut row = [0.0; 4];
        for a in 0..2 {
            for b in 0..2 {
                row[a * 2 + b] = u.get(dev, b) - u.get(a, b);
            }
        }
        forms.push(row);
        let mut col = [0.0; 4];
        for a in 0..2 {
            for b in 0..2 {
                col[a * 2 + b] = u.get(dev, a) - u.get(b, a);
            }
        }
        forms.push(col);
    }
    let steps = (1.0 / h).round() as usize;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let p00 = i as f64 * h;
        for j in 0..=(steps - i) {
            let p01 = j as f64 * h;
            let r = (1.0 - p00 - p01).max(0.0);
            // gain_f(s) = base_f + slope_f * s for p10 = s, p11 = r - s
            let lines: Vec<(f64, f64)> = forms
                .iter()
                .map(|f| (f[0] * p00 + f[1] * p01 + f[3] * r, f[2] - f[3]))
                .collect();
            let eval = |s: f64| lines.iter().map(|(b, m)| b + m * s).fold(f64::NEG_INFINITY, f64::max);
            let mut local = eval(0.0).min(eval(r));
            for x in 0..lines.len() {
                for y in x + 1..lines.len() {
                    let dm = lines[x].1 - lines[y].1;
                    if dm != 0.0 {
                        let s = (lines[y].0 - lines[x].0) / dm;
                        if (0.0..=r).contains(&s) {
                            local = local.min(eval(s));
                        }
                    }
                }
            }
            best = best.min(local);
        }
    }
    best
}

struct FeasibleCase {
    y_hat: PreferenceMatrix,
    gamma: f64,
    p: Vec<f64>,
}

/// Runs criteria and keeps the pieces later criteria reuse.
#[derive(Default)]
pub struct Suite {
    feasible: Option<Vec<FeasibleCase>>,
    ccedb_runs: Option<Vec<ExperimentOutput>>,
    minmax_runs: Option<Vec<ExperimentOutput>>,
    threads: Option<usize>,
}

fn fixed(fixture: NamedFixture) -> EnvironmentSpec {
    EnvironmentSpec::FixedMatrix {
        fixture: Some(fixture),
        matrix: None,
        perturbation: 0.0,
        class_size: 16,
        instance_seed: 0,
    }
}

fn benchmark(q_star: QStarRule) -> BenchmarkSpec {
    BenchmarkSpec {
        q_star,
        policies: PolicySpec::Constant,
    }
}

/// The condorcet fixture used by the CCE-DB criteria.
pub fn ccedb_config(horizon: usize, seeds: Vec<u64>, diagnostic: bool) -> ExperimentConfig {
    ExperimentConfig {
        name: Some(format!("cce_db_condorcet5_T{horizon}")),
        algorithm: AlgorithmSpec::CceDb { delta: None },
        environment: fixed(NamedFixture::Condorcet { k: 5, margin: 0.4 }),
        horizon,
        seeds,
        output_dir: None,
        diagnostic,
        benchmark: benchmark(QStarRule::Condorcet),
        solver: SolverConfig::default(),
    }
}

/// MinMaxDB with exponential weights over a 16-member class, 3 arms, one context.
pub fn minmaxdb_config(horizon: usize, seeds: Vec<u64>) -> ExperimentConfig {
    ExperimentConfig {
        name: Some(format!("min_max_db_finite16_T{horizon}")),
        algorithm: AlgorithmSpec::MinMaxDb {
            gamma: None,
            oracle: OracleSpec::FiniteClass { eta: None },
        },
        environment: EnvironmentSpec::FiniteClass {
            k: 3,
            n_contexts: 1,
            class_size: 16,
            perturbation: 0.0,
            instance_seed: 0,
        },
        horizon,
        seeds,
        output_dir: None,
        diagnostic: false,
        benchmark: benchmark(QStarRule::Nash),
        solver: SolverConfig::default(),
    }
}

pub fn hardness_config(epsilon: f64, duel: (usize, usize), horizon: usize) -> ExperimentConfig {
    ExperimentConfig {
        name: Some(format!("hardness_eps{epsilon}_{}{}", duel.0, duel.1)),
        algorithm: AlgorithmSpec::ConstantDuel { a: duel.0, b: duel.1 },
        environment: fixed(NamedFixture::Hardness { epsilon }),
        horizon,
        seeds: vec![0],
        output_dir: None,
        diagnostic: false,
        benchmark: benchmark(QStarRule::Nash),
        solver: SolverConfig::default(),
    }
}

fn linear_config(horizon: usize, seeds: Vec<u64>) -> ExperimentConfig {
    ExperimentConfig {
        name: Some("cce_lin_db_linear".into()),
        algorithm: AlgorithmSpec::CceLinDb {
            delta: None,
            lambda: None,
            eta: None,
            t0: None,
        },
        environment: EnvironmentSpec::LinearRealizable {
            k: 4,
            dim: 3,
            weight_norm: 1.0,
            class_size: 4,
            perturbation: 0.2,
            instance_seed: 7,
        },
        horizon,
        seeds,
        output_dir: None,
        diagnostic: false,
        benchmark: BenchmarkSpec::default(),
        solver: SolverConfig::default(),
    }
}

fn finish(
    id: u8,
    start: Instant,
    limit: Option<f64>,
    passed: bool,
    detail: String,
) -> CriterionResult {
    let elapsed = start.elapsed().as_secs_f64();
    let in_time = limit.is_none_or(|l| elapsed < l);
    let detail = if in_time {
        detail
    } else {
        format!("{detail}; exceeded time limit")
    };
    CriterionResult {
        id,
        name: CRITERIA[id as usize - 1].1,
        passed: passed && in_time,
        detail,
        elapsed_secs: elapsed,
        time_limit_secs: limit,
    }
}

impl Suite {
    pub fn new() -> Self {
        Self::default()
    }

    /// Caps the worker pool of the simulation criteria.
    pub fn with_threads(threads: usize) -> Self {
        Self {
            threads: Some(threads),
            ..Self::default()
        }
    }

    pub fn run_all(&mut self) -> Result<Vec<CriterionResult>> {
        CRITERIA.iter().map(|(id, _)| self.run(*id)).collect()
    }

    pub fn run(&mut self, id: u8) -> Result<CriterionResult> {
        match id {
            1 => self.igw_feasibility(),
            2 => self.per_round_inequality(),
            3 => Ok(cce_validity()),
            4 => self.confidence_coverage(),
            5 => self.ccedb_scaling(),
            6 => self.minmaxdb_scaling(),
            7 => Ok(oracle_budgets()),
            8 => self.fb_dominance(),
            9 => Ok(nash_certificate()),
            10 => self.hardness_sanity(),
            11 => self.determinism(),
            _ => Err(crate::Error::config(format!("unknown criterion {id}"))),
        }
    }

    fn solve_feasibility_cases(&mut self) -> (Vec<String>, usize, f64) {
        let mut rng = RngHandle::new(101);
        let cfg = SolverConfig::default();
        let ks = [2usize, 3, 5, 10];
        let mults = [2.0, 4.0, 10.0];
        let mut cases = Vec::new();
        let mut failures = Vec::new();
        let mut max_iters = 0;
        let mut worst_excess = f64::NEG_INFINITY;
        for i in 0..1000 {
            let k = ks[i % ks.len()];
            let gamma = mults[(i / ks.len()) % mults.len()] * k as f64;
            let y_hat = random_skew(k, &mut rng);
            match solve_minmax_feasibility(&y_hat, gamma, &cfg) {
                Ok(r) => {
                    max_iters = max_iters.max(r.iterations);
                    let excess = r.max_violation - igw_slack(k, gamma);
                    worst_excess = worst_excess.max(excess);
                    if excess > 1e-6 {
                        failures.push(format!("case {i}: violation {:.3e}", r.max_violation));
                    }
                    cases.push(FeasibleCase {
                        y_hat,
                        gamma,
                        p: r.point.weights().to_vec(),
                    });
                }
                Err(e) => failures.push(format!("case {i} (K={k}, γ={gamma}): {e}")),
            }
        }
        self.feasible = Some(cases);
        (failures, max_iters, worst_excess)
    }

    fn igw_feasibility(&mut self) -> Result<CriterionResult> {
        let start = Instant::now();
        let (failures, iters, worst) = self.solve_feasibility_cases();
        let detail = format!(
            "{} of 1000 instances failed; worst violation minus K/γ {worst:.3e}; max iterations {iters}",
            failures.len()
        );
        Ok(finish(1, start, Some(60.0), failures.is_empty(), detail))
    }

    fn per_round_inequality(&mut self) -> Result<CriterionResult> {
        if self.feasible.is_none() {
            self.solve_feasibility_cases();
        }
        let start = Instant::now();
        let mut rng = RngHandle::new(202);
        let mut checks = 0usize;
        let mut violations = 0usize;
        let mut worst = f64::NEG_INFINITY;
        for case in self.feasible.as_ref().expect("filled") {
            let k = case.y_hat.k();
            for _ in 0..100 {
                let f_star = random_skew(k, &mut rng);
                let q = random_simplex(k, &mut rng);
                let (best_pure, rhs) = per_round_bound(&f_star, &case.y_hat, &case.p, case.gamma);
                let lhs = f_star.bilinear(&q, &case.p);
                for value in [lhs, best_pure] {
                    checks += 1;
                    worst = worst.max(value - rhs);
                    if value > rhs + 1e-9 {
                        violations += 1;
                    }
                }
            }
        }
        let detail = format!("{violations} violations in {checks} checks; largest lhs - rhs {worst:.3e}");
        Ok(finish(2, start, Some(60.0), violations == 0 && checks > 0, detail))
    }

    fn confidence_coverage(&mut self) -> Result<CriterionResult> {
        let start = Instant::now();
        let out = run_experiment_with(&ccedb_config(2000, (0..200).collect(), true), self.threads)?;
        let failed = out.runs.iter().filter(|r| r.error.is_some()).count();
        let violated = out
            .runs
            .iter()
            .filter(|r| r.summary.confidence_violations.unwrap_or(0) > 0)
            .count();
        let detail = format!("{violated} of 200 seeds left the confidence set (allowed 10); {failed} failed runs");
        Ok(finish(4, start, Some(300.0), violated <= 10 && failed == 0, detail))
    }

    fn ccedb_scaling(&mut self) -> Result<CriterionResult> {
        let start = Instant::now();
        let runs = [2000usize, 8000]
            .iter()
            .map(|&t| run_experiment_with(&ccedb_config(t, (0..50).collect(), false), self.threads))
            .collect::<Result<Vec<_>>>()?;
        let k = 5.0;
        let result = scaling_check(&runs, |t| 4.0 * k * (k * t).ln() * t.sqrt());
        self.ccedb_runs = Some(runs);
        Ok(finish(5, start, Some(600.0), result.0, result.1))
    }

    fn minmaxdb_scaling(&mut self) -> Result<CriterionResult> {
        let start = Instant::now();
        let runs = [2500usize, 10000]
            .iter()
            .map(|&t| run_experiment_with(&minmaxdb_config(t, (0..50).collect()), self.threads))
            .collect::<Result<Vec<_>>>()?;
        let k = 3.0;
        let budget = 8.0 * 16f64.ln();
        let result = scaling_check(&runs, |t| 4.0 * (5.0 * k * t * budget).sqrt());
        self.minmax_runs = Some(runs);
        Ok(finish(6, start, Some(600.0), result.0, result.1))
    }

    fn fb_dominance(&mut self) -> Result<CriterionResult> {
        if self.ccedb_runs.is_none() {
            self.ccedb_scaling()?;
        }
        if self.minmax_runs.is_none() {
            self.minmaxdb_scaling()?;
        }
        let start = Instant::now();
        let mut rounds = 0usize;
        let mut bad = 0usize;
        let mut worst = f64::NEG_INFINITY;
        for out in self.ccedb_runs.iter().chain(&self.minmax_runs).flatten() {
            for run in &out.runs {
                for row in &run.rows {
                    rounds += 1;
                    let excess = row.fb_step - row.br_step;
                    worst = worst.max(excess);
                    if excess > 1e-12 {
                        bad += 1;
                    }
                }
            }
        }
        let detail = format!("{bad} of {rounds} rounds with fb_step > br_step; largest excess {worst:.3e}");
        Ok(finish(8, start, None, bad == 0 && rounds > 0, detail))
    }

    fn hardness_sanity(&mut self) -> Result<CriterionResult> {
        let start = Instant::now();
        let mut problems = Vec::new();
        for eps in [0.2, 0.1, 0.05, 0.5] {
            for horizon in [1000usize, 10_000] {
                let cc = run_experiment_with(&hardness_config(eps, (2, 2), horizon), Some(1))?;
                let br = cc.runs[0].summary.br_regret;
                let expected = eps * horizon as f64;
                if br != expected {
                    problems.push(format!("(c,c) ε={eps} T={horizon}: {br} vs {expected}"));
                }
                let aa = run_experiment_with(&hardness_config(eps, (0, 0), horizon), Some(1))?;
                let br = aa.runs[0].summary.br_regret;
                if br != 0.0 {
                    problems.push(format!("(a,a) ε={eps} T={horizon}: {br}"));
                }
            }
        }
        let detail = if problems.is_empty() {
            "playing (c,c) gives exactly εT and (a,a) gives 0 for ε in {0.2, 0.1, 0.05, 0.5}".to_string()
        } else {
            problems.join("; ")
        };
        Ok(finish(10, start, Some(1.0), problems.is_empty(), detail))
    }

    fn determinism(&mut self) -> Result<CriterionResult> {
        let start = Instant::now();
        let configs = vec![
            ccedb_config(2000, vec![0, 1, 2], true),
            ccedb_config(8000, vec![3], false),
            minmaxdb_config(2500, vec![0, 1, 2]),
            hardness_config(0.2, (2, 2), 1000),
            linear_config(500, vec![5, 6]),
        ];
        let mut mismatches = Vec::new();
        let mut bytes = 0usize;
        for cfg in &configs {
            let a = csv_bytes(&run_experiment_with(cfg, Some(1))?)?;
            let b = csv_bytes(&run_experiment_with(cfg, self.threads)?)?;
            bytes += a.iter().map(Vec::len).sum::<usize>();
            if a != b {
                mismatches.push(cfg.name.clone().unwrap_or_default());
            }
        }
        let detail = if mismatches.is_empty() {
            format!("{} configs replayed byte-identically ({bytes} CSV bytes)", configs.len())
        } else {
            format!("differing CSVs: {}", mismatches.join(", "))
        };
        Ok(finish(11, start, None, mismatches.is_empty(), detail))
    }
}

fn csv_bytes(out: &ExperimentOutput) -> Result<Vec<Vec<u8>>> {
    out.runs
        .iter()
        .map(|r| {
            let mut buf = Vec::new();
            write_rows(&mut buf, &r.rows)?;
            Ok(buf)
        })
        .collect()
}

/// Median bound at both horizons and the ratio of medians in [1.4, 2.8].
fn scaling_check(runs: &[ExperimentOutput], bound: impl Fn(f64) -> f64) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut medians = Vec::new();
    for out in runs {
        let failed = out.runs.iter().filter(|r| r.error.is_some()).count();
        let finals: Vec<f64> = out.runs.iter().map(|r| r.summary.br_regret).collect();
        let t = out.config.horizon as f64;
        let m = median(&finals);
        let b = bound(t);
        ok &= m <= b && failed == 0;
        parts.push(format!("T={t}: median {m:.2} (bound {b:.1}, {failed} failed)"));
        medians.push(m);
    }
    let ratio = medians[1] / medians[0];
    let ratio_ok = (1.4..=2.8).contains(&ratio);
    parts.push(format!("ratio {ratio:.3} (need 1.4..2.8)"));
    (ok && ratio_ok, parts.join("; "))
}

fn cce_validity() -> CriterionResult {
    let start = Instant::now();
    let mut rng = RngHandle::new(303);
    let cfg = SolverConfig::default();
    let h = 1e-3;
    let mut failures = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    let mut grid_checked = 0;
    let mut worst_gap: f64 = 0.0;
    for i in 0..1000 {
        let k = 2 + i % 9;
        let u = random_general(k, 3.0, &mut rng);
        match solve_cce(&u, &cfg) {
            Ok(r) => {
                let v = cce_violation(&u, &r.point);
                worst = worst.max(v);
                if v > 1e-8 {
                    failures.push(format!("case {i}: violation {v:.3e}"));
                }
                if k == 2 {
                    grid_checked += 1;
                    let grid = grid_cce_value(&u, h);
                    // a grid step moves the joint by at most 4h in l1 and every
                    // gain coefficient is bounded by the entry range
                    let coef = (0..2)
                        .flat_map(|a| (0..2).map(move |b| (a, b)))
                        .flat_map(|(a, b)| (0..2).map(move |d| (a, b, d)))
                        .map(|(a, b, d)| (u.get(d, b) - u.get(a, b)).abs().max((u.get(d, a) - u.get(b, a)).abs()))
                        .fold(0.0, f64::max);
                    let tol = 4.0 * h * coef + 1e-12;
                    let verdict_match = (v <= 1e-8) == (grid <= tol);
                    worst_gap = worst_gap.max(grid - r.max_violation);
                    if !verdict_match || grid < r.max_violation - 1e-9 || grid > r.max_violation + tol {
                        failures.push(format!("case {i}: LP value {:.4e} vs grid {grid:.4e}", r.max_violation));
                    }
                }
            }
            Err(e) => failures.push(format!("case {i} (K={k}): {e}")),
        }
    }
    let detail = format!(
        "{} failures in 1000 games; worst deviation gain {worst:.3e}; {grid_checked} K=2 games agree with the grid (largest grid - LP gap {worst_gap:.2e})",
        failures.len()
    );
    finish(3, start, Some(120.0), failures.is_empty(), detail)
}

fn oracle_budgets() -> CriterionResult {
    let start = Instant::now();
    let (t_len, d) = (5000usize, 4usize);
    let vaw_bound = 4.0 * d as f64 * (1.0 + t_len as f64 / d as f64).ln();
    let fin_bound = 4.0 * 8.0 * 16f64.ln();
    let mut worst_vaw: f64 = 0.0;
    let mut worst_fin: f64 = 0.0;
    let mut errors = Vec::new();
    for seed in 0..20u64 {
        let root = RngHandle::new(seed);
        // linear stream
        let run = || -> Result<f64> {
            let spec = EnvironmentSpec::LinearRealizable {
                k: 4,
                dim: d,
                weight_norm: 1.0,
                class_size: 1,
                perturbation: 0.0,
                instance_seed: 1000 + seed,
            };
            let inst = Instance::build(&spec)?;
            let mut rng = root.substream(1);
            let mut vaw = VawForecaster::new(d, 1.0)?;
            let mut err = 0.0;
            let all_pairs: Vec<_> = pairs(4).collect();
            for _ in 0..t_len {
                let ctx = inst.env.sample_context(&mut rng);
                let truth = inst.env.ground_truth(&ctx)?;
                let (a, b) = all_pairs[rng.index(all_pairs.len())];
                let z = OracleInput::new(&ctx, a, b);
                let y_hat = vaw.predict(&z)?;
                err += (y_hat - truth.get(a, b)).powi(2);
                let y = sample_outcome(truth.get(a, b), &mut rng)?.value();
                vaw.update(&z, y)?;
            }
            Ok(err)
        };
        match run() {
            Ok(e) => worst_vaw = worst_vaw.max(e),
            Err(e) => errors.push(e.to_string()),
        }
        // finite class stream
        let run = || -> Result<f64> {
            let mut rng = root.substream(2);
            let (env, hyps) = make_finite_class(4, 4, 16, &mut rng)?;
            let mut agg = FiniteClassAggregator::new(hyps)?;
            let mut err = 0.0;
            let all_pairs: Vec<_> = pairs(4).collect();
            for _ in 0..t_len {
                let ctx = env.sample_context(&mut rng);
                let truth = env.ground_truth(&ctx)?;
                let (a, b) = all_pairs[rng.index(all_pairs.len())];
                let z = OracleInput::new(&ctx, a, b);
                err += (agg.predict(&z)? - truth.get(a, b)).powi(2);
                let y = sample_outcome(truth.get(a, b), &mut rng)?.value();
                agg.update(&z, y)?;
            }
            Ok(err)
        };
        match run() {
            Ok(e) => worst_fin = worst_fin.max(e),
            Err(e) => errors.push(e.to_string()),
        }
    }
    let passed = errors.is_empty() && worst_vaw <= vaw_bound && worst_fin <= fin_bound;
    let detail = format!(
        "VAW worst estimation error {worst_vaw:.2} (bound {vaw_bound:.2}); exponential weights worst {worst_fin:.2} (bound {fin_bound:.2}){}",
        if errors.is_empty() { String::new() } else { format!("; errors: {}", errors.join(", ")) }
    );
    finish(7, start, Some(120.0), passed, detail)
}

fn nash_certificate() -> CriterionResult {
    let start = Instant::now();
    let mut rng = RngHandle::new(909);
    let cfg = SolverConfig::default();
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    for i in 0..100 {
        let k = 2 + i % 9;
        let f = random_skew(k, &mut rng);
        match solve_zero_sum_nash(&f, &cfg) {
            Ok(r) => {
                let q: ActionDistribution = r.point;
                let joint = JointActionDistribution::product(&q, &q);
                let br = br_regret_step(&f, &joint).expect("matching sizes");
                worst = worst.max(br);
                if br > 1e-6 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    let detail = format!("{failures} of 100 games above 1e-6; largest BR step {worst:.3e}");
    finish(9, start, None, failures == 0, detail)
}
