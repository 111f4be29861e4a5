use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::output::read_summaries;
use super::run::RunSummary;
use crate::domain::RngHandle;
use crate::error::{Error, Result};

const BOOTSTRAP_RESAMPLES: usize = 2000;
const BOOTSTRAP_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub p95: f64,
    pub min: f64,
    pub max: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

impl Stats {
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n.max(1)) - 1;
        Self {
            mean: v.iter().sum::<f64>() / n as f64,
            median: median(&v),
            p95: v.get(rank).copied().unwrap_or(f64::NAN),
            min: v.first().copied().unwrap_or(f64::NAN),
            max: v.last().copied().unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub algorithm: String,
    pub horizon: usize,
    pub runs: usize,
    pub failed: usize,
    pub br_regret: Stats,
    pub fb_regret: Stats,
    pub policy_regret: Stats,
    pub normalized_br: Stats,
}

/// `median BR(long) / median BR(short)` with a percentile bootstrap interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRatio {
    pub algorithm: String,
    pub short_horizon: usize,
    pub long_horizon: usize,
    pub ratio: f64,
    /// `sqrt(long / short)`, the ratio under square-root growth.
    pub sqrt_target: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub groups: Vec<GroupReport>,
    pub ratios: Vec<ScalingRatio>,
}

pub fn scaling_ratio(short: &[f64], long: &[f64]) -> (f64, f64, f64) {
    let ratio = median(long) / median(short);
    let mut rng = RngHandle::new(BOOTSTRAP_SEED);
    let mut draws: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let s: Vec<f64> = (0..short.len()).map(|_| short[rng.index(short.len())]).collect();
            let l: Vec<f64> = (0..long.len()).map(|_| long[rng.index(long.len())]).collect();
            median(&l) / median(&s)
        })
        .collect();
    draws.sort_by(f64::total_cmp);
    let at = |q: f64| draws[((q * draws.len() as f64) as usize).min(draws.len() - 1)];
    (ratio, at(0.025), at(0.975))
}

/// Per-(algorithm, horizon) statistics over successful runs, plus regret
/// ratios between every pair of horizons of the same algorithm.
pub fn aggregate(summaries: &[RunSummary]) -> Result<BatchReport> {
    if summaries.is_empty() {
        return Err(Error::config("nothing to aggregate"));
    }
    let mut groups: BTreeMap<(String, usize), Vec<&RunSummary>> = BTreeMap::new();
    for s in summaries {
        groups.entry((s.algorithm.clone(), s.horizon)).or_default().push(s);
    }
    let mut reports = Vec::new();
    let mut finals: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    for ((algorithm, horizon), runs) in &groups {
        let ok: Vec<&&RunSummary> = runs.iter().filter(|s| s.failure.is_none()).collect();
        let col = |f: fn(&RunSummary) -> f64| ok.iter().map(|s| f(s)).collect::<Vec<_>>();
        let br = col(|s| s.br_regret);
        reports.push(GroupReport {
            algorithm: algorithm.clone(),
            horizon: *horizon,
            runs: runs.len(),
            failed: runs.len() - ok.len(),
            br_regret: Stats::of(&br),
            fb_regret: Stats::of(&col(|s| s.fb_regret)),
            policy_regret: Stats::of(&col(|s| s.policy_regret)),
            normalized_br: Stats::of(&col(|s| s.normalized_br)),
        });
        finals.insert((algorithm.clone(), *horizon), br);
    }
    let mut ratios = Vec::new();
    for ((alg, short), s) in &finals {
        for ((alg2, long), l) in &finals {
            if alg2 != alg || long <= short || s.is_empty() || l.is_empty() {
                continue;
            }
            let (ratio, ci_low, ci_high) = scaling_ratio(s, l);
            ratios.push(ScalingRatio {
                algorithm: alg.clone(),
                short_horizon: *short,
                long_horizon: *long,
                ratio,
                sqrt_target: (*long as f64 / *short as f64).sqrt(),
                ci_low,
                ci_high,
            });
        }
    }
    Ok(BatchReport {
        groups: reports,
        ratios,
    })
}

/// Collects `summary.csv` from `dir` and its immediate subdirectories.
pub fn collect_summaries(dir: &Path) -> Result<Vec<RunSummary>> {
    let mut paths = Vec::new();
    let top = dir.join("summary.csv");
    if top.is_file() {
        paths.push(top);
    }
    let mut subdirs: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    subdirs.sort();
    for sub in subdirs {
        let p = sub.join("summary.csv");
        if p.is_file() {
            paths.push(p);
        }
    }
    let mut out = Vec::new();
    for p in paths {
        out.extend(read_summaries(&p)?);
    }
    Ok(out)
}
