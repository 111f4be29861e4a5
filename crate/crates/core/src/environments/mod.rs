//! Synthetic contextual dueling environments.
//!
//! Each round the environment draws a context and a realized preference
//! matrix whose conditional mean is the ground truth `f*(x)`. Learners only
//! ever see the [`Context`]; the realized matrix and `f*` stay with the
//! harness and the evaluation code.

mod fixtures;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use fixtures::{condorcet, hardness, rps3, tournament_class, NamedFixture};

use crate::domain::{pairs, Context, FeatureTensor, PreferenceMatrix, RngHandle};
use crate::error::{Error, Result};
use crate::oracles::Hypothesis;

/// Entries of random finite-class hypotheses are drawn from `[-cap, cap]`.
pub const FINITE_CLASS_MARGIN_CAP: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentKind {
    FixedMatrix,
    FiniteClass,
    LinearRealizable,
}

/// One environment draw: what the learner sees plus the realized matrix.
#[derive(Debug, Clone)]
pub struct RoundDraw {
    pub context: Context,
    pub preference: PreferenceMatrix,
}

#[derive(Debug, Clone)]
enum Law {
    Fixed(PreferenceMatrix),
    Finite(Vec<PreferenceMatrix>),
    Linear { k: usize, weights: Vec<f64>, scale: f64 },
}

#[derive(Debug, Clone)]
pub struct Environment {
    law: Law,
    /// Relative size of the zero-mean skew perturbation added to `f*(x)`.
    perturbation: f64,
}

impl Environment {
    pub fn fixed(matrix: PreferenceMatrix) -> Self {
        Self {
            law: Law::Fixed(matrix),
            perturbation: 0.0,
        }
    }

    /// Contexts are drawn uniformly; `truths[i]` is `f*` on context `i`.
    pub fn finite(truths: Vec<PreferenceMatrix>) -> Result<Self> {
        let Some(first) = truths.first() else {
            return Err(Error::config("finite environment needs at least one context"));
        };
        let k = first.k();
        if truths.iter().any(|m| m.k() != k) {
            return Err(Error::config("all context matrices must share K"));
        }
        Ok(Self {
            law: Law::Finite(truths),
            perturbation: 0.0,
        })
    }

    /// `f*(x)[a,b] = wᵀ x[a,b]`. Raw features are uniform on `[-1,1]^d`,
    /// antisymmetric in the pair, and scaled by `1/max(1, ‖w‖₁)` so every
    /// prediction stays in [-1, 1].
    pub fn linear(k: usize, weights: Vec<f64>) -> Result<Self> {
        if k < 2 || weights.is_empty() {
            return Err(Error::config("linear environment needs K >= 2 and d >= 1"));
        }
        let l1: f64 = weights.iter().map(|w| w.abs()).sum();
        Ok(Self {
            law: Law::Linear {
                k,
                weights,
                scale: 1.0 / l1.max(1.0),
            },
            perturbation: 0.0,
        })
    }

    /// Adds a bounded zero-mean skew perturbation to every realized matrix:
    /// entry `(a,b)` moves by `U[-r, r]` with `r = level (1 - |f*[a,b]|)`.
    pub fn with_perturbation(mut self, level: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&level) {
            return Err(Error::config("perturbation level must lie in [0, 1]"));
        }
        self.perturbation = level;
        Ok(self)
    }

    pub fn kind(&self) -> EnvironmentKind {
        match self.law {
            Law::Fixed(_) => EnvironmentKind::FixedMatrix,
            Law::Finite(_) => EnvironmentKind::FiniteClass,
            Law::Linear { .. } => EnvironmentKind::LinearRealizable,
        }
    }

    pub fn k(&self) -> usize {
        match &self.law {
            Law::Fixed(m) => m.k(),
            Law::Finite(t) => t[0].k(),
            Law::Linear { k, .. } => *k,
        }
    }

    pub fn num_contexts(&self) -> Option<usize> {
        match &self.law {
            Law::Fixed(_) => Some(1),
            Law::Finite(t) => Some(t.len()),
            Law::Linear { .. } => None,
        }
    }

    pub fn feature_dim(&self) -> Option<usize> {
        match &self.law {
            Law::Linear { weights, .. } => Some(weights.len()),
            _ => None,
        }
    }

    /// The linear environment's weight vector.
    pub fn linear_weights(&self) -> Option<&[f64]> {
        match &self.law {
            Law::Linear { weights, .. } => Some(weights),
            _ => None,
        }
    }

    pub fn sample_context(&self, rng: &mut RngHandle) -> Context {
        match &self.law {
            Law::Fixed(_) => Context::Id(0),
            Law::Finite(t) => Context::Id(rng.index(t.len())),
            Law::Linear { k, weights, scale } => {
                let d = weights.len();
                let mut upper: Vec<Vec<f64>> = Vec::new();
                for _ in pairs(*k) {
                    upper.push((0..d).map(|_| scale * rng.uniform_range(-1.0, 1.0)).collect());
                }
                let index = |a: usize, b: usize| {
                    // position of (min, max) in pair order
                    let (lo, hi) = (a.min(b), a.max(b));
                    lo * (2 * k - lo - 1) / 2 + (hi - lo - 1)
                };
                let tensor = FeatureTensor::from_fn(*k, d, |a, b| {
                    if a == b {
                        vec![0.0; d]
                    } else if a < b {
                        upper[index(a, b)].clone()
                    } else {
                        upper[index(a, b)].iter().map(|v| -v).collect()
                    }
                })
                .expect("consistent dimensions");
                Context::Features(Arc::new(tensor))
            }
        }
    }

    /// Draws `(x_t, P_t)`.
    pub fn sample_round(&self, rng: &mut RngHandle) -> RoundDraw {
        let context = self.sample_context(rng);
        let truth = self
            .ground_truth(&context)
            .expect("context produced by this environment");
        let preference = if self.perturbation > 0.0 {
            let level = self.perturbation;
            PreferenceMatrix::from_upper_fn(truth.k(), |a, b| {
                let f = truth.get(a, b);
                let r = level * (1.0 - f.abs());
                f + rng.uniform_range(-r, r)
            })
            .0
        } else {
            truth
        };
        RoundDraw {
            context,
            preference,
        }
    }

    /// The conditional mean `f*(x)`. Meant for evaluation and diagnostics only.
    pub fn ground_truth(&self, context: &Context) -> Result<PreferenceMatrix> {
        match (&self.law, context) {
            (Law::Fixed(m), Context::Id(0)) => Ok(m.clone()),
            (Law::Finite(t), Context::Id(i)) => t
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::UnknownContext(format!("context id {i}"))),
            (Law::Linear { k, weights, .. }, Context::Features(x)) => {
                if x.k() != *k || x.dim() != weights.len() {
                    return Err(Error::UnknownContext("feature tensor shape".into()));
                }
                Ok(PreferenceMatrix::from_upper_fn(*k, |a, b| {
                    weights.iter().zip(x.get(a, b)).map(|(w, v)| w * v).sum()
                })
                .0)
            }
            (_, ctx) => Err(Error::UnknownContext(ctx.to_string())),
        }
    }

    /// Checks realizability: some hypothesis agrees with `f*` on every context.
    pub fn is_realized_by(&self, hypotheses: &[Hypothesis]) -> bool {
        match &self.law {
            Law::Fixed(m) => hypotheses.iter().any(|h| h.table(0) == Some(m)),
            Law::Finite(t) => hypotheses.iter().any(|h| match h {
                Hypothesis::Table(tables) => tables == t,
                Hypothesis::Linear(_) => false,
            }),
            Law::Linear { weights, .. } => hypotheses
                .iter()
                .any(|h| matches!(h, Hypothesis::Linear(w) if w == weights)),
        }
    }
}

/// A random skew-symmetric matrix with entries uniform on `[-cap, cap]`.
pub fn random_preference_matrix(k: usize, cap: f64, rng: &mut RngHandle) -> PreferenceMatrix {
    PreferenceMatrix::from_upper_fn(k, |_, _| rng.uniform_range(-cap, cap)).0
}

/// Generates `class_size` random hypotheses over `n_contexts` contexts and
/// makes a uniformly chosen one the ground truth.
pub fn make_finite_class(
    n_contexts: usize,
    k: usize,
    class_size: usize,
    rng: &mut RngHandle,
) -> Result<(Environment, Vec<Hypothesis>)> {
    if class_size == 0 || n_contexts == 0 || k < 2 {
        return Err(Error::config(
            "finite class needs class_size >= 1, n_contexts >= 1 and K >= 2",
        ));
    }
    let tables: Vec<Vec<PreferenceMatrix>> = (0..class_size)
        .map(|_| {
            (0..n_contexts)
                .map(|_| random_preference_matrix(k, FINITE_CLASS_MARGIN_CAP, rng))
                .collect()
        })
        .collect();
    let star = rng.index(class_size);
    let env = Environment::finite(tables[star].clone())?;
    Ok((env, tables.into_iter().map(Hypothesis::Table).collect()))
}

/// Builds a finite class around a known `f*` on a single context: the truth
/// plus `class_size - 1` random alternatives, in a seeded random order.
pub fn finite_class_around(
    truth: &PreferenceMatrix,
    class_size: usize,
    rng: &mut RngHandle,
) -> Result<Vec<Hypothesis>> {
    if class_size == 0 {
        return Err(Error::config("class_size must be at least 1"));
    }
    let mut class: Vec<Hypothesis> = (1..class_size)
        .map(|_| {
            Hypothesis::Table(vec![random_preference_matrix(
                truth.k(),
                FINITE_CLASS_MARGIN_CAP,
                rng,
            )])
        })
        .collect();
    let slot = rng.index(class_size);
    class.insert(slot, Hypothesis::Table(vec![truth.clone()]));
    Ok(class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::sample_outcome;

    #[test]
    fn fixed_fixture_rounds() {
        let env = Environment::fixed(rps3());
        let mut rng = RngHandle::new(0);
        for _ in 0..10 {
            let d = env.sample_round(&mut rng);
            assert_eq!(d.preference, rps3());
            assert_eq!(d.context, Context::Id(0));
        }
        assert_eq!(env.ground_truth(&Context::Id(0)).unwrap(), rps3());
        assert!(env.ground_truth(&Context::Id(1)).is_err());
    }

    #[test]
    fn zero_weights_give_zero_truth() {
        let env = Environment::linear(4, vec![0.0; 3]).unwrap();
        let mut rng = RngHandle::new(1);
        for _ in 0..5 {
            let d = env.sample_round(&mut rng);
            assert_eq!(d.preference, PreferenceMatrix::zeros(4));
        }
    }

    #[test]
    fn linear_features_are_antisymmetric_and_in_range() {
        let env = Environment::linear(4, vec![0.9, -0.7, 0.5]).unwrap();
        let mut rng = RngHandle::new(2);
        for _ in 0..20 {
            let ctx = env.sample_context(&mut rng);
            let x = ctx.features().unwrap();
            for a in 0..4 {
                for b in 0..4 {
                    for (u, v) in x.get(a, b).iter().zip(x.get(b, a)) {
                        assert_eq!(*u, -v);
                        assert!(u.abs() <= 1.0);
                    }
                }
            }
            let truth = env.ground_truth(&ctx).unwrap();
            for a in 0..4 {
                for b in 0..4 {
                    let direct: f64 = [0.9, -0.7, 0.5].iter().zip(x.get(a, b)).map(|(w, v)| w * v).sum();
                    assert!((truth.get(a, b) - direct).abs() < 1e-15);
                    assert!(direct.abs() <= 1.0);
                }
            }
        }
    }

    #[test]
    fn finite_class_is_realizable() {
        let mut rng = RngHandle::new(3);
        let (env, class) = make_finite_class(4, 3, 16, &mut rng).unwrap();
        assert_eq!(class.len(), 16);
        assert!(env.is_realized_by(&class));
        assert_eq!(env.num_contexts(), Some(4));
        let (env, class) = make_finite_class(1, 3, 1, &mut rng).unwrap();
        assert!(env.is_realized_by(&class));
    }

    #[test]
    fn finite_class_lookup() {
        let a = condorcet(3, 0.4).unwrap();
        let b = rps3();
        let env = Environment::finite(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(env.ground_truth(&Context::Id(0)).unwrap(), a);
        assert_eq!(env.ground_truth(&Context::Id(1)).unwrap(), b);
        assert!(matches!(
            env.ground_truth(&Context::Id(2)),
            Err(Error::UnknownContext(_))
        ));
    }

    #[test]
    fn class_around_contains_truth() {
        let mut rng = RngHandle::new(5);
        let truth = hardness(0.2).unwrap();
        let class = finite_class_around(&truth, 16, &mut rng).unwrap();
        assert_eq!(class.len(), 16);
        assert!(Environment::fixed(truth).is_realized_by(&class));
    }

    #[test]
    fn outcome_mean_matches_truth() {
        // Monte-Carlo mean of outcomes on a fixed (x, a, b) tracks f*(x)[a,b].
        let n = 100_000;
        let tol = 3.0 * (1.0 / n as f64).sqrt() * 2.0;
        let envs = vec![
            Environment::fixed(condorcet(3, 0.4).unwrap()),
            Environment::fixed(hardness(0.2).unwrap()).with_perturbation(0.5).unwrap(),
            Environment::finite(vec![condorcet(3, 0.6).unwrap(), rps3()]).unwrap(),
        ];
        for (i, env) in envs.into_iter().enumerate() {
            let mut rng = RngHandle::new(40 + i as u64);
            let ctx = Context::Id(0);
            let truth = env.ground_truth(&ctx).unwrap();
            let mut sum = 0.0;
            let mut count = 0;
            while count < n {
                let d = env.sample_round(&mut rng);
                if d.context != ctx {
                    continue;
                }
                sum += sample_outcome(d.preference.get(0, 1), &mut rng).unwrap().value();
                count += 1;
            }
            let mean = sum / n as f64;
            assert!((mean - truth.get(0, 1)).abs() <= tol, "env {i}: {mean} vs {}", truth.get(0, 1));
        }
    }

    #[test]
    fn linear_outcome_mean_matches_truth() {
        let n = 100_000;
        let tol = 3.0 * (1.0 / n as f64).sqrt() * 2.0;
        let env = Environment::linear(3, vec![0.6, -0.3]).unwrap();
        let mut rng = RngHandle::new(77);
        let ctx = env.sample_context(&mut rng);
        let truth = env.ground_truth(&ctx).unwrap();
        let mean = (0..n)
            .map(|_| sample_outcome(truth.get(0, 2), &mut rng).unwrap().value())
            .sum::<f64>()
            / n as f64;
        assert!((mean - truth.get(0, 2)).abs() <= tol);
    }

    #[test]
    fn emitted_matrices_validate() {
        let mut rng = RngHandle::new(8);
        let env = Environment::linear(5, vec![0.5, 0.5, -0.4]).unwrap().with_perturbation(0.3).unwrap();
        for _ in 0..50 {
            let d = env.sample_round(&mut rng);
            assert!(PreferenceMatrix::new(d.preference.to_rows()).is_ok());
            assert!(PreferenceMatrix::new(env.ground_truth(&d.context).unwrap().to_rows()).is_ok());
        }
    }
}
