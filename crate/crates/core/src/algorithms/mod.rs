//! Learners as explicit step machines.
//!
//! Every learner alternates [`Learner::select`] (a joint distribution over
//! duels plus the sampled duel) and [`Learner::observe`] (the binary outcome).
//! Learners only ever see contexts and outcomes.

mod ccedb;
mod ccelindb;
mod minmaxdb;

use serde::{Deserialize, Serialize};

pub use ccedb::{CceDbState, ConfidenceBounds, UNEXPLORED_WIDTH_CAP};
pub use ccelindb::{default_ucb_width, CceLinDbState};
pub use minmaxdb::{default_gamma, per_round_bound, MinMaxDbState};

use crate::domain::{Context, Duel, JointActionDistribution, Outcome, RngHandle};
use crate::error::{Error, Result};
use crate::oracles::OracleSpec;

/// What a learner commits to in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub joint: JointActionDistribution,
    pub duel: Duel,
    /// LP pivots or descent steps spent choosing `joint`.
    pub solver_iterations: usize,
    /// Exploration rate in use (MinMaxDB only).
    pub gamma: Option<f64>,
}

pub trait Learner {
    fn k(&self) -> usize;

    /// Round index of the next `select`, starting at 1.
    fn round(&self) -> usize;

    fn select(&mut self, context: &Context, rng: &mut RngHandle) -> Result<Selection>;

    fn observe(&mut self, context: &Context, duel: Duel, outcome: Outcome) -> Result<()>;
}

/// Plays the same duel every round. A baseline for closed-form checks.
#[derive(Debug, Clone)]
pub struct ConstantDuel {
    k: usize,
    duel: Duel,
    t: usize,
}

impl ConstantDuel {
    pub fn new(k: usize, duel: Duel) -> Result<Self> {
        if duel.0 >= k || duel.1 >= k {
            return Err(Error::config(format!("duel {duel:?} out of range for K={k}")));
        }
        Ok(Self { k, duel, t: 1 })
    }
}

impl Learner for ConstantDuel {
    fn k(&self) -> usize {
        self.k
    }

    fn round(&self) -> usize {
        self.t
    }

    fn select(&mut self, _context: &Context, _rng: &mut RngHandle) -> Result<Selection> {
        Ok(Selection {
            joint: JointActionDistribution::point_mass(self.k, self.duel.0, self.duel.1),
            duel: self.duel,
            solver_iterations: 0,
            gamma: None,
        })
    }

    fn observe(&mut self, _context: &Context, _duel: Duel, _outcome: Outcome) -> Result<()> {
        self.t += 1;
        Ok(())
    }
}

/// Learner choice as written in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgorithmSpec {
    CceDb {
        /// Confidence parameter; defaults to `1/T`.
        #[serde(default)]
        delta: Option<f64>,
    },
    CceLinDb {
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        lambda: Option<f64>,
        /// Confidence width multiplier; defaults to [`default_ucb_width`].
        #[serde(default)]
        eta: Option<f64>,
        /// Exploration length. Accepted for compatibility, not used.
        #[serde(default)]
        t0: Option<usize>,
    },
    MinMaxDb {
        /// Exploration rate; omitted means tuned from the oracle's budget.
        #[serde(default)]
        gamma: Option<f64>,
        oracle: OracleSpec,
    },
    ConstantDuel {
        a: usize,
        b: usize,
    },
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::CceDb { .. } => "cce_db",
            AlgorithmSpec::CceLinDb { .. } => "cce_lin_db",
            AlgorithmSpec::MinMaxDb { .. } => "min_max_db",
            AlgorithmSpec::ConstantDuel { .. } => "constant_duel",
        }
    }
}

/// Closed set of learners so runs can own one without boxing.
#[derive(Debug, Clone)]
pub enum AnyLearner {
    CceDb(CceDbState),
    CceLinDb(CceLinDbState),
    MinMaxDb(MinMaxDbState),
    Constant(ConstantDuel),
}

impl Learner for AnyLearner {
    fn k(&self) -> usize {
        match self {
            AnyLearner::CceDb(l) => l.k(),
            AnyLearner::CceLinDb(l) => l.k(),
            AnyLearner::MinMaxDb(l) => l.k(),
            AnyLearner::Constant(l) => l.k(),
        }
    }

    fn round(&self) -> usize {
        match self {
            AnyLearner::CceDb(l) => l.round(),
            AnyLearner::CceLinDb(l) => l.round(),
            AnyLearner::MinMaxDb(l) => l.round(),
            AnyLearner::Constant(l) => l.round(),
        }
    }

    fn select(&mut self, context: &Context, rng: &mut RngHandle) -> Result<Selection> {
        match self {
            AnyLearner::CceDb(l) => l.select(context, rng),
            AnyLearner::CceLinDb(l) => l.select(context, rng),
            AnyLearner::MinMaxDb(l) => l.select(context, rng),
            AnyLearner::Constant(l) => l.select(context, rng),
        }
    }

    fn observe(&mut self, context: &Context, duel: Duel, outcome: Outcome) -> Result<()> {
        match self {
            AnyLearner::CceDb(l) => l.observe(context, duel, outcome),
            AnyLearner::CceLinDb(l) => l.observe(context, duel, outcome),
            AnyLearner::MinMaxDb(l) => l.observe(context, duel, outcome),
            AnyLearner::Constant(l) => l.observe(context, duel, outcome),
        }
    }
}

fn check_duel(k: usize, duel: Duel) -> Result<()> {
    if duel.0 >= k || duel.1 >= k {
        return Err(Error::DimensionMismatch {
            expected: k,
            actual: duel.0.max(duel.1) + 1,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trips_through_json() {
        let specs = vec![
            AlgorithmSpec::CceDb { delta: None },
            AlgorithmSpec::MinMaxDb {
                gamma: Some(12.0),
                oracle: OracleSpec::FiniteClass { eta: None },
            },
            AlgorithmSpec::ConstantDuel { a: 2, b: 2 },
        ];
        for s in specs {
            let text = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<AlgorithmSpec>(&text).unwrap(), s);
        }
        let parsed: AlgorithmSpec =
            serde_json::from_str(r#"{"kind":"min_max_db","oracle":{"kind":"vaw"}}"#).unwrap();
        assert_eq!(
            parsed,
            AlgorithmSpec::MinMaxDb {
                gamma: None,
                oracle: OracleSpec::Vaw { lambda: 1.0 }
            }
        );
    }

    #[test]
    fn constant_duel_is_a_point_mass() {
        let mut l = ConstantDuel::new(3, (2, 2)).unwrap();
        let mut rng = RngHandle::new(0);
        let s = l.select(&Context::Id(0), &mut rng).unwrap();
        assert_eq!(s.duel, (2, 2));
        assert_eq!(s.joint.get(2, 2), 1.0);
        assert!(ConstantDuel::new(3, (0, 3)).is_err());
    }
}
