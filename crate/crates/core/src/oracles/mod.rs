//! Online square-loss regression oracles.
//!
//! Every oracle follows predict-then-update semantics over inputs
//! `z = (context, a, b)` with labels in [-1, 1]. `predict` is a pure query;
//! only `update` changes state.

mod budget;
mod finite;
mod ogd;
mod vaw;

use serde::{Deserialize, Serialize};

pub use budget::{regret_budget, OracleKind, RegretBudget};
pub use finite::{FiniteClassAggregator, Hypothesis, DEFAULT_EXP_WEIGHTS_RATE};
pub use ogd::OgdForecaster;
pub use vaw::VawForecaster;

use crate::domain::Context;
use crate::error::{Error, Result};

/// A regression input: the round's context and an ordered arm pair.
#[derive(Debug, Clone, Copy)]
pub struct OracleInput<'a> {
    pub context: &'a Context,
    pub a: usize,
    pub b: usize,
}

impl<'a> OracleInput<'a> {
    pub fn new(context: &'a Context, a: usize, b: usize) -> Self {
        Self { context, a, b }
    }

    /// The pair's feature vector, for linear oracles.
    pub fn features(&self, dim: usize) -> Result<&'a [f64]> {
        let tensor = self
            .context
            .features()
            .ok_or_else(|| Error::UnknownContext(format!("linear oracle needs features, got id {}", self.context)))?;
        if tensor.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: tensor.dim(),
            });
        }
        if self.a >= tensor.k() || self.b >= tensor.k() {
            return Err(Error::DimensionMismatch {
                expected: tensor.k(),
                actual: self.a.max(self.b) + 1,
            });
        }
        Ok(tensor.get(self.a, self.b))
    }
}

pub trait RegressionOracle {
    /// Prediction in [-1, 1] for `z`; never mutates state.
    fn predict(&self, z: &OracleInput<'_>) -> Result<f64>;

    /// Feeds the labelled example `(z, y)`, `|y| <= 1`.
    fn update(&mut self, z: &OracleInput<'_>, y: f64) -> Result<()>;

    /// Regret bound this oracle guarantees.
    fn budget(&self) -> RegretBudget;
}

fn check_label(y: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&y) {
        return Err(Error::RangeViolation {
            location: "oracle label".into(),
            value: y,
        });
    }
    Ok(())
}

/// Closed set of concrete oracles, so learner state stays `Clone + Debug`.
#[derive(Debug, Clone)]
pub enum Oracle {
    FiniteClass(FiniteClassAggregator),
    Vaw(VawForecaster),
    Ogd(OgdForecaster),
}

impl RegressionOracle for Oracle {
    fn predict(&self, z: &OracleInput<'_>) -> Result<f64> {
        match self {
            Oracle::FiniteClass(o) => o.predict(z),
            Oracle::Vaw(o) => o.predict(z),
            Oracle::Ogd(o) => o.predict(z),
        }
    }

    fn update(&mut self, z: &OracleInput<'_>, y: f64) -> Result<()> {
        match self {
            Oracle::FiniteClass(o) => o.update(z, y),
            Oracle::Vaw(o) => o.update(z, y),
            Oracle::Ogd(o) => o.update(z, y),
        }
    }

    fn budget(&self) -> RegretBudget {
        match self {
            Oracle::FiniteClass(o) => o.budget(),
            Oracle::Vaw(o) => o.budget(),
            Oracle::Ogd(o) => o.budget(),
        }
    }
}

/// Oracle choice as written in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleSpec {
    /// Exponential weights over the environment's hypothesis class.
    FiniteClass {
        #[serde(default)]
        eta: Option<f64>,
    },
    Vaw {
        #[serde(default = "default_lambda")]
        lambda: f64,
    },
    Ogd {
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default)]
        eta: Option<f64>,
    },
}

fn default_lambda() -> f64 {
    1.0
}

fn default_radius() -> f64 {
    1.0
}
