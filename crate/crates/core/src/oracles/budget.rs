use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound `T ↦ RegSq(T)` on an oracle's cumulative square-loss regret.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum RegretBudget {
    /// Horizon-free bound, e.g. `8 ln|F|` for exponential weights.
    Constant { value: f64 },
    /// `d ln(1 + T/d) + offset`, the Vovk-Azoury-Warmuth bound.
    LogLinear { dim: usize, offset: f64 },
    /// `coefficient * sqrt(T)`, online gradient descent.
    SqrtHorizon { coefficient: f64 },
}

impl RegretBudget {
    pub fn at(&self, horizon: usize) -> f64 {
        let t = horizon as f64;
        match *self {
            RegretBudget::Constant { value } => value,
            RegretBudget::LogLinear { dim, offset } => {
                let d = dim as f64;
                d * (1.0 + t / d).ln() + offset
            }
            RegretBudget::SqrtHorizon { coefficient } => coefficient * t.sqrt(),
        }
    }
}

/// Oracle families with their class parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleKind {
    FiniteClass { class_size: usize },
    Vaw { dim: usize, lambda: f64, weight_norm: f64 },
    Ogd { radius: f64, feature_norm: f64 },
    GeneralizedLinear,
    Kernel,
    Banach,
}

/// Exp-concavity constant of the square loss on [-1, 1]: `1 / (2 * 2^2)`.
pub const SQUARE_LOSS_EXP_CONCAVITY: f64 = 1.0 / 8.0;

pub fn regret_budget(kind: OracleKind) -> Result<RegretBudget> {
    match kind {
        OracleKind::FiniteClass { class_size } => {
            if class_size == 0 {
                return Err(Error::config("finite class must be nonempty"));
            }
            Ok(RegretBudget::Constant {
                value: (class_size as f64).ln() / SQUARE_LOSS_EXP_CONCAVITY,
            })
        }
        OracleKind::Vaw {
            dim,
            lambda,
            weight_norm,
        } => Ok(RegretBudget::LogLinear {
            dim,
            offset: lambda * weight_norm * weight_norm,
        }),
        OracleKind::Ogd {
            radius,
            feature_norm,
        } => {
            // with η = R/(L√T): D²/(2η) + ηL²T/2 over a ball of diameter D = 2R
            let lipschitz = 2.0 * (radius * feature_norm + 1.0) * feature_norm;
            Ok(RegretBudget::SqrtHorizon {
                coefficient: 2.5 * radius * lipschitz,
            })
        }
        OracleKind::GeneralizedLinear => Err(Error::UnsupportedOracle("generalized linear".into())),
        OracleKind::Kernel => Err(Error::UnsupportedOracle("kernel (RKHS)".into())),
        OracleKind::Banach => Err(Error::UnsupportedOracle("Banach-space mirror descent".into())),
    }
}
