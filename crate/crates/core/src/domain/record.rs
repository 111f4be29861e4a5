use serde::{Deserialize, Serialize};

use super::dist::JointActionDistribution;
use super::rng::RngHandle;
use crate::error::{Error, Result};

/// An ordered duel `(left, right)`.
pub type Duel = (usize, usize);

/// Binary duel feedback: `Win` means the left arm was preferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Win,
    Loss,
}

impl Outcome {
    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Outcome::Win),
            -1 => Ok(Outcome::Loss),
            other => Err(Error::RangeViolation {
                location: "outcome".into(),
                value: other as f64,
            }),
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            Outcome::Win => 1,
            Outcome::Loss => -1,
        }
    }

    pub fn value(self) -> f64 {
        self.sign() as f64
    }

    /// The outcome as seen from the other side of the duel.
    pub fn flipped(self) -> Self {
        match self {
            Outcome::Win => Outcome::Loss,
            Outcome::Loss => Outcome::Win,
        }
    }
}

/// Draws `+1` with probability `(p_value + 1) / 2`, else `-1`.
pub fn sample_outcome(p_value: f64, rng: &mut RngHandle) -> Result<Outcome> {
    if !(-1.0..=1.0).contains(&p_value) {
        return Err(Error::RangeViolation {
            location: "preference value".into(),
            value: p_value,
        });
    }
    let u = rng.uniform();
    Ok(if u < (p_value + 1.0) / 2.0 {
        Outcome::Win
    } else {
        Outcome::Loss
    })
}

/// One interaction round as seen by the harness.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub t: usize,
    pub context_id: String,
    pub duel: Duel,
    pub outcome: Outcome,
    pub learner_joint: JointActionDistribution,
}

impl RoundRecord {
    pub fn new(
        t: usize,
        context_id: impl Into<String>,
        duel: Duel,
        outcome: Outcome,
        learner_joint: JointActionDistribution,
    ) -> Result<Self> {
        let k = learner_joint.k();
        if t == 0 {
            return Err(Error::config("round indices start at 1"));
        }
        if duel.0 >= k || duel.1 >= k {
            return Err(Error::DimensionMismatch {
                expected: k,
                actual: duel.0.max(duel.1) + 1,
            });
        }
        Ok(Self {
            t,
            context_id: context_id.into(),
            duel,
            outcome,
            learner_joint,
        })
    }
}
