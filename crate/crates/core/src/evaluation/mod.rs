//! Ground-truth regret accounting.
//!
//! Best-response and fixed-benchmark regret are computed in closed form from
//! the learner's joint distribution; policy regret uses the realized duels.

mod kahan;

use serde::{Deserialize, Serialize};

pub use kahan::KahanSum;

use crate::domain::{ActionDistribution, Context, Duel, JointActionDistribution, PreferenceMatrix, RngHandle};
use crate::error::{Error, Result};

fn check_k(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// `p^ℓ + p^r`
fn marginal_sum(joint: &JointActionDistribution) -> Vec<f64> {
    let (l, r) = joint.marginals();
    l.weights().iter().zip(r.weights()).map(|(a, b)| a + b).collect()
}

/// Index and value of the best pure response to `joint`:
/// `max_a (1/2) Σ_b f*[a,b] (p^ℓ[b] + p^r[b])`.
pub fn best_response(f_star: &PreferenceMatrix, joint: &JointActionDistribution) -> Result<(usize, f64)> {
    check_k(f_star.k(), joint.k())?;
    let m = marginal_sum(joint);
    let mut best = (0, f64::NEG_INFINITY);
    for (a, v) in f_star.mul_vec(&m).into_iter().enumerate() {
        if 0.5 * v > best.1 {
            best = (a, 0.5 * v);
        }
    }
    Ok(best)
}

/// One round of best-response regret. The maximum over response
/// distributions is linear, so it is attained at a pure action.
pub fn br_regret_step(f_star: &PreferenceMatrix, joint: &JointActionDistribution) -> Result<f64> {
    best_response(f_star, joint).map(|(_, v)| v)
}

/// `(1/2) q*ᵀ f* (p^ℓ + p^r)`
pub fn fb_regret_step(
    f_star: &PreferenceMatrix,
    joint: &JointActionDistribution,
    q_star: &ActionDistribution,
) -> Result<f64> {
    check_k(f_star.k(), joint.k())?;
    check_k(f_star.k(), q_star.k())?;
    let m = marginal_sum(joint);
    Ok(0.5 * f_star.bilinear(q_star.weights(), &m))
}

/// A map from contexts to arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Policy {
    Constant { arm: usize },
    /// Arm per finite context id.
    Table { arms: Vec<usize> },
}

impl Policy {
    pub fn act(&self, context: &Context) -> Result<usize> {
        match (self, context) {
            (Policy::Constant { arm }, _) => Ok(*arm),
            (Policy::Table { arms }, Context::Id(i)) => arms
                .get(*i)
                .copied()
                .ok_or_else(|| Error::UnknownContext(format!("context id {i}"))),
            (Policy::Table { .. }, ctx) => Err(Error::UnknownContext(ctx.to_string())),
        }
    }
}

/// The `K` constant policies.
pub fn constant_policies(k: usize) -> Vec<Policy> {
    (0..k).map(|arm| Policy::Constant { arm }).collect()
}

/// The constant policies plus `extra` random lookup tables over
/// `n_contexts` ids.
pub fn random_table_policies(k: usize, n_contexts: usize, extra: usize, rng: &mut RngHandle) -> Vec<Policy> {
    let mut out = constant_policies(k);
    out.extend((0..extra).map(|_| Policy::Table {
        arms: (0..n_contexts).map(|_| rng.index(k)).collect(),
    }));
    out
}

/// Regret numbers for one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRegret {
    pub br_step: f64,
    pub br_cum: f64,
    pub fb_step: f64,
    pub fb_cum: f64,
    pub policy_cum: f64,
}

/// Per-round and cumulative regrets for one run.
#[derive(Debug, Clone)]
pub struct RegretLedger {
    q_star: Option<ActionDistribution>,
    policies: Vec<Policy>,
    br_step: Vec<f64>,
    fb_step: Vec<f64>,
    br_cum: Vec<f64>,
    fb_cum: Vec<f64>,
    policy_cum: Vec<f64>,
    br_acc: KahanSum,
    fb_acc: KahanSum,
    policy_acc: Vec<KahanSum>,
}

impl RegretLedger {
    /// `q_star = None` records FB regret against the per-round best response,
    /// which makes `fb_step == br_step`.
    pub fn new(q_star: Option<ActionDistribution>, policies: Vec<Policy>) -> Self {
        let n = policies.len();
        Self {
            q_star,
            policies,
            br_step: Vec::new(),
            fb_step: Vec::new(),
            br_cum: Vec::new(),
            fb_cum: Vec::new(),
            policy_cum: Vec::new(),
            br_acc: KahanSum::default(),
            fb_acc: KahanSum::default(),
            policy_acc: vec![KahanSum::default(); n],
        }
    }

    pub fn q_star(&self) -> Option<&ActionDistribution> {
        self.q_star.as_ref()
    }

    pub fn policies(&self) -> &[Policy] {
        &self.policies
    }

    pub fn rounds(&self) -> usize {
        self.br_step.len()
    }

    pub fn br_steps(&self) -> &[f64] {
        &self.br_step
    }

    pub fn fb_steps(&self) -> &[f64] {
        &self.fb_step
    }

    pub fn br_cumulative(&self) -> &[f64] {
        &self.br_cum
    }

    pub fn fb_cumulative(&self) -> &[f64] {
        &self.fb_cum
    }

    pub fn policy_cumulative(&self) -> &[f64] {
        &self.policy_cum
    }

    pub fn final_br(&self) -> f64 {
        self.br_acc.value()
    }

    pub fn final_fb(&self) -> f64 {
        self.fb_acc.value()
    }

    pub fn final_policy(&self) -> f64 {
        self.policy_cum.last().copied().unwrap_or(0.0)
    }

    /// Adds `(1/2)(f*(x)[π(x),a] + f*(x)[π(x),b])` to each policy's column.
    pub fn policy_regret_accumulate(
        &mut self,
        f_star: &PreferenceMatrix,
        context: &Context,
        duel: Duel,
    ) -> Result<f64> {
        let (a, b) = duel;
        let k = f_star.k();
        if a >= k || b >= k {
            return Err(Error::DimensionMismatch {
                expected: k,
                actual: a.max(b) + 1,
            });
        }
        let mut best = f64::NEG_INFINITY;
        for (policy, acc) in self.policies.iter().zip(self.policy_acc.iter_mut()) {
            let arm = policy.act(context)?;
            if arm >= k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    actual: arm + 1,
                });
            }
            acc.add(0.5 * (f_star.get(arm, a) + f_star.get(arm, b)));
            best = best.max(acc.value());
        }
        Ok(if self.policies.is_empty() { 0.0 } else { best })
    }

    pub fn record(
        &mut self,
        f_star: &PreferenceMatrix,
        context: &Context,
        joint: &JointActionDistribution,
        duel: Duel,
    ) -> Result<RoundRegret> {
        let br = br_regret_step(f_star, joint)?;
        let fb = match &self.q_star {
            Some(q) => fb_regret_step(f_star, joint, q)?,
            None => br,
        };
        let policy = self.policy_regret_accumulate(f_star, context, duel)?;
        self.br_acc.add(br);
        self.fb_acc.add(fb);
        let row = RoundRegret {
            br_step: br,
            br_cum: self.br_acc.value(),
            fb_step: fb,
            fb_cum: self.fb_acc.value(),
            policy_cum: policy,
        };
        self.br_step.push(br);
        self.fb_step.push(fb);
        self.br_cum.push(row.br_cum);
        self.fb_cum.push(row.fb_cum);
        self.policy_cum.push(policy);
        Ok(row)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub rounds: usize,
    /// `fb_step <= br_step + 1e-12` on every round.
    pub fb_dominated: bool,
    /// Largest `fb_step - br_step` seen.
    pub worst_fb_excess: f64,
    /// `sqrt(T ln(|Π| T))`
    pub policy_slack: f64,
    /// Final policy regret `<= ` final BR regret plus the slack.
    pub policy_within_slack: bool,
}

impl DominanceReport {
    pub fn passed(&self) -> bool {
        self.fb_dominated && self.policy_within_slack
    }
}

pub const DOMINANCE_TOLERANCE: f64 = 1e-12;

pub fn dominance_report(ledger: &RegretLedger) -> DominanceReport {
    let t = ledger.rounds();
    let worst = ledger
        .fb_steps()
        .iter()
        .zip(ledger.br_steps())
        .map(|(f, b)| f - b)
        .fold(f64::NEG_INFINITY, f64::max);
    let n_pol = ledger.policies().len().max(1) as f64;
    let slack = if t == 0 {
        0.0
    } else {
        (t as f64 * (n_pol * t as f64).ln().max(0.0)).sqrt()
    };
    DominanceReport {
        rounds: t,
        fb_dominated: t == 0 || worst <= DOMINANCE_TOLERANCE,
        worst_fb_excess: if t == 0 { 0.0 } else { worst },
        policy_slack: slack,
        policy_within_slack: ledger.final_policy() <= ledger.final_br() + slack,
    }
}
