use super::{check_duel, Learner, Selection};
use crate::domain::{
    ActionDistribution, Context, Duel, JointActionDistribution, Outcome, PreferenceMatrix, RngHandle,
};
use crate::error::{Error, Result};
use crate::games::{igw_rhs, igw_slack, solve_minmax_feasibility, SolverConfig};
use crate::oracles::{Oracle, OracleInput, RegressionOracle, RegretBudget};

/// `sqrt(20 K T / budget(T))`, admissible when `T >= 4 K budget(T)`.
pub fn default_gamma(k: usize, horizon: usize, budget: &RegretBudget) -> Result<f64> {
    let b = budget.at(horizon);
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::config(format!("regret budget {b} must be positive and finite")));
    }
    let required = 4.0 * k as f64 * b;
    if (horizon as f64) < required {
        return Err(Error::HorizonTooShort { horizon, required });
    }
    Ok((20.0 * k as f64 * horizon as f64 / b).sqrt())
}

/// Both sides of the per-round regret inequality for a learner distribution
/// `p` chosen against predictions `y_hat` when the truth is `f_star`:
/// returns `(max_a (f* p)_a, (γ/2) E_{p×p}(f* - Ŷ)² + 5K/γ + K/γ)`.
pub fn per_round_bound(
    f_star: &PreferenceMatrix,
    y_hat: &PreferenceMatrix,
    p: &[f64],
    gamma: f64,
) -> (f64, f64) {
    let k = f_star.k();
    let exploit = f_star
        .mul_vec(p)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut sq = 0.0;
    for a in 0..k {
        for b in 0..k {
            let d = f_star.get(a, b) - y_hat.get(a, b);
            sq += p[a] * p[b] * d * d;
        }
    }
    (exploit, gamma / 2.0 * sq + igw_rhs(k, gamma) + igw_slack(k, gamma))
}

/// Inverse-gap-weighted learner driven by an online square-loss oracle.
#[derive(Debug, Clone)]
pub struct MinMaxDbState {
    k: usize,
    oracle: Oracle,
    gamma: f64,
    t: usize,
    solver: SolverConfig,
    last_prediction: Option<PreferenceMatrix>,
    last_joint: Option<JointActionDistribution>,
}

impl MinMaxDbState {
    pub fn new(k: usize, oracle: Oracle, gamma: f64, solver: SolverConfig) -> Result<Self> {
        if k < 2 {
            return Err(Error::config("MinMaxDB needs K >= 2"));
        }
        if !(gamma >= 2.0 * k as f64) {
            return Err(Error::GammaTooSmall {
                gamma,
                min: 2.0 * k as f64,
            });
        }
        solver.validate(k)?;
        Ok(Self {
            k,
            oracle,
            gamma,
            t: 1,
            solver,
            last_prediction: None,
            last_joint: None,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn oracle(&self) -> &Oracle {
        &self.oracle
    }

    /// `Ŷ_t` from the latest `select`.
    pub fn last_prediction(&self) -> Option<&PreferenceMatrix> {
        self.last_prediction.as_ref()
    }

    pub fn last_joint(&self) -> Option<&JointActionDistribution> {
        self.last_joint.as_ref()
    }

    /// Oracle predictions on every pair `a < b`, skew-completed.
    pub fn predictions(&self, context: &Context) -> Result<PreferenceMatrix> {
        let mut err = None;
        let (m, clamped) = PreferenceMatrix::from_upper_fn(self.k, |a, b| {
            match self.oracle.predict(&OracleInput::new(context, a, b)) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if clamped > 0 {
            log::debug!("clamped {clamped} oracle predictions");
        }
        Ok(m)
    }
}

impl Learner for MinMaxDbState {
    fn k(&self) -> usize {
        self.k
    }

    fn round(&self) -> usize {
        self.t
    }

    fn select(&mut self, context: &Context, rng: &mut RngHandle) -> Result<Selection> {
        let y_hat = self.predictions(context)?;
        let report = solve_minmax_feasibility(&y_hat, self.gamma, &self.solver)?;
        let p: ActionDistribution = report.point;
        let joint = JointActionDistribution::product(&p, &p);
        let duel = (p.sample(rng), p.sample(rng));
        self.last_prediction = Some(y_hat);
        self.last_joint = Some(joint.clone());
        Ok(Selection {
            joint,
            duel,
            solver_iterations: report.iterations,
            gamma: Some(self.gamma),
        })
    }

    fn observe(&mut self, context: &Context, duel: Duel, outcome: Outcome) -> Result<()> {
        check_duel(self.k, duel)?;
        let (a, b) = duel;
        if a != b {
            let (lo, hi, y) = if a < b {
                (a, b, outcome.value())
            } else {
                (b, a, -outcome.value())
            };
            self.oracle.update(&OracleInput::new(context, lo, hi), y)?;
        }
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::tournament_class;
    use crate::games::igw_max_violation;
    use crate::oracles::{FiniteClassAggregator, Hypothesis};

    fn finite(mats: Vec<PreferenceMatrix>) -> Oracle {
        Oracle::FiniteClass(
            FiniteClassAggregator::new(mats.into_iter().map(|m| Hypothesis::Table(vec![m])).collect())
                .unwrap(),
        )
    }

    #[test]
    fn gamma_examples() {
        let b = RegretBudget::Constant { value: 10.0 };
        let g = default_gamma(2, 8000, &b).unwrap();
        assert!((g - 32000.0_f64.sqrt()).abs() < 1e-12);
        assert!((g - 178.885).abs() < 1e-3);
        assert!(matches!(
            default_gamma(5, 100, &b),
            Err(Error::HorizonTooShort { horizon: 100, .. })
        ));
        assert!(matches!(
            default_gamma(2, 8000, &RegretBudget::Constant { value: 0.0 }),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn zero_oracle_gives_uniform_product() {
        let mut s = MinMaxDbState::new(4, finite(vec![PreferenceMatrix::zeros(4)]), 16.0, SolverConfig::default()).unwrap();
        let mut rng = RngHandle::new(0);
        let sel = s.select(&Context::Id(0), &mut rng).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert!((sel.joint.get(a, b) - 1.0 / 16.0).abs() < 1e-15);
            }
        }
        assert_eq!(sel.gamma, Some(16.0));
    }

    #[test]
    fn two_arm_prediction_is_feasible() {
        let y = PreferenceMatrix::skew_complete(2, &[1.0]);
        let mut s = MinMaxDbState::new(2, finite(vec![y.clone()]), 10.0, SolverConfig::default()).unwrap();
        let mut rng = RngHandle::new(1);
        let sel = s.select(&Context::Id(0), &mut rng).unwrap();
        let p = sel.joint.left_marginal();
        assert!(igw_max_violation(&y, 10.0, p.weights()) <= igw_slack(2, 10.0));
        assert!(sel.joint.product_deviation() <= 1e-12);
    }

    #[test]
    fn gamma_below_two_k() {
        assert!(matches!(
            MinMaxDbState::new(3, finite(vec![PreferenceMatrix::zeros(3)]), 3.0, SolverConfig::default()),
            Err(Error::GammaTooSmall { .. })
        ));
    }

    #[test]
    fn reversed_duels_are_canonicalized() {
        let class = tournament_class(3, 0.4).unwrap();
        let mut fwd = MinMaxDbState::new(3, finite(class.clone()), 12.0, SolverConfig::default()).unwrap();
        let mut rev = fwd.clone();
        let ctx = Context::Id(0);
        fwd.observe(&ctx, (0, 1), Outcome::Loss).unwrap();
        rev.observe(&ctx, (1, 0), Outcome::Win).unwrap();
        let (Oracle::FiniteClass(f), Oracle::FiniteClass(r)) = (fwd.oracle(), rev.oracle()) else {
            unreachable!()
        };
        assert_eq!(f.log_weights(), r.log_weights());
        // diagonal duels leave the oracle alone
        let before = f.log_weights().to_vec();
        fwd.observe(&ctx, (2, 2), Outcome::Win).unwrap();
        let Oracle::FiniteClass(f) = fwd.oracle() else { unreachable!() };
        assert_eq!(f.log_weights(), &before[..]);
        assert_eq!(fwd.round(), 3);
    }

    #[test]
    fn certificate_holds_for_exact_predictions() {
        let f = tournament_class(3, 0.4).unwrap()[5].clone();
        let mut s = MinMaxDbState::new(3, finite(vec![f.clone()]), 30.0, SolverConfig::default()).unwrap();
        let mut rng = RngHandle::new(2);
        let sel = s.select(&Context::Id(0), &mut rng).unwrap();
        let p = sel.joint.left_marginal();
        let (lhs, rhs) = per_round_bound(&f, s.last_prediction().unwrap(), p.weights(), 30.0);
        assert!(lhs <= rhs + 1e-9);
    }
}
