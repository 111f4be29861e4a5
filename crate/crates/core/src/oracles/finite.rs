use super::{check_label, regret_budget, OracleInput, OracleKind, RegressionOracle, RegretBudget};
use crate::domain::{Context, PreferenceMatrix};
use crate::error::{Error, Result};

/// Learning rate making the square loss on [-1, 1] exp-concave.
pub const DEFAULT_EXP_WEIGHTS_RATE: f64 = 1.0 / 8.0;

/// One member of a finite regression class.
#[derive(Debug, Clone, PartialEq)]
pub enum Hypothesis {
    /// A preference matrix per context id.
    Table(Vec<PreferenceMatrix>),
    /// `x[a,b] ↦ clamp(wᵀ x[a,b])` over feature contexts.
    Linear(Vec<f64>),
}

impl Hypothesis {
    pub fn value(&self, z: &OracleInput<'_>) -> Result<f64> {
        match (self, z.context) {
            (Hypothesis::Table(tables), Context::Id(id)) => {
                let m = tables
                    .get(*id)
                    .ok_or_else(|| Error::UnknownContext(format!("context id {id}")))?;
                if z.a >= m.k() || z.b >= m.k() {
                    return Err(Error::DimensionMismatch {
                        expected: m.k(),
                        actual: z.a.max(z.b) + 1,
                    });
                }
                Ok(m.get(z.a, z.b))
            }
            (Hypothesis::Linear(w), Context::Features(_)) => {
                let x = z.features(w.len())?;
                Ok(w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().clamp(-1.0, 1.0))
            }
            (_, ctx) => Err(Error::UnknownContext(format!(
                "hypothesis kind does not match context {ctx}"
            ))),
        }
    }

    /// The matrix this hypothesis assigns to a finite context.
    pub fn table(&self, id: usize) -> Option<&PreferenceMatrix> {
        match self {
            Hypothesis::Table(t) => t.get(id),
            Hypothesis::Linear(_) => None,
        }
    }
}

/// Exponentially weighted average forecaster over a finite class.
#[derive(Debug, Clone)]
pub struct FiniteClassAggregator {
    hypotheses: Vec<Hypothesis>,
    log_weights: Vec<f64>,
    eta: f64,
}

impl FiniteClassAggregator {
    pub fn new(hypotheses: Vec<Hypothesis>) -> Result<Self> {
        Self::with_rate(hypotheses, DEFAULT_EXP_WEIGHTS_RATE)
    }

    pub fn with_rate(hypotheses: Vec<Hypothesis>, eta: f64) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::config("finite class must be nonempty"));
        }
        if !(eta > 0.0) {
            return Err(Error::config("exponential-weights rate must be positive"));
        }
        let n = hypotheses.len();
        Ok(Self {
            hypotheses,
            log_weights: vec![0.0; n],
            eta,
        })
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Normalized weights (a simplex point).
    pub fn weights(&self) -> Vec<f64> {
        let m = self
            .log_weights
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_weights.iter().map(|l| (l - m).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    }
}

impl RegressionOracle for FiniteClassAggregator {
    fn predict(&self, z: &OracleInput<'_>) -> Result<f64> {
        let weights = self.weights();
        let mut acc = 0.0;
        for (w, h) in weights.iter().zip(&self.hypotheses) {
            acc += w * h.value(z)?;
        }
        Ok(acc.clamp(-1.0, 1.0))
    }

    fn update(&mut self, z: &OracleInput<'_>, y: f64) -> Result<()> {
        check_label(y)?;
        let values = self
            .hypotheses
            .iter()
            .map(|h| h.value(z))
            .collect::<Result<Vec<_>>>()?;
        for (lw, v) in self.log_weights.iter_mut().zip(values) {
            *lw -= self.eta * (v - y) * (v - y);
        }
        let m = self
            .log_weights
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        self.log_weights.iter_mut().for_each(|l| *l -= m);
        Ok(())
    }

    /// `ln|F| / η`; equals `8 ln|F|` at the default rate.
    fn budget(&self) -> RegretBudget {
        if self.eta == DEFAULT_EXP_WEIGHTS_RATE {
            return regret_budget(OracleKind::FiniteClass {
                class_size: self.hypotheses.len(),
            })
            .expect("nonempty class");
        }
        RegretBudget::Constant {
            value: (self.hypotheses.len() as f64).ln() / self.eta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(k: usize, v: f64) -> Hypothesis {
        Hypothesis::Table(vec![PreferenceMatrix::from_upper_fn(k, |_, _| v).0])
    }

    #[test]
    fn single_expert_is_returned_verbatim() {
        let agg = FiniteClassAggregator::new(vec![constant(3, 0.37)]).unwrap();
        let ctx = Context::Id(0);
        assert!((agg.predict(&OracleInput::new(&ctx, 0, 2)).unwrap() - 0.37).abs() < 1e-15);
        assert!((agg.predict(&OracleInput::new(&ctx, 2, 0)).unwrap() + 0.37).abs() < 1e-15);
    }

    #[test]
    fn correct_expert_gains_weight() {
        let mut agg = FiniteClassAggregator::new(vec![constant(2, -1.0), constant(2, 1.0)]).unwrap();
        let ctx = Context::Id(0);
        let z = OracleInput::new(&ctx, 0, 1);
        agg.update(&z, 1.0).unwrap();
        let w = agg.weights();
        assert!(w[1] > w[0]);
        // loss 4 vs 0 at rate 1/8
        assert!((agg.log_weights()[0] - agg.log_weights()[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn predict_is_pure() {
        let mut agg = FiniteClassAggregator::new(vec![constant(2, -0.5), constant(2, 0.9)]).unwrap();
        let ctx = Context::Id(0);
        let z = OracleInput::new(&ctx, 0, 1);
        agg.update(&z, -1.0).unwrap();
        let a = agg.predict(&z).unwrap();
        let b = agg.predict(&z).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn unknown_context_and_bad_label() {
        let mut agg = FiniteClassAggregator::new(vec![constant(2, 0.1)]).unwrap();
        let ctx = Context::Id(4);
        assert!(matches!(
            agg.predict(&OracleInput::new(&ctx, 0, 1)),
            Err(Error::UnknownContext(_))
        ));
        let ok = Context::Id(0);
        assert!(agg.update(&OracleInput::new(&ok, 0, 1), 1.5).is_err());
    }
}
