use log::warn;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{check_duel, Learner, Selection};
use crate::domain::{Context, Duel, FeatureTensor, GeneralMatrix, Outcome, RngHandle};
use crate::error::{Error, Result};
use crate::games::{solve_cce, SolverConfig};

/// `sqrt(d ln((1 + T/λ)/δ)) + sqrt(λ)`, the self-normalized confidence radius.
pub fn default_ucb_width(dim: usize, horizon: usize, lambda: f64, delta: f64) -> f64 {
    let d = dim as f64;
    (d * ((1.0 + horizon as f64 / lambda) / delta).ln()).sqrt() + lambda.sqrt()
}

/// Optimistic CCE learner for linearly realizable contextual preferences.
#[derive(Debug, Clone)]
pub struct CceLinDbState {
    k: usize,
    lambda: f64,
    eta: f64,
    gram: DMatrix<f64>,
    moment: DVector<f64>,
    factor: Cholesky<f64, Dyn>,
    t: usize,
    solver: SolverConfig,
}

impl CceLinDbState {
    pub fn new(
        k: usize,
        dim: usize,
        lambda: f64,
        eta: f64,
        t0: Option<usize>,
        solver: SolverConfig,
    ) -> Result<Self> {
        if k < 2 || dim == 0 {
            return Err(Error::config("CCE-linDB needs K >= 2 and d >= 1"));
        }
        if !(lambda > 0.0) || !(eta >= 0.0) {
            return Err(Error::config("lambda must be positive and eta nonnegative"));
        }
        if let Some(t0) = t0 {
            warn!("exploration length t0={t0} is ignored by CCE-linDB");
        }
        solver.validate(k)?;
        let gram = DMatrix::identity(dim, dim) * lambda;
        let factor = Cholesky::new(gram.clone()).expect("λI is positive definite");
        Ok(Self {
            k,
            lambda,
            eta,
            gram,
            moment: DVector::zeros(dim),
            factor,
            t: 1,
            solver,
        })
    }

    pub fn dim(&self) -> usize {
        self.moment.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `V = λI + Σ x xᵀ`
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Ridge estimate `ŵ = V⁻¹ Xᵀy`.
    pub fn ridge_weights(&self) -> Vec<f64> {
        self.factor.solve(&self.moment).iter().copied().collect()
    }

    /// `sqrt(xᵀ V⁻¹ x)`
    pub fn width(&self, x: &[f64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        xv.dot(&self.factor.solve(&xv)).max(0.0).sqrt()
    }

    fn tensor<'a>(&self, context: &'a Context) -> Result<&'a FeatureTensor> {
        let x = context
            .features()
            .ok_or_else(|| Error::UnknownContext(format!("{context} has no features")))?;
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.dim(),
            });
        }
        if x.k() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                actual: x.k(),
            });
        }
        Ok(x)
    }

    /// `U[a,b] = ŵᵀx[a,b] + η sqrt(x[a,b]ᵀ V⁻¹ x[a,b])`, zero diagonal.
    pub fn upper_matrix(&self, context: &Context) -> Result<GeneralMatrix> {
        let x = self.tensor(context)?;
        let w = self.ridge_weights();
        let mut u = GeneralMatrix::zeros(self.k);
        for a in 0..self.k {
            for b in 0..self.k {
                if a != b {
                    let xab = x.get(a, b);
                    let mean: f64 = w.iter().zip(xab).map(|(p, q)| p * q).sum();
                    u.set(a, b, mean + self.eta * self.width(xab));
                }
            }
        }
        Ok(u)
    }
}

impl Learner for CceLinDbState {
    fn k(&self) -> usize {
        self.k
    }

    fn round(&self) -> usize {
        self.t
    }

    fn select(&mut self, context: &Context, rng: &mut RngHandle) -> Result<Selection> {
        let u = self.upper_matrix(context)?;
        let report = solve_cce(&u, &self.solver)?;
        let duel = report.point.sample(rng);
        Ok(Selection {
            joint: report.point,
            duel,
            solver_iterations: report.iterations,
            gamma: None,
        })
    }

    fn observe(&mut self, context: &Context, duel: Duel, outcome: Outcome) -> Result<()> {
        check_duel(self.k, duel)?;
        let x = self.tensor(context)?;
        let xv = DVector::from_column_slice(x.get(duel.0, duel.1));
        self.gram.ger(1.0, &xv, &xv, 1.0);
        self.moment.axpy(outcome.value(), &xv, 1.0);
        self.factor = Cholesky::new(self.gram.clone())
            .ok_or_else(|| Error::config("design matrix lost positive definiteness"))?;
        self.t += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn unit_context(k: usize, d: usize) -> Context {
        Context::Features(Arc::new(
            FeatureTensor::from_fn(k, d, |a, b| {
                let mut v = vec![0.0; d];
                if a != b {
                    v[(a + b) % d] = if a < b { 1.0 } else { -1.0 };
                }
                v
            })
            .unwrap(),
        ))
    }

    #[test]
    fn no_history_gives_unit_width() {
        let s = CceLinDbState::new(3, 2, 1.0, 1.0, None, SolverConfig::default()).unwrap();
        let ctx = unit_context(3, 2);
        let u = s.upper_matrix(&ctx).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let expected = if a == b { 0.0 } else { 1.0 };
                assert!((u.get(a, b) - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn one_observation_ridge_arithmetic() {
        let mut s = CceLinDbState::new(2, 1, 1.0, 1.5, Some(10), SolverConfig::default()).unwrap();
        let ctx = unit_context(2, 1);
        s.observe(&ctx, (0, 1), Outcome::Win).unwrap();
        assert!((s.ridge_weights()[0] - 0.5).abs() < 1e-15);
        let u = s.upper_matrix(&ctx).unwrap();
        assert!((u.get(0, 1) - (0.5 + 1.5 * 0.5_f64.sqrt())).abs() < 1e-15);
        // the reversed duel is the same example
        let mut r = CceLinDbState::new(2, 1, 1.0, 1.5, None, SolverConfig::default()).unwrap();
        r.observe(&ctx, (1, 0), Outcome::Loss).unwrap();
        assert_eq!(r.ridge_weights(), s.ridge_weights());
    }

    #[test]
    fn width_shrinks_along_observed_direction() {
        let mut s = CceLinDbState::new(2, 2, 1.0, 1.0, None, SolverConfig::default()).unwrap();
        let ctx = unit_context(2, 2);
        for i in 0..10_000 {
            let o = if i % 2 == 0 { Outcome::Win } else { Outcome::Loss };
            s.observe(&ctx, (0, 1), o).unwrap();
        }
        let x = ctx.features().unwrap().get(0, 1).to_vec();
        assert!(s.width(&x) <= (1.0_f64 / (1.0 + 1e4)).sqrt() + 1e-15);
        let mut rng = RngHandle::new(0);
        let sel = s.select(&ctx, &mut rng).unwrap();
        assert!(crate::games::cce_violation(&s.upper_matrix(&ctx).unwrap(), &sel.joint) <= 1e-8);
    }

    #[test]
    fn rejects_wrong_contexts() {
        let s = CceLinDbState::new(3, 2, 1.0, 1.0, None, SolverConfig::default()).unwrap();
        assert!(matches!(s.upper_matrix(&Context::Id(0)), Err(Error::UnknownContext(_))));
        assert!(matches!(
            s.upper_matrix(&unit_context(3, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn default_width_formula() {
        let eta = default_ucb_width(4, 1000, 1.0, 1e-3);
        let expected = (4.0 * (1001.0_f64 / 1e-3).ln()).sqrt() + 1.0;
        assert!((eta - expected).abs() < 1e-12);
    }
}
