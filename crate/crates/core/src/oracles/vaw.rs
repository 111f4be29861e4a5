use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{check_label, regret_budget, OracleInput, OracleKind, RegressionOracle, RegretBudget};
use crate::error::{Error, Result};

/// Vovk-Azoury-Warmuth forecaster for linear predictors `x ↦ wᵀx`.
///
/// Predicts `ŷ = bᵀ (A + x xᵀ)⁻¹ x` with `A = λI + Σ x xᵀ` and `b = Σ y x`:
/// the query point joins the design before predicting. By Sherman–Morrison
/// this is `bᵀA⁻¹x / (1 + xᵀA⁻¹x)`, which needs only the factor of `A`.
#[derive(Debug, Clone)]
pub struct VawForecaster {
    lambda: f64,
    gram: DMatrix<f64>,
    moment: DVector<f64>,
    factor: Cholesky<f64, Dyn>,
    /// Norm bound on the comparator, used for the regret budget.
    weight_norm: f64,
}

impl VawForecaster {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("feature dimension must be positive"));
        }
        if !(lambda > 0.0) {
            return Err(Error::config("ridge parameter must be positive"));
        }
        let gram = DMatrix::identity(dim, dim) * lambda;
        let factor = Cholesky::new(gram.clone()).expect("λI is positive definite");
        Ok(Self {
            lambda,
            gram,
            moment: DVector::zeros(dim),
            factor,
            weight_norm: 1.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.moment.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `A = λI + Σ x xᵀ`
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Current ridge estimate `A⁻¹ b`.
    pub fn ridge_weights(&self) -> Vec<f64> {
        self.factor.solve(&self.moment).iter().copied().collect()
    }

    fn raw_prediction(&self, x: &[f64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        let ainv_x = self.factor.solve(&xv);
        let leverage = xv.dot(&ainv_x);
        self.moment.dot(&ainv_x) / (1.0 + leverage)
    }
}

impl RegressionOracle for VawForecaster {
    fn predict(&self, z: &OracleInput<'_>) -> Result<f64> {
        let x = z.features(self.dim())?;
        Ok(self.raw_prediction(x).clamp(-1.0, 1.0))
    }

    fn update(&mut self, z: &OracleInput<'_>, y: f64) -> Result<()> {
        check_label(y)?;
        let x = z.features(self.dim())?;
        let xv = DVector::from_column_slice(x);
        self.gram.ger(1.0, &xv, &xv, 1.0);
        self.moment.axpy(y, &xv, 1.0);
        self.factor = Cholesky::new(self.gram.clone())
            .ok_or_else(|| Error::config("gram matrix lost positive definiteness"))?;
        Ok(())
    }

    fn budget(&self) -> RegretBudget {
        regret_budget(OracleKind::Vaw {
            dim: self.dim(),
            lambda: self.lambda,
            weight_norm: self.weight_norm,
        })
        .expect("supported")
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::domain::{Context, FeatureTensor, RngHandle};

    fn scalar_context(x: f64) -> Context {
        // K = 2, d = 1, x[0,1] = x, x[1,0] = -x
        let t = FeatureTensor::from_fn(2, 1, |a, b| {
            vec![match (a, b) {
                (0, 1) => x,
                (1, 0) => -x,
                _ => 0.0,
            }]
        })
        .unwrap();
        Context::Features(Arc::new(t))
    }

    #[test]
    fn no_history_predicts_zero() {
        let vaw = VawForecaster::new(1, 1.0).unwrap();
        let ctx = scalar_context(1.0);
        assert_eq!(vaw.predict(&OracleInput::new(&ctx, 0, 1)).unwrap(), 0.0);
    }

    #[test]
    fn one_example_gives_one_third() {
        let mut vaw = VawForecaster::new(1, 1.0).unwrap();
        let ctx = scalar_context(1.0);
        let z = OracleInput::new(&ctx, 0, 1);
        vaw.update(&z, 1.0).unwrap();
        assert!((vaw.predict(&z).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // plain ridge would give 1/2
        assert!((vaw.ridge_weights()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn repeated_examples_follow_closed_form() {
        let mut vaw = VawForecaster::new(1, 1.0).unwrap();
        let ctx = scalar_context(1.0);
        let z = OracleInput::new(&ctx, 0, 1);
        let mut prev = 0.0;
        for n in 1..=50 {
            vaw.update(&z, 1.0).unwrap();
            let p = vaw.predict(&z).unwrap();
            assert!((p - n as f64 / (n as f64 + 2.0)).abs() < 1e-12);
            assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn gram_stays_positive_definite() {
        let mut rng = RngHandle::new(4);
        let d = 3;
        let mut vaw = VawForecaster::new(d, 1.0).unwrap();
        for _ in 0..200 {
            let t = FeatureTensor::from_fn(2, d, |_, _| (0..d).map(|_| rng.uniform_range(-1.0, 1.0)).collect()).unwrap();
            let ctx = Context::Features(Arc::new(t));
            let y = if rng.uniform() < 0.5 { 1.0 } else { -1.0 };
            vaw.update(&OracleInput::new(&ctx, 0, 1), y).unwrap();
            let eig = vaw.gram().clone().symmetric_eigen();
            assert!(eig.eigenvalues.min() >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let vaw = VawForecaster::new(2, 1.0).unwrap();
        let ctx = scalar_context(1.0);
        assert!(matches!(
            vaw.predict(&OracleInput::new(&ctx, 0, 1)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
