use super::{check_label, regret_budget, OracleInput, OracleKind, RegressionOracle, RegretBudget};
use crate::error::{Error, Result};

/// Projected online gradient descent on the square loss over an ℓ₂ ball.
#[derive(Debug, Clone)]
pub struct OgdForecaster {
    theta: Vec<f64>,
    step: f64,
    radius: f64,
    feature_norm: f64,
}

impl OgdForecaster {
    pub fn new(dim: usize, radius: f64, step: f64) -> Result<Self> {
        if dim == 0 || !(radius > 0.0) || !(step > 0.0) {
            return Err(Error::config("OGD needs positive dimension, radius and step"));
        }
        Ok(Self {
            theta: vec![0.0; dim],
            step,
            radius,
            feature_norm: 1.0,
        })
    }

    /// Step `radius / (L sqrt(T))` with gradient bound
    /// `L = 2 (radius * feature_norm + 1) * feature_norm`.
    pub fn tuned(dim: usize, radius: f64, feature_norm: f64, horizon: usize) -> Result<Self> {
        let lipschitz = 2.0 * (radius * feature_norm + 1.0) * feature_norm;
        let step = radius / (lipschitz * (horizon.max(1) as f64).sqrt());
        let mut o = Self::new(dim, radius, step)?;
        o.feature_norm = feature_norm;
        Ok(o)
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn step(&self) -> f64 {
        self.step
    }
}

impl RegressionOracle for OgdForecaster {
    fn predict(&self, z: &OracleInput<'_>) -> Result<f64> {
        let x = z.features(self.theta.len())?;
        let v: f64 = self.theta.iter().zip(x).map(|(a, b)| a * b).sum();
        Ok(v.clamp(-1.0, 1.0))
    }

    fn update(&mut self, z: &OracleInput<'_>, y: f64) -> Result<()> {
        check_label(y)?;
        let x = z.features(self.theta.len())?;
        let residual: f64 = self.theta.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - y;
        for (t, xi) in self.theta.iter_mut().zip(x) {
            *t -= self.step * 2.0 * residual * xi;
        }
        let norm = self.theta.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm > self.radius {
            let s = self.radius / norm;
            self.theta.iter_mut().for_each(|t| *t *= s);
        }
        Ok(())
    }

    fn budget(&self) -> RegretBudget {
        regret_budget(OracleKind::Ogd {
            radius: self.radius,
            feature_norm: self.feature_norm,
        })
        .expect("supported")
    }
}
