use serde::{Deserialize, Serialize};

use super::rng::RngHandle;
use crate::error::{Error, Result};

/// Accepted deviation of the total mass from 1 without renormalizing.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;
/// Deviations up to this size are renormalized away; larger ones are rejected.
pub const RENORMALIZE_LIMIT: f64 = 1e-6;
/// Negative weights no smaller than this are treated as rounding noise.
const NEGATIVE_NOISE: f64 = 1e-12;

fn normalize(mut weights: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what} is empty")));
    }
    for (i, w) in weights.iter_mut().enumerate() {
        if !w.is_finite() || *w < -NEGATIVE_NOISE {
            return Err(Error::InvalidDistribution(format!(
                "{what} has weight {w} at index {i}"
            )));
        }
        if *w < 0.0 {
            *w = 0.0;
        }
    }
    let total: f64 = weights.iter().sum();
    let dev = (total - 1.0).abs();
    if dev > RENORMALIZE_LIMIT {
        return Err(Error::InvalidDistribution(format!(
            "{what} sums to {total}"
        )));
    }
    if dev > 0.0 {
        weights.iter_mut().for_each(|w| *w /= total);
    }
    Ok(weights)
}

/// Draws an index from `weights` (assumed normalized) by inverse CDF.
fn sample_index(weights: &[f64], rng: &mut RngHandle) -> usize {
    let u = rng.uniform();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// A point of the probability simplex over `k` arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ActionDistribution {
    weights: Vec<f64>,
}

impl ActionDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Ok(Self {
            weights: normalize(weights, "action distribution")?,
        })
    }

    pub fn uniform(k: usize) -> Self {
        Self {
            weights: vec![1.0 / k as f64; k],
        }
    }

    pub fn point_mass(k: usize, arm: usize) -> Self {
        let mut weights = vec![0.0; k];
        weights[arm] = 1.0;
        Self { weights }
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, arm: usize) -> f64 {
        self.weights[arm]
    }

    pub fn sample(&self, rng: &mut RngHandle) -> usize {
        sample_index(&self.weights, rng)
    }

    /// Draws two arms independently from this distribution (product measure).
    pub fn sample_pair(&self, rng: &mut RngHandle) -> (usize, usize) {
        let a = self.sample(rng);
        let b = self.sample(rng);
        (a, b)
    }
}

impl TryFrom<Vec<f64>> for ActionDistribution {
    type Error = Error;

    fn try_from(w: Vec<f64>) -> Result<Self> {
        Self::new(w)
    }
}

impl From<ActionDistribution> for Vec<f64> {
    fn from(d: ActionDistribution) -> Self {
        d.weights
    }
}

/// A distribution over ordered action pairs `(a, b)`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointActionDistribution {
    k: usize,
    weights: Vec<f64>,
}

impl JointActionDistribution {
    pub fn new(k: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != k * k {
            return Err(Error::DimensionMismatch {
                expected: k * k,
                actual: weights.len(),
            });
        }
        Ok(Self {
            k,
            weights: normalize(weights, "joint distribution")?,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidDistribution("joint must be square".into()));
        }
        Self::new(k, rows.into_iter().flatten().collect())
    }

    pub fn uniform(k: usize) -> Self {
        Self {
            k,
            weights: vec![1.0 / (k * k) as f64; k * k],
        }
    }

    pub fn point_mass(k: usize, a: usize, b: usize) -> Self {
        let mut weights = vec![0.0; k * k];
        weights[a * k + b] = 1.0;
        Self { k, weights }
    }

    /// The product measure `left × right`.
    pub fn product(left: &ActionDistribution, right: &ActionDistribution) -> Self {
        assert_eq!(left.k(), right.k());
        let k = left.k();
        let weights = left
            .weights()
            .iter()
            .flat_map(|&l| right.weights().iter().map(move |&r| l * r))
            .collect();
        Self { k, weights }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.weights[a * self.k + b]
    }

    pub fn left_marginal(&self) -> ActionDistribution {
        let weights = self.weights.chunks(self.k).map(|r| r.iter().sum()).collect();
        ActionDistribution { weights }
    }

    pub fn right_marginal(&self) -> ActionDistribution {
        let mut weights = vec![0.0; self.k];
        for row in self.weights.chunks(self.k) {
            for (w, v) in weights.iter_mut().zip(row) {
                *w += v;
            }
        }
        ActionDistribution { weights }
    }

    /// `(left, right)` where `left[a] = Σ_b p[a,b]` and `right[b] = Σ_a p[a,b]`.
    pub fn marginals(&self) -> (ActionDistribution, ActionDistribution) {
        (self.left_marginal(), self.right_marginal())
    }

    /// Draws one ordered pair from the joint.
    pub fn sample(&self, rng: &mut RngHandle) -> (usize, usize) {
        let idx = sample_index(&self.weights, rng);
        (idx / self.k, idx % self.k)
    }

    /// Largest absolute deviation from the product of the two marginals.
    pub fn product_deviation(&self) -> f64 {
        let (l, r) = self.marginals();
        let mut worst: f64 = 0.0;
        for a in 0..self.k {
            for b in 0..self.k {
                worst = worst.max((self.get(a, b) - l.get(a) * r.get(b)).abs());
            }
        }
        worst
    }
}
