use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Per-pair feature vectors `x[a,b]` in `R^d` for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    k: usize,
    d: usize,
    data: Vec<f64>,
}

impl FeatureTensor {
    pub fn new(k: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != k * k * d {
            return Err(Error::DimensionMismatch {
                expected: k * k * d,
                actual: data.len(),
            });
        }
        Ok(Self { k, d, data })
    }

    /// Builds a tensor from a function of `(a, b)` returning `x[a,b]`.
    pub fn from_fn(k: usize, d: usize, mut f: impl FnMut(usize, usize) -> Vec<f64>) -> Result<Self> {
        let mut data = Vec::with_capacity(k * k * d);
        for a in 0..k {
            for b in 0..k {
                let x = f(a, b);
                if x.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        actual: x.len(),
                    });
                }
                data.extend(x);
            }
        }
        Ok(Self { k, d, data })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> &[f64] {
        let start = (a * self.k + b) * self.d;
        &self.data[start..start + self.d]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// What the learner observes at the start of a round.
#[derive(Debug, Clone, PartialEq)]
pub enum Context {
    /// An element of a finite context set.
    Id(usize),
    /// A fresh per-pair feature tensor.
    Features(Arc<FeatureTensor>),
}

impl Context {
    pub fn id(&self) -> Option<usize> {
        match self {
            Context::Id(i) => Some(*i),
            Context::Features(_) => None,
        }
    }

    pub fn features(&self) -> Option<&FeatureTensor> {
        match self {
            Context::Id(_) => None,
            Context::Features(f) => Some(f),
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Context::Id(i) => write!(f, "{i}"),
            Context::Features(_) => f.write_str("features"),
        }
    }
}
