use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for skew-symmetry when validating user-supplied matrices.
pub const SKEW_TOLERANCE: f64 = 1e-12;

/// Number of unordered pairs `a < b` over `k` arms.
pub fn pair_count(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Unordered pairs `(a, b)` with `a < b`, in row-major order.
pub fn pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |a| (a + 1..k).map(move |b| (a, b)))
}

/// A zero-sum preference matrix: skew-symmetric, zero diagonal, entries in [-1, 1].
///
/// `P[a][b]` is the expected win signal of arm `a` against arm `b`, so
/// `Pr(a beats b) = (P[a][b] + 1) / 2`. Stored matrices are exactly
/// antisymmetric; the lower triangle is always the negated upper triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct PreferenceMatrix {
    k: usize,
    entries: Vec<f64>,
}

impl PreferenceMatrix {
    /// Validates a square matrix and returns it exactly antisymmetrized.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        let mut flat = Vec::with_capacity(k * k);
        for row in &rows {
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    actual: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(k, flat)
    }

    pub fn from_flat(k: usize, entries: Vec<f64>) -> Result<Self> {
        if k < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: k,
            });
        }
        if entries.len() != k * k {
            return Err(Error::DimensionMismatch {
                expected: k * k,
                actual: entries.len(),
            });
        }
        for i in 0..k {
            for j in 0..k {
                let v = entries[i * k + j];
                if !v.is_finite() || v.abs() > 1.0 {
                    return Err(Error::RangeViolation {
                        location: format!("({i}, {j})"),
                        value: v,
                    });
                }
            }
        }
        for i in 0..k {
            if entries[i * k + i] != 0.0 {
                return Err(Error::DiagonalViolation(i));
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                if (entries[i * k + j] + entries[j * k + i]).abs() > SKEW_TOLERANCE {
                    return Err(Error::SkewSymmetryViolation(i, j));
                }
            }
        }
        let mut m = Self { k, entries };
        m.antisymmetrize();
        Ok(m)
    }

    pub fn zeros(k: usize) -> Self {
        assert!(k >= 2, "a preference matrix needs at least two arms");
        Self {
            k,
            entries: vec![0.0; k * k],
        }
    }

    /// Builds the matrix from one value per unordered pair `a < b`, in the
    /// order produced by [`pairs`]. Values outside [-1, 1] are clamped.
    pub fn skew_complete(k: usize, upper: &[f64]) -> Self {
        Self::skew_complete_counted(k, upper).0
    }

    /// Like [`skew_complete`](Self::skew_complete), also returning how many
    /// values had to be clamped.
    pub fn skew_complete_counted(k: usize, upper: &[f64]) -> (Self, usize) {
        assert_eq!(upper.len(), pair_count(k), "one value per unordered pair");
        let mut it = upper.iter();
        Self::from_upper_fn(k, |_, _| *it.next().unwrap())
    }

    /// Skew completion from a function evaluated once per pair `a < b`.
    pub fn from_upper_fn(k: usize, mut value: impl FnMut(usize, usize) -> f64) -> (Self, usize) {
        let mut m = Self::zeros(k);
        let mut clamped = 0;
        for (a, b) in pairs(k) {
            let raw = value(a, b);
            let v = if raw.is_nan() { 0.0 } else { raw.clamp(-1.0, 1.0) };
            if v != raw {
                clamped += 1;
                log::warn!("clamped prediction {raw} for pair ({a}, {b}) into [-1, 1]");
            }
            m.entries[a * k + b] = v;
            m.entries[b * k + a] = -v;
        }
        (m, clamped)
    }

    fn antisymmetrize(&mut self) {
        let k = self.k;
        for i in 0..k {
            self.entries[i * k + i] = 0.0;
            for j in i + 1..k {
                self.entries[j * k + i] = -self.entries[i * k + j];
            }
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[a * self.k + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.entries[a * self.k..(a + 1) * self.k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.k).map(<[f64]>::to_vec).collect()
    }

    /// `P v`
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(self.k, &self.entries, v)
    }

    /// `q^T P p`
    pub fn bilinear(&self, q: &[f64], p: &[f64]) -> f64 {
        bilinear(self.k, &self.entries, q, p)
    }

    /// Index of an arm that beats every other arm, if there is one.
    pub fn condorcet_winner(&self) -> Option<usize> {
        (0..self.k).find(|&a| (0..self.k).all(|b| a == b || self.get(a, b) > 0.0))
    }
}

impl TryFrom<Vec<Vec<f64>>> for PreferenceMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<PreferenceMatrix> for Vec<Vec<f64>> {
    fn from(m: PreferenceMatrix) -> Self {
        m.to_rows()
    }
}

/// An arbitrary finite K×K payoff matrix, e.g. an upper-confidence matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct GeneralMatrix {
    k: usize,
    entries: Vec<f64>,
}

impl GeneralMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        let mut flat = Vec::with_capacity(k * k);
        for row in &rows {
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    actual: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(k, flat)
    }

    pub fn from_flat(k: usize, entries: Vec<f64>) -> Result<Self> {
        if k == 0 || entries.len() != k * k {
            return Err(Error::DimensionMismatch {
                expected: k * k,
                actual: entries.len(),
            });
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::config(format!(
                "non-finite matrix entry at ({}, {})",
                pos / k,
                pos % k
            )));
        }
        Ok(Self { k, entries })
    }

    pub fn zeros(k: usize) -> Self {
        Self {
            k,
            entries: vec![0.0; k * k],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[a * self.k + b]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, v: f64) {
        debug_assert!(v.is_finite());
        self.entries[a * self.k + b] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.k).map(<[f64]>::to_vec).collect()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(self.k, &self.entries, v)
    }
}

impl TryFrom<Vec<Vec<f64>>> for GeneralMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<GeneralMatrix> for Vec<Vec<f64>> {
    fn from(m: GeneralMatrix) -> Self {
        m.to_rows()
    }
}

impl From<&PreferenceMatrix> for GeneralMatrix {
    fn from(p: &PreferenceMatrix) -> Self {
        Self {
            k: p.k,
            entries: p.entries.clone(),
        }
    }
}

fn mat_vec(k: usize, entries: &[f64], v: &[f64]) -> Vec<f64> {
    assert_eq!(v.len(), k);
    entries
        .chunks(k)
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn bilinear(k: usize, entries: &[f64], q: &[f64], p: &[f64]) -> f64 {
    assert_eq!(q.len(), k);
    q.iter()
        .zip(entries.chunks(k))
        .map(|(qa, row)| qa * row.iter().zip(p).map(|(x, y)| x * y).sum::<f64>())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_is_accepted() {
        let m = PreferenceMatrix::new(vec![vec![0.0; 4]; 4]).unwrap();
        assert!(m.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rock_paper_scissors_is_accepted() {
        let rows = vec![
            vec![0.0, 1.0, -1.0],
            vec![-1.0, 0.0, 1.0],
            vec![1.0, -1.0, 0.0],
        ];
        let m = PreferenceMatrix::new(rows.clone()).unwrap();
        assert_eq!(m.to_rows(), rows);
    }

    #[test]
    fn symmetric_matrix_is_rejected_at_first_pair() {
        let err = PreferenceMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap_err();
        assert_eq!(err, Error::SkewSymmetryViolation(0, 1));
    }

    #[test]
    fn range_and_diagonal_violations() {
        let err = PreferenceMatrix::new(vec![vec![0.0, 1.5], vec![-1.5, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::RangeViolation { .. }));
        let err = PreferenceMatrix::new(vec![vec![0.1, 0.0], vec![0.0, 0.0]]).unwrap_err();
        assert_eq!(err, Error::DiagonalViolation(0));
    }

    #[test]
    fn near_skew_input_is_stored_exactly_antisymmetric() {
        let m = PreferenceMatrix::new(vec![vec![0.0, 0.3], vec![-0.3 + 5e-13, 0.0]]).unwrap();
        assert_eq!(m.get(1, 0), -m.get(0, 1));
        let err = PreferenceMatrix::new(vec![vec![0.0, 0.3], vec![-0.3 + 1e-9, 0.0]]).unwrap_err();
        assert_eq!(err, Error::SkewSymmetryViolation(0, 1));
    }

    #[test]
    fn skew_completion_examples() {
        let m = PreferenceMatrix::skew_complete(2, &[0.3]);
        assert_eq!(m.to_rows(), vec![vec![0.0, 0.3], vec![-0.3, 0.0]]);

        let m = PreferenceMatrix::skew_complete(3, &[0.0, 0.0, 0.0]);
        assert_eq!(m, PreferenceMatrix::zeros(3));

        let (m, clamped) = PreferenceMatrix::skew_complete_counted(2, &[1.7]);
        assert_eq!(m.to_rows(), vec![vec![0.0, 1.0], vec![-1.0, 0.0]]);
        assert_eq!(clamped, 1);
    }

    #[test]
    fn pair_enumeration_order() {
        let v: Vec<_> = pairs(4).collect();
        assert_eq!(v, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(pair_count(4), 6);
    }

    #[test]
    fn general_matrix_rejects_nan() {
        assert!(GeneralMatrix::new(vec![vec![0.0, f64::NAN], vec![0.0, 0.0]]).is_err());
        assert!(GeneralMatrix::new(vec![vec![0.0, 3.0], vec![-7.0, 0.0]]).is_ok());
    }

    #[test]
    fn serde_round_trip_validates() {
        let json = "[[0.0, 0.5], [-0.5, 0.0]]";
        let m: PreferenceMatrix = serde_json::from_str(json).unwrap();
        assert_eq!(m.get(1, 0), -0.5);
        assert!(serde_json::from_str::<PreferenceMatrix>("[[0.0, 0.5], [0.5, 0.0]]").is_err());
    }
}
