use serde::{Deserialize, Serialize};

use crate::domain::{pair_count, pairs, PreferenceMatrix};
use crate::error::{Error, Result};

/// Rock-paper-scissors: every pure duel can be exploited by some response.
pub fn rps3() -> PreferenceMatrix {
    PreferenceMatrix::skew_complete(3, &[1.0, -1.0, 1.0])
}

/// A strict linear order `0 ≻ 1 ≻ … ≻ K-1` with every margin equal to
/// `margin`, so arm 0 is the Condorcet winner.
pub fn condorcet(k: usize, margin: f64) -> Result<PreferenceMatrix> {
    if k < 2 {
        return Err(Error::config("condorcet fixture needs K >= 2"));
    }
    if !(margin > 0.0 && margin <= 1.0) {
        return Err(Error::config(format!("condorcet margin {margin} must lie in (0, 1]")));
    }
    Ok(PreferenceMatrix::from_upper_fn(k, |_, _| margin).0)
}

/// The three-arm instance `[[0,1,0],[-1,0,ε],[0,-ε,0]]`: arm 0 is the
/// Condorcet winner (ties arm 2), arm 2 is only `ε` worse than the best response.
pub fn hardness(epsilon: f64) -> Result<PreferenceMatrix> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::config(format!("epsilon {epsilon} must lie in [0, 1]")));
    }
    Ok(PreferenceMatrix::skew_complete(3, &[1.0, 0.0, epsilon]))
}

/// Every orientation of a K-arm tournament with the given margin:
/// `2^(K(K-1)/2)` matrices. Pattern index bit `i` set means the `i`-th pair
/// `(a, b)`, `a < b`, is won by `b`. Index 0 is the linear order
/// [`condorcet`] fixture.
pub fn tournament_class(k: usize, margin: f64) -> Result<Vec<PreferenceMatrix>> {
    let n = pair_count(k);
    if n > 20 {
        return Err(Error::config("tournament class too large to enumerate"));
    }
    Ok((0..1usize << n)
        .map(|pattern| {
            let values: Vec<f64> = pairs(k)
                .enumerate()
                .map(|(i, _)| if pattern >> i & 1 == 1 { -margin } else { margin })
                .collect();
            PreferenceMatrix::skew_complete(k, &values)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum NamedFixture {
    Rps3,
    Condorcet { k: usize, margin: f64 },
    Hardness { epsilon: f64 },
}

impl NamedFixture {
    pub fn matrix(&self) -> Result<PreferenceMatrix> {
        match *self {
            NamedFixture::Rps3 => Ok(rps3()),
            NamedFixture::Condorcet { k, margin } => condorcet(k, margin),
            NamedFixture::Hardness { epsilon } => hardness(epsilon),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rps_matrix() {
        assert_eq!(
            rps3().to_rows(),
            vec![
                vec![0.0, 1.0, -1.0],
                vec![-1.0, 0.0, 1.0],
                vec![1.0, -1.0, 0.0]
            ]
        );
    }

    #[test]
    fn hardness_matrix() {
        assert_eq!(
            hardness(0.2).unwrap().to_rows(),
            vec![
                vec![0.0, 1.0, 0.0],
                vec![-1.0, 0.0, 0.2],
                vec![0.0, -0.2, 0.0]
            ]
        );
    }

    #[test]
    fn condorcet_row_zero_wins() {
        let m = condorcet(5, 0.4).unwrap();
        assert_eq!(m.condorcet_winner(), Some(0));
        assert!((1..5).all(|b| m.get(0, b) == 0.4));
        assert!(condorcet(3, 0.0).is_err());
    }

    #[test]
    fn tournament_enumeration() {
        let class = tournament_class(3, 0.4).unwrap();
        assert_eq!(class.len(), 8);
        assert_eq!(class[0], condorcet(3, 0.4).unwrap());
        // 6 of the 8 orientations are transitive and have a Condorcet winner
        let with_winner = class.iter().filter(|m| m.condorcet_winner().is_some()).count();
        assert_eq!(with_winner, 6);
        for (i, a) in class.iter().enumerate() {
            for b in &class[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }
}
