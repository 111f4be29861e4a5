use super::{solve_epigraph, FeasibilityReport, SolverConfig};
use crate::domain::{ActionDistribution, PreferenceMatrix};
use crate::error::{Error, Result};

/// `-min_j (q^T P)_j`: how far `q` is from guaranteeing a nonnegative payoff
/// against every pure column.
pub fn nash_violation(p: &PreferenceMatrix, q: &ActionDistribution) -> f64 {
    let k = p.k();
    (0..k)
        .map(|j| -(0..k).map(|i| q.get(i) * p.get(i, j)).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Maximin strategy of the symmetric zero-sum game `P` (value 0).
pub fn solve_zero_sum_nash(
    p: &PreferenceMatrix,
    config: &SolverConfig,
) -> Result<FeasibilityReport<ActionDistribution>> {
    let k = p.k();
    config.validate(k)?;
    // column j: -(q^T P)_j <= t
    let rows: Vec<Vec<f64>> = (0..k)
        .map(|j| (0..k).map(|i| -p.get(i, j)).collect())
        .collect();
    let (x, _, pivots) = solve_epigraph(&rows, k, config.max_iterations)?;
    let q = ActionDistribution::new(x)?;
    let max_violation = nash_violation(p, &q);
    if max_violation > config.violation_tolerance {
        return Err(Error::NotConverged {
            iterations: pivots,
            violation: max_violation,
        });
    }
    Ok(FeasibilityReport {
        point: q,
        max_violation,
        iterations: pivots,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::RngHandle;

    #[test]
    fn rps_is_uniform() {
        let p = PreferenceMatrix::new(vec![
            vec![0.0, 1.0, -1.0],
            vec![-1.0, 0.0, 1.0],
            vec![1.0, -1.0, 0.0],
        ])
        .unwrap();
        let rep = solve_zero_sum_nash(&p, &SolverConfig::default()).unwrap();
        for &w in rep.point.weights() {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
        let payoffs: Vec<f64> = (0..3)
            .map(|j| (0..3).map(|i| rep.point.get(i) * p.get(i, j)).sum())
            .collect();
        assert!(payoffs.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn condorcet_winner_is_point_mass() {
        let p = PreferenceMatrix::new(vec![
            vec![0.0, 0.4, 0.4],
            vec![-0.4, 0.0, 0.1],
            vec![-0.4, -0.1, 0.0],
        ])
        .unwrap();
        let rep = solve_zero_sum_nash(&p, &SolverConfig::default()).unwrap();
        assert!((rep.point.get(0) - 1.0).abs() < 1e-12);
        let payoffs: Vec<f64> = (0..3).map(|j| p.get(0, j)).collect();
        assert_eq!(payoffs, vec![0.0, 0.4, 0.4]);
    }

    #[test]
    fn dominant_arm_two_by_two() {
        let p = PreferenceMatrix::new(vec![vec![0.0, 0.6], vec![-0.6, 0.0]]).unwrap();
        let rep = solve_zero_sum_nash(&p, &SolverConfig::default()).unwrap();
        assert!((rep.point.get(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_play_value_is_zero_on_random_games() {
        let mut rng = RngHandle::new(9);
        for _ in 0..50 {
            let k = 2 + rng.index(8);
            let upper: Vec<f64> = (0..k * (k - 1) / 2).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
            let p = PreferenceMatrix::skew_complete(k, &upper);
            let rep = solve_zero_sum_nash(&p, &SolverConfig::default()).unwrap();
            assert!(rep.max_violation <= 1e-8);
            let q = rep.point.weights();
            assert!(p.bilinear(q, q).abs() < 1e-12);
        }
    }
}
