use super::{solve_epigraph, FeasibilityReport, SolverConfig};
use crate::domain::{GeneralMatrix, JointActionDistribution};
use crate::error::{Error, Result};

/// Deviation gains for the 2K CCE constraints, as linear forms over the
/// row-major joint: entry `[a*K + b]` of row `r` is the coefficient of `p[a,b]`.
///
/// Rows `0..K` are the row player's deviations to `a*`
/// (`Σ p[a,b] (U[a*,b] - U[a,b])`), rows `K..2K` the column player's
/// deviations to `b*` (`Σ p[a,b] (U[b*,a] - U[b,a])`).
fn deviation_rows(u: &GeneralMatrix) -> Vec<Vec<f64>> {
    let k = u.k();
    let mut rows = Vec::with_capacity(2 * k);
    for dev in 0..k {
        let mut row = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                row[a * k + b] = u.get(dev, b) - u.get(a, b);
            }
        }
        rows.push(row);
    }
    for dev in 0..k {
        let mut row = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                row[a * k + b] = u.get(dev, a) - u.get(b, a);
            }
        }
        rows.push(row);
    }
    rows
}

/// Largest gain any player gets from a unilateral deviation to a pure action
/// (`<= 0` means `joint` is a CCE of `u`). Evaluated directly from the
/// marginals, independently of the LP formulation.
pub fn cce_violation(u: &GeneralMatrix, joint: &JointActionDistribution) -> f64 {
    let k = u.k();
    assert_eq!(joint.k(), k);
    let (left, right) = joint.marginals();
    let mut row_payoff = 0.0;
    let mut col_payoff = 0.0;
    for a in 0..k {
        for b in 0..k {
            let w = joint.get(a, b);
            row_payoff += w * u.get(a, b);
            col_payoff += w * u.get(b, a);
        }
    }
    let mut worst = f64::NEG_INFINITY;
    for dev in 0..k {
        let row_dev: f64 = (0..k).map(|b| right.get(b) * u.get(dev, b)).sum();
        let col_dev: f64 = (0..k).map(|a| left.get(a) * u.get(dev, a)).sum();
        worst = worst.max(row_dev - row_payoff).max(col_dev - col_payoff);
    }
    worst
}

/// Finds a coarse correlated equilibrium of `u` by minimizing the largest
/// deviation gain over the joint simplex. A CCE always exists, so failing to
/// reach `violation_tolerance` is reported as `NotConverged`.
pub fn solve_cce(
    u: &GeneralMatrix,
    config: &SolverConfig,
) -> Result<FeasibilityReport<JointActionDistribution>> {
    let k = u.k();
    config.validate(k)?;
    let rows = deviation_rows(u);
    let (x, _, pivots) = solve_epigraph(&rows, k * k, config.max_iterations)?;
    let joint = JointActionDistribution::new(k, x)?;
    let max_violation = cce_violation(u, &joint);
    if max_violation > config.violation_tolerance {
        return Err(Error::NotConverged {
            iterations: pivots,
            violation: max_violation,
        });
    }
    Ok(FeasibilityReport {
        point: joint,
        max_violation,
        iterations: pivots,
        converged: true,
    })
}
