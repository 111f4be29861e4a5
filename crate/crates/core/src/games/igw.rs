//! Inverse-gap feasibility program.
//!
//! Find `p` in the simplex with, for every arm `i`,
//! `Σ_b Ŷ[i,b] p[b] + (2/γ) / p[i] <= 5K/γ`, accepting an extra slack of
//! `K/γ` on the right-hand side. Every constraint is convex on the open
//! simplex, and a feasible point exists whenever `γ >= 2K`.
//!
//! The solver runs entropic mirror descent on the maximum violation over the
//! floored simplex `{p : p[i] >= floor}`, parametrized as
//! `p = floor + (1 - K floor) w` with `w` in the simplex. Steps use the
//! Polyak rule against the known target level 0, never shorter than the
//! base step `1/(γK)`.

use super::{FeasibilityReport, SolverConfig};
use crate::domain::{ActionDistribution, PreferenceMatrix};
use crate::error::{Error, Result};

/// Right-hand side `5K/γ`.
pub fn igw_rhs(k: usize, gamma: f64) -> f64 {
    5.0 * k as f64 / gamma
}

/// Numerical slack `K/γ` added to the right-hand side.
pub fn igw_slack(k: usize, gamma: f64) -> f64 {
    k as f64 / gamma
}

/// Left-hand side of every constraint at `p`.
pub fn igw_constraint_lhs(y_hat: &PreferenceMatrix, gamma: f64, p: &[f64]) -> Vec<f64> {
    let yp = y_hat.mul_vec(p);
    yp.iter()
        .zip(p)
        .map(|(v, &pi)| v + 2.0 / (gamma * pi))
        .collect()
}

/// `max_i LHS_i - 5K/γ`.
pub fn igw_max_violation(y_hat: &PreferenceMatrix, gamma: f64, p: &[f64]) -> f64 {
    let rhs = igw_rhs(y_hat.k(), gamma);
    igw_constraint_lhs(y_hat, gamma, p)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
        - rhs
}

pub fn solve_minmax_feasibility(
    y_hat: &PreferenceMatrix,
    gamma: f64,
    config: &SolverConfig,
) -> Result<FeasibilityReport<ActionDistribution>> {
    let k = y_hat.k();
    let kf = k as f64;
    if !(gamma >= 2.0 * kf) {
        return Err(Error::GammaTooSmall {
            gamma,
            min: 2.0 * kf,
        });
    }
    let floor = config.floor_epsilon.unwrap_or(1.0 / (4.0 * gamma));
    SolverConfig {
        floor_epsilon: Some(floor),
        ..config.clone()
    }
    .validate(k)?;

    let rhs = igw_rhs(k, gamma);
    let slack = igw_slack(k, gamma);
    let target = slack / 2.0;
    let spread = 1.0 - kf * floor;
    let base_step = 1.0 / (gamma * kf);

    let mut log_w = vec![0.0; k];
    let mut w = vec![1.0 / kf; k];
    let mut p = vec![0.0; k];
    let mut lhs = vec![0.0; k];
    let mut best: Option<(f64, Vec<f64>)> = None;

    for iter in 0..config.max_iterations.max(1) {
        for (pi, wi) in p.iter_mut().zip(&w) {
            *pi = floor + spread * wi;
        }
        // LHS_i = (Ŷp)_i + 2/(γ p_i)
        let mut worst = 0;
        for i in 0..k {
            let row = y_hat.row(i);
            let yp: f64 = row.iter().zip(&p).map(|(a, b)| a * b).sum();
            lhs[i] = yp + 2.0 / (gamma * p[i]);
            if lhs[i] > lhs[worst] {
                worst = i;
            }
        }
        let violation = lhs[worst] - rhs;
        if best.as_ref().is_none_or(|(v, _)| violation < *v) {
            best = Some((violation, p.clone()));
        }
        if violation <= target {
            return Ok(FeasibilityReport {
                point: ActionDistribution::new(p)?,
                max_violation: violation,
                iterations: iter,
                converged: true,
            });
        }

        // subgradient of the active constraint, pulled back to w
        let mut grad: Vec<f64> = y_hat.row(worst).iter().map(|v| v * spread).collect();
        grad[worst] -= spread * 2.0 / (gamma * p[worst] * p[worst]);
        let gmax = grad.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
        if gmax == 0.0 {
            break;
        }
        let step = (violation / (gmax * gmax)).max(base_step);

        for (lw, g) in log_w.iter_mut().zip(&grad) {
            *lw -= step * g;
        }
        let m = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (wi, lw) in w.iter_mut().zip(log_w.iter_mut()) {
            *lw -= m;
            *wi = lw.exp();
            total += *wi;
        }
        w.iter_mut().for_each(|wi| *wi /= total);
    }

    let (violation, _) = best.expect("at least one iterate");
    Err(Error::NotConverged {
        iterations: config.max_iterations,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_predictions_uniform_is_feasible() {
        let y = PreferenceMatrix::zeros(4);
        let lhs = igw_constraint_lhs(&y, 16.0, &[0.25; 4]);
        for v in lhs {
            assert!((v - 0.5).abs() < 1e-15);
        }
        assert!(igw_rhs(4, 16.0) == 1.25);
        let rep = solve_minmax_feasibility(&y, 16.0, &SolverConfig::default()).unwrap();
        assert_eq!(rep.iterations, 0);
        assert_eq!(rep.point, ActionDistribution::uniform(4));
    }

    #[test]
    fn two_arm_hand_example() {
        let y = PreferenceMatrix::new(vec![vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let lhs = igw_constraint_lhs(&y, 10.0, &[0.8, 0.2]);
        assert!((lhs[0] - 0.45).abs() < 1e-12);
        assert!((lhs[1] - 0.2).abs() < 1e-12);
        let rep = solve_minmax_feasibility(&y, 10.0, &SolverConfig::default()).unwrap();
        assert!(rep.max_violation <= igw_slack(2, 10.0));
    }

    #[test]
    fn gamma_below_two_k_is_rejected() {
        let y = PreferenceMatrix::zeros(3);
        assert!(matches!(
            solve_minmax_feasibility(&y, 5.0, &SolverConfig::default()),
            Err(Error::GammaTooSmall { .. })
        ));
    }

    #[test]
    fn floor_must_be_below_one_over_k() {
        let y = PreferenceMatrix::zeros(3);
        let cfg = SolverConfig {
            floor_epsilon: Some(0.5),
            ..SolverConfig::default()
        };
        assert!(matches!(
            solve_minmax_feasibility(&y, 12.0, &cfg),
            Err(Error::Config(_))
        ));
    }
}
