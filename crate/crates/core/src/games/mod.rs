//! Equilibrium and feasibility solvers.
//!
//! * [`solve_cce`]: coarse correlated equilibrium of a general-sum K×K game
//!   in which the row player earns `U[a,b]` and the column player `U[b,a]`.
//! * [`solve_zero_sum_nash`]: maximin strategy of a skew-symmetric game.
//! * [`solve_minmax_feasibility`]: the inverse-gap program that picks
//!   MinMaxDB's per-round sampling distribution.

mod cce;
mod igw;
pub mod lp;
mod nash;

use serde::{Deserialize, Serialize};

pub use cce::{cce_violation, solve_cce};
pub use igw::{igw_constraint_lhs, igw_max_violation, igw_rhs, igw_slack, solve_minmax_feasibility};
pub use nash::{nash_violation, solve_zero_sum_nash};

use crate::error::{Error, Result};
use lp::{LinearProgram, Relation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Simplex pivots for the LP solvers, descent steps for the inverse-gap solver.
    pub max_iterations: usize,
    pub violation_tolerance: f64,
    /// Minimum mass per arm for the inverse-gap solver; `None` means `1/(4γ)`.
    pub floor_epsilon: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 50_000,
            violation_tolerance: 1e-8,
            floor_epsilon: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, k: usize) -> Result<()> {
        if !(self.violation_tolerance > 0.0) {
            return Err(Error::config("violation_tolerance must be positive"));
        }
        if let Some(eps) = self.floor_epsilon {
            if !(eps > 0.0 && eps < 1.0 / k as f64) {
                return Err(Error::config(format!(
                    "floor_epsilon {eps} must lie in (0, 1/K)"
                )));
            }
        }
        Ok(())
    }
}

/// Solver output: the point found, its worst signed constraint violation
/// (`<= 0` means strictly feasible) and the work spent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport<P> {
    pub point: P,
    pub max_violation: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves `min t` s.t. `row · x <= t` for every row, `x` in the simplex.
/// Returns the simplex point, the optimal `t` and the pivot count.
pub(crate) fn solve_epigraph(
    rows: &[Vec<f64>],
    n: usize,
    max_pivots: usize,
) -> Result<(Vec<f64>, f64, usize)> {
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut program = LinearProgram::minimize(objective);
    program.set_free(n);
    for row in rows {
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.extend_from_slice(row);
        coeffs.push(-1.0);
        program.add(coeffs, Relation::Le, 0.0);
    }
    let mut simplex = vec![1.0; n];
    simplex.push(0.0);
    program.add(simplex, Relation::Eq, 1.0);

    let sol = program.solve(max_pivots)?;
    let mut x: Vec<f64> = sol.x[..n].iter().map(|v| v.max(0.0)).collect();
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    Ok((x, sol.objective, sol.pivots))
}
