//! Small linear programs in the form `minimize c^T x` subject to `<=`, `>=`
//! or `=` rows and `x >= 0` (unless a variable is marked free), solved by `microlp`'s revised simplex.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    free: Vec<bool>,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn minimize(objective: Vec<f64>) -> Self {
        Self {
            num_vars: objective.len(),
            free: vec![false; objective.len()],
            objective,
            constraints: Vec::new(),
        }
    }

    /// Drops the `x >= 0` bound on variable `i`.
    pub fn set_free(&mut self, i: usize) -> &mut Self {
        self.free[i] = true;
        self
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    /// Solves the program; more than `max_pivots` simplex pivots is reported
    /// as `NotConverged`.
    pub fn solve(&self, max_pivots: usize) -> Result<LpSolution> {
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = self
            .objective
            .iter()
            .zip(&self.free)
            .map(|(&c, &free)| {
                let lower = if free { f64::NEG_INFINITY } else { 0.0 };
                problem.add_var(c, (lower, f64::INFINITY))
            })
            .collect();
        for c in &self.constraints {
            let op = match c.relation {
                Relation::Le => ComparisonOp::Le,
                Relation::Ge => ComparisonOp::Ge,
                Relation::Eq => ComparisonOp::Eq,
            };
            let terms: Vec<_> = vars
                .iter()
                .zip(&c.coeffs)
                .filter(|(_, v)| **v != 0.0)
                .map(|(&var, &v)| (var, v))
                .collect();
            problem.add_constraint(terms.as_slice(), op, c.rhs);
        }
        let outcome = problem.solve().map_err(|e| match e {
            microlp::Error::Infeasible => Error::Infeasible,
            microlp::Error::Unbounded => Error::Unbounded,
            other => {
                log::warn!("lp solver: {other}");
                Error::NotConverged {
                    iterations: 0,
                    violation: f64::NAN,
                }
            }
        })?;
        let pivots = outcome.stats().lp_iterations as usize;
        let solution = outcome.into_solution().map_err(|_| Error::NotConverged {
            iterations: pivots,
            violation: f64::NAN,
        })?;
        if pivots > max_pivots {
            return Err(Error::NotConverged {
                iterations: pivots,
                violation: f64::NAN,
            });
        }
        Ok(LpSolution {
            x: vars.iter().map(|&v| solution.var_value(v)).collect(),
            objective: solution.objective(),
            pivots,
        })
    }
}
