use super::{check_duel, Learner, Selection};
use crate::domain::{Context, Duel, GeneralMatrix, Outcome, PreferenceMatrix, RngHandle};
use crate::error::{Error, Result};
use crate::games::{solve_cce, SolverConfig};

/// Width used for never-compared pairs is capped at the diameter of [-1, 1].
pub const UNEXPLORED_WIDTH_CAP: f64 = 2.0;

/// Empirical estimate, confidence width and optimistic payoff at one round.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceBounds {
    pub p_hat: PreferenceMatrix,
    pub width: GeneralMatrix,
    pub upper: GeneralMatrix,
}

impl ConfidenceBounds {
    /// True when every off-diagonal entry of `p` lies in `p_hat ± width`.
    pub fn covers(&self, p: &PreferenceMatrix) -> bool {
        let k = p.k();
        (0..k).all(|i| {
            (0..k).all(|j| i == j || (p.get(i, j) - self.p_hat.get(i, j)).abs() <= self.width.get(i, j))
        })
    }

    /// `2 Σ p[a,b] C[a,b]` over off-diagonal pairs.
    pub fn exploration_bonus(&self, joint: &crate::domain::JointActionDistribution) -> f64 {
        let k = joint.k();
        let mut acc = 0.0;
        for a in 0..k {
            for b in 0..k {
                if a != b {
                    acc += joint.get(a, b) * self.width.get(a, b);
                }
            }
        }
        2.0 * acc
    }
}

/// Optimistic CCE learner for the non-contextual problem.
///
/// `wins[a*K + b]` counts wins of `a` over `b`; the diagonal counts plays of
/// `(a, a)`, which carry no information.
#[derive(Debug, Clone)]
pub struct CceDbState {
    k: usize,
    wins: Vec<u64>,
    delta: f64,
    t: usize,
    solver: SolverConfig,
}

impl CceDbState {
    pub fn new(k: usize, delta: f64, solver: SolverConfig) -> Result<Self> {
        if k < 2 {
            return Err(Error::config("CCE-DB needs K >= 2"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::config(format!("delta {delta} must lie in (0, 1)")));
        }
        solver.validate(k)?;
        Ok(Self {
            k,
            wins: vec![0; k * k],
            delta,
            t: 1,
            solver,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn wins(&self, a: usize, b: usize) -> u64 {
        self.wins[a * self.k + b]
    }

    /// `N[a,b] = W[a,b] + W[b,a]`; on the diagonal, the number of `(a,a)` plays.
    pub fn comparisons(&self, a: usize, b: usize) -> u64 {
        if a == b {
            self.wins(a, a)
        } else {
            self.wins(a, b) + self.wins(b, a)
        }
    }

    /// Overwrites a win count. For setting up states in tests and examples.
    pub fn set_wins(&mut self, a: usize, b: usize, count: u64) {
        self.wins[a * self.k + b] = count;
    }

    pub fn set_round(&mut self, t: usize) {
        self.t = t.max(1);
    }

    fn log_term(&self) -> f64 {
        let (k, t) = (self.k as f64, self.t as f64);
        (k * k * t * t / self.delta).ln()
    }

    /// `P̂`, `C` and `U = P̂ + C` (zero diagonal) for the current round.
    pub fn confidence_matrices(&self) -> ConfidenceBounds {
        let k = self.k;
        let log_term = self.log_term();
        let unexplored = (0.5 * log_term).sqrt().min(UNEXPLORED_WIDTH_CAP);
        let (p_hat, _) = PreferenceMatrix::from_upper_fn(k, |a, b| {
            let n = self.comparisons(a, b);
            if n == 0 {
                0.0
            } else {
                2.0 * self.wins(a, b) as f64 / n as f64 - 1.0
            }
        });
        let mut width = GeneralMatrix::zeros(k);
        let mut upper = GeneralMatrix::zeros(k);
        for a in 0..k {
            for b in 0..k {
                if a == b {
                    continue;
                }
                let n = self.comparisons(a, b);
                let c = if n == 0 {
                    unexplored
                } else {
                    (log_term / n as f64).sqrt()
                };
                width.set(a, b, c);
                upper.set(a, b, p_hat.get(a, b) + c);
            }
        }
        ConfidenceBounds {
            p_hat,
            width,
            upper,
        }
    }
}

impl Learner for CceDbState {
    fn k(&self) -> usize {
        self.k
    }

    fn round(&self) -> usize {
        self.t
    }

    fn select(&mut self, _context: &Context, rng: &mut RngHandle) -> Result<Selection> {
        let bounds = self.confidence_matrices();
        let report = solve_cce(&bounds.upper, &self.solver)?;
        let duel = report.point.sample(rng);
        Ok(Selection {
            joint: report.point,
            duel,
            solver_iterations: report.iterations,
            gamma: None,
        })
    }

    fn observe(&mut self, _context: &Context, duel: Duel, outcome: Outcome) -> Result<()> {
        check_duel(self.k, duel)?;
        let (a, b) = duel;
        if a == b {
            self.wins[a * self.k + a] += 1;
        } else {
            match outcome {
                Outcome::Win => self.wins[a * self.k + b] += 1,
                Outcome::Loss => self.wins[b * self.k + a] += 1,
            }
        }
        self.t += 1;
        Ok(())
    }
}
