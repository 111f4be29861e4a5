use std::path::{Path, PathBuf};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algorithms::{
    default_gamma, default_ucb_width, AlgorithmSpec, AnyLearner, CceDbState, CceLinDbState, ConstantDuel,
    MinMaxDbState,
};
use crate::domain::{ActionDistribution, Context, PreferenceMatrix, RngHandle};
use crate::environments::{
    finite_class_around, make_finite_class, Environment, NamedFixture,
};
use crate::error::{Error, Result};
use crate::evaluation::{constant_policies, random_table_policies, Policy};
use crate::games::{solve_zero_sum_nash, SolverConfig};
use crate::oracles::{
    FiniteClassAggregator, Hypothesis, OgdForecaster, Oracle, OracleSpec, RegressionOracle, VawForecaster,
};

fn default_class_size() -> usize {
    16
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvironmentSpec {
    /// A single preference matrix, given by fixture name or explicitly.
    FixedMatrix {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fixture: Option<NamedFixture>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<PreferenceMatrix>,
        #[serde(default)]
        perturbation: f64,
        /// Size of the hypothesis class built around the matrix for
        /// finite-class oracles.
        #[serde(default = "default_class_size")]
        class_size: usize,
        #[serde(default)]
        instance_seed: u64,
    },
    FiniteClass {
        k: usize,
        n_contexts: usize,
        class_size: usize,
        #[serde(default)]
        perturbation: f64,
        #[serde(default)]
        instance_seed: u64,
    },
    LinearRealizable {
        k: usize,
        dim: usize,
        #[serde(default = "one")]
        weight_norm: f64,
        #[serde(default = "default_class_size")]
        class_size: usize,
        #[serde(default)]
        perturbation: f64,
        #[serde(default)]
        instance_seed: u64,
    },
}

/// Comparator for fixed-benchmark regret.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QStarRule {
    /// Nash strategy on single-context instances, uniform otherwise.
    Auto,
    /// Point mass on the Condorcet winner (single-context instances).
    Condorcet,
    /// Maximin strategy of `f*` (single-context instances).
    Nash,
    Uniform,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    /// The K constant policies.
    Constant,
    /// Constant policies plus `extra` random context-to-arm tables.
    RandomTables { extra: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkSpec {
    pub q_star: QStarRule,
    pub policies: PolicySpec,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self {
            q_star: QStarRule::Auto,
            policies: PolicySpec::Constant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub algorithm: AlgorithmSpec,
    pub environment: EnvironmentSpec,
    pub horizon: usize,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub diagnostic: bool,
    #[serde(default)]
    pub benchmark: BenchmarkSpec,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::config("horizon must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seed list must be nonempty"));
        }
        Ok(())
    }

    /// Confidence parameter default `1/T`, kept inside (0, 1).
    pub fn default_delta(&self) -> f64 {
        (1.0 / self.horizon as f64).min(0.5)
    }

    /// Fills in every defaulted hyperparameter so the echoed config
    /// reproduces the run on its own.
    pub fn resolve(&self) -> Result<Self> {
        self.validate()?;
        let instance = Instance::build(&self.environment)?;
        let mut resolved = self.clone();
        let delta = self.default_delta();
        resolved.algorithm = match &self.algorithm {
            AlgorithmSpec::CceDb { delta: d } => AlgorithmSpec::CceDb {
                delta: Some(d.unwrap_or(delta)),
            },
            AlgorithmSpec::CceLinDb { delta: d, lambda, eta, t0 } => {
                let dim = instance.env.feature_dim().ok_or_else(|| {
                    Error::config("cce_lin_db needs a linear_realizable environment")
                })?;
                let d = d.unwrap_or(delta);
                let lambda = lambda.unwrap_or(1.0);
                AlgorithmSpec::CceLinDb {
                    delta: Some(d),
                    lambda: Some(lambda),
                    eta: Some(eta.unwrap_or_else(|| default_ucb_width(dim, self.horizon, lambda, d))),
                    t0: *t0,
                }
            }
            AlgorithmSpec::MinMaxDb { gamma, oracle } => {
                let built = build_oracle(oracle, &instance, self.horizon)?;
                let gamma = match gamma {
                    Some(g) => *g,
                    None => default_gamma(instance.env.k(), self.horizon, &built.budget())?,
                };
                AlgorithmSpec::MinMaxDb {
                    gamma: Some(gamma),
                    oracle: oracle.clone(),
                }
            }
            other => other.clone(),
        };
        Ok(resolved)
    }
}

/// The environment of a config together with the hypothesis class handed to
/// finite-class oracles. Built from `instance_seed`, so every run seed of an
/// experiment faces the same instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub env: Environment,
    pub hypotheses: Vec<Hypothesis>,
}

impl Instance {
    pub fn build(spec: &EnvironmentSpec) -> Result<Self> {
        match spec {
            EnvironmentSpec::FixedMatrix {
                fixture,
                matrix,
                perturbation,
                class_size,
                instance_seed,
            } => {
                let m = match (fixture, matrix) {
                    (Some(f), None) => f.matrix()?,
                    (None, Some(m)) => m.clone(),
                    _ => {
                        return Err(Error::config(
                            "fixed_matrix needs exactly one of `fixture` or `matrix`",
                        ))
                    }
                };
                let mut rng = RngHandle::new(*instance_seed);
                let hypotheses = finite_class_around(&m, *class_size, &mut rng)?;
                let env = Environment::fixed(m).with_perturbation(*perturbation)?;
                Ok(Self { env, hypotheses })
            }
            EnvironmentSpec::FiniteClass {
                k,
                n_contexts,
                class_size,
                perturbation,
                instance_seed,
            } => {
                let mut rng = RngHandle::new(*instance_seed);
                let (env, hypotheses) = make_finite_class(*n_contexts, *k, *class_size, &mut rng)?;
                Ok(Self {
                    env: env.with_perturbation(*perturbation)?,
                    hypotheses,
                })
            }
            EnvironmentSpec::LinearRealizable {
                k,
                dim,
                weight_norm,
                class_size,
                perturbation,
                instance_seed,
            } => {
                if *class_size == 0 {
                    return Err(Error::config("class_size must be at least 1"));
                }
                if !(*weight_norm >= 0.0) {
                    return Err(Error::config("weight_norm must be nonnegative"));
                }
                let mut rng = RngHandle::new(*instance_seed);
                let direction = |rng: &mut RngHandle| -> Vec<f64> {
                    let g: Vec<f64> = (0..*dim).map(|_| StandardNormal.sample(rng)).collect();
                    let n = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                    g.into_iter().map(|v| weight_norm * v / n).collect()
                };
                let w = direction(&mut rng);
                let mut hypotheses: Vec<Hypothesis> =
                    (1..*class_size).map(|_| Hypothesis::Linear(direction(&mut rng))).collect();
                let slot = rng.index(*class_size);
                hypotheses.insert(slot, Hypothesis::Linear(w.clone()));
                let env = Environment::linear(*k, w)?.with_perturbation(*perturbation)?;
                Ok(Self { env, hypotheses })
            }
        }
    }

    /// The single ground-truth matrix of a one-context instance.
    pub fn single_truth(&self) -> Option<PreferenceMatrix> {
        match self.env.num_contexts() {
            Some(1) => self.env.ground_truth(&Context::Id(0)).ok(),
            _ => None,
        }
    }

    pub fn q_star(&self, rule: &QStarRule, solver: &SolverConfig) -> Result<ActionDistribution> {
        let k = self.env.k();
        match rule {
            QStarRule::Uniform => Ok(ActionDistribution::uniform(k)),
            QStarRule::Explicit(w) => {
                if w.len() != k {
                    return Err(Error::DimensionMismatch {
                        expected: k,
                        actual: w.len(),
                    });
                }
                ActionDistribution::new(w.clone())
            }
            QStarRule::Auto => match self.single_truth() {
                Some(m) => Ok(solve_zero_sum_nash(&m, solver)?.point),
                None => Ok(ActionDistribution::uniform(k)),
            },
            QStarRule::Nash | QStarRule::Condorcet => {
                let m = self.single_truth().ok_or_else(|| {
                    Error::config("condorcet and nash comparators need a single-context environment")
                })?;
                if *rule == QStarRule::Nash {
                    return Ok(solve_zero_sum_nash(&m, solver)?.point);
                }
                let winner = m
                    .condorcet_winner()
                    .ok_or_else(|| Error::config("instance has no Condorcet winner"))?;
                Ok(ActionDistribution::point_mass(k, winner))
            }
        }
    }

    pub fn policies(&self, spec: &PolicySpec) -> Vec<Policy> {
        let k = self.env.k();
        match spec {
            PolicySpec::Constant => constant_policies(k),
            PolicySpec::RandomTables { extra } => match self.env.num_contexts() {
                Some(n) => {
                    let mut rng = RngHandle::new(0x706f_6c69_6379);
                    random_table_policies(k, n, *extra, &mut rng)
                }
                None => constant_policies(k),
            },
        }
    }
}

pub(crate) fn build_oracle(spec: &OracleSpec, instance: &Instance, horizon: usize) -> Result<Oracle> {
    let dim = instance.env.feature_dim();
    let need_dim = || dim.ok_or_else(|| Error::config("linear oracles need a linear_realizable environment"));
    Ok(match spec {
        OracleSpec::FiniteClass { eta } => {
            let hyps = instance.hypotheses.clone();
            Oracle::FiniteClass(match eta {
                Some(eta) => FiniteClassAggregator::with_rate(hyps, *eta)?,
                None => FiniteClassAggregator::new(hyps)?,
            })
        }
        OracleSpec::Vaw { lambda } => Oracle::Vaw(VawForecaster::new(need_dim()?, *lambda)?),
        OracleSpec::Ogd { radius, eta } => {
            let d = need_dim()?;
            Oracle::Ogd(match eta {
                Some(eta) => OgdForecaster::new(d, *radius, *eta)?,
                // features live in [-1, 1]^d
                None => OgdForecaster::tuned(d, *radius, (d as f64).sqrt(), horizon)?,
            })
        }
    })
}

/// Builds the learner of a resolved config.
pub fn build_learner(config: &ExperimentConfig, instance: &Instance) -> Result<AnyLearner> {
    let k = instance.env.k();
    let solver = config.solver.clone();
    let delta = config.default_delta();
    Ok(match &config.algorithm {
        AlgorithmSpec::CceDb { delta: d } => AnyLearner::CceDb(CceDbState::new(k, d.unwrap_or(delta), solver)?),
        AlgorithmSpec::CceLinDb { delta: d, lambda, eta, t0 } => {
            let dim = instance
                .env
                .feature_dim()
                .ok_or_else(|| Error::config("cce_lin_db needs a linear_realizable environment"))?;
            let lambda = lambda.unwrap_or(1.0);
            let eta = eta.unwrap_or_else(|| default_ucb_width(dim, config.horizon, lambda, d.unwrap_or(delta)));
            AnyLearner::CceLinDb(CceLinDbState::new(k, dim, lambda, eta, *t0, solver)?)
        }
        AlgorithmSpec::MinMaxDb { gamma, oracle } => {
            let oracle = build_oracle(oracle, instance, config.horizon)?;
            let gamma = match gamma {
                Some(g) => *g,
                None => default_gamma(k, config.horizon, &oracle.budget())?,
            };
            AnyLearner::MinMaxDb(MinMaxDbState::new(k, oracle, gamma, solver)?)
        }
        AlgorithmSpec::ConstantDuel { a, b } => AnyLearner::Constant(ConstantDuel::new(k, (*a, *b))?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "algorithm": {"kind": "cce_db"},
        "environment": {"kind": "fixed_matrix", "fixture": {"name": "condorcet", "k": 5, "margin": 0.4}},
        "horizon": 100,
        "seeds": [1, 2]
    }"#;

    #[test]
    fn parses_and_resolves() {
        let c = ExperimentConfig::from_json(SAMPLE).unwrap();
        assert_eq!(c.benchmark, BenchmarkSpec::default());
        let r = c.resolve().unwrap();
        assert_eq!(r.algorithm, AlgorithmSpec::CceDb { delta: Some(0.01) });
        let text = serde_json::to_string_pretty(&r).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), r);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = ExperimentConfig::from_json(SAMPLE).unwrap();
        c.horizon = 0;
        assert!(matches!(c.resolve(), Err(Error::Config(_))));
        c.horizon = 10;
        c.seeds.clear();
        assert!(c.validate().is_err());
        assert!(ExperimentConfig::from_json(&SAMPLE.replace("\"horizon\"", "\"horizn\"")).is_err());
        let both = SAMPLE.replace(
            r#""fixture""#,
            r#""matrix": [[0,1],[-1,0]], "fixture""#,
        );
        let c = ExperimentConfig::from_json(&both).unwrap();
        assert!(c.resolve().is_err());
    }

    #[test]
    fn auto_gamma_is_resolved() {
        let c = ExperimentConfig::from_json(
            r#"{
            "algorithm": {"kind": "min_max_db", "oracle": {"kind": "finite_class"}},
            "environment": {"kind": "finite_class", "k": 3, "n_contexts": 1, "class_size": 16},
            "horizon": 2500, "seeds": [0]
        }"#,
        )
        .unwrap();
        let r = c.resolve().unwrap();
        let AlgorithmSpec::MinMaxDb { gamma: Some(g), .. } = r.algorithm else {
            panic!("gamma not resolved")
        };
        let expected = (20.0 * 3.0 * 2500.0 / (8.0 * 16f64.ln())).sqrt();
        assert!((g - expected).abs() < 1e-12);
        let short = ExperimentConfig {
            horizon: 100,
            ..c
        };
        assert!(matches!(short.resolve(), Err(Error::HorizonTooShort { .. })));
    }

    #[test]
    fn comparators() {
        let inst = Instance::build(&EnvironmentSpec::FixedMatrix {
            fixture: Some(NamedFixture::Condorcet { k: 4, margin: 0.3 }),
            matrix: None,
            perturbation: 0.0,
            class_size: 4,
            instance_seed: 0,
        })
        .unwrap();
        let cfg = SolverConfig::default();
        let e0 = ActionDistribution::point_mass(4, 0);
        assert_eq!(inst.q_star(&QStarRule::Condorcet, &cfg).unwrap(), e0);
        let nash = inst.q_star(&QStarRule::Nash, &cfg).unwrap();
        assert!((nash.get(0) - 1.0).abs() < 1e-9);
        assert!(inst.env.is_realized_by(&inst.hypotheses));
        let lin = Instance::build(&EnvironmentSpec::LinearRealizable {
            k: 3,
            dim: 2,
            weight_norm: 1.0,
            class_size: 5,
            perturbation: 0.0,
            instance_seed: 3,
        })
        .unwrap();
        assert!(lin.env.is_realized_by(&lin.hypotheses));
        assert!(lin.q_star(&QStarRule::Nash, &cfg).is_err());
        assert_eq!(lin.q_star(&QStarRule::Auto, &cfg).unwrap(), ActionDistribution::uniform(3));
    }
}
