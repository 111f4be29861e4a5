use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use duelbandit::domain::{GeneralMatrix, PreferenceMatrix};
use duelbandit::games::{solve_cce, solve_minmax_feasibility, SolverConfig};
use duelbandit::harness::acceptance::{criterion_id, Suite, CRITERIA};
use duelbandit::harness::{aggregate, collect_summaries, exit_code, run_experiment, ExperimentConfig};
use duelbandit::{Error, Result};

#[derive(Parser)]
#[command(name = "duelbandit", version, about = "Contextual dueling-bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config over its seeds.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated seeds overriding the config's list.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Track confidence and per-round inequality violations.
        #[arg(long)]
        diagnostic: bool,
    },
    /// Coarse correlated equilibrium of a K×K payoff matrix (JSON rows).
    SolveCce {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Inverse-gap feasibility point for a skew-symmetric prediction matrix.
    SolveIgw {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        gamma: f64,
    },
    /// Run an acceptance criterion by name or number, or `all`.
    Accept {
        #[arg(long)]
        suite: String,
    },
    /// Summarize the summary.csv files under a directory.
    Aggregate {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn code_for(e: &Error) -> u8 {
    if e.is_solver_failure() {
        exit_code::SOLVER_FAILURE as u8
    } else {
        exit_code::CONFIG_ERROR as u8
    }
}

fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Run {
            config,
            seeds,
            out,
            diagnostic,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seeds) = seeds {
                cfg.seeds = seeds;
            }
            if out.is_some() {
                cfg.output_dir = out;
            }
            cfg.diagnostic |= diagnostic;
            let output = run_experiment(&cfg)?;
            let summaries = output.summaries();
            for s in &summaries {
                println!(
                    "seed {}: BR {:.4} FB {:.4} policy {:.4} normalized {:.4}{}",
                    s.seed,
                    s.br_regret,
                    s.fb_regret,
                    s.policy_regret,
                    s.normalized_br,
                    s.failure.as_ref().map(|f| format!(" FAILED: {f}")).unwrap_or_default()
                );
            }
            print_json(&aggregate(&summaries)?)?;
            if let Some(e) = output.first_error() {
                error!("{} seed(s) failed", output.runs.iter().filter(|r| r.error.is_some()).count());
                return Ok(code_for(e));
            }
            Ok(exit_code::SUCCESS as u8)
        }
        Command::SolveCce { matrix } => {
            let rows = read_rows(&matrix)?;
            let k = rows.len();
            let flat: Vec<f64> = rows.into_iter().flatten().collect();
            if flat.len() != k * k {
                return Err(Error::config("payoff matrix must be square"));
            }
            let u = GeneralMatrix::from_flat(k, flat)?;
            let report = solve_cce(&u, &SolverConfig::default())?;
            print_json(&serde_json::json!({
                "joint": report.point.weights().chunks(k).collect::<Vec<_>>(),
                "max_violation": report.max_violation,
                "iterations": report.iterations,
            }))?;
            Ok(exit_code::SUCCESS as u8)
        }
        Command::SolveIgw { matrix, gamma } => {
            let y = PreferenceMatrix::new(read_rows(&matrix)?)?;
            let report = solve_minmax_feasibility(&y, gamma, &SolverConfig::default())?;
            print_json(&report)?;
            Ok(exit_code::SUCCESS as u8)
        }
        Command::Accept { suite } => {
            let ids: Vec<u8> = if suite == "all" {
                CRITERIA.iter().map(|(id, _)| *id).collect()
            } else {
                vec![criterion_id(&suite).ok_or_else(|| {
                    let names: Vec<&str> = CRITERIA.iter().map(|(_, n)| *n).collect();
                    Error::Config(format!("unknown suite {suite:?}; expected one of all, {}", names.join(", ")))
                })?]
            };
            let mut runner = Suite::new();
            let mut all_passed = true;
            for id in ids {
                let result = runner.run(id)?;
                println!("{result}");
                all_passed &= result.passed;
            }
            Ok(if all_passed {
                exit_code::SUCCESS as u8
            } else {
                exit_code::ACCEPTANCE_FAILURE as u8
            })
        }
        Command::Aggregate { input } => {
            let summaries = collect_summaries(&input)?;
            let report = aggregate(&summaries)?;
            std::fs::write(input.join("aggregate.json"), serde_json::to_string_pretty(&report)?)?;
            print_json(&report)?;
            Ok(exit_code::SUCCESS as u8)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(code_for(&e))
        }
    }
}
