//! CSV and JSON artifacts of a run.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::{ExperimentOutput, RunSummary};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 12] = [
    "seed",
    "t",
    "arm_a",
    "arm_b",
    "outcome",
    "br_step",
    "br_cum",
    "fb_step",
    "fb_cum",
    "policy_cum",
    "gamma",
    "solver_iters",
];

pub const SUMMARY_HEADER: [&str; 17] = [
    "seed",
    "algorithm",
    "horizon",
    "k",
    "rounds",
    "br_regret",
    "fb_regret",
    "policy_regret",
    "normalized_br",
    "reg_sq",
    "solver_iters",
    "gamma",
    "confidence_violations",
    "bound_violations",
    "fb_dominated",
    "policy_within_slack",
    "status",
];

/// One round of a run, as written to the per-seed CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub seed: u64,
    pub t: usize,
    pub arm_a: usize,
    pub arm_b: usize,
    pub outcome: i32,
    pub br_step: f64,
    pub br_cum: f64,
    pub fb_step: f64,
    pub fb_cum: f64,
    pub policy_cum: f64,
    /// NaN for learners without an exploration rate.
    pub gamma: f64,
    pub solver_iters: usize,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse<T: std::str::FromStr>(field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::Io(format!("cannot parse {what} from {field:?}")))
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

fn parse_opt<T: std::str::FromStr>(field: &str, what: &str) -> Result<Option<T>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse(field, what).map(Some)
    }
}

impl CsvRow {
    fn fields(&self) -> [String; 12] {
        [
            self.seed.to_string(),
            self.t.to_string(),
            self.arm_a.to_string(),
            self.arm_b.to_string(),
            self.outcome.to_string(),
            format_float(self.br_step),
            format_float(self.br_cum),
            format_float(self.fb_step),
            format_float(self.fb_cum),
            format_float(self.policy_cum),
            format_float(self.gamma),
            self.solver_iters.to_string(),
        ]
    }

    fn from_record(r: &csv::StringRecord) -> Result<Self> {
        if r.len() != CSV_HEADER.len() {
            return Err(Error::Io(format!("expected {} fields, got {}", CSV_HEADER.len(), r.len())));
        }
        Ok(Self {
            seed: parse(&r[0], "seed")?,
            t: parse(&r[1], "t")?,
            arm_a: parse(&r[2], "arm_a")?,
            arm_b: parse(&r[3], "arm_b")?,
            outcome: parse(&r[4], "outcome")?,
            br_step: parse(&r[5], "br_step")?,
            br_cum: parse(&r[6], "br_cum")?,
            fb_step: parse(&r[7], "fb_step")?,
            fb_cum: parse(&r[8], "fb_cum")?,
            policy_cum: parse(&r[9], "policy_cum")?,
            gamma: parse(&r[10], "gamma")?,
            solver_iters: parse(&r[11], "solver_iters")?,
        })
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_rows<W: std::io::Write>(out: W, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for row in rows {
        w.write_record(row.fields()).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let header = r.headers().map_err(csv_error)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Io(format!("{}: unexpected header", path.display())));
    }
    r.records()
        .map(|rec| CsvRow::from_record(&rec.map_err(csv_error)?))
        .collect()
}

fn summary_fields(s: &RunSummary) -> [String; 17] {
    [
        s.seed.to_string(),
        s.algorithm.clone(),
        s.horizon.to_string(),
        s.k.to_string(),
        s.rounds.to_string(),
        format_float(s.br_regret),
        format_float(s.fb_regret),
        format_float(s.policy_regret),
        format_float(s.normalized_br),
        format_float(s.reg_sq),
        s.solver_iterations.to_string(),
        s.gamma.map(format_float).unwrap_or_default(),
        opt(&s.confidence_violations),
        opt(&s.bound_violations),
        s.fb_dominated.to_string(),
        s.policy_within_slack.to_string(),
        s.failure.clone().map(|f| format!("failed: {f}")).unwrap_or_else(|| "ok".into()),
    ]
}

pub fn write_summaries<W: std::io::Write>(out: W, summaries: &[RunSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER).map_err(csv_error)?;
    for s in summaries {
        w.write_record(summary_fields(s)).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summaries(path: &Path) -> Result<Vec<RunSummary>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let header = r.headers().map_err(csv_error)?.clone();
    if header.iter().ne(SUMMARY_HEADER) {
        return Err(Error::Io(format!("{}: unexpected summary header", path.display())));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let f = rec.map_err(csv_error)?;
        let status = &f[16];
        out.push(RunSummary {
            seed: parse(&f[0], "seed")?,
            algorithm: f[1].to_string(),
            horizon: parse(&f[2], "horizon")?,
            k: parse(&f[3], "k")?,
            rounds: parse(&f[4], "rounds")?,
            br_regret: parse(&f[5], "br_regret")?,
            fb_regret: parse(&f[6], "fb_regret")?,
            policy_regret: parse(&f[7], "policy_regret")?,
            normalized_br: parse(&f[8], "normalized_br")?,
            reg_sq: parse(&f[9], "reg_sq")?,
            solver_iterations: parse(&f[10], "solver_iters")?,
            gamma: parse_opt(&f[11], "gamma")?,
            confidence_violations: parse_opt(&f[12], "confidence_violations")?,
            bound_violations: parse_opt(&f[13], "bound_violations")?,
            fb_dominated: parse(&f[14], "fb_dominated")?,
            policy_within_slack: parse(&f[15], "policy_within_slack")?,
            failure: status.strip_prefix("failed: ").map(str::to_string),
            wall_clock_secs: 0.0,
        });
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct Timing {
    total_secs: f64,
    per_seed_secs: BTreeMap<u64, f64>,
}

/// Writes `resolved_config.json`, one `seed_<seed>.csv` per seed,
/// `summary.csv` and `timing.json` (wall-clock kept apart so the CSVs are
/// reproducible byte for byte).
pub fn write_experiment(dir: &Path, output: &ExperimentOutput) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut cfg = serde_json::to_string_pretty(&output.config)?;
    cfg.push('\n');
    fs::write(dir.join("resolved_config.json"), cfg)?;
    for run in &output.runs {
        let f = fs::File::create(dir.join(format!("seed_{}.csv", run.summary.seed)))?;
        write_rows(std::io::BufWriter::new(f), &run.rows)?;
    }
    let summaries: Vec<RunSummary> = output.runs.iter().map(|r| r.summary.clone()).collect();
    write_summaries(fs::File::create(dir.join("summary.csv"))?, &summaries)?;
    let timing = Timing {
        total_secs: output.wall_clock_secs,
        per_seed_secs: summaries.iter().map(|s| (s.seed, s.wall_clock_secs)).collect(),
    };
    fs::write(dir.join("timing.json"), serde_json::to_string_pretty(&timing)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        for x in [0.1, 1.0 / 3.0, 2.0_f64.sqrt() * 1e-300, 123_456_789.123_456_79, 0.0, -5.5] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(format_float(f64::NAN), "NaN");
        assert!(format_float(f64::NAN).parse::<f64>().unwrap().is_nan());
    }

    #[test]
    fn header_is_exact() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "seed,t,arm_a,arm_b,outcome,br_step,br_cum,fb_step,fb_cum,policy_cum,gamma,solver_iters\n"
        );
    }
}
