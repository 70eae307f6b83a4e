use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use tourlink::connectivity::is_k_connected;

use crate::cli::parse_seed_lines;
use crate::exec::{execute, COMMANDS};
use crate::record::{write_records, ExperimentRecord, Outcome, Params};

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// Command to run for every trial.
    pub command: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// `a..b` (end exclusive) or a comma list.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub seeds_file: Option<PathBuf>,
    /// Skip trials whose tournament is not this connected.
    #[arg(long)]
    pub at_least: Option<usize>,
    /// Writes PREFIX.csv, PREFIX.json and PREFIX.jsonl.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "random")]
    pub source: String,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub internal: Option<String>,
}

pub fn parse_seeds(spec: &str) -> anyhow::Result<Vec<u64>> {
    match spec.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().with_context(|| format!("bad seed range {spec:?}"))?;
            let b: u64 = b.trim().parse().with_context(|| format!("bad seed range {spec:?}"))?;
            Ok((a..b).collect())
        }
        None => parse_seed_lines(spec),
    }
}

/// Counts and timings for one `(n, k)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub k: Option<usize>,
    pub trials: usize,
    pub skipped: usize,
    pub success: usize,
    pub hypothesis_exhausted: usize,
    pub counterexample: usize,
    pub error: usize,
    pub success_rate: f64,
    pub p50_ms: f64,
    pub p90_ms: f64,
    pub max_ms: f64,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

pub fn summarize(n: usize, k: Option<usize>, skipped: usize, records: &[&ExperimentRecord]) -> Summary {
    let count = |o: Outcome| records.iter().filter(|r| r.outcome == o).count();
    let mut times: Vec<f64> = records.iter().map(|r| r.wall_time_ms).collect();
    times.sort_by(f64::total_cmp);
    let success = count(Outcome::Success);
    Summary {
        n,
        k,
        trials: records.len(),
        skipped,
        success,
        hypothesis_exhausted: count(Outcome::HypothesisExhausted),
        counterexample: count(Outcome::Counterexample),
        error: count(Outcome::Error),
        success_rate: if records.is_empty() { 0.0 } else { success as f64 / records.len() as f64 },
        p50_ms: percentile(&times, 0.5),
        p90_ms: percentile(&times, 0.9),
        max_ms: times.last().copied().unwrap_or(0.0),
    }
}

fn pool() -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(w) = std::env::var("TOURLINK_WORKERS") {
        let w: usize = w.parse().with_context(|| format!("TOURLINK_WORKERS={w:?}"))?;
        b = b.num_threads(w.max(1));
    }
    Ok(b.build()?)
}

/// `(n, k, record)`; no record when `--at-least` skipped the trial.
pub type Trial = (usize, Option<usize>, Option<ExperimentRecord>);

/// Trials in grid order.
pub fn sweep_records(s: &SweepArgs, seeds: &[u64]) -> anyhow::Result<Vec<Trial>> {
    if !COMMANDS.contains(&s.command.as_str()) {
        bail!("unknown command {:?}", s.command);
    }
    if s.source == "stdin" {
        bail!("sweeps need a generated source");
    }
    let ks: Vec<Option<usize>> = if s.k.is_empty() { vec![None] } else { s.k.iter().map(|&k| Some(k)).collect() };
    let mut trials = Vec::new();
    for &n in &s.n {
        for &k in &ks {
            for &seed in seeds {
                let params = Params {
                    source: s.source.clone(),
                    n: Some(n),
                    k,
                    m: s.m,
                    r: s.r,
                    budget: s.budget,
                    at_least: s.at_least,
                    internal: s.internal.clone(),
                    ..Params::default()
                };
                trials.push((n, k, seed, params));
            }
        }
    }
    let at_least = s.at_least;
    let command = s.command.clone();
    pool()?.install(|| {
        trials
            .par_iter()
            .map(|(n, k, seed, params)| {
                if let Some(a) = at_least {
                    let t = params.tournament(*seed, None)?;
                    if !is_k_connected(&t, a) {
                        return Ok((*n, *k, None));
                    }
                }
                Ok((*n, *k, Some(execute(&command, params, *seed, None))))
            })
            .collect()
    })
}

pub fn run_sweep(s: &SweepArgs) -> anyhow::Result<i32> {
    let seeds = match (&s.seeds, &s.seeds_file) {
        (_, Some(path)) => parse_seed_lines(&fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)?,
        (Some(spec), None) => parse_seeds(spec)?,
        (None, None) => vec![0],
    };
    let trials = sweep_records(s, &seeds)?;
    let mut cells: Vec<(usize, Option<usize>)> = Vec::new();
    for &(n, k, _) in &trials {
        if !cells.contains(&(n, k)) {
            cells.push((n, k));
        }
    }
    let summaries: Vec<Summary> = cells
        .iter()
        .map(|&(n, k)| {
            let here: Vec<_> = trials.iter().filter(|t| (t.0, t.1) == (n, k)).collect();
            let done: Vec<&ExperimentRecord> = here.iter().filter_map(|t| t.2.as_ref()).collect();
            summarize(n, k, here.len() - done.len(), &done)
        })
        .collect();
    let json = serde_json::to_string_pretty(&summaries)?;
    if let Some(prefix) = &s.out {
        let with = |ext: &str| PathBuf::from(format!("{}.{ext}", prefix.display()));
        let mut w = csv::Writer::from_path(with("csv"))?;
        for row in &summaries {
            w.serialize(row)?;
        }
        w.flush()?;
        fs::write(with("json"), &json)?;
        let mut f = fs::File::create(with("jsonl"))?;
        write_records(&mut f, trials.iter().filter_map(|t| t.2.as_ref()))?;
    }
    println!("{json}");
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_specs() {
        assert_eq!(parse_seeds("3..6").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_seeds("4..4").unwrap(), Vec::<u64>::new());
        assert_eq!(parse_seeds("7,9").unwrap(), vec![7, 9]);
        assert!(parse_seeds("a..2").is_err());
    }

    #[test]
    fn percentiles_use_nearest_rank() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(percentile(&xs, 0.5), 5.0);
        assert_eq!(percentile(&xs, 0.9), 9.0);
        assert_eq!(percentile(&[], 0.9), 0.0);
    }

    #[test]
    fn grid_order_and_skips() {
        let s = SweepArgs {
            command: "connectivity".into(),
            n: vec![8, 10],
            k: vec![],
            seeds: None,
            seeds_file: None,
            at_least: Some(2),
            out: None,
            source: "random".into(),
            r: None,
            m: None,
            budget: None,
            internal: None,
        };
        let trials = sweep_records(&s, &[0, 1, 2, 3]).unwrap();
        assert_eq!(trials.len(), 8);
        assert!(trials[..4].iter().all(|t| t.0 == 8));
        for (n, _, r) in &trials {
            if let Some(r) = r {
                let kappa = r.certificate.as_ref().unwrap()["kappa"].as_u64().unwrap();
                assert!(kappa >= 2, "n = {n}");
            }
        }
    }
}
