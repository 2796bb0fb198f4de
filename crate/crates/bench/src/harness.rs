//! Anytime benchmark protocol: seeded runs under a wall-clock deadline,
//! sampled at a geometric schedule of checkpoints.

use std::cmp::Ordering;
use std::fmt;
use std::time::Duration;

use rayon::prelude::*;

use snrpa_core::{solve, Algorithm, Problem, RunTrace, SearchConfig, SearchOutcome};

use crate::error::BenchError;
use crate::table::{Column, Table};

/// One algorithm configuration compared in a benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Variant {
    pub algorithm: Algorithm,
    /// Evaluation playouts; always 1 for plain NRPA.
    pub eval_playouts: usize,
}

impl Variant {
    pub const NRPA: Variant = Variant {
        algorithm: Algorithm::Nrpa,
        eval_playouts: 1,
    };

    pub fn snrpa(eval_playouts: usize) -> Self {
        Self {
            algorithm: Algorithm::Snrpa,
            eval_playouts,
        }
    }

    fn sort_key(&self) -> (u8, usize) {
        match self.algorithm {
            Algorithm::Nrpa => (0, 0),
            Algorithm::Snrpa => (1, self.eval_playouts),
        }
    }
}

impl Ord for Variant {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Variant {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.algorithm {
            Algorithm::Nrpa => f.write_str("nrpa"),
            Algorithm::Snrpa => write!(f, "snrpa{}", self.eval_playouts),
        }
    }
}

/// `start, start*ratio, ...` up to and including `end` (within rounding).
pub fn geometric_schedule(start: f64, ratio: f64, end: f64) -> Vec<f64> {
    assert!(start > 0.0 && ratio > 1.0, "schedule must grow from a positive start");
    let mut out = Vec::new();
    let mut k = 0i32;
    loop {
        let t = start * ratio.powi(k);
        if t > end * (1.0 + 1e-9) {
            break;
        }
        out.push(t);
        k += 1;
    }
    out
}

/// Checkpoints from 0.01 s doubling up to `limit`; a limit that is off the
/// doubling grid is appended as the final checkpoint.
pub fn schedule_until(limit: f64) -> Vec<f64> {
    let mut out = geometric_schedule(0.01, 2.0, limit);
    match out.last() {
        Some(&last) if (last - limit).abs() <= 1e-9 * limit => {}
        _ => out.push(limit),
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub variants: Vec<Variant>,
    pub runs: usize,
    pub checkpoints: Vec<f64>,
    pub level: usize,
    pub iterations: usize,
    pub alpha: f64,
    pub seed_base: u64,
    /// Worker threads running independent seeds.
    pub jobs: usize,
}

impl BenchConfig {
    /// Full protocol: 200 runs, checkpoints 0.01 s to 163.84 s.
    pub fn full(variants: Vec<Variant>) -> Self {
        Self {
            variants,
            runs: 200,
            checkpoints: geometric_schedule(0.01, 2.0, 163.84),
            level: 4,
            iterations: 100,
            alpha: 1.0,
            seed_base: 0,
            jobs: 1,
        }
    }

    /// Desk-scale preset: 50 runs, checkpoints 0.01 s to 10.24 s.
    pub fn desk(variants: Vec<Variant>) -> Self {
        Self {
            runs: 50,
            checkpoints: geometric_schedule(0.01, 2.0, 10.24),
            ..Self::full(variants)
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.runs == 0 {
            return Err(BenchError::Config("runs must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(BenchError::Config("jobs must be at least 1".into()));
        }
        if self.checkpoints.is_empty() {
            return Err(BenchError::Config("no checkpoints".into()));
        }
        if self.checkpoints.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(BenchError::Config("checkpoints must be finite and non-negative".into()));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BenchError::Config("checkpoints must be strictly increasing".into()));
        }
        for v in &self.variants {
            if v.eval_playouts == 0 {
                return Err(BenchError::Config(format!("{v}: P must be at least 1")));
            }
        }
        Ok(())
    }

    pub fn deadline(&self) -> Duration {
        Duration::from_secs_f64(self.checkpoints.last().copied().unwrap_or(0.0))
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.runs as u64).map(move |i| self.seed_base + i)
    }

    pub fn search_config(&self, variant: Variant, seed: u64) -> SearchConfig {
        SearchConfig {
            level: self.level,
            iterations: self.iterations,
            eval_playouts: variant.eval_playouts,
            alpha: self.alpha,
            seed,
            deadline: Some(self.deadline()),
            eval_workers: 1,
            stop_at_score: None,
        }
    }
}

/// One anytime run, with the final checkpoint as deadline.
pub fn run_once<P: Problem>(
    problem: &P,
    variant: Variant,
    config: &BenchConfig,
    seed: u64,
) -> Result<SearchOutcome, BenchError> {
    Ok(solve(
        problem,
        variant.algorithm,
        config.search_config(variant, seed),
    )?)
}

/// Runs every seed of `variant`, in seed order.
pub fn run_variant<P: Problem>(
    problem: &P,
    variant: Variant,
    config: &BenchConfig,
) -> Result<Vec<SearchOutcome>, BenchError> {
    config.validate()?;
    let seeds: Vec<u64> = config.seeds().collect();
    if config.jobs == 1 {
        return seeds
            .into_iter()
            .map(|s| run_once(problem, variant, config, s))
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| BenchError::Config(format!("worker pool: {e}")))?;
    pool.install(|| {
        seeds
            .into_par_iter()
            .map(|s| run_once(problem, variant, config, s))
            .collect()
    })
}

/// Mean over traces of the best score at or before each checkpoint;
/// traces with no event yet contribute `sentinel`.
pub fn aggregate(
    traces: &[RunTrace],
    checkpoints: &[f64],
    sentinel: f64,
) -> Result<Vec<f64>, BenchError> {
    if traces.is_empty() {
        return Err(BenchError::EmptyTraces);
    }
    let n = traces.len() as f64;
    Ok(checkpoints
        .iter()
        .map(|&t| {
            traces
                .iter()
                .map(|tr| tr.best_at(t).unwrap_or(sentinel))
                .sum::<f64>()
                / n
        })
        .collect())
}

/// Best run of one benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct Champion {
    pub variant: Variant,
    pub seed: u64,
    pub outcome: SearchOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub table: Table,
    pub champion: Option<Champion>,
}

/// Full protocol over every variant; columns follow [`Variant`] order.
pub fn bench<P: Problem>(problem: &P, config: &BenchConfig) -> Result<BenchReport, BenchError> {
    config.validate()?;
    let mut variants = config.variants.clone();
    variants.sort();
    variants.dedup();

    let mut columns = Vec::with_capacity(variants.len());
    let mut champion: Option<Champion> = None;
    for variant in variants {
        let outcomes = run_variant(problem, variant, config)?;
        let traces: Vec<RunTrace> = outcomes.iter().map(|o| o.trace.clone()).collect();
        let values = aggregate(&traces, &config.checkpoints, problem.worst_score())?;
        columns.push(Column {
            name: variant.to_string(),
            values,
        });
        for (seed, outcome) in config.seeds().zip(outcomes) {
            if champion
                .as_ref()
                .is_none_or(|c| outcome.best.score > c.outcome.best.score)
            {
                champion = Some(Champion {
                    variant,
                    seed,
                    outcome,
                });
            }
        }
    }
    Ok(BenchReport {
        table: Table {
            checkpoints: config.checkpoints.clone(),
            columns,
        },
        champion,
    })
}
