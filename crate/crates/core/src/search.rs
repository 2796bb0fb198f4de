//! Gibbs-sampled playouts, policy adaptation, and the nested searches
//! built on them (plain NRPA and the stabilized variant with a best-of-P
//! evaluation level).

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::policy::{sample_index, softmax_into, MoveCode, WeightTable};
use crate::problem::{codes_of, Problem};
use crate::rng::RngStream;
use crate::trace::{MoveSequence, RunTrace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("no legal moves")]
    NoLegalMoves,
    #[error("non-finite policy weight {0}")]
    NonFiniteWeight(f64),
    #[error("stuck state: non-terminal state without legal moves")]
    StuckState,
    #[error("sequence/root mismatch at step {step}")]
    SequenceMismatch { step: usize },
    #[error("invalid search config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Nrpa,
    /// Stabilized NRPA: level 1 is an evaluation level returning the best
    /// of `eval_playouts` playouts under one frozen policy.
    Snrpa,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub level: usize,
    /// Iterations per adaptive level.
    pub iterations: usize,
    /// Playouts per evaluation-level call (stabilized search only).
    pub eval_playouts: usize,
    /// Adaptation step size.
    pub alpha: f64,
    pub seed: u64,
    /// Wall-clock budget measured from the start of the search.
    pub deadline: Option<Duration>,
    /// Threads used for the evaluation playouts. Results do not depend on
    /// this value.
    pub eval_workers: usize,
    /// Stop as soon as a sequence scoring at least this much is found.
    pub stop_at_score: Option<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            level: 4,
            iterations: 100,
            eval_playouts: 1,
            alpha: 1.0,
            seed: 0,
            deadline: None,
            eval_workers: 1,
            stop_at_score: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.iterations == 0 {
            return Err(SearchError::Config("iterations must be at least 1".into()));
        }
        if self.eval_playouts == 0 {
            return Err(SearchError::Config("eval_playouts must be at least 1".into()));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(SearchError::Config(format!(
                "alpha must be a positive finite number, got {}",
                self.alpha
            )));
        }
        if self.eval_workers == 0 {
            return Err(SearchError::Config("eval_workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub playouts: u64,
    pub adapts: u64,
}

/// Notifications emitted while a search runs, for instrumentation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SearchEvent {
    Playout { score: f64 },
    Adapt { level: usize },
    /// An adaptive level finished iteration `index` holding `best_score`.
    Iteration { level: usize, index: usize, best_score: f64 },
}

pub type Observer = Box<dyn FnMut(SearchEvent)>;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: MoveSequence,
    pub trace: RunTrace,
    pub stats: SearchStats,
}

struct Scratch<M> {
    moves: Vec<M>,
    codes: Vec<MoveCode>,
    weights: Vec<f64>,
    probs: Vec<f64>,
}

impl<M> Scratch<M> {
    fn new() -> Self {
        Self {
            moves: Vec::new(),
            codes: Vec::new(),
            weights: Vec::new(),
            probs: Vec::new(),
        }
    }
}

/// Samples one complete sequence from the root, picking each move with
/// probability proportional to `exp(policy[code])`.
pub fn playout<P: Problem>(
    problem: &P,
    policy: &WeightTable,
    rng: &mut RngStream,
) -> Result<MoveSequence, SearchError> {
    playout_with(problem, policy, rng, &mut Scratch::new())
}

fn playout_with<P: Problem>(
    problem: &P,
    policy: &WeightTable,
    rng: &mut RngStream,
    scratch: &mut Scratch<P::Move>,
) -> Result<MoveSequence, SearchError> {
    let mut state = problem.root();
    let mut moves = Vec::new();
    loop {
        if problem.is_terminal(&state) {
            return Ok(MoveSequence {
                moves,
                score: problem.score(&state),
            });
        }
        scratch.moves.clear();
        problem.legal_moves(&state, &mut scratch.moves);
        if scratch.moves.is_empty() {
            return Err(SearchError::StuckState);
        }
        codes_of(problem, &state, &scratch.moves, &mut scratch.codes);
        scratch.weights.clear();
        scratch
            .weights
            .extend(scratch.codes.iter().map(|&c| policy.get(c)));
        softmax_into(&scratch.weights, &mut scratch.probs)?;
        let idx = sample_index(&scratch.probs, rng.uniform());
        moves.push(scratch.codes[idx]);
        problem.play(&mut state, &scratch.moves[idx]);
    }
}

/// Returns a copy of `policy` pulled towards `sequence`: at every state
/// along it the played move gains `alpha` and every legal move loses
/// `alpha` times its probability under the original `policy`.
pub fn adapt<P: Problem>(
    problem: &P,
    policy: &WeightTable,
    sequence: &[MoveCode],
    alpha: f64,
) -> Result<WeightTable, SearchError> {
    adapt_with(problem, policy, sequence, alpha, &mut Scratch::new())
}

fn adapt_with<P: Problem>(
    problem: &P,
    policy: &WeightTable,
    sequence: &[MoveCode],
    alpha: f64,
    scratch: &mut Scratch<P::Move>,
) -> Result<WeightTable, SearchError> {
    let mut adapted = policy.clone();
    let mut state = problem.root();
    for (step, &code) in sequence.iter().enumerate() {
        if problem.is_terminal(&state) {
            return Err(SearchError::SequenceMismatch { step });
        }
        scratch.moves.clear();
        problem.legal_moves(&state, &mut scratch.moves);
        codes_of(problem, &state, &scratch.moves, &mut scratch.codes);
        let played = scratch
            .codes
            .iter()
            .position(|&c| c == code)
            .ok_or(SearchError::SequenceMismatch { step })?;

        adapted.add(code, alpha);
        scratch.weights.clear();
        scratch
            .weights
            .extend(scratch.codes.iter().map(|&c| policy.get(c)));
        softmax_into(&scratch.weights, &mut scratch.probs)?;
        for (&c, &p) in scratch.codes.iter().zip(&scratch.probs) {
            adapted.add(c, -alpha * p);
        }
        problem.play(&mut state, &scratch.moves[played]);
    }
    Ok(adapted)
}

/// One search run over `problem`: owns the clock, the run trace and the
/// instrumentation counters shared by every level of the recursion.
pub struct Search<'p, P: Problem> {
    problem: &'p P,
    config: SearchConfig,
    started: Instant,
    deadline: Option<Instant>,
    trace: RunTrace,
    stats: SearchStats,
    stopped: bool,
    scratch: Scratch<P::Move>,
    pool: Option<rayon::ThreadPool>,
    observer: Option<Observer>,
}

impl<'p, P: Problem> Search<'p, P> {
    pub fn new(problem: &'p P, config: SearchConfig) -> Result<Self, SearchError> {
        config.validate()?;
        let pool = if config.eval_workers > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(config.eval_workers)
                .build()
                .map_err(|e| SearchError::Config(format!("worker pool: {e}")))?;
            Some(pool)
        } else {
            None
        };
        let started = Instant::now();
        Ok(Self {
            problem,
            deadline: config.deadline.map(|d| started + d),
            config,
            started,
            trace: RunTrace::default(),
            stats: SearchStats::default(),
            stopped: false,
            scratch: Scratch::new(),
            pool,
            observer: None,
        })
    }

    pub fn with_observer(mut self, observer: impl FnMut(SearchEvent) + 'static) -> Self {
        self.observer = Some(Box::new(observer));
        self
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn trace(&self) -> &RunTrace {
        &self.trace
    }

    /// Restarts the clock, then runs `algorithm` at the configured level
    /// from an all-zero policy with a stream seeded from the config.
    pub fn run(mut self, algorithm: Algorithm) -> Result<SearchOutcome, SearchError> {
        self.started = Instant::now();
        self.deadline = self.config.deadline.map(|d| self.started + d);
        let mut rng = RngStream::new(self.config.seed);
        let policy = WeightTable::new();
        let level = self.config.level;
        let best = match algorithm {
            Algorithm::Nrpa => self.nrpa(level, &policy, &mut rng)?,
            Algorithm::Snrpa => self.snrpa(level, &policy, &mut rng)?,
        };
        Ok(SearchOutcome {
            best,
            trace: self.trace,
            stats: self.stats,
        })
    }

    pub fn nrpa(
        &mut self,
        level: usize,
        policy: &WeightTable,
        rng: &mut RngStream,
    ) -> Result<MoveSequence, SearchError> {
        if level == 0 {
            self.leaf(policy, rng)
        } else {
            self.adaptive_level(level, policy, rng, Self::nrpa)
        }
    }

    pub fn snrpa(
        &mut self,
        level: usize,
        policy: &WeightTable,
        rng: &mut RngStream,
    ) -> Result<MoveSequence, SearchError> {
        match level {
            0 => self.leaf(policy, rng),
            1 => self.evaluate(policy, rng),
            _ => self.adaptive_level(level, policy, rng, Self::snrpa),
        }
    }

    fn adaptive_level(
        &mut self,
        level: usize,
        policy: &WeightTable,
        rng: &mut RngStream,
        child: fn(&mut Self, usize, &WeightTable, &mut RngStream) -> Result<MoveSequence, SearchError>,
    ) -> Result<MoveSequence, SearchError> {
        let mut policy = policy.clone();
        let mut best: Option<MoveSequence> = None;
        for index in 0..self.config.iterations {
            if index > 0 && self.should_stop() {
                break;
            }
            let result = child(self, level - 1, &policy, rng)?;
            if best.as_ref().is_none_or(|b| result.score >= b.score) {
                best = Some(result);
            }
            let best = best.as_ref().expect("set on the first iteration");
            self.notify(SearchEvent::Iteration {
                level,
                index,
                best_score: best.score,
            });
            if self.should_stop() {
                break;
            }
            policy = adapt_with(
                self.problem,
                &policy,
                &best.moves,
                self.config.alpha,
                &mut self.scratch,
            )?;
            self.stats.adapts += 1;
            self.notify(SearchEvent::Adapt { level });
        }
        Ok(best.expect("at least one iteration runs"))
    }

    /// Best of `eval_playouts` playouts under one frozen policy. With more
    /// than one playout each draws from its own pre-split stream, and ties
    /// go to the later stream, so the result does not depend on how many
    /// workers run them.
    fn evaluate(
        &mut self,
        policy: &WeightTable,
        rng: &mut RngStream,
    ) -> Result<MoveSequence, SearchError> {
        let count = self.config.eval_playouts;
        if count == 1 {
            return self.leaf(policy, rng);
        }
        let mut streams: Vec<RngStream> = (0..count).map(|_| rng.split()).collect();
        let mut best: Option<MoveSequence> = None;

        if let Some(pool) = &self.pool {
            let problem = self.problem;
            let results: Vec<Result<MoveSequence, SearchError>> = pool.install(|| {
                streams
                    .par_iter_mut()
                    .map(|stream| playout(problem, policy, stream))
                    .collect()
            });
            for result in results {
                let seq = result?;
                self.record(&seq);
                if best.as_ref().is_none_or(|b| seq.score >= b.score) {
                    best = Some(seq);
                }
            }
        } else {
            for (i, stream) in streams.iter_mut().enumerate() {
                if i > 0 && self.should_stop() {
                    break;
                }
                let seq = self.leaf(policy, stream)?;
                if best.as_ref().is_none_or(|b| seq.score >= b.score) {
                    best = Some(seq);
                }
            }
        }
        Ok(best.expect("at least one evaluation playout runs"))
    }

    fn leaf(&mut self, policy: &WeightTable, rng: &mut RngStream) -> Result<MoveSequence, SearchError> {
        let seq = playout_with(self.problem, policy, rng, &mut self.scratch)?;
        self.record(&seq);
        Ok(seq)
    }

    fn record(&mut self, seq: &MoveSequence) {
        self.stats.playouts += 1;
        let elapsed = self.started.elapsed().as_secs_f64();
        if self.trace.offer(seq, elapsed, self.stats.playouts) {
            if let Some(target) = self.config.stop_at_score {
                if seq.score >= target {
                    self.stopped = true;
                }
            }
        }
        self.notify(SearchEvent::Playout { score: seq.score });
    }

    fn should_stop(&mut self) -> bool {
        if !self.stopped {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.stopped = true;
                }
            }
        }
        self.stopped
    }

    fn notify(&mut self, event: SearchEvent) {
        if let Some(observer) = self.observer.as_mut() {
            observer(event);
        }
    }
}

/// Runs one search with `config` and returns its outcome.
pub fn solve<P: Problem>(
    problem: &P,
    algorithm: Algorithm,
    config: SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    Search::new(problem, config)?.run(algorithm)
}
