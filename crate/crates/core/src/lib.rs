//! Nested Rollout Policy Adaptation (NRPA) and Stabilized NRPA over a
//! generic single-player [`Problem`], with three bundled domains.
//!
//! ```
//! use snrpa_core::domains::maximum::Maximum;
//! use snrpa_core::{solve, Algorithm, SearchConfig};
//!
//! let problem = Maximum::new(7).unwrap();
//! let config = SearchConfig { level: 2, eval_playouts: 4, ..SearchConfig::default() };
//! let outcome = solve(&problem, Algorithm::Snrpa, config).unwrap();
//! assert!(outcome.best.score >= 1.0);
//! ```

pub mod domains;
pub mod policy;
pub mod problem;
pub mod rng;
pub mod search;
pub mod trace;

pub use policy::{softmax, MoveCode, WeightTable};
pub use problem::{replay, replay_score, Problem};
pub use rng::RngStream;
pub use search::{
    adapt, playout, solve, Algorithm, Search, SearchConfig, SearchError, SearchEvent,
    SearchOutcome, SearchStats,
};
pub use trace::{MoveSequence, RunTrace, TraceEvent};
