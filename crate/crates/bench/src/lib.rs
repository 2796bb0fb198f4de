//! Benchmark harness and command-line front end for nested rollout policy
//! search: seeded anytime runs, checkpoint aggregation, CSV tables and
//! replayable best-solution files.

mod error;
mod harness;
mod instance;
mod solution;
mod table;

pub use error::BenchError;
pub use harness::{
    aggregate, bench, geometric_schedule, run_once, run_variant, schedule_until, BenchConfig,
    BenchReport, Champion, Variant,
};
pub use instance::{InstanceId, LoadedProblem, ProblemKind, ProblemSpec};
pub use solution::SolutionFile;
pub use table::{emit_csv, load_csv, read_csv, write_csv, Column, Table};
