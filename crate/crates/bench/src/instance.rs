//! Loading a problem from CLI-level arguments.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use sha2::{Digest, Sha256};

use snrpa_core::domains::maximum::Maximum;
use snrpa_core::domains::samegame::{Board, SameGame};
use snrpa_core::domains::tsptw::{Tsptw, TsptwInstance};
use snrpa_core::{replay, MoveCode};

use crate::error::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Maximum,
    Tsptw,
    Samegame,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Maximum => "maximum",
            ProblemKind::Tsptw => "tsptw",
            ProblemKind::Samegame => "samegame",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub instance: Option<PathBuf>,
    pub budget: Option<usize>,
    /// SameGame: restrict playouts with the tabu-color filter.
    pub tabu: bool,
    /// SameGame: let the tabu filter keep pairs of the dominant color.
    pub allow_pairs: bool,
}

impl ProblemSpec {
    pub fn maximum(budget: usize) -> Self {
        Self {
            kind: ProblemKind::Maximum,
            instance: None,
            budget: Some(budget),
            tabu: false,
            allow_pairs: false,
        }
    }

    pub fn from_file(kind: ProblemKind, path: impl Into<PathBuf>) -> Self {
        Self {
            kind,
            instance: Some(path.into()),
            budget: None,
            tabu: kind == ProblemKind::Samegame,
            allow_pairs: false,
        }
    }
}

/// Identifies the exact instance a result belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceId {
    pub label: String,
    /// Hex SHA-256 of the instance file, or of `maximum:<budget>`.
    pub sha256: String,
}

impl InstanceId {
    fn of_bytes(label: String, bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        Self { label, sha256 }
    }
}

pub enum LoadedProblem {
    Maximum(Maximum),
    Tsptw(Tsptw),
    SameGame(SameGame),
}

/// Runs `$body` with `$p` bound to the concrete problem inside a
/// [`LoadedProblem`].
#[macro_export]
macro_rules! with_problem {
    ($loaded:expr, $p:ident => $body:expr) => {
        match $loaded {
            $crate::LoadedProblem::Maximum($p) => $body,
            $crate::LoadedProblem::Tsptw($p) => $body,
            $crate::LoadedProblem::SameGame($p) => $body,
        }
    };
}

fn read(path: &Path) -> Result<String, BenchError> {
    std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))
}

impl LoadedProblem {
    pub fn load(spec: &ProblemSpec) -> Result<(Self, InstanceId), BenchError> {
        let need_path = || {
            spec.instance.as_deref().ok_or_else(|| {
                BenchError::Config(format!("--instance is required for {}", spec.kind))
            })
        };
        match spec.kind {
            ProblemKind::Maximum => {
                let budget = spec
                    .budget
                    .ok_or_else(|| BenchError::Config("--budget is required for maximum".into()))?;
                let label = format!("maximum:{budget}");
                let id = InstanceId::of_bytes(label.clone(), label.as_bytes());
                Ok((LoadedProblem::Maximum(Maximum::new(budget)?), id))
            }
            ProblemKind::Tsptw => {
                let path = need_path()?;
                let text = read(path)?;
                let instance = TsptwInstance::parse(&text)?;
                let id = InstanceId::of_bytes(path.display().to_string(), text.as_bytes());
                Ok((LoadedProblem::Tsptw(Tsptw::new(instance)), id))
            }
            ProblemKind::Samegame => {
                let path = need_path()?;
                let text = read(path)?;
                let board = Board::parse(&text)?;
                let game = SameGame::new(board);
                let game = if spec.tabu {
                    game.with_tabu(spec.allow_pairs)
                } else {
                    game
                };
                let id = InstanceId::of_bytes(path.display().to_string(), text.as_bytes());
                Ok((LoadedProblem::SameGame(game), id))
            }
        }
    }

    pub fn worst_score(&self) -> f64 {
        use snrpa_core::Problem;
        with_problem!(self, p => p.worst_score())
    }

    /// Human-readable rendering of the position reached by `moves`.
    pub fn describe(&self, moves: &[MoveCode]) -> Result<String, BenchError> {
        Ok(match self {
            LoadedProblem::Maximum(p) => {
                let state = replay(p, moves)?;
                format!("expression: {state}")
            }
            LoadedProblem::Tsptw(p) => {
                let state = replay(p, moves)?;
                format!(
                    "tour: {state}\ncost: {}\nviolations: {}",
                    state.cost(),
                    state.violations()
                )
            }
            LoadedProblem::SameGame(p) => {
                let state = replay(p, moves)?;
                format!("final board:\n{}", state.board())
            }
        })
    }
}
