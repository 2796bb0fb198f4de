//! Best-solution files: a replayable move-code list tied to an instance
//! hash.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use snrpa_core::{replay_score, MoveCode, MoveSequence};

use crate::error::BenchError;
use crate::instance::{InstanceId, LoadedProblem, ProblemKind};
use crate::with_problem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub problem: ProblemKind,
    pub instance: String,
    pub instance_sha256: String,
    pub algorithm: String,
    pub seed: u64,
    pub score: f64,
    pub moves: Vec<MoveCode>,
}

impl SolutionFile {
    pub fn new(
        problem: ProblemKind,
        id: &InstanceId,
        algorithm: impl Into<String>,
        seed: u64,
        best: &MoveSequence,
    ) -> Self {
        Self {
            problem,
            instance: id.label.clone(),
            instance_sha256: id.sha256.clone(),
            algorithm: algorithm.into(),
            seed,
            score: best.score,
            moves: best.moves.clone(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), BenchError> {
        let file = File::create(path).map_err(|e| BenchError::io(path, e))?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let file = File::open(path).map_err(|e| BenchError::io(path, e))?;
        Ok(serde_json::from_reader(file)?)
    }

    /// Replays the moves on `problem` and checks hash and score.
    pub fn verify(
        &self,
        kind: ProblemKind,
        problem: &LoadedProblem,
        id: &InstanceId,
    ) -> Result<f64, BenchError> {
        if self.problem != kind {
            return Err(BenchError::Verification(format!(
                "solution is for {}, not {kind}",
                self.problem
            )));
        }
        if self.instance_sha256 != id.sha256 {
            return Err(BenchError::Verification(
                "instance hash does not match".into(),
            ));
        }
        let score = with_problem!(problem, p => replay_score(p, &self.moves))?;
        if score != self.score {
            return Err(BenchError::Verification(format!(
                "replayed score {score} differs from recorded {}",
                self.score
            )));
        }
        Ok(score)
    }
}
