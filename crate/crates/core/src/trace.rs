use crate::policy::MoveCode;

/// Moves from the root, in order, with the terminal score they reach.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveSequence {
    pub moves: Vec<MoveCode>,
    pub score: f64,
}

/// One improvement of the run-wide best score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    /// Seconds since the search started.
    pub elapsed: f64,
    pub score: f64,
    /// Playouts completed when the improvement was found.
    pub playouts: u64,
}

/// Timestamped record of best-score improvements for one run.
///
/// Scores are strictly increasing through `events`; timestamps are
/// non-decreasing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub events: Vec<TraceEvent>,
    pub best: Option<MoveSequence>,
}

impl RunTrace {
    pub(crate) fn offer(&mut self, seq: &MoveSequence, elapsed: f64, playouts: u64) -> bool {
        let improves = self.best.as_ref().is_none_or(|b| seq.score > b.score);
        if improves {
            self.events.push(TraceEvent {
                elapsed,
                score: seq.score,
                playouts,
            });
            self.best = Some(seq.clone());
        }
        improves
    }

    /// Best score found at or before `elapsed` seconds.
    pub fn best_at(&self, elapsed: f64) -> Option<f64> {
        self.events
            .iter()
            .take_while(|e| e.elapsed <= elapsed)
            .last()
            .map(|e| e.score)
    }

    pub fn final_score(&self) -> Option<f64> {
        self.events.last().map(|e| e.score)
    }

    /// The event list with timestamps dropped; equal for two runs with the
    /// same seed, configuration and instance when no deadline intervenes.
    pub fn improvements(&self) -> Vec<(u64, f64)> {
        self.events.iter().map(|e| (e.playouts, e.score)).collect()
    }
}
