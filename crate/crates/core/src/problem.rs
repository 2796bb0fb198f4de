//! The contract a search domain implements.
//!
//! Scores are always maximized. A state is either terminal (it has a
//! score) or exposes at least one legal move, and within one state every
//! legal move carries a distinct [`MoveCode`]. Codes may repeat across
//! states; that sharing is what lets the policy generalize.

use crate::policy::MoveCode;
use crate::search::SearchError;

pub trait Problem: Sync {
    type State: Clone + Send;
    type Move: Clone + Send;

    fn root(&self) -> Self::State;

    fn is_terminal(&self, state: &Self::State) -> bool;

    /// Appends the legal moves of `state` to `moves` (which the caller
    /// clears). Must be deterministic.
    fn legal_moves(&self, state: &Self::State, moves: &mut Vec<Self::Move>);

    fn code(&self, state: &Self::State, mv: &Self::Move) -> MoveCode;

    /// Applies a move returned by `legal_moves(state)`.
    fn play(&self, state: &mut Self::State, mv: &Self::Move);

    /// Score of a terminal state.
    fn score(&self, state: &Self::State) -> f64;

    /// A lower bound on any terminal score, used when a benchmark
    /// checkpoint precedes the first result of a run.
    fn worst_score(&self) -> f64;
}

/// Fills `codes` with the codes of `moves` at `state`.
pub(crate) fn codes_of<P: Problem>(
    problem: &P,
    state: &P::State,
    moves: &[P::Move],
    codes: &mut Vec<MoveCode>,
) {
    codes.clear();
    codes.extend(moves.iter().map(|m| problem.code(state, m)));
    #[cfg(debug_assertions)]
    {
        let mut sorted = codes.clone();
        sorted.sort_unstable();
        let before = sorted.len();
        sorted.dedup();
        assert_eq!(before, sorted.len(), "duplicate move codes within one state");
    }
}

/// Replays `codes` from the root, matching each against the legal-move
/// codes of the current state, and returns the state reached.
pub fn replay<P: Problem>(problem: &P, codes: &[MoveCode]) -> Result<P::State, SearchError> {
    let mut state = problem.root();
    let mut moves = Vec::new();
    let mut legal = Vec::new();
    for (step, &code) in codes.iter().enumerate() {
        if problem.is_terminal(&state) {
            return Err(SearchError::SequenceMismatch { step });
        }
        moves.clear();
        problem.legal_moves(&state, &mut moves);
        codes_of(problem, &state, &moves, &mut legal);
        let idx = legal
            .iter()
            .position(|&c| c == code)
            .ok_or(SearchError::SequenceMismatch { step })?;
        problem.play(&mut state, &moves[idx]);
    }
    Ok(state)
}

/// Replays a complete sequence and returns its terminal score.
pub fn replay_score<P: Problem>(problem: &P, codes: &[MoveCode]) -> Result<f64, SearchError> {
    let state = replay(problem, codes)?;
    if !problem.is_terminal(&state) {
        return Err(SearchError::SequenceMismatch { step: codes.len() });
    }
    Ok(problem.score(&state))
}
