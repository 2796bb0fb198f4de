//! Expression discovery: build a prefix expression over the atoms
//! `+`, `*` and `1.0` within a total atom budget, maximizing its value.
//!
//! Atoms are pushed in prefix order, always filling the leftmost pending
//! slot. An operator is only offered while the budget still leaves room
//! for the operator itself and one extra leaf for each open slot.

use std::fmt;

use thiserror::Error;

use crate::policy::MoveCode;
use crate::problem::Problem;

/// Largest budget accepted by [`brute_force_max`].
pub const BRUTE_FORCE_CAP: usize = 13;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MaximumError {
    #[error("atom budget must be at least 1")]
    ZeroBudget,
    #[error("expression is complete")]
    Terminal,
    #[error("expression has {0} open slots")]
    Incomplete(usize),
    #[error("budget {budget} exceeds the enumeration cap of {cap}")]
    AboveCap { budget: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Atom {
    Add,
    Mul,
    One,
}

impl Atom {
    pub const ALL: [Atom; 3] = [Atom::Add, Atom::Mul, Atom::One];

    pub fn index(self) -> u64 {
        match self {
            Atom::Add => 0,
            Atom::Mul => 1,
            Atom::One => 2,
        }
    }

    fn arity(self) -> usize {
        match self {
            Atom::Add | Atom::Mul => 2,
            Atom::One => 0,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Atom::Add => "+",
            Atom::Mul => "*",
            Atom::One => "1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprState {
    atoms: Vec<Atom>,
    open_slots: usize,
}

impl ExprState {
    fn root() -> Self {
        Self {
            atoms: Vec::new(),
            open_slots: 1,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atoms_used(&self) -> usize {
        self.atoms.len()
    }

    pub fn open_slots(&self) -> usize {
        self.open_slots
    }

    pub fn is_complete(&self) -> bool {
        self.open_slots == 0
    }

    fn push(&mut self, atom: Atom) {
        debug_assert!(self.open_slots > 0);
        self.atoms.push(atom);
        self.open_slots = self.open_slots - 1 + atom.arity();
    }
}

impl fmt::Display for ExprState {
    /// Prefix notation, atoms separated by spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(atom.symbol())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Maximum {
    budget: usize,
}

impl Maximum {
    pub fn new(budget: usize) -> Result<Self, MaximumError> {
        if budget == 0 {
            return Err(MaximumError::ZeroBudget);
        }
        Ok(Self { budget })
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn legal_atoms(&self, state: &ExprState) -> Result<Vec<Atom>, MaximumError> {
        if state.is_complete() {
            return Err(MaximumError::Terminal);
        }
        if state.atoms_used() + state.open_slots + 2 <= self.budget {
            Ok(Atom::ALL.to_vec())
        } else {
            Ok(vec![Atom::One])
        }
    }

    /// Position-dependent code: `position * 3 + atom index`.
    pub fn atom_code(state: &ExprState, atom: Atom) -> MoveCode {
        state.atoms_used() as MoveCode * 3 + atom.index()
    }

    pub fn apply(&self, state: &ExprState, atom: Atom) -> Result<ExprState, MaximumError> {
        let legal = self.legal_atoms(state)?;
        assert!(legal.contains(&atom), "atom {atom:?} is not legal here");
        let mut next = state.clone();
        next.push(atom);
        Ok(next)
    }
}

/// Value of a completed prefix expression.
pub fn evaluate(state: &ExprState) -> Result<f64, MaximumError> {
    if !state.is_complete() {
        return Err(MaximumError::Incomplete(state.open_slots));
    }
    let mut stack: Vec<f64> = Vec::with_capacity(state.atoms.len());
    for atom in state.atoms.iter().rev() {
        let value = match atom {
            Atom::One => 1.0,
            Atom::Add | Atom::Mul => {
                let lhs = stack.pop().expect("complete expression");
                let rhs = stack.pop().expect("complete expression");
                if *atom == Atom::Add {
                    lhs + rhs
                } else {
                    lhs * rhs
                }
            }
        };
        stack.push(value);
    }
    debug_assert_eq!(stack.len(), 1);
    Ok(stack[0])
}

/// Exact optimum over every expression tree with at most `budget` atoms,
/// by enumerating the values of all trees of each size.
pub fn brute_force_max(budget: usize) -> Result<f64, MaximumError> {
    if budget == 0 {
        return Err(MaximumError::ZeroBudget);
    }
    if budget > BRUTE_FORCE_CAP {
        return Err(MaximumError::AboveCap {
            budget,
            cap: BRUTE_FORCE_CAP,
        });
    }
    // values[k]: value of every tree with exactly k atoms (with repeats)
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); budget + 1];
    values[1].push(1.0);
    for size in 2..=budget {
        let mut here = Vec::new();
        for left in 1..size - 1 {
            let right = size - 1 - left;
            for &a in &values[left] {
                for &b in &values[right] {
                    here.push(a + b);
                    here.push(a * b);
                }
            }
        }
        values[size] = here;
    }
    Ok(values
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max))
}

impl Problem for Maximum {
    type State = ExprState;
    type Move = Atom;

    fn root(&self) -> ExprState {
        ExprState::root()
    }

    fn is_terminal(&self, state: &ExprState) -> bool {
        state.is_complete()
    }

    fn legal_moves(&self, state: &ExprState, moves: &mut Vec<Atom>) {
        if state.is_complete() {
            return;
        }
        if state.atoms_used() + state.open_slots + 2 <= self.budget {
            moves.extend_from_slice(&Atom::ALL);
        } else {
            moves.push(Atom::One);
        }
    }

    fn code(&self, state: &ExprState, atom: &Atom) -> MoveCode {
        Self::atom_code(state, *atom)
    }

    fn play(&self, state: &mut ExprState, atom: &Atom) {
        state.push(*atom);
    }

    fn score(&self, state: &ExprState) -> f64 {
        evaluate(state).expect("score requested for an incomplete expression")
    }

    fn worst_score(&self) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::replay;
    use crate::rng::RngStream;
    use crate::search::playout;
    use crate::policy::WeightTable;

    fn build(problem: &Maximum, atoms: &[Atom]) -> ExprState {
        atoms
            .iter()
            .fold(problem.root(), |s, &a| problem.apply(&s, a).unwrap())
    }

    #[test]
    fn legal_atoms_respect_budget() {
        let one = Maximum::new(1).unwrap();
        assert_eq!(one.legal_atoms(&one.root()).unwrap(), vec![Atom::One]);

        let three = Maximum::new(3).unwrap();
        assert_eq!(three.legal_atoms(&three.root()).unwrap(), Atom::ALL.to_vec());
        let after_add = three.apply(&three.root(), Atom::Add).unwrap();
        assert_eq!(after_add.atoms_used(), 1);
        assert_eq!(after_add.open_slots(), 2);
        assert_eq!(three.legal_atoms(&after_add).unwrap(), vec![Atom::One]);

        let done = build(&three, &[Atom::Add, Atom::One, Atom::One]);
        assert_eq!(three.legal_atoms(&done), Err(MaximumError::Terminal));
    }

    #[test]
    fn zero_budget_rejected() {
        assert_eq!(Maximum::new(0), Err(MaximumError::ZeroBudget));
    }

    #[test]
    fn evaluation() {
        let p = Maximum::new(7).unwrap();
        assert_eq!(evaluate(&build(&p, &[Atom::One])).unwrap(), 1.0);
        assert_eq!(
            evaluate(&build(&p, &[Atom::Add, Atom::One, Atom::One])).unwrap(),
            2.0
        );
        use Atom::*;
        let e = build(&p, &[Mul, Add, One, One, Add, One, One]);
        assert_eq!(e.to_string(), "* + 1 1 + 1 1");
        assert_eq!(evaluate(&e).unwrap(), 4.0);
        assert_eq!(
            evaluate(&build(&p, &[Mul, Add])),
            Err(MaximumError::Incomplete(3))
        );
    }

    #[test]
    fn codes_depend_on_position() {
        let p = Maximum::new(7).unwrap();
        let root = p.root();
        assert_eq!(Maximum::atom_code(&root, Atom::Add), 0);
        assert_eq!(Maximum::atom_code(&root, Atom::One), 2);
        let s = p.apply(&root, Atom::Mul).unwrap();
        assert_eq!(Maximum::atom_code(&s, Atom::Add), 3);
    }

    #[test]
    fn brute_force_values() {
        assert_eq!(brute_force_max(1).unwrap(), 1.0);
        assert_eq!(brute_force_max(2).unwrap(), 1.0);
        assert_eq!(brute_force_max(3).unwrap(), 2.0);
        assert_eq!(brute_force_max(7).unwrap(), 4.0);
        assert!(matches!(
            brute_force_max(14),
            Err(MaximumError::AboveCap { .. })
        ));
    }

    #[test]
    fn playouts_stay_in_budget_and_replay() {
        for budget in [1, 2, 3, 7, 20] {
            let p = Maximum::new(budget).unwrap();
            let policy = WeightTable::new();
            let mut rng = RngStream::new(budget as u64);
            for _ in 0..200 {
                let seq = playout(&p, &policy, &mut rng).unwrap();
                assert!(seq.moves.len() <= budget);
                assert!(seq.score >= 1.0);
                let end = replay(&p, &seq.moves).unwrap();
                assert_eq!(evaluate(&end).unwrap(), seq.score);
                if budget <= BRUTE_FORCE_CAP {
                    assert!(seq.score <= brute_force_max(budget).unwrap());
                }
            }
        }
    }
}
