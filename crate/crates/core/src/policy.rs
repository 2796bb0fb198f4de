//! Playout policy: a sparse table of move-code weights and the Gibbs
//! (softmax) distribution it induces over a set of legal moves.

use rustc_hash::FxHashMap;

use crate::search::SearchError;

/// Integer identity of a move, used to index the policy.
pub type MoveCode = u64;

/// Sparse map from move codes to real weights. Absent codes weigh `0.0`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightTable {
    entries: FxHashMap<MoveCode, f64>,
}

impl WeightTable {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn get(&self, code: MoveCode) -> f64 {
        self.entries.get(&code).copied().unwrap_or(0.0)
    }

    /// Stores `weight` for `code`.
    ///
    /// Panics if `weight` is not finite; the table never holds NaN or
    /// infinities.
    pub fn set(&mut self, code: MoveCode, weight: f64) {
        assert!(weight.is_finite(), "policy weight must be finite, got {weight}");
        self.entries.insert(code, weight);
    }

    #[inline]
    pub fn add(&mut self, code: MoveCode, delta: f64) {
        let w = self.entries.entry(code).or_insert(0.0);
        *w += delta;
        debug_assert!(w.is_finite());
    }

    /// Number of explicitly stored codes.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (MoveCode, f64)> + '_ {
        self.entries.iter().map(|(&c, &w)| (c, w))
    }
}

impl FromIterator<(MoveCode, f64)> for WeightTable {
    fn from_iter<I: IntoIterator<Item = (MoveCode, f64)>>(iter: I) -> Self {
        let mut table = WeightTable::new();
        for (code, weight) in iter {
            table.set(code, weight);
        }
        table
    }
}

/// Softmax of `weights`, shifted by the maximum weight before
/// exponentiation so large magnitudes do not overflow.
pub fn softmax(weights: &[f64]) -> Result<Vec<f64>, SearchError> {
    let mut out = Vec::with_capacity(weights.len());
    softmax_into(weights, &mut out)?;
    Ok(out)
}

/// Like [`softmax`] but writes into a reusable buffer.
pub fn softmax_into(weights: &[f64], out: &mut Vec<f64>) -> Result<(), SearchError> {
    out.clear();
    if weights.is_empty() {
        return Err(SearchError::NoLegalMoves);
    }
    let mut max = f64::NEG_INFINITY;
    for &w in weights {
        if !w.is_finite() {
            return Err(SearchError::NonFiniteWeight(w));
        }
        max = max.max(w);
    }
    let mut z = 0.0;
    for &w in weights {
        let e = (w - max).exp();
        z += e;
        out.push(e);
    }
    for p in out.iter_mut() {
        *p /= z;
    }
    Ok(())
}

/// Picks an index from `probabilities` using a uniform draw `u` in `[0, 1)`.
/// Falls back to the last index when rounding leaves the cumulative sum
/// slightly below `u`.
pub(crate) fn sample_index(probabilities: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probabilities.len() - 1
}
