//! SameGame: remove 4-connected groups of two or more same-colored tiles.
//! Tiles fall down into the gaps, empty columns close up to the left.
//! Removing `n` tiles scores `(n - 2)^2`; clearing the board adds 1000.
//!
//! Board files are ASCII, one row per line, top row first. Each row is
//! either a run of digits (`0` is an empty cell) or whitespace-separated
//! integers.

use std::fmt;

use thiserror::Error;

use crate::policy::MoveCode;
use crate::problem::Problem;

pub const CLEAR_BONUS: i64 = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SameGameError {
    #[error("board has no rows")]
    Empty,
    #[error("row {row} has {found} cells, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error("row {row}: invalid cell {token:?}")]
    BadCell { row: usize, token: String },
    #[error("board is {width}x{height}, dimensions must be in 1..=255")]
    BadSize { width: usize, height: usize },
    #[error("move is not a component of the current board")]
    StaleMove,
    #[error("board exceeds the exhaustive-search cap (4x4, 3 colors)")]
    AboveCap,
}

pub type Color = u8;

/// Column-major grid, `y = 0` at the bottom. Color 0 is empty.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Board {
    width: usize,
    height: usize,
    cells: Vec<Color>,
}

impl Board {
    /// Builds a board from rows listed top row first.
    pub fn from_rows(rows: &[Vec<Color>]) -> Result<Self, SameGameError> {
        let height = rows.len();
        if height == 0 {
            return Err(SameGameError::Empty);
        }
        let width = rows[0].len();
        if width == 0 || width > 255 || height > 255 {
            return Err(SameGameError::BadSize { width, height });
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != width {
                return Err(SameGameError::Ragged {
                    row,
                    found: r.len(),
                    expected: width,
                });
            }
        }
        let mut cells = vec![0; width * height];
        for x in 0..width {
            for y in 0..height {
                cells[x * height + y] = rows[height - 1 - y][x];
            }
        }
        let mut board = Self {
            width,
            height,
            cells,
        };
        board.normalize();
        Ok(board)
    }

    pub fn parse(text: &str) -> Result<Self, SameGameError> {
        let mut rows = Vec::new();
        for (row, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let cells: Result<Vec<Color>, SameGameError> = if line.contains(char::is_whitespace) {
                line.split_whitespace()
                    .map(|t| {
                        t.parse::<Color>().map_err(|_| SameGameError::BadCell {
                            row,
                            token: t.to_string(),
                        })
                    })
                    .collect()
            } else {
                line.chars()
                    .map(|c| {
                        c.to_digit(10).map(|d| d as Color).ok_or(SameGameError::BadCell {
                            row,
                            token: c.to_string(),
                        })
                    })
                    .collect()
            };
            rows.push(cells?);
        }
        Self::from_rows(&rows)
    }

    /// Inverse of [`Board::parse`] for single-digit colors: one row per
    /// line, top row first, no separators.
    pub fn to_text(&self) -> String {
        let wide = self.cells.iter().any(|&c| c > 9);
        let mut out = String::new();
        for y in (0..self.height).rev() {
            let row: Vec<String> = (0..self.width).map(|x| self.at(x, y).to_string()).collect();
            out.push_str(&row.join(if wide { " " } else { "" }));
            out.push('\n');
        }
        out
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> Color {
        self.cells[x * self.height + y]
    }

    pub fn tile_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(|&c| c == 0)
    }

    pub fn colors(&self) -> usize {
        let mut seen = [false; 256];
        for &c in &self.cells {
            seen[c as usize] = true;
        }
        seen[1..].iter().filter(|&&s| s).count()
    }

    /// Maximal 4-connected single-color groups of at least two tiles, in
    /// column-major scan order of their first cell.
    pub fn components(&self) -> Vec<SgMove> {
        let mut out = Vec::new();
        let mut seen = vec![false; self.cells.len()];
        let mut stack = Vec::new();
        let h = self.height;
        for start in 0..self.cells.len() {
            let color = self.cells[start];
            if color == 0 || seen[start] {
                continue;
            }
            let mut group: Vec<u16> = Vec::new();
            seen[start] = true;
            stack.push(start);
            while let Some(i) = stack.pop() {
                group.push(i as u16);
                let (x, y) = (i / h, i % h);
                let mut visit = |j: usize| {
                    if !seen[j] && self.cells[j] == color {
                        seen[j] = true;
                        stack.push(j);
                    }
                };
                if y > 0 {
                    visit(i - 1);
                }
                if y + 1 < h {
                    visit(i + 1);
                }
                if x > 0 {
                    visit(i - h);
                }
                if x + 1 < self.width {
                    visit(i + h);
                }
            }
            if group.len() >= 2 {
                group.sort_unstable();
                out.push(SgMove::new(color, group));
            }
        }
        out
    }

    fn remove(&mut self, cells: &[u16]) {
        for &i in cells {
            self.cells[i as usize] = 0;
        }
        self.normalize();
    }

    /// Applies gravity within each column, then shifts non-empty columns
    /// left over empty ones.
    fn normalize(&mut self) {
        let h = self.height;
        let mut target_col = 0;
        for x in 0..self.width {
            let col = &mut self.cells[x * h..(x + 1) * h];
            let mut fill = 0;
            for y in 0..h {
                if col[y] != 0 {
                    col.swap(fill, y);
                    fill += 1;
                }
            }
            if fill > 0 {
                if target_col != x {
                    let (left, right) = self.cells.split_at_mut(x * h);
                    left[target_col * h..(target_col + 1) * h].copy_from_slice(&right[..h]);
                    right[..h].fill(0);
                }
                target_col += 1;
            }
        }
    }

    /// Cells of the group containing the tile at `(x, y)`.
    pub fn group_at(&self, x: usize, y: usize) -> Option<SgMove> {
        let idx = (x * self.height + y) as u16;
        self.components().into_iter().find(|m| m.cells.contains(&idx))
    }
}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Board {}x{}\n{}", self.width, self.height, self.to_text())
    }
}

impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A removable group: its color, its sorted cell indices (column-major),
/// and a 32-bit code hashed from both.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SgMove {
    color: Color,
    cells: Vec<u16>,
    code: u32,
}

impl SgMove {
    fn new(color: Color, cells: Vec<u16>) -> Self {
        // FNV-1a over the color and the cell list
        let mut h: u32 = 0x811c_9dc5;
        let mut feed = |b: u8| {
            h ^= u32::from(b);
            h = h.wrapping_mul(0x0100_0193);
        };
        feed(color);
        for &c in &cells {
            let [lo, hi] = c.to_le_bytes();
            feed(lo);
            feed(hi);
        }
        Self {
            color,
            cells,
            code: h,
        }
    }

    pub fn color(&self) -> Color {
        self.color
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[u16] {
        &self.cells
    }

    pub fn code(&self) -> MoveCode {
        MoveCode::from(self.code)
    }

    pub fn points(&self) -> i64 {
        let n = self.cells.len() as i64;
        (n - 2) * (n - 2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SgState {
    board: Board,
    score: i64,
    moves: Vec<SgMove>,
}

impl SgState {
    pub fn new(board: Board) -> Self {
        let moves = board.components();
        let score = if board.is_empty() { CLEAR_BONUS } else { 0 };
        Self { board, score, moves }
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn score(&self) -> i64 {
        self.score
    }

    /// Every component of the current board.
    pub fn moves(&self) -> &[SgMove] {
        &self.moves
    }

    pub fn is_terminal(&self) -> bool {
        self.moves.is_empty()
    }

    fn apply_unchecked(&mut self, mv: &SgMove) {
        self.board.remove(&mv.cells);
        self.score += mv.points();
        if self.board.is_empty() {
            self.score += CLEAR_BONUS;
        }
        self.moves = self.board.components();
    }

    pub fn apply(&self, mv: &SgMove) -> Result<SgState, SameGameError> {
        if !self.moves.contains(mv) {
            return Err(SameGameError::StaleMove);
        }
        let mut next = self.clone();
        next.apply_unchecked(mv);
        Ok(next)
    }
}

/// Color with the most tiles, lowest color id on ties.
pub fn dominant_color(board: &Board) -> Option<(Color, usize)> {
    let mut counts = [0usize; 256];
    for &c in &board.cells {
        counts[c as usize] += 1;
    }
    let (color, &count) = counts
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))?;
    (count > 0).then_some((color as Color, count))
}

/// Tabu-color selection: drops moves of the dominant color that would not
/// remove all of its tiles at once (keeping pairs when `allow_pairs`).
/// Returns `moves` unchanged if nothing would be left.
pub fn tabu_filter(board: &Board, moves: &[SgMove], allow_pairs: bool) -> Vec<SgMove> {
    let Some((dominant, total)) = dominant_color(board) else {
        return moves.to_vec();
    };
    let kept: Vec<SgMove> = moves
        .iter()
        .filter(|m| {
            m.color != dominant || m.size() >= total || (allow_pairs && m.size() == 2)
        })
        .cloned()
        .collect();
    if kept.is_empty() {
        moves.to_vec()
    } else {
        kept
    }
}

#[derive(Debug, Clone)]
pub struct SameGame {
    board: Board,
    tabu: bool,
    allow_pairs: bool,
}

impl SameGame {
    /// All components are legal; see [`SameGame::with_tabu`].
    pub fn new(board: Board) -> Self {
        Self {
            board,
            tabu: false,
            allow_pairs: false,
        }
    }

    /// Restricts legal moves with [`tabu_filter`].
    pub fn with_tabu(mut self, allow_pairs: bool) -> Self {
        self.tabu = true;
        self.allow_pairs = allow_pairs;
        self
    }

    pub fn board(&self) -> &Board {
        &self.board
    }
}

impl Problem for SameGame {
    type State = SgState;
    type Move = SgMove;

    fn root(&self) -> SgState {
        SgState::new(self.board.clone())
    }

    fn is_terminal(&self, state: &SgState) -> bool {
        state.is_terminal()
    }

    fn legal_moves(&self, state: &SgState, moves: &mut Vec<SgMove>) {
        if self.tabu {
            moves.extend(tabu_filter(&state.board, &state.moves, self.allow_pairs));
        } else {
            moves.extend_from_slice(&state.moves);
        }
    }

    fn code(&self, _state: &SgState, mv: &SgMove) -> MoveCode {
        mv.code()
    }

    fn play(&self, state: &mut SgState, mv: &SgMove) {
        state.apply_unchecked(mv);
    }

    fn score(&self, state: &SgState) -> f64 {
        state.score as f64
    }

    fn worst_score(&self) -> f64 {
        0.0
    }
}

/// Exact best final score from `board` under the full move set, by
/// memoized depth-first search. Uses its own row-major grid code.
pub fn brute_force_best(board: &Board) -> Result<i64, SameGameError> {
    if board.width() > 4 || board.height() > 4 || board.colors() > 3 {
        return Err(SameGameError::AboveCap);
    }
    let (w, h) = (board.width(), board.height());
    // grid[row][col], row 0 = top
    let grid: Vec<Vec<u8>> = (0..h)
        .map(|r| (0..w).map(|c| board.at(c, h - 1 - r)).collect())
        .collect();
    let mut memo = std::collections::HashMap::new();
    Ok(oracle::best(&grid, &mut memo))
}

mod oracle {
    use std::collections::HashMap;

    pub(super) fn best(grid: &[Vec<u8>], memo: &mut HashMap<Vec<Vec<u8>>, i64>) -> i64 {
        if grid.iter().flatten().all(|&c| c == 0) {
            return super::CLEAR_BONUS;
        }
        if let Some(&v) = memo.get(grid) {
            return v;
        }
        let h = grid.len();
        let w = grid[0].len();
        let mut done = vec![vec![false; w]; h];
        let mut result = 0;
        for r in 0..h {
            for c in 0..w {
                if grid[r][c] == 0 || done[r][c] {
                    continue;
                }
                let color = grid[r][c];
                let mut group = vec![(r, c)];
                done[r][c] = true;
                let mut k = 0;
                while k < group.len() {
                    let (gr, gc) = group[k];
                    k += 1;
                    let mut near = Vec::new();
                    if gr > 0 {
                        near.push((gr - 1, gc));
                    }
                    if gr + 1 < h {
                        near.push((gr + 1, gc));
                    }
                    if gc > 0 {
                        near.push((gr, gc - 1));
                    }
                    if gc + 1 < w {
                        near.push((gr, gc + 1));
                    }
                    for (nr, nc) in near {
                        if !done[nr][nc] && grid[nr][nc] == color {
                            done[nr][nc] = true;
                            group.push((nr, nc));
                        }
                    }
                }
                if group.len() < 2 {
                    continue;
                }
                let mut next = grid.to_vec();
                for &(gr, gc) in &group {
                    next[gr][gc] = 0;
                }
                let next = settle(next);
                let n = group.len() as i64;
                result = result.max((n - 2) * (n - 2) + best(&next, memo));
            }
        }
        memo.insert(grid.to_vec(), result);
        result
    }

    fn settle(grid: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
        let h = grid.len();
        let w = grid[0].len();
        // bottom-up tiles of each non-empty column
        let columns: Vec<Vec<u8>> = (0..w)
            .map(|c| grid.iter().rev().map(|row| row[c]).filter(|&v| v != 0).collect())
            .filter(|tiles: &Vec<u8>| !tiles.is_empty())
            .collect();
        let mut out = vec![vec![0; w]; h];
        for (c, tiles) in columns.iter().enumerate() {
            for (i, &t) in tiles.iter().enumerate() {
                out[h - 1 - i][c] = t;
            }
        }
        out
    }
}
