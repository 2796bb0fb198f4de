//! Traveling salesman with time windows.
//!
//! A tour leaves the depot (node 0), visits every customer once and
//! returns. Arriving before a window opens means waiting until it opens;
//! arriving after it closes counts one violation. The score is the
//! negated penalized cost `cost + 1e6 * violations`.
//!
//! # Instance files
//!
//! Two whitespace-separated layouts are accepted; lines that do not parse
//! as numbers (titles, column headers) are skipped, and a node with id
//! `999` ends the node list.
//!
//! * Solomon / Potvin-Bengio rows with seven columns:
//!   `id x y demand ready_time due_date service_time`.
//!   The service time of a node is added to every edge leaving it, so
//!   `cost(a, b) = dist(a, b) + service(a)`. Demand is ignored.
//! * Minimal rows with five columns: `id x y ready_time due_date`.
//!
//! An optional first line holding a single integer gives the node count
//! (depot included) and is checked against the rows. Ids must cover
//! `0..n` exactly once; row order is free. Distances are Euclidean and
//! kept in full precision.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::policy::MoveCode;
use crate::problem::Problem;

/// Penalty per violated time window.
pub const VIOLATION_PENALTY: f64 = 1e6;

/// Largest customer count accepted by [`brute_force_best`].
pub const BRUTE_FORCE_CAP: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TsptwError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("duplicate node id {0}")]
    DuplicateId(usize),
    #[error("node ids must be 0..{expected}, missing {missing}")]
    MissingId { expected: usize, missing: usize },
    #[error("node count header says {header}, found {found} nodes")]
    CountMismatch { header: usize, found: usize },
    #[error("node {node}: negative window bound")]
    NegativeWindow { node: usize },
    #[error("node {node}: window closes ({latest}) before it opens ({earliest})")]
    InvertedWindow { node: usize, earliest: f64, latest: f64 },
    #[error("invalid cost matrix: {0}")]
    BadMatrix(String),
    #[error("instance has no depot")]
    Empty,
    #[error("node {0} already visited")]
    AlreadyVisited(usize),
    #[error("node {0} out of range")]
    UnknownNode(usize),
    #[error("tour is incomplete")]
    Incomplete,
    #[error("{n} customers exceeds the enumeration cap of {cap}")]
    AboveCap { n: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub earliest: f64,
    pub latest: f64,
}

impl Window {
    pub const OPEN: Window = Window {
        earliest: 0.0,
        latest: f64::INFINITY,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsptwInstance {
    nodes: usize,
    cost: Vec<f64>,
    windows: Vec<Window>,
}

impl TsptwInstance {
    /// Builds an instance from a row-major `(n+1) x (n+1)` cost matrix and
    /// one window per node; node 0 is the depot.
    pub fn new(cost: Vec<Vec<f64>>, windows: Vec<Window>) -> Result<Self, TsptwError> {
        let nodes = cost.len();
        if nodes == 0 {
            return Err(TsptwError::Empty);
        }
        if windows.len() != nodes {
            return Err(TsptwError::BadMatrix(format!(
                "{} windows for {} nodes",
                windows.len(),
                nodes
            )));
        }
        let mut flat = Vec::with_capacity(nodes * nodes);
        for (i, row) in cost.iter().enumerate() {
            if row.len() != nodes {
                return Err(TsptwError::BadMatrix(format!("row {i} has {} entries", row.len())));
            }
            for (j, &c) in row.iter().enumerate() {
                if !c.is_finite() || c < 0.0 {
                    return Err(TsptwError::BadMatrix(format!("cost({i},{j}) = {c}")));
                }
                if i == j && c != 0.0 {
                    return Err(TsptwError::BadMatrix(format!("non-zero diagonal at {i}")));
                }
            }
            flat.extend_from_slice(row);
        }
        for (node, w) in windows.iter().enumerate() {
            if w.earliest < 0.0 || w.latest < 0.0 {
                return Err(TsptwError::NegativeWindow { node });
            }
            if w.latest < w.earliest {
                return Err(TsptwError::InvertedWindow {
                    node,
                    earliest: w.earliest,
                    latest: w.latest,
                });
            }
        }
        Ok(Self {
            nodes,
            cost: flat,
            windows,
        })
    }

    /// Euclidean instance; `service[i]` is added to every edge leaving `i`.
    pub fn from_coordinates(
        coords: &[(f64, f64)],
        windows: Vec<Window>,
        service: &[f64],
    ) -> Result<Self, TsptwError> {
        let cost = coords
            .iter()
            .enumerate()
            .map(|(i, &(xa, ya))| {
                coords
                    .iter()
                    .enumerate()
                    .map(|(j, &(xb, yb))| {
                        if i == j {
                            0.0
                        } else {
                            (xa - xb).hypot(ya - yb) + service.get(i).copied().unwrap_or(0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(cost, windows)
    }

    pub fn parse(text: &str) -> Result<Self, TsptwError> {
        let mut header: Option<usize> = None;
        let mut rows: BTreeMap<usize, ((f64, f64), Window, f64)> = BTreeMap::new();
        let mut seen_rows = false;

        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            let nums: Option<Vec<f64>> = fields.iter().map(|f| f.parse::<f64>().ok()).collect();
            let Some(nums) = nums else {
                if seen_rows {
                    return Err(TsptwError::Malformed {
                        line: line_no,
                        msg: format!("unexpected text {line:?}"),
                    });
                }
                continue;
            };
            let malformed = |msg: &str| TsptwError::Malformed {
                line: line_no,
                msg: msg.to_string(),
            };
            let as_id = |v: f64| -> Result<usize, TsptwError> {
                if v >= 0.0 && v.fract() == 0.0 {
                    Ok(v as usize)
                } else {
                    Err(malformed("node id must be a non-negative integer"))
                }
            };
            match nums.len() {
                1 if !seen_rows && header.is_none() => header = Some(as_id(nums[0])?),
                5 | 7 => {
                    let id = as_id(nums[0])?;
                    if id == 999 {
                        break;
                    }
                    let (earliest, latest, service) = if nums.len() == 7 {
                        (nums[4], nums[5], nums[6])
                    } else {
                        (nums[3], nums[4], 0.0)
                    };
                    if earliest < 0.0 || latest < 0.0 {
                        return Err(TsptwError::NegativeWindow { node: id });
                    }
                    if latest < earliest {
                        return Err(TsptwError::InvertedWindow {
                            node: id,
                            earliest,
                            latest,
                        });
                    }
                    if service < 0.0 {
                        return Err(malformed("negative service time"));
                    }
                    let row = ((nums[1], nums[2]), Window { earliest, latest }, service);
                    if rows.insert(id, row).is_some() {
                        return Err(TsptwError::DuplicateId(id));
                    }
                    seen_rows = true;
                }
                n => {
                    if seen_rows || header.is_some() {
                        return Err(malformed(&format!("expected 5 or 7 columns, got {n}")));
                    }
                    // numeric preamble before the node table (e.g. vehicle data)
                }
            }
        }

        if rows.is_empty() {
            return Err(TsptwError::Empty);
        }
        let found = rows.len();
        if let Some(h) = header {
            if h != found {
                return Err(TsptwError::CountMismatch { header: h, found });
            }
        }
        if let Some(missing) = (0..found).find(|i| !rows.contains_key(i)) {
            return Err(TsptwError::MissingId {
                expected: found,
                missing,
            });
        }
        let coords: Vec<(f64, f64)> = rows.values().map(|r| r.0).collect();
        let windows: Vec<Window> = rows.values().map(|r| r.1).collect();
        let service: Vec<f64> = rows.values().map(|r| r.2).collect();
        Self::from_coordinates(&coords, windows, &service)
    }

    /// Number of customers (depot excluded).
    pub fn customers(&self) -> usize {
        self.nodes - 1
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    #[inline]
    pub fn cost(&self, a: usize, b: usize) -> f64 {
        self.cost[a * self.nodes + b]
    }

    pub fn window(&self, node: usize) -> Window {
        self.windows[node]
    }

    pub fn max_cost(&self) -> f64 {
        self.cost.iter().copied().fold(0.0, f64::max)
    }

    pub fn root(&self) -> TourState {
        let mut visited = vec![false; self.nodes];
        visited[0] = true;
        let mut state = TourState {
            tour: vec![0],
            visited,
            time: self.windows[0].earliest,
            violations: 0,
            cost: 0.0,
            closed: false,
        };
        if self.nodes == 1 {
            self.close(&mut state);
        }
        state
    }

    /// Travels from the current node to `next`. Visiting the last customer
    /// also applies the closing leg back to the depot.
    pub fn advance(&self, state: &TourState, next: usize) -> Result<TourState, TsptwError> {
        if next >= self.nodes {
            return Err(TsptwError::UnknownNode(next));
        }
        if state.visited[next] {
            return Err(TsptwError::AlreadyVisited(next));
        }
        let mut s = state.clone();
        self.step(&mut s, next);
        Ok(s)
    }

    fn step(&self, state: &mut TourState, next: usize) {
        self.travel(state, next);
        state.visited[next] = true;
        state.tour.push(next);
        if state.tour.len() == self.nodes {
            self.close(state);
        }
    }

    fn travel(&self, state: &mut TourState, next: usize) {
        let current = state.current();
        let c = self.cost(current, next);
        let arrival = state.time + c;
        let w = self.windows[next];
        if arrival > w.latest {
            state.violations += 1;
        }
        state.time = arrival.max(w.earliest);
        state.cost += c;
    }

    fn close(&self, state: &mut TourState) {
        self.travel(state, 0);
        state.closed = true;
    }

    /// Negated penalized cost of a finished tour.
    pub fn terminal_score(&self, state: &TourState) -> Result<f64, TsptwError> {
        if !state.closed {
            return Err(TsptwError::Incomplete);
        }
        Ok(state.score())
    }
}

/// A partial tour from the depot.
#[derive(Debug, Clone, PartialEq)]
pub struct TourState {
    tour: Vec<usize>,
    visited: Vec<bool>,
    time: f64,
    violations: u32,
    cost: f64,
    closed: bool,
}

impl TourState {
    pub fn tour(&self) -> &[usize] {
        &self.tour
    }

    pub fn current(&self) -> usize {
        *self.tour.last().expect("tour starts at the depot")
    }

    /// Departure time from the current node.
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn violations(&self) -> u32 {
        self.violations
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// True once every customer is visited and the tour is back at the depot.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    fn score(&self) -> f64 {
        -(self.cost + VIOLATION_PENALTY * f64::from(self.violations))
    }
}

impl fmt::Display for TourState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.tour.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join(" -> "))?;
        if self.closed {
            write!(f, " -> 0")?;
        }
        Ok(())
    }
}

/// Recovers the window-violation count from a score.
pub fn violations_of(score: f64) -> u64 {
    (-score / VIOLATION_PENALTY).floor().max(0.0) as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tsptw {
    instance: TsptwInstance,
}

impl Tsptw {
    pub fn new(instance: TsptwInstance) -> Self {
        Self { instance }
    }

    pub fn instance(&self) -> &TsptwInstance {
        &self.instance
    }
}

impl Problem for Tsptw {
    type State = TourState;
    type Move = usize;

    fn root(&self) -> TourState {
        self.instance.root()
    }

    fn is_terminal(&self, state: &TourState) -> bool {
        state.closed
    }

    fn legal_moves(&self, state: &TourState, moves: &mut Vec<usize>) {
        if state.closed {
            return;
        }
        moves.extend((1..self.instance.nodes).filter(|&n| !state.visited[n]));
    }

    fn code(&self, state: &TourState, next: &usize) -> MoveCode {
        (state.current() * self.instance.nodes + next) as MoveCode
    }

    fn play(&self, state: &mut TourState, next: &usize) {
        self.instance.step(state, *next);
    }

    fn score(&self, state: &TourState) -> f64 {
        state.score()
    }

    fn worst_score(&self) -> f64 {
        let legs = self.instance.nodes as f64;
        -(VIOLATION_PENALTY * legs + legs * self.instance.max_cost())
    }
}

/// Exact optimum over every visiting order, with its permutation of
/// customers. Evaluates each order with its own time simulation.
pub fn brute_force_best(instance: &TsptwInstance) -> Result<(f64, Vec<usize>), TsptwError> {
    let n = instance.customers();
    if n > BRUTE_FORCE_CAP {
        return Err(TsptwError::AboveCap {
            n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let evaluate = |order: &[usize]| -> f64 {
        let mut time = instance.window(0).earliest;
        let mut cost = 0.0;
        let mut late = 0u32;
        let mut at = 0;
        for &next in order.iter().chain(std::iter::once(&0)) {
            let c = instance.cost(at, next);
            let arrive = time + c;
            let w = instance.window(next);
            if arrive > w.latest {
                late += 1;
            }
            time = if arrive < w.earliest { w.earliest } else { arrive };
            cost += c;
            at = next;
        }
        -(cost + VIOLATION_PENALTY * f64::from(late))
    };

    fn permute(
        prefix: &mut Vec<usize>,
        rest: &mut Vec<usize>,
        best: &mut (f64, Vec<usize>),
        eval: &dyn Fn(&[usize]) -> f64,
    ) {
        if rest.is_empty() {
            let s = eval(prefix);
            if s > best.0 {
                *best = (s, prefix.clone());
            }
            return;
        }
        for i in 0..rest.len() {
            let node = rest.remove(i);
            prefix.push(node);
            permute(prefix, rest, best, eval);
            prefix.pop();
            rest.insert(i, node);
        }
    }

    let mut best = (f64::NEG_INFINITY, Vec::new());
    permute(&mut Vec::new(), &mut (1..=n).collect(), &mut best, &evaluate);
    Ok(best)
}
