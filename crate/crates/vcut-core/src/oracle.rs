//! Exact sequential ground truth for vertex cuts.
//!
//! `s`-`t` vertex connectivity is computed on the vertex-split network (every
//! vertex other than the terminals has unit capacity, edges are uncapacitated)
//! with breadth-first augmenting paths. The residual network is never
//! materialized: flow is stored as a `pred`/`succ` pointer pair per vertex.

use std::collections::VecDeque;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::verdict::CutVerdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("source and sink coincide ({0})")]
    SameTerminal(usize),
    #[error("terminals {0} and {1} are adjacent; no vertex cut separates them")]
    AdjacentTerminals(usize, usize),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("cap must be at least 1")]
    ZeroCap,
    #[error("graph must have at least two vertices")]
    TooSmall,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("kappa {kappa} outside 1..={max} for n = {n}")]
    KappaOutOfRange { kappa: usize, max: usize, n: usize },
    #[error("brute force is limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("candidate cut is empty")]
    EmptyCut,
    #[error("candidate cut covers every vertex")]
    CutCoversAll,
}

/// Menger witness for a pair of non-adjacent terminals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StCutCertificate {
    /// Number of internally vertex-disjoint paths found, at most `cap + 1`.
    pub value: usize,
    /// Minimum separator, present when `value <= cap`.
    pub cut: Option<Vec<usize>>,
    /// The disjoint paths, each starting at `s` and ending at `t`.
    pub paths: Vec<Vec<usize>>,
}

/// Global vertex connectivity with a witness cut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    /// κ(G); when `capped` this is `cap + 1`, a lower bound.
    pub connectivity: usize,
    /// Sorted separator of size `connectivity`; empty for complete or
    /// disconnected graphs and when capped.
    pub witness_cut: Vec<usize>,
    pub capped: bool,
    pub complete: bool,
    pub disconnected: bool,
}

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Parent {
    Unset,
    /// `in` copy reached from the `out` copy of this neighbor.
    Forward(usize),
    /// `out` copy reached from the `in` copy of this neighbor (cancels flow).
    Reverse(usize),
    /// Reached from the other copy of the same vertex.
    Internal,
}

#[derive(Clone, Copy)]
enum Copy {
    In(usize),
    Out(usize),
}

/// Unit vertex-capacity flow between a fixed pair of terminals.
struct SplitFlow<'g> {
    g: &'g Graph,
    pred: Vec<usize>,
    succ: Vec<usize>,
    in_parent: Vec<Parent>,
    out_parent: Vec<Parent>,
    queue: VecDeque<Copy>,
}

impl<'g> SplitFlow<'g> {
    fn new(g: &'g Graph) -> Self {
        let n = g.n();
        Self {
            g,
            pred: vec![NONE; n],
            succ: vec![NONE; n],
            in_parent: vec![Parent::Unset; n],
            out_parent: vec![Parent::Unset; n],
            queue: VecDeque::new(),
        }
    }

    fn reset(&mut self) {
        self.pred.fill(NONE);
        self.succ.fill(NONE);
    }

    /// Searches the residual network from `s`; on success flips the path and
    /// returns `true`. On failure the parent arrays describe the reachable set.
    fn augment(&mut self, s: usize, t: usize) -> bool {
        self.in_parent.fill(Parent::Unset);
        self.out_parent.fill(Parent::Unset);
        self.queue.clear();
        self.out_parent[s] = Parent::Internal;
        self.queue.push_back(Copy::Out(s));
        let mut last = NONE;
        'search: while let Some(c) = self.queue.pop_front() {
            match c {
                Copy::Out(u) => {
                    if u != s && self.pred[u] != NONE && self.in_parent[u] == Parent::Unset {
                        self.in_parent[u] = Parent::Internal;
                        self.queue.push_back(Copy::In(u));
                    }
                    for &w in self.g.neighbors(u) {
                        if w == t {
                            last = u;
                            break 'search;
                        }
                        if w != s && self.in_parent[w] == Parent::Unset {
                            self.in_parent[w] = Parent::Forward(u);
                            self.queue.push_back(Copy::In(w));
                        }
                    }
                }
                Copy::In(w) => {
                    let p = self.pred[w];
                    if p == NONE {
                        if self.out_parent[w] == Parent::Unset {
                            self.out_parent[w] = Parent::Internal;
                            self.queue.push_back(Copy::Out(w));
                        }
                    } else if p != s && self.out_parent[p] == Parent::Unset {
                        self.out_parent[p] = Parent::Reverse(w);
                        self.queue.push_back(Copy::Out(p));
                    }
                }
            }
        }
        if last == NONE {
            return false;
        }
        self.succ[last] = t;
        let mut cur = Copy::Out(last);
        loop {
            match cur {
                Copy::Out(x) => {
                    if x == s {
                        break;
                    }
                    match self.out_parent[x] {
                        Parent::Internal => cur = Copy::In(x),
                        Parent::Reverse(w) => {
                            if self.succ[x] == w {
                                self.succ[x] = NONE;
                            }
                            if self.pred[w] == x {
                                self.pred[w] = NONE;
                            }
                            cur = Copy::In(w);
                        }
                        _ => unreachable!("broken residual parent chain"),
                    }
                }
                Copy::In(x) => match self.in_parent[x] {
                    Parent::Forward(p) => {
                        self.pred[x] = p;
                        if p != s {
                            self.succ[p] = x;
                        }
                        cur = Copy::Out(p);
                    }
                    Parent::Internal => cur = Copy::Out(x),
                    _ => unreachable!("broken residual parent chain"),
                },
            }
        }
        true
    }

    /// Separator read off the last failed search.
    fn cut(&self, s: usize, t: usize) -> Vec<usize> {
        (0..self.g.n())
            .filter(|&v| v != s && v != t)
            .filter(|&v| self.in_parent[v] != Parent::Unset && self.out_parent[v] == Parent::Unset)
            .collect()
    }

    fn paths(&self, s: usize, t: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for &first in self.g.neighbors(s) {
            if self.pred[first] != s {
                continue;
            }
            let mut path = vec![s, first];
            let mut v = first;
            while self.succ[v] != t {
                v = self.succ[v];
                path.push(v);
            }
            path.push(t);
            out.push(path);
        }
        if self.g.has_edge(s, t) {
            out.push(vec![s, t]);
        }
        out
    }

    /// Runs up to `cap + 1` augmentations; returns the flow value and, when it
    /// stays within `cap`, the minimum separator.
    fn run(&mut self, s: usize, t: usize, cap: usize) -> (usize, Option<Vec<usize>>) {
        self.reset();
        let mut value = 0;
        while value <= cap {
            if !self.augment(s, t) {
                return (value, Some(self.cut(s, t)));
            }
            value += 1;
        }
        (value, None)
    }
}

fn check_pair(g: &Graph, s: usize, t: usize) -> Result<(), OracleError> {
    for v in [s, t] {
        if v >= g.n() {
            return Err(OracleError::VertexOutOfRange(v));
        }
    }
    if s == t {
        return Err(OracleError::SameTerminal(s));
    }
    if g.has_edge(s, t) {
        return Err(OracleError::AdjacentTerminals(s, t));
    }
    Ok(())
}

/// Number of internally vertex-disjoint `s`-`t` paths, searching for at most
/// `cap + 1` of them, with a minimum separator when the value is within `cap`.
pub fn st_vertex_connectivity(
    g: &Graph,
    s: usize,
    t: usize,
    cap: usize,
) -> Result<StCutCertificate, OracleError> {
    check_pair(g, s, t)?;
    if cap == 0 {
        return Err(OracleError::ZeroCap);
    }
    let mut flow = SplitFlow::new(g);
    let (value, cut) = flow.run(s, t, cap);
    Ok(StCutCertificate {
        value,
        cut,
        paths: flow.paths(s, t),
    })
}

/// Exact vertex connectivity, or a `capped` report when it exceeds `cap`.
///
/// Uses the source-reduction argument: with κ the answer, one of the first
/// κ + 1 vertices lies outside some minimum cut, and every vertex on the far
/// side of that cut has a larger index. Pairs are scanned in lexicographic
/// order and the first pair attaining the minimum supplies the witness.
pub fn vertex_connectivity(
    g: &Graph,
    cap: Option<usize>,
) -> Result<ConnectivityReport, OracleError> {
    let n = g.n();
    if n < 2 {
        return Err(OracleError::TooSmall);
    }
    if !g.is_connected() {
        return Ok(ConnectivityReport {
            connectivity: 0,
            witness_cut: Vec::new(),
            capped: false,
            complete: false,
            disconnected: true,
        });
    }
    if g.is_complete() {
        let capped = cap.is_some_and(|c| n - 1 > c);
        return Ok(ConnectivityReport {
            connectivity: if capped { cap.unwrap_or(0) + 1 } else { n - 1 },
            witness_cut: Vec::new(),
            capped,
            complete: true,
            disconnected: false,
        });
    }
    let limit = cap.unwrap_or(n - 2).min(n - 2);
    if limit == 0 {
        return Ok(ConnectivityReport {
            connectivity: 1,
            witness_cut: Vec::new(),
            capped: true,
            complete: false,
            disconnected: false,
        });
    }
    let mut flow = SplitFlow::new(g);
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut i = 0;
    loop {
        let bound = best.as_ref().map_or(limit, |(b, _)| *b);
        if i > bound || i >= n {
            break;
        }
        for j in i + 1..n {
            let search_cap = best.as_ref().map_or(limit, |(b, _)| b - 1);
            if search_cap == 0 {
                break;
            }
            if g.has_edge(i, j) {
                continue;
            }
            let (value, cut) = flow.run(i, j, search_cap);
            if let Some(cut) = cut {
                best = Some((value, cut));
            }
        }
        i += 1;
    }
    Ok(match best {
        Some((connectivity, witness_cut)) => ConnectivityReport {
            connectivity,
            witness_cut,
            capped: false,
            complete: false,
            disconnected: false,
        },
        None => ConnectivityReport {
            connectivity: limit + 1,
            witness_cut: Vec::new(),
            capped: true,
            complete: false,
            disconnected: false,
        },
    })
}

/// Reference semantics for the distributed search: a cut of size at most
/// `kappa` if one exists.
pub fn has_cut_at_most(g: &Graph, kappa: usize) -> Result<CutVerdict, OracleError> {
    let n = g.n();
    if kappa < 1 || kappa + 2 > n {
        return Err(OracleError::KappaOutOfRange {
            kappa,
            max: n.saturating_sub(2),
            n,
        });
    }
    let report = vertex_connectivity(g, Some(kappa))?;
    if report.disconnected {
        return Err(OracleError::Disconnected);
    }
    Ok(
        if !report.capped && !report.complete && report.connectivity <= kappa {
            CutVerdict::Cut(report.witness_cut)
        } else {
            CutVerdict::NoCutWithin(kappa)
        },
    )
}

/// Largest graph accepted by [`brute_force_min_cut`].
pub const BRUTE_FORCE_MAX_N: usize = 12;

/// Enumerates vertex subsets by increasing size and returns the first one
/// whose removal disconnects the graph.
pub fn brute_force_min_cut(g: &Graph) -> Result<ConnectivityReport, OracleError> {
    let n = g.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(OracleError::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    if n < 2 {
        return Err(OracleError::TooSmall);
    }
    let mut report = ConnectivityReport {
        connectivity: 0,
        witness_cut: Vec::new(),
        capped: false,
        complete: false,
        disconnected: false,
    };
    if !g.is_connected() {
        report.disconnected = true;
        return Ok(report);
    }
    for size in 1..n.saturating_sub(1) {
        for cut in (0..n).combinations(size) {
            if disconnects(g, &cut) {
                report.connectivity = size;
                report.witness_cut = cut;
                return Ok(report);
            }
        }
    }
    report.connectivity = n - 1;
    report.complete = true;
    Ok(report)
}

fn disconnects(g: &Graph, cut: &[usize]) -> bool {
    g.remove_vertices(cut)
        .map(|(rest, _)| !rest.is_connected())
        .unwrap_or(false)
}

/// True iff removing `cut` leaves at least two components.
pub fn verify_cut(g: &Graph, cut: &[usize]) -> Result<bool, OracleError> {
    if cut.is_empty() {
        return Err(OracleError::EmptyCut);
    }
    let mut seen = vec![false; g.n()];
    for &v in cut {
        if v >= g.n() {
            return Err(OracleError::VertexOutOfRange(v));
        }
        seen[v] = true;
    }
    if seen.iter().all(|&b| b) {
        return Err(OracleError::CutCoversAll);
    }
    Ok(disconnects(g, cut))
}
