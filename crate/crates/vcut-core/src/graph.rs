//! Undirected simple graphs on dense vertex indices `0..n`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while building or parsing a [`Graph`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: malformed header, expected \"n m\"")]
    MalformedHeader { line: usize },
    #[error("line {line}: malformed edge, expected \"u v\"")]
    MalformedEdge { line: usize },
    #[error("line {line}: endpoint {vertex} out of range for n = {n}")]
    OutOfRange {
        line: usize,
        vertex: usize,
        n: usize,
    },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {u} {v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("header declares {declared} edges but {found} were listed")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("cannot remove every vertex of the graph")]
    RemovesAll,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
}

/// An undirected simple graph with sorted adjacency lists.
///
/// Equality is structural: same `n` and the same edge set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range endpoints. Line numbers in errors are 1-based edge positions
    /// offset by the header line.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::new(n);
        for (i, (u, v)) in edges.into_iter().enumerate() {
            g.insert_checked(u, v, i + 2)?;
        }
        Ok(g)
    }

    fn insert_checked(&mut self, u: usize, v: usize, line: usize) -> Result<(), GraphError> {
        let n = self.n();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::OutOfRange { line, vertex: x, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop { line, vertex: u });
        }
        if !self.add_edge(u, v) {
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            return Err(GraphError::DuplicateEdge { line, u: a, v: b });
        }
        Ok(())
    }

    /// Inserts `{u, v}`; returns `false` if the edge already exists.
    ///
    /// # Panics
    /// On self-loops or out-of-range endpoints.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u != v, "self-loop at {u}");
        assert!(u < self.n() && v < self.n(), "endpoint out of range");
        match self.adj[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.m += 1;
                true
            }
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn is_complete(&self) -> bool {
        let n = self.n();
        self.m == n * n.saturating_sub(1) / 2
    }

    /// Hop distances from `src`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected component index per vertex, numbered in order of smallest member.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n()];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |c| c + 1)
    }

    /// True iff one search from vertex 0 reaches every vertex.
    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    /// Induced subgraph on `V \ removed`, re-indexed densely. The returned map
    /// sends new indices to original ones.
    pub fn remove_vertices(&self, removed: &[usize]) -> Result<(Graph, Vec<usize>), GraphError> {
        let mut gone = vec![false; self.n()];
        for &v in removed {
            if v >= self.n() {
                return Err(GraphError::VertexOutOfRange(v));
            }
            gone[v] = true;
        }
        let kept: Vec<usize> = (0..self.n()).filter(|&v| !gone[v]).collect();
        if kept.is_empty() {
            return Err(GraphError::RemovesAll);
        }
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in kept.iter().enumerate() {
            index[v] = i;
        }
        let mut adj = vec![Vec::new(); kept.len()];
        let mut m = 0;
        for (i, &v) in kept.iter().enumerate() {
            for &w in &self.adj[v] {
                if !gone[w] {
                    adj[i].push(index[w]);
                    if v < w {
                        m += 1;
                    }
                }
            }
        }
        Ok((Graph { adj, m }, kept))
    }

    /// Same graph with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::new(self.n());
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }
}

/// Summary statistics of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    /// Hop diameter; `None` when the graph is disconnected.
    pub diameter: Option<usize>,
    pub max_degree: usize,
    pub is_connected: bool,
}

/// Exact statistics; the diameter comes from a breadth-first search per source.
pub fn stats(g: &Graph) -> GraphStats {
    let mut diameter = Some(0);
    for s in 0..g.n() {
        let ecc = g.bfs_distances(s).into_iter().max().unwrap_or(0);
        if ecc == usize::MAX {
            diameter = None;
            break;
        }
        diameter = diameter.map(|d| d.max(ecc));
    }
    GraphStats {
        n: g.n(),
        m: g.m(),
        diameter,
        max_degree: g.max_degree(),
        is_connected: diameter.is_some(),
    }
}

/// Parses the edge-list text format: a header line `"n m"` followed by `m`
/// lines `"u v"`. A trailing newline is optional.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or(GraphError::MalformedHeader { line: 1 })?;
    let (n, m) = parse_pair(header).ok_or(GraphError::MalformedHeader { line: 1 })?;
    let mut g = Graph::new(n);
    let mut found = 0;
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if line.is_empty() && i >= m {
            continue;
        }
        let (u, v) = parse_pair(line).ok_or(GraphError::MalformedEdge { line: line_no })?;
        g.insert_checked(u, v, line_no)?;
        found += 1;
    }
    if found != m {
        return Err(GraphError::EdgeCountMismatch { declared: m, found });
    }
    Ok(g)
}

fn parse_pair(line: &str) -> Option<(usize, usize)> {
    let (a, b) = line.split_once(' ')?;
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|c| c.is_ascii_digit());
    if !digits(a) || !digits(b) {
        return None;
    }
    Some((a.parse().ok()?, b.parse().ok()?))
}

/// Canonical edge-list text: header, then edges `u < v` in lexicographic
/// order, every line newline-terminated.
pub fn emit_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + 12 * g.m());
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn parses_triangle_and_square() {
        let k3 = parse_edge_list("3 3\n0 1\n1 2\n0 2").unwrap();
        assert_eq!(k3, Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap());
        let c4 = parse_edge_list("4 4\n0 1\n1 2\n2 3\n3 0").unwrap();
        assert_eq!(c4, cycle(4));
    }

    #[test]
    fn parse_errors_name_the_line() {
        assert_eq!(
            parse_edge_list("2 1\n0 0"),
            Err(GraphError::SelfLoop { line: 2, vertex: 0 })
        );
        assert_eq!(
            parse_edge_list("3 2\n0 1\n1 0\n"),
            Err(GraphError::DuplicateEdge {
                line: 3,
                u: 0,
                v: 1
            })
        );
        assert_eq!(
            parse_edge_list("3 1\n0 3\n"),
            Err(GraphError::OutOfRange {
                line: 2,
                vertex: 3,
                n: 3
            })
        );
        assert_eq!(
            parse_edge_list("3\n"),
            Err(GraphError::MalformedHeader { line: 1 })
        );
        assert_eq!(
            parse_edge_list("3 1\n0  1\n"),
            Err(GraphError::MalformedEdge { line: 2 })
        );
        assert_eq!(
            parse_edge_list("3 2\n0 1\n"),
            Err(GraphError::EdgeCountMismatch {
                declared: 2,
                found: 1
            })
        );
    }

    #[test]
    fn emits_canonical_text() {
        let k3 = parse_edge_list("3 3\n1 2\n0 1\n0 2\n").unwrap();
        assert_eq!(emit_edge_list(&k3), "3 3\n0 1\n0 2\n1 2\n");
        assert_eq!(emit_edge_list(&Graph::new(1)), "1 0\n");
        assert_eq!(emit_edge_list(&cycle(4)), "4 4\n0 1\n0 3\n1 2\n2 3\n");
    }

    #[test]
    fn stats_of_small_families() {
        let c6 = stats(&cycle(6));
        assert_eq!((c6.diameter, c6.max_degree), (Some(3), 2));
        let p5 = Graph::from_edges(5, (0..4).map(|i| (i, i + 1))).unwrap();
        assert_eq!(stats(&p5).diameter, Some(4));
        assert_eq!(stats(&p5).max_degree, 2);
        let mut k4 = Graph::new(4);
        for u in 0..4 {
            for v in u + 1..4 {
                k4.add_edge(u, v);
            }
        }
        let s = stats(&k4);
        assert_eq!((s.diameter, s.max_degree, s.m), (Some(1), 3, 6));
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(stats(&split).diameter, None);
        assert!(!stats(&split).is_connected);
    }

    #[test]
    fn connectivity_checks() {
        assert!(cycle(5).is_connected());
        assert!(!Graph::from_edges(4, [(0, 1), (2, 3)])
            .unwrap()
            .is_connected());
        assert!(Graph::new(1).is_connected());
    }

    #[test]
    fn remove_vertices_reindexes() {
        let (p3, map) = cycle(4).remove_vertices(&[0]).unwrap();
        assert_eq!(p3, Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap());
        assert_eq!(map, vec![1, 2, 3]);

        let mut k4 = Graph::new(4);
        for u in 0..4 {
            for v in u + 1..4 {
                k4.add_edge(u, v);
            }
        }
        let (e, _) = k4.remove_vertices(&[0, 1]).unwrap();
        assert_eq!((e.n(), e.m()), (2, 1));

        let star = Graph::from_edges(5, (1..5).map(|i| (0, i))).unwrap();
        let (leaves, _) = star.remove_vertices(&[0]).unwrap();
        assert_eq!((leaves.n(), leaves.m()), (4, 0));
        assert_eq!(leaves.component_count(), 4);

        assert_eq!(
            cycle(3).remove_vertices(&[0, 1, 2]),
            Err(GraphError::RemovesAll)
        );
    }
}
