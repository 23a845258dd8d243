//! Pattern graphs, host graphs and the brute-force containment oracle.

mod bipartite;
pub mod census;

pub use bipartite::{
    enumerate_degree_sequence, enumerate_type, sample_bipartite, BipartiteType, PartiteLabel,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on host-graph size for the explicit oracle.
pub const DEFAULT_HOST_LIMIT: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("k must be ≥ 3 (got k = {0}); a single edge is plain search")]
    TooFewVertices(usize),
    #[error("vertex {0} is isolated; strip isolated vertices first")]
    IsolatedVertex(usize),
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range 1..={k}")]
    OutOfRange { vertex: usize, k: usize },
    #[error("invalid pattern JSON: {0}")]
    Json(String),
    #[error("host graph line {line}: {message}")]
    HostParse { line: usize, message: String },
    #[error("host graph has {n} vertices, above the limit of {limit}")]
    HostTooLarge { n: usize, limit: usize },
    #[error("invalid bipartite type: {0}")]
    BadType(String),
    #[error("could not sample a bipartite graph of type {0}")]
    SamplingFailed(String),
}

/// Index of the unordered pair `{a, b}` among all pairs over `[n]`
/// (colexicographic, independent of `n`).
pub fn pair_index(a: usize, b: usize) -> usize {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    hi * (hi - 1) / 2 + lo
}

/// Inverse of [`pair_index`].
pub fn pair_from_index(idx: usize) -> (usize, usize) {
    let mut hi = ((((8 * idx + 1) as f64).sqrt() + 1.0) / 2.0) as usize;
    while hi * (hi - 1) / 2 > idx {
        hi -= 1;
    }
    while (hi + 1) * hi / 2 <= idx {
        hi += 1;
    }
    (idx - hi * (hi - 1) / 2, hi)
}

/// Serialized pattern: `{"k": 3, "edges": [[1,2],[1,3],[2,3]]}`, 1-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternFile {
    pub k: usize,
    pub edges: Vec<[usize; 2]>,
}

/// The fixed pattern `H`, 0-based internally.
///
/// Construction moves one minimum-degree vertex to the last position (ties
/// go to the smallest original index); the others keep their relative order.
/// Edges keep their input order with endpoints normalized to `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatternGraph {
    k: usize,
    edges: Vec<(usize, usize)>,
    min_degree: usize,
    /// `original[v]` is the 1-based input label of internal vertex `v`.
    original: Vec<usize>,
}

impl PatternGraph {
    /// Builds from 0-based edges and canonicalizes the vertex order.
    pub fn from_edges(k: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if k < 3 {
            return Err(GraphError::TooFewVertices(k));
        }
        let mut seen = std::collections::HashSet::new();
        let mut degree = vec![0usize; k];
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= k {
                    return Err(GraphError::OutOfRange { vertex: v + 1, k });
                }
            }
            if a == b {
                return Err(GraphError::Loop(a + 1));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0 + 1, key.1 + 1));
            }
            degree[a] += 1;
            degree[b] += 1;
        }
        if let Some(v) = degree.iter().position(|&d| d == 0) {
            return Err(GraphError::IsolatedVertex(v + 1));
        }
        let min_degree = *degree.iter().min().unwrap();
        let last = degree.iter().position(|&d| d == min_degree).unwrap();
        let mut order: Vec<usize> = (0..k).filter(|&v| v != last).collect();
        order.push(last);
        let mut new_index = vec![0; k];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let edges = edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (new_index[a], new_index[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        Ok(PatternGraph {
            k,
            edges,
            min_degree,
            original: order.iter().map(|v| v + 1).collect(),
        })
    }

    pub fn from_file(file: &PatternFile) -> Result<Self, GraphError> {
        let mut edges = Vec::with_capacity(file.edges.len());
        for [a, b] in &file.edges {
            for &v in [a, b] {
                if v == 0 || v > file.k {
                    return Err(GraphError::OutOfRange { vertex: v, k: file.k });
                }
            }
            edges.push((a - 1, b - 1));
        }
        Self::from_edges(file.k, &edges)
    }

    pub fn to_file(&self) -> PatternFile {
        PatternFile {
            k: self.k,
            edges: self.edges.iter().map(|&(a, b)| [a + 1, b + 1]).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Minimum degree `d`; vertex `k-1` (0-based) attains it.
    pub fn min_degree(&self) -> usize {
        self.min_degree
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn original_labels(&self) -> &[usize] {
        &self.original
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.contains(&key)
    }

    /// Edges of the subgraph induced by the first `u` vertices, in edge order.
    pub fn prefix_edges(&self, u: usize) -> Vec<(usize, usize)> {
        self.edges.iter().copied().filter(|&(_, b)| b < u).collect()
    }

    /// Neighbours of the last vertex, ascending.
    pub fn last_neighbors(&self) -> Vec<usize> {
        let last = self.k - 1;
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if b == last { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    /// The complete graph `K_k`.
    pub fn complete(k: usize) -> Self {
        let edges: Vec<_> = (0..k)
            .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
            .collect();
        Self::from_edges(k, &edges).expect("complete graph is a valid pattern")
    }
}

/// Parses the JSON pattern format.
pub fn parse_pattern(text: &str) -> Result<PatternGraph, GraphError> {
    let file: PatternFile =
        serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
    PatternGraph::from_file(&file)
}

/// Undirected simple host graph stored as one adjacency bitset per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HostGraph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl HostGraph {
    pub fn new(n: usize) -> Result<Self, GraphError> {
        Self::with_limit(n, DEFAULT_HOST_LIMIT)
    }

    pub fn with_limit(n: usize, limit: usize) -> Result<Self, GraphError> {
        if n > limit {
            return Err(GraphError::HostTooLarge { n, limit });
        }
        let words = n.div_ceil(64).max(1);
        Ok(HostGraph {
            n,
            words,
            adj: vec![0; n * words],
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::with_limit(n, n.max(DEFAULT_HOST_LIMIT))?;
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `{a, b}`; loops are ignored.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a < self.n && b < self.n, "vertex out of range");
        if a == b {
            return;
        }
        self.adj[a * self.words + b / 64] |= 1 << (b % 64);
        self.adj[b * self.words + a / 64] |= 1 << (a % 64);
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.adj[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v * self.words..(v + 1) * self.words]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.has_edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Parses `u v` lines (1-based). `#` starts a comment. With `n = None`
    /// the vertex count is the largest endpoint seen.
    pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| GraphError::HostParse {
                line: lineno + 1,
                message: message.to_string(),
            };
            let mut parts = line.split_whitespace();
            let a: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("expected two vertex numbers"))?;
            let b: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("expected two vertex numbers"))?;
            if parts.next().is_some() {
                return Err(err("trailing tokens"));
            }
            if a == 0 || b == 0 {
                return Err(err("vertices are 1-based"));
            }
            if a == b {
                return Err(err("loops are not allowed"));
            }
            edges.push((a - 1, b - 1));
        }
        let needed = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        let n = n.unwrap_or(needed);
        if needed > n {
            return Err(GraphError::HostParse {
                line: 0,
                message: format!("vertex {needed} exceeds n = {n}"),
            });
        }
        let mut g = Self::new(n)?;
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        Ok(g)
    }
}

/// Lexicographically first injection `i ↦ a_i` mapping pattern edges onto
/// host edges (subgraph, not induced). `None` when there is none or `n < k`.
pub fn contains_subgraph(g: &HostGraph, h: &PatternGraph) -> Option<Vec<usize>> {
    let k = h.k();
    if g.n() < k {
        return None;
    }
    let mut earlier: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &(a, b) in h.edges() {
        earlier[b].push(a);
    }
    let mut assignment = Vec::with_capacity(k);
    let mut used = vec![false; g.n()];
    if extend(g, &earlier, &mut assignment, &mut used) {
        Some(assignment)
    } else {
        None
    }
}

fn extend(
    g: &HostGraph,
    earlier: &[Vec<usize>],
    assignment: &mut Vec<usize>,
    used: &mut [bool],
) -> bool {
    let i = assignment.len();
    if i == earlier.len() {
        return true;
    }
    for v in 0..g.n() {
        if used[v] || !earlier[i].iter().all(|&j| g.has_edge(v, assignment[j])) {
            continue;
        }
        used[v] = true;
        assignment.push(v);
        if extend(g, earlier, assignment, used) {
            return true;
        }
        assignment.pop();
        used[v] = false;
    }
    false
}

/// `true` iff the edges of `slots` present in `answers` already contain a
/// copy of `h`, so every host agreeing with `answers` on `slots` contains it.
pub fn is_certificate(slots: &[(usize, usize)], answers: &HostGraph, h: &PatternGraph) -> bool {
    let mut positive = HostGraph::with_limit(answers.n(), answers.n().max(DEFAULT_HOST_LIMIT))
        .expect("limit chosen to fit");
    for &(a, b) in slots {
        if answers.has_edge(a, b) {
            positive.add_edge(a, b);
        }
    }
    contains_subgraph(&positive, h).is_some()
}

/// Host graph consisting of exactly the copy of `h` on `witness`.
pub fn witness_host(n: usize, h: &PatternGraph, witness: &[usize]) -> HostGraph {
    let mut g = HostGraph::with_limit(n, n.max(DEFAULT_HOST_LIMIT)).expect("limit chosen to fit");
    for &(i, j) in h.edges() {
        g.add_edge(witness[i], witness[j]);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> PatternGraph {
        parse_pattern(r#"{"k":3,"edges":[[1,2],[1,3],[2,3]]}"#).unwrap()
    }

    #[test]
    fn parse_triangle_and_path() {
        let t = triangle();
        assert_eq!((t.k(), t.m(), t.min_degree()), (3, 3, 2));
        let p = parse_pattern(r#"{"k":3,"edges":[[1,2],[2,3]]}"#).unwrap();
        assert_eq!(p.min_degree(), 1);
        assert_eq!(p.degree(2), 1);
        // original vertex 1 is the first degree-1 vertex
        assert_eq!(p.original_labels()[2], 1);
    }

    #[test]
    fn parse_rejects_bad_patterns() {
        let bad = |s: &str| parse_pattern(s).unwrap_err();
        assert_eq!(bad(r#"{"k":2,"edges":[[1,2]]}"#), GraphError::TooFewVertices(2));
        assert!(bad(r#"{"k":2,"edges":[[1,2]]}"#).to_string().contains("k must be ≥ 3"));
        assert_eq!(bad(r#"{"k":3,"edges":[[1,2]]}"#), GraphError::IsolatedVertex(3));
        assert_eq!(bad(r#"{"k":3,"edges":[[1,1],[2,3]]}"#), GraphError::Loop(1));
        assert_eq!(
            bad(r#"{"k":3,"edges":[[1,2],[2,1],[2,3]]}"#),
            GraphError::DuplicateEdge(1, 2)
        );
        assert!(matches!(
            bad(r#"{"k":3,"edges":[[1,4],[2,3]]}"#),
            GraphError::OutOfRange { vertex: 4, .. }
        ));
        assert!(matches!(bad("not json"), GraphError::Json(_)));
    }

    #[test]
    fn star_puts_leaf_last() {
        let star = PatternGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.min_degree(), 1);
        assert_eq!(star.degree(3), 1);
        assert_eq!(star.prefix_edges(3).len(), 2);
    }

    #[test]
    fn pair_index_round_trip() {
        for hi in 1..40 {
            for lo in 0..hi {
                let idx = pair_index(lo, hi);
                assert_eq!(pair_from_index(idx), (lo, hi));
                assert_eq!(pair_index(hi, lo), idx);
            }
        }
    }

    #[test]
    fn clique_contains_triangle_cycle_does_not() {
        let k4 = HostGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(contains_subgraph(&k4, &triangle()), Some(vec![0, 1, 2]));
        let c4 = HostGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(contains_subgraph(&c4, &triangle()), None);
        assert_eq!(contains_subgraph(&HostGraph::new(2).unwrap(), &triangle()), None);
    }

    fn brute_force(g: &HostGraph, h: &PatternGraph) -> bool {
        use itertools::Itertools;
        (0..g.n())
            .permutations(h.k())
            .any(|a| h.edges().iter().all(|&(i, j)| g.has_edge(a[i], a[j])))
    }

    #[test]
    fn random_hosts_agree_with_exhaustive_check() {
        let path = parse_pattern(r#"{"k":3,"edges":[[1,2],[2,3]]}"#).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let mut g = HostGraph::new(8).unwrap();
            for a in 0..8 {
                for b in a + 1..8 {
                    if rng.gen_bool(0.5) {
                        g.add_edge(a, b);
                    }
                }
            }
            for h in [&path, &triangle()] {
                let w = contains_subgraph(&g, h);
                assert_eq!(w.is_some(), brute_force(&g, h));
                if let Some(w) = w {
                    assert!(h.edges().iter().all(|&(i, j)| g.has_edge(w[i], w[j])));
                }
            }
        }
    }

    #[test]
    fn certificates() {
        let h = triangle();
        let host = HostGraph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (3, 4)]).unwrap();
        assert!(is_certificate(&[(0, 1), (0, 2), (1, 2)], &host, &h));
        assert!(!is_certificate(&[(0, 1), (0, 2)], &host, &h));
        // slots outside the host's edges do not count
        assert!(!is_certificate(&[(0, 1), (0, 2), (3, 1)], &host, &h));
    }

    #[test]
    fn edge_list_parsing() {
        let g = HostGraph::parse_edge_list("# triangle\n1 2\n2 3\n\n3 1 # closing\n", None).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(HostGraph::parse_edge_list("1 x", None).is_err());
        assert!(HostGraph::parse_edge_list("0 1", None).is_err());
        assert!(HostGraph::parse_edge_list("1 70", None).is_err());
        assert_eq!(HostGraph::parse_edge_list("1 2", Some(6)).unwrap().n(), 6);
    }
}
