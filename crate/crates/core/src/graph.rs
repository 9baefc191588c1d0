//! Bounded-degree simple-graph storage with truncated BFS queries.
//!
//! The generator only ever adds edges between vertices whose degree is
//! below a fixed cap, so adjacency is stored as one flat array with
//! `k_max` slots per vertex: no reallocation on the hot path, and the
//! neighbor scan of a vertex touches one cache line for small `k_max`.
//!
//! BFS state (visit marks, queue, distances, parents) lives in a
//! reusable [`BfsScratch`] with epoch-stamped marks, so issuing millions
//! of truncated queries never pays an O(n) clear.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex count must be even, got {0}")]
    OddVertexCount(usize),
    #[error("need at least {min} vertices, got {got}")]
    TooFewVertices { got: usize, min: usize },
    #[error("degree cap must be at least {min}, got {got}")]
    DegreeCapTooSmall { got: usize, min: usize },
    #[error("vertex {0} out of range (n = {1})")]
    InvalidVertex(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(usize, usize),
    #[error("degree cap {cap} exceeded at vertex {vertex}")]
    DegreeOverflow { vertex: usize, cap: usize },
    #[error("edge list parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Result of a depth-capped distance query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distance {
    /// Exact hop count; always strictly below the query cap.
    Exact(u32),
    /// The true distance is at least the carried cap.
    AtLeast(u32),
}

impl Distance {
    pub fn is_at_least(self, d: u32) -> bool {
        match self {
            Distance::Exact(x) => x >= d,
            Distance::AtLeast(c) => c >= d,
        }
    }
}

/// Girth of a graph; `Infinite` for forests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Girth {
    Finite(u32),
    Infinite,
}

impl Girth {
    pub fn at_least(self, g: u32) -> bool {
        match self {
            Girth::Finite(x) => x >= g,
            Girth::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Girth::Finite(x) => Some(x),
            Girth::Infinite => None,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(x) => write!(f, "{x}"),
            Girth::Infinite => write!(f, "inf"),
        }
    }
}

/// Simple undirected graph with a hard per-vertex degree cap.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    k_max: usize,
    /// Flat adjacency; neighbors of `v` are `adjacency[v*k_max .. v*k_max + degree[v]]`.
    adjacency: Vec<u32>,
    degree: Vec<u32>,
    edge_count: usize,
}

impl Graph {
    /// Empty graph on `n` vertices with degree cap `k_max`.
    pub fn empty(n: usize, k_max: usize) -> Self {
        Graph {
            n,
            k_max,
            adjacency: vec![0; n * k_max],
            degree: vec![0; n],
            edge_count: 0,
        }
    }

    /// The cycle 0-1-...-(n-1)-0. Requires even `n >= 4` and `k_max >= 3`.
    pub fn hamilton_cycle(n: usize, k_max: usize) -> Result<Self, GraphError> {
        if n < 4 {
            return Err(GraphError::TooFewVertices { got: n, min: 4 });
        }
        if n % 2 != 0 {
            return Err(GraphError::OddVertexCount(n));
        }
        if k_max < 3 {
            return Err(GraphError::DegreeCapTooSmall { got: k_max, min: 3 });
        }
        let mut g = Graph::empty(n, k_max);
        for v in 0..n {
            g.add_edge(v, (v + 1) % n).expect("cycle edges are simple");
        }
        Ok(g)
    }

    /// Builds a graph from an explicit edge list, validating simplicity
    /// and the degree cap.
    pub fn from_edges(
        n: usize,
        k_max: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n, k_max);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.degree[v] as usize
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v * self.k_max..v * self.k_max + self.degree[v] as usize]
    }

    pub fn min_degree(&self) -> usize {
        self.degree.iter().copied().min().unwrap_or(0) as usize
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn is_regular(&self, k: usize) -> bool {
        self.degree.iter().all(|&d| d as usize == k)
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).contains(&(v as u32))
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            return Err(GraphError::InvalidVertex(v, self.n));
        }
        Ok(())
    }

    /// Inserts the undirected edge `uv`. Rejects self-loops, duplicates
    /// and degree-cap overflows, each with a distinct error.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.has_edge(u, v) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        for &w in &[u, v] {
            if self.degree[w] as usize >= self.k_max {
                return Err(GraphError::DegreeOverflow {
                    vertex: w,
                    cap: self.k_max,
                });
            }
        }
        self.adjacency[u * self.k_max + self.degree[u] as usize] = v as u32;
        self.degree[u] += 1;
        self.adjacency[v * self.k_max + self.degree[v] as usize] = u as u32;
        self.degree[v] += 1;
        self.edge_count += 1;
        Ok(())
    }

    /// Crate-internal undo for backtracking searches: removes `uv`,
    /// which must be the most recently inserted edge (the tail of both
    /// adjacency lists). The public interface stays append-only.
    pub(crate) fn pop_edge(&mut self, u: usize, v: usize) {
        debug_assert_eq!(self.neighbors(u).last(), Some(&(v as u32)));
        debug_assert_eq!(self.neighbors(v).last(), Some(&(u as u32)));
        self.degree[u] -= 1;
        self.degree[v] -= 1;
        self.edge_count -= 1;
    }

    /// All edges as `(min, max)` pairs in lexicographic order.
    pub fn edges_sorted(&self) -> Vec<(u32, u32)> {
        let mut edges = Vec::with_capacity(self.edge_count);
        for u in 0..self.n {
            for &w in self.neighbors(u) {
                if (u as u32) < w {
                    edges.push((u as u32, w));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    /// Distance from `u` to `v`, exploring BFS layers strictly below
    /// `cap`; returns `AtLeast(cap)` when `v` is not found in them.
    pub fn truncated_distance(
        &self,
        scratch: &mut BfsScratch,
        u: usize,
        v: usize,
        cap: u32,
    ) -> Result<Distance, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        debug_assert!(cap >= 1);
        if u == v {
            return Ok(Distance::Exact(0));
        }
        scratch.begin(self.n);
        scratch.visit(u, 0, u32::MAX);
        let mut head = 0;
        while head < scratch.queue.len() {
            let x = scratch.queue[head] as usize;
            head += 1;
            let dx = scratch.dist[x];
            if dx + 1 >= cap {
                break; // deeper layers are out of scope
            }
            for &y in self.neighbors(x) {
                let y = y as usize;
                if !scratch.seen(y) {
                    if y == v {
                        return Ok(Distance::Exact(dx + 1));
                    }
                    scratch.visit(y, dx + 1, x as u32);
                }
            }
        }
        Ok(Distance::AtLeast(cap))
    }

    /// Number of vertices `u != v` within distance `radius` of `v`.
    pub fn ball_size(
        &self,
        scratch: &mut BfsScratch,
        v: usize,
        radius: u32,
    ) -> Result<usize, GraphError> {
        Ok(self
            .ball_profile(scratch, v, radius)?
            .iter()
            .map(|&c| c as usize)
            .sum())
    }

    /// Count of vertices at exact distance `d` from `v`, for d = 1..=radius.
    pub fn ball_profile(
        &self,
        scratch: &mut BfsScratch,
        v: usize,
        radius: u32,
    ) -> Result<Vec<u32>, GraphError> {
        self.check_vertex(v)?;
        let mut profile = vec![0u32; radius as usize];
        if radius == 0 {
            return Ok(profile);
        }
        scratch.begin(self.n);
        scratch.visit(v, 0, u32::MAX);
        let mut head = 0;
        while head < scratch.queue.len() {
            let x = scratch.queue[head] as usize;
            head += 1;
            let dx = scratch.dist[x];
            if dx >= radius {
                break;
            }
            for &y in self.neighbors(x) {
                let y = y as usize;
                if !scratch.seen(y) {
                    scratch.visit(y, dx + 1, x as u32);
                    profile[dx as usize] += 1;
                }
            }
        }
        Ok(profile)
    }

    /// Marks every vertex within distance `radius` of `v` in the scratch
    /// (including `v` itself at distance 0) and returns how many were
    /// visited besides `v`. The caller can then test membership with
    /// [`BfsScratch::seen`] until the next `begin`.
    pub fn mark_ball(&self, scratch: &mut BfsScratch, v: usize, radius: u32) -> usize {
        scratch.begin(self.n);
        scratch.visit(v, 0, u32::MAX);
        let mut head = 0;
        while head < scratch.queue.len() {
            let x = scratch.queue[head] as usize;
            head += 1;
            let dx = scratch.dist[x];
            if dx >= radius {
                break;
            }
            for &y in self.neighbors(x) {
                let y = y as usize;
                if !scratch.seen(y) {
                    scratch.visit(y, dx + 1, x as u32);
                }
            }
        }
        scratch.queue.len() - 1
    }

    /// Length of the shortest cycle, found by a pruned BFS from every
    /// vertex: any non-tree edge `(x, y)` seen from root `r` closes a
    /// cycle of length at most `dist(x) + dist(y) + 1`, and the minimum
    /// over all roots is exact.
    pub fn girth(&self) -> Girth {
        let mut scratch = BfsScratch::new();
        let mut best: u64 = u64::MAX;
        for root in 0..self.n {
            scratch.begin(self.n);
            scratch.visit(root, 0, u32::MAX);
            let mut head = 0;
            while head < scratch.queue.len() {
                let x = scratch.queue[head] as usize;
                head += 1;
                let dx = scratch.dist[x] as u64;
                // A cycle shorter than `best` still needs an edge whose
                // endpoint depths sum below it.
                if 2 * dx + 2 > best {
                    break;
                }
                for &y in self.neighbors(x) {
                    let y = y as usize;
                    if !scratch.seen(y) {
                        scratch.visit(y, (dx + 1) as u32, x as u32);
                    } else if scratch.parent[x] != y as u32 {
                        let cand = dx + scratch.dist[y] as u64 + 1;
                        if cand < best {
                            best = cand;
                        }
                    }
                }
            }
        }
        if best == u64::MAX {
            Girth::Infinite
        } else {
            Girth::Finite(best as u32)
        }
    }

    /// Canonical edge-list text: `"n m"` header, then one `"u v"` line
    /// per edge with `u < v`, sorted lexicographically, LF endings.
    pub fn to_edge_list_string(&self) -> String {
        let edges = self.edges_sorted();
        let mut out = String::with_capacity(16 + edges.len() * 8);
        out.push_str(&format!("{} {}\n", self.n, edges.len()));
        for (u, v) in edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses the canonical edge-list format, rejecting anything that
    /// would not round-trip byte-for-byte (unsorted lines, `u >= v`,
    /// wrong edge counts, trailing garbage).
    pub fn parse_edge_list(text: &str, k_max: usize) -> Result<Self, GraphError> {
        let (n, edges) = parse_edge_lines(text)?;
        Graph::from_edges(n, k_max, &edges)
    }

    /// Like [`Graph::parse_edge_list`], with the degree cap taken as
    /// the maximum degree present in the file.
    pub fn parse_edge_list_auto(text: &str) -> Result<Self, GraphError> {
        let (n, edges) = parse_edge_lines(text)?;
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let k_max = degree.iter().copied().max().unwrap_or(0).max(1);
        Graph::from_edges(n, k_max, &edges)
    }
}

/// Strict line-level validation of the canonical edge-list text.
fn parse_edge_lines(text: &str) -> Result<(usize, Vec<(usize, usize)>), GraphError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let parse_two = |line_no: usize, s: &str| -> Result<(usize, usize), GraphError> {
        let mut it = s.split(' ');
        let err = |msg: &str| GraphError::Parse {
            line: line_no,
            msg: msg.into(),
        };
        let a = it
            .next()
            .ok_or_else(|| err("missing first field"))?
            .parse::<usize>()
            .map_err(|e| err(&format!("bad integer: {e}")))?;
        let b = it
            .next()
            .ok_or_else(|| err("missing second field"))?
            .parse::<usize>()
            .map_err(|e| err(&format!("bad integer: {e}")))?;
        if it.next().is_some() {
            return Err(err("trailing fields"));
        }
        Ok((a, b))
    };
    let (n, m) = parse_two(1, header)?;
    let mut edges = Vec::with_capacity(m.min(1 << 24));
    let mut prev: Option<(usize, usize)> = None;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let (u, v) = parse_two(line_no, line)?;
        if u >= v {
            return Err(GraphError::Parse {
                line: line_no,
                msg: format!("expected u < v, got {u} {v}"),
            });
        }
        if n <= v {
            return Err(GraphError::Parse {
                line: line_no,
                msg: format!("vertex {v} out of range (n = {n})"),
            });
        }
        if let Some(p) = prev {
            if (u, v) <= p {
                return Err(GraphError::Parse {
                    line: line_no,
                    msg: "edges not in sorted order".into(),
                });
            }
        }
        prev = Some((u, v));
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: edges.len() + 1,
            msg: format!("header promised {m} edges, found {}", edges.len()),
        });
    }
    Ok((n, edges))
}

/// Reusable BFS workspace. Visit marks are epoch-stamped: `begin`
/// increments the epoch instead of clearing the arrays.
#[derive(Clone, Debug)]
pub struct BfsScratch {
    epoch: u64,
    mark: Vec<u64>,
    dist: Vec<u32>,
    parent: Vec<u32>,
    queue: Vec<u32>,
}

impl BfsScratch {
    pub fn new() -> Self {
        BfsScratch {
            epoch: 0,
            mark: Vec::new(),
            dist: Vec::new(),
            parent: Vec::new(),
            queue: Vec::new(),
        }
    }

    fn begin(&mut self, n: usize) {
        if self.mark.len() < n {
            self.mark.resize(n, 0);
            self.dist.resize(n, 0);
            self.parent.resize(n, 0);
        }
        self.epoch += 1;
        self.queue.clear();
    }

    #[inline]
    fn visit(&mut self, v: usize, d: u32, parent: u32) {
        self.mark[v] = self.epoch;
        self.dist[v] = d;
        self.parent[v] = parent;
        self.queue.push(v as u32);
    }

    #[inline]
    pub fn seen(&self, v: usize) -> bool {
        self.mark[v] == self.epoch
    }

    /// Distance recorded for `v` by the query that most recently marked it.
    #[inline]
    pub fn dist_of(&self, v: usize) -> u32 {
        debug_assert!(self.seen(v));
        self.dist[v]
    }

    /// Vertices marked by the most recent traversal, in visit order
    /// (the source first).
    #[inline]
    pub fn visited(&self) -> &[u32] {
        &self.queue
    }
}

impl Default for BfsScratch {
    fn default() -> Self {
        Self::new()
    }
}
