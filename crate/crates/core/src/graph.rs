//! Data graphs for the generalized rewriting model: vertices are the values
//! the stored data can take, directed edges are the rewrites an application
//! may request. Self-loops are excluded (a rewrite changes the value) and
//! every graph here is strongly connected.
//!
//! Out-edges carry *local* labels: at each vertex the out-neighbors are
//! sorted ascending by vertex id and labeled `0..outdeg-1`. Labels are
//! 0-based; constructions that present labels as `{1..Δ}` shift at their
//! boundary.

use std::collections::VecDeque;
use std::fmt;

/// Vertices are dense integers `0..L-1`. Structured vertices (tuples,
/// strings) map through a mixed-radix bijection, most significant
/// coordinate first.
pub type Vertex = usize;

/// Generators refuse to materialize graphs past this many vertices.
pub const MAX_VERTICES: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// Fewer than two vertices, or a generator parameter out of range.
    InvalidParams(String),
    /// `ell^k` (or similar) exceeds [`MAX_VERTICES`].
    TooLarge { requested: u128 },
    /// Queried pair is not an edge.
    NotAnEdge { from: Vertex, to: Vertex },
    /// Label `>= outdeg(u)`.
    LabelOutOfRange {
        vertex: Vertex,
        label: usize,
        outdeg: usize,
    },
    /// Vertex id `>= L`.
    VertexOutOfRange { vertex: Vertex, count: usize },
    /// Edge set fails a model requirement (self-loop, not strongly
    /// connected, duplicate edge).
    InvalidEdges(String),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::InvalidParams(msg) => write!(f, "invalid graph parameters: {msg}"),
            GraphError::TooLarge { requested } => {
                write!(
                    f,
                    "graph too large: {requested} vertices (limit {MAX_VERTICES})"
                )
            }
            GraphError::NotAnEdge { from, to } => write!(f, "({from}, {to}) is not an edge"),
            GraphError::LabelOutOfRange {
                vertex,
                label,
                outdeg,
            } => {
                write!(
                    f,
                    "label {label} out of range at vertex {vertex} (outdeg {outdeg})"
                )
            }
            GraphError::VertexOutOfRange { vertex, count } => {
                write!(f, "vertex {vertex} out of range (L={count})")
            }
            GraphError::InvalidEdges(msg) => write!(f, "invalid edge set: {msg}"),
        }
    }
}

impl std::error::Error for GraphError {}

/// A strongly connected directed graph on `L` vertices without self-loops,
/// with locally labeled out-edges. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataGraph {
    /// `adjacency[u]` lists the out-neighbors of `u` in ascending order;
    /// the position of `v` in this list is the local label of `(u, v)`.
    adjacency: Vec<Vec<Vertex>>,
    max_out_degree: usize,
    spec: String,
}

impl DataGraph {
    /// Builds a graph from out-neighbor lists, validating the model:
    /// no self-loops, no duplicate edges, strong connectivity.
    /// Neighbor lists are sorted to assign canonical labels.
    pub fn from_adjacency(
        mut adjacency: Vec<Vec<Vertex>>,
        spec: String,
    ) -> Result<Self, GraphError> {
        let count = adjacency.len();
        if count < 2 {
            return Err(GraphError::InvalidParams(format!(
                "need L >= 2, got {count}"
            )));
        }
        for (u, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            for w in nbrs.windows(2) {
                if w[0] == w[1] {
                    return Err(GraphError::InvalidEdges(format!(
                        "duplicate edge ({u}, {})",
                        w[0]
                    )));
                }
            }
            for &v in nbrs.iter() {
                if v == u {
                    return Err(GraphError::InvalidEdges(format!("self-loop at {u}")));
                }
                if v >= count {
                    return Err(GraphError::VertexOutOfRange { vertex: v, count });
                }
            }
        }
        let graph = DataGraph {
            max_out_degree: adjacency.iter().map(Vec::len).max().unwrap_or(0),
            adjacency,
            spec,
        };
        if !graph.is_strongly_connected() {
            return Err(GraphError::InvalidEdges(
                "graph is not strongly connected".into(),
            ));
        }
        Ok(graph)
    }

    /// Builds a graph from an `(u, v)` edge list on `count` vertices.
    pub fn from_edges(count: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); count];
        for &(u, v) in edges {
            if u >= count {
                return Err(GraphError::VertexOutOfRange { vertex: u, count });
            }
            adjacency[u].push(v);
        }
        Self::from_adjacency(adjacency, format!("edges:L={count}"))
    }

    /// Complete graph on `L` vertices: the WOM data graph.
    pub fn complete(count: usize) -> Result<Self, GraphError> {
        if count < 2 {
            return Err(GraphError::InvalidParams(format!(
                "complete graph needs L >= 2, got {count}"
            )));
        }
        if count > MAX_VERTICES {
            return Err(GraphError::TooLarge {
                requested: count as u128,
            });
        }
        let adjacency = (0..count)
            .map(|u| (0..count).filter(|&v| v != u).collect())
            .collect();
        Self::from_adjacency(adjacency, format!("complete:L={count}"))
    }

    /// Generalized hypercube on `ell^k` vertices: the floating-code data
    /// graph. Vertices are `k`-tuples over `{0..ell-1}`; edges connect
    /// tuples differing in exactly one coordinate, so the graph is regular
    /// of degree `k(ell-1)`.
    pub fn hypercube(k: u32, ell: usize) -> Result<Self, GraphError> {
        if k < 1 || ell < 2 {
            return Err(GraphError::InvalidParams(format!(
                "hypercube needs k >= 1, ell >= 2, got k={k}, ell={ell}"
            )));
        }
        let count = checked_power(ell, k)?;
        let mut adjacency = vec![Vec::new(); count];
        for (u, nbrs) in adjacency.iter_mut().enumerate() {
            let digits = to_digits(u, ell, k as usize);
            for coord in 0..k as usize {
                for value in 0..ell {
                    if value == digits[coord] {
                        continue;
                    }
                    let mut d2 = digits.clone();
                    d2[coord] = value;
                    nbrs.push(from_digits(&d2, ell));
                }
            }
        }
        Self::from_adjacency(adjacency, format!("hypercube:k={k},l={ell}"))
    }

    /// De Bruijn graph on `ell^k` vertices: the buffer-code data graph.
    /// Vertices are length-`k` strings over `{0..ell-1}`; the string
    /// `x_1..x_k` has an edge to `x_2..x_k y` for every `y`, except the
    /// shift onto itself (constant strings), which would be a self-loop.
    pub fn debruijn(k: u32, ell: usize) -> Result<Self, GraphError> {
        if k < 1 || ell < 2 {
            return Err(GraphError::InvalidParams(format!(
                "de Bruijn needs k >= 1, ell >= 2, got k={k}, ell={ell}"
            )));
        }
        let count = checked_power(ell, k)?;
        let tail_radix = checked_power(ell, k - 1)?;
        let mut adjacency = vec![Vec::new(); count];
        for (u, nbrs) in adjacency.iter_mut().enumerate() {
            // Shift left: drop the most significant digit, append y.
            let shifted = (u % tail_radix) * ell;
            for y in 0..ell {
                let v = shifted + y;
                if v != u {
                    nbrs.push(v);
                }
            }
        }
        Self::from_adjacency(adjacency, format!("debruijn:k={k},l={ell}"))
    }

    /// Rooted bidirected tree on `count` vertices with every total degree at
    /// most `delta`, filled level by level: the root takes up to `delta`
    /// children, every other internal vertex up to `delta - 1` (one slot is
    /// its parent edge). Balanced filling keeps the diameter
    /// `O(log L / log delta)`.
    pub fn bidirected_tree(delta: usize, count: usize) -> Result<Self, GraphError> {
        if delta < 2 || count < 2 {
            return Err(GraphError::InvalidParams(format!(
                "tree needs delta >= 2, L >= 2, got delta={delta}, L={count}"
            )));
        }
        if count > MAX_VERTICES {
            return Err(GraphError::TooLarge {
                requested: count as u128,
            });
        }
        let mut adjacency = vec![Vec::new(); count];
        let mut next_child = 1;
        let mut frontier = VecDeque::from([0usize]);
        while next_child < count {
            let parent = frontier
                .pop_front()
                .expect("tree filling exhausted parents early");
            let capacity = if parent == 0 { delta } else { delta - 1 };
            for _ in 0..capacity {
                if next_child == count {
                    break;
                }
                adjacency[parent].push(next_child);
                adjacency[next_child].push(parent);
                frontier.push_back(next_child);
                next_child += 1;
            }
        }
        Self::from_adjacency(adjacency, format!("tree:delta={delta},L={count}"))
    }

    /// Number of vertices `L`.
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Maximum out-degree `Δ`.
    pub fn max_out_degree(&self) -> usize {
        self.max_out_degree
    }

    /// The spec string this graph was built from, e.g. `"hypercube:k=4,l=2"`.
    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn out_degree(&self, u: Vertex) -> usize {
        self.adjacency[u].len()
    }

    pub fn out_neighbors(&self, u: Vertex) -> &[Vertex] {
        &self.adjacency[u]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.adjacency.len() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// True iff every vertex has an edge to every other vertex.
    pub fn is_complete(&self) -> bool {
        let count = self.adjacency.len();
        self.adjacency.iter().all(|nbrs| nbrs.len() == count - 1)
    }

    /// Local label of the edge `(u, v)` at `u`, in `{0..outdeg(u)-1}`.
    pub fn edge_label(&self, u: Vertex, v: Vertex) -> Result<usize, GraphError> {
        if u >= self.adjacency.len() {
            return Err(GraphError::VertexOutOfRange {
                vertex: u,
                count: self.adjacency.len(),
            });
        }
        self.adjacency[u]
            .binary_search(&v)
            .map_err(|_| GraphError::NotAnEdge { from: u, to: v })
    }

    /// The unique `v` with `edge_label(u, v) = label`; inverse of
    /// [`DataGraph::edge_label`].
    pub fn follow(&self, u: Vertex, label: usize) -> Result<Vertex, GraphError> {
        if u >= self.adjacency.len() {
            return Err(GraphError::VertexOutOfRange {
                vertex: u,
                count: self.adjacency.len(),
            });
        }
        self.adjacency[u]
            .get(label)
            .copied()
            .ok_or(GraphError::LabelOutOfRange {
                vertex: u,
                label,
                outdeg: self.adjacency[u].len(),
            })
    }

    /// Max over ordered vertex pairs of the shortest-path length
    /// (all-pairs BFS).
    pub fn diameter(&self) -> usize {
        let mut best = 0;
        for source in 0..self.adjacency.len() {
            let dist = self.bfs_distances(source);
            for d in dist {
                // Unreachable pairs cannot occur: construction checks strong
                // connectivity.
                best = best.max(d.expect("graph must be strongly connected"));
            }
        }
        best
    }

    fn bfs_distances(&self, source: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.adjacency.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    fn is_strongly_connected(&self) -> bool {
        let count = self.adjacency.len();
        if self.bfs_distances(0).iter().any(Option::is_none) {
            return false;
        }
        // Reverse reachability from vertex 0.
        let mut reversed = vec![Vec::new(); count];
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            for &v in nbrs {
                reversed[v].push(u);
            }
        }
        let mut seen = vec![false; count];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for &v in &reversed[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Plain-text edge list (`u v` per line) for debugging.
    pub fn to_edge_list_text(&self) -> String {
        let mut out = String::new();
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            for &v in nbrs {
                out.push_str(&format!("{u} {v}\n"));
            }
        }
        out
    }
}

fn checked_power(base: usize, exp: u32) -> Result<usize, GraphError> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
        if acc > MAX_VERTICES as u128 {
            return Err(GraphError::TooLarge { requested: acc });
        }
    }
    Ok(acc as usize)
}

fn to_digits(mut id: usize, radix: usize, len: usize) -> Vec<usize> {
    let mut digits = vec![0; len];
    for slot in digits.iter_mut().rev() {
        *slot = id % radix;
        id /= radix;
    }
    digits
}

fn from_digits(digits: &[usize], radix: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * radix + d)
}

/// Parsed form of a graph spec string:
/// `"complete:L=56"`, `"hypercube:k=4,l=2"`, `"debruijn:k=3,l=2"`,
/// `"tree:delta=3,L=7"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    Complete { count: usize },
    Hypercube { k: u32, ell: usize },
    DeBruijn { k: u32, ell: usize },
    Tree { delta: usize, count: usize },
}

impl GraphSpec {
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let (kind, args) = match text.split_once(':') {
            Some((kind, args)) => (kind.trim(), args),
            None => (text.trim(), ""),
        };
        let fields = parse_kv(args)?;
        let get = |key: &str| -> Result<u64, GraphError> {
            fields
                .iter()
                .find(|(k, _)| k.eq_ignore_ascii_case(key))
                .map(|(_, v)| *v)
                .ok_or_else(|| {
                    GraphError::InvalidParams(format!("graph spec '{text}' is missing '{key}'"))
                })
        };
        match kind {
            "complete" => Ok(GraphSpec::Complete {
                count: get("L")? as usize,
            }),
            "hypercube" => Ok(GraphSpec::Hypercube {
                k: get("k")? as u32,
                ell: get("l")? as usize,
            }),
            "debruijn" => Ok(GraphSpec::DeBruijn {
                k: get("k")? as u32,
                ell: get("l")? as usize,
            }),
            "tree" => Ok(GraphSpec::Tree {
                delta: get("delta")? as usize,
                count: get("L")? as usize,
            }),
            other => Err(GraphError::InvalidParams(format!(
                "unknown graph kind '{other}'"
            ))),
        }
    }

    pub fn build(&self) -> Result<DataGraph, GraphError> {
        match *self {
            GraphSpec::Complete { count } => DataGraph::complete(count),
            GraphSpec::Hypercube { k, ell } => DataGraph::hypercube(k, ell),
            GraphSpec::DeBruijn { k, ell } => DataGraph::debruijn(k, ell),
            GraphSpec::Tree { delta, count } => DataGraph::bidirected_tree(delta, count),
        }
    }
}

fn parse_kv(args: &str) -> Result<Vec<(String, u64)>, GraphError> {
    let mut out = Vec::new();
    for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part.split_once('=').ok_or_else(|| {
            GraphError::InvalidParams(format!("expected key=value, got '{part}'"))
        })?;
        let value = value
            .trim()
            .parse::<u64>()
            .map_err(|_| GraphError::InvalidParams(format!("bad integer in '{part}'")))?;
        out.push((key.trim().to_string(), value));
    }
    Ok(out)
}

/// A rewrite sequence `v_1, v_2, ...` with the implicit start `v_0 = 0`:
/// consecutive values are distinct and every step is an edge of the
/// associated graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteSequence {
    values: Vec<Vertex>,
    spec: String,
}

impl RewriteSequence {
    pub fn new(values: Vec<Vertex>, spec: String, graph: &DataGraph) -> Result<Self, GraphError> {
        let mut prev = 0;
        for (i, &v) in values.iter().enumerate() {
            if v == prev {
                return Err(GraphError::InvalidEdges(format!(
                    "step {}: value {v} repeats",
                    i + 1
                )));
            }
            if !graph.has_edge(prev, v) {
                return Err(GraphError::NotAnEdge { from: prev, to: v });
            }
            prev = v;
        }
        Ok(RewriteSequence { values, spec })
    }

    pub fn values(&self) -> &[Vertex] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }
}
