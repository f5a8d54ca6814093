//! Mutable undirected multigraph with the operation set the reduction rules
//! and solvers need, plus FVS feasibility checking.
//!
//! Vertex ids are stable: ids freed by deletions are never reused within one
//! instance's lifetime, so traces and decomposition trees can reference
//! vertices unambiguously. Edge multiplicity is capped at 2 per vertex pair
//! and self-loops at 1 per vertex; FVS is invariant beyond that.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::Duration;

pub type VertexId = u32;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("foreign vertex {0}")]
    ForeignVertex(VertexId),
    #[error("vertex {0} is not contractible: degree must be 2 with two distinct non-parallel edges")]
    NotContractible(VertexId),
    #[error("not a feasible FVS")]
    NotFeasible,
    #[error("nonpositive weight for vertex {0}")]
    NonpositiveWeight(VertexId),
}

#[derive(Debug, Clone, Default)]
struct Adjacency {
    /// neighbor -> multiplicity (1 or 2), self excluded
    nbrs: BTreeMap<VertexId, u8>,
    self_loop: bool,
    degree: u32,
}

/// Undirected multigraph over stable integer vertex ids.
#[derive(Debug, Clone, Default)]
pub struct MultiGraph {
    adj: BTreeMap<VertexId, Adjacency>,
    edge_count: usize,
    next_id: VertexId,
    /// ordered (degree, vertex) index for max/min degree queries
    degree_index: BTreeSet<(u32, VertexId)>,
}

impl MultiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Number of edges counting multiplicity; a self-loop counts once.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    /// Smallest unused id this graph will hand out next.
    pub fn next_id(&self) -> VertexId {
        self.next_id
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let id = self.next_id;
        self.add_vertex_with_id(id);
        id
    }

    /// Insert a specific id (no-op if present). Bumps the fresh-id watermark.
    pub fn add_vertex_with_id(&mut self, v: VertexId) {
        if !self.adj.contains_key(&v) {
            self.adj.insert(v, Adjacency::default());
            self.degree_index.insert((0, v));
        }
        self.next_id = self.next_id.max(v + 1);
    }

    fn bump_degree(&mut self, v: VertexId, delta: i64) {
        let a = self.adj.get_mut(&v).expect("degree bump on missing vertex");
        let old = a.degree;
        a.degree = (old as i64 + delta) as u32;
        let new = a.degree;
        self.degree_index.remove(&(old, v));
        self.degree_index.insert((new, v));
    }

    /// Add one copy of edge (u, v), creating the endpoints if needed.
    /// Returns false if the copy was discarded by the multiplicity cap
    /// (2 per pair, 1 self-loop per vertex).
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> bool {
        self.add_vertex_with_id(u);
        self.add_vertex_with_id(v);
        if u == v {
            let a = self.adj.get_mut(&u).unwrap();
            if a.self_loop {
                return false;
            }
            a.self_loop = true;
            self.bump_degree(u, 2);
            self.edge_count += 1;
            return true;
        }
        let mu = self.adj.get_mut(&u).unwrap().nbrs.entry(v).or_insert(0);
        if *mu >= 2 {
            return false;
        }
        *mu += 1;
        *self.adj.get_mut(&v).unwrap().nbrs.entry(u).or_insert(0) += 1;
        self.bump_degree(u, 1);
        self.bump_degree(v, 1);
        self.edge_count += 1;
        true
    }

    /// Remove one copy of edge (u, v). No-op if absent.
    pub fn delete_edge(&mut self, u: VertexId, v: VertexId) {
        if u == v {
            if let Some(a) = self.adj.get_mut(&u) {
                if a.self_loop {
                    a.self_loop = false;
                    self.bump_degree(u, -2);
                    self.edge_count -= 1;
                }
            }
            return;
        }
        let Some(a) = self.adj.get_mut(&u) else { return };
        let Some(m) = a.nbrs.get_mut(&v) else { return };
        *m -= 1;
        if *m == 0 {
            a.nbrs.remove(&v);
        }
        let b = self.adj.get_mut(&v).unwrap().nbrs.get_mut(&u).unwrap();
        *b -= 1;
        if *b == 0 {
            self.adj.get_mut(&v).unwrap().nbrs.remove(&u);
        }
        self.bump_degree(u, -1);
        self.bump_degree(v, -1);
        self.edge_count -= 1;
    }

    /// Delete a vertex and all incident edges.
    pub fn delete_vertex(&mut self, v: VertexId) {
        let Some(a) = self.adj.remove(&v) else { return };
        self.degree_index.remove(&(a.degree, v));
        if a.self_loop {
            self.edge_count -= 1;
        }
        for (&w, &m) in &a.nbrs {
            let aw = self.adj.get_mut(&w).unwrap();
            aw.nbrs.remove(&v);
            let old = aw.degree;
            aw.degree -= m as u32;
            let new = aw.degree;
            self.degree_index.remove(&(old, w));
            self.degree_index.insert((new, w));
            self.edge_count -= m as usize;
        }
    }

    /// Degree of v counting multiplicities; a self-loop contributes 2.
    pub fn degree(&self, v: VertexId) -> u32 {
        self.adj.get(&v).map_or(0, |a| a.degree)
    }

    pub fn has_self_loop(&self, v: VertexId) -> bool {
        self.adj.get(&v).map_or(false, |a| a.self_loop)
    }

    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> u8 {
        if u == v {
            return self.has_self_loop(u) as u8;
        }
        self.adj
            .get(&u)
            .and_then(|a| a.nbrs.get(&v))
            .copied()
            .unwrap_or(0)
    }

    /// Distinct neighbors of v (self excluded), ascending.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.get(&v).into_iter().flat_map(|a| a.nbrs.keys().copied())
    }

    /// (neighbor, multiplicity) pairs, ascending by neighbor.
    pub fn neighbor_mults(&self, v: VertexId) -> impl Iterator<Item = (VertexId, u8)> + '_ {
        self.adj
            .get(&v)
            .into_iter()
            .flat_map(|a| a.nbrs.iter().map(|(&w, &m)| (w, m)))
    }

    /// A vertex of maximum degree, smallest id among ties.
    pub fn max_degree_vertex(&self) -> Option<VertexId> {
        let &(deg, _) = self.degree_index.iter().next_back()?;
        // entries with equal degree are ordered by id; take the smallest
        self.degree_index
            .range((deg, 0)..=(deg, VertexId::MAX))
            .map(|&(_, v)| v)
            .next()
    }

    /// A vertex of minimum degree, smallest id among ties.
    pub fn min_degree_vertex(&self) -> Option<VertexId> {
        self.degree_index.iter().next().map(|&(_, v)| v)
    }

    /// Suppress a degree-2 vertex: remove v and join its two neighbors.
    /// A parallel pair to a single neighbor is not contractible; two edges to
    /// the same neighbor along distinct... two distinct incident edges to one
    /// neighbor means a parallel pair, which is rejected. Joining coincident
    /// neighbors would require both edges to the same vertex, so the self-loop
    /// case cannot arise here; it is produced when the two edges of v go to
    /// distinct neighbors that are later merged by other means.
    pub fn contract_degree_two(&mut self, v: VertexId) -> Result<(), GraphError> {
        let a = self.adj.get(&v).ok_or(GraphError::ForeignVertex(v))?;
        if a.degree != 2 || a.self_loop {
            return Err(GraphError::NotContractible(v));
        }
        let nbrs: Vec<(VertexId, u8)> = a.nbrs.iter().map(|(&w, &m)| (w, m)).collect();
        match nbrs.as_slice() {
            [(w, 2)] => {
                let _ = w;
                Err(GraphError::NotContractible(v))
            }
            [(w1, 1), (w2, 1)] => {
                let (w1, w2) = (*w1, *w2);
                self.delete_vertex(v);
                self.add_edge(w1, w2);
                Ok(())
            }
            _ => Err(GraphError::NotContractible(v)),
        }
    }

    /// True iff the graph has no cycle. Any self-loop or parallel pair is a cycle.
    pub fn is_acyclic(&self) -> bool {
        // union-find over vertices; each edge must join two components
        let ids: Vec<VertexId> = self.vertices().collect();
        let index: BTreeMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut dsu = Dsu::new(ids.len());
        for &v in &ids {
            let a = &self.adj[&v];
            if a.self_loop {
                return false;
            }
            for (&w, &m) in &a.nbrs {
                if w < v {
                    continue;
                }
                if m > 1 {
                    return false;
                }
                if !dsu.union(index[&v], index[&w]) {
                    return false;
                }
            }
        }
        true
    }

    /// True iff g minus `set` is acyclic. Errors on ids outside the graph.
    pub fn is_fvs(&self, set: &BTreeSet<VertexId>) -> Result<bool, GraphError> {
        for &v in set {
            if !self.contains(v) {
                return Err(GraphError::ForeignVertex(v));
            }
        }
        let ids: Vec<VertexId> = self.vertices().filter(|v| !set.contains(v)).collect();
        let index: BTreeMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut dsu = Dsu::new(ids.len());
        for &v in &ids {
            let a = &self.adj[&v];
            if a.self_loop {
                return Ok(false);
            }
            for (&w, &m) in &a.nbrs {
                if w < v || set.contains(&w) {
                    continue;
                }
                if m > 1 || !dsu.union(index[&v], index[&w]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Induced subgraph on `keep`, preserving ids and the fresh-id watermark.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> MultiGraph {
        let mut g = MultiGraph::new();
        g.next_id = self.next_id;
        for &v in keep {
            if self.contains(v) {
                g.add_vertex_with_id(v);
            }
        }
        g.next_id = self.next_id;
        for &v in keep {
            let Some(a) = self.adj.get(&v) else { continue };
            if a.self_loop {
                g.add_edge(v, v);
            }
            for (&w, &m) in &a.nbrs {
                if w > v && keep.contains(&w) {
                    for _ in 0..m {
                        g.add_edge(v, w);
                    }
                }
            }
        }
        g
    }

    /// Copy of the graph with `remove` deleted.
    pub fn without(&self, remove: &BTreeSet<VertexId>) -> MultiGraph {
        let keep: BTreeSet<VertexId> =
            self.vertices().filter(|v| !remove.contains(v)).collect();
        self.induced(&keep)
    }

    /// Connected components as vertex sets, ordered by smallest member.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.vertices() {
            if seen.contains(&v) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![v];
            seen.insert(v);
            while let Some(u) = stack.pop() {
                comp.insert(u);
                for w in self.neighbors(u) {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Full adjacency audit: symmetry, degree sums, edge count. Panics on
    /// violation; intended for tests.
    pub fn audit(&self) {
        let mut deg_sum = 0u64;
        let mut edges = 0usize;
        for (&v, a) in &self.adj {
            let mut d = 0u32;
            for (&w, &m) in &a.nbrs {
                assert!(m >= 1 && m <= 2, "multiplicity out of range");
                assert_eq!(
                    self.adj.get(&w).and_then(|b| b.nbrs.get(&v)),
                    Some(&m),
                    "asymmetric adjacency {v}-{w}"
                );
                d += m as u32;
                if w > v {
                    edges += m as usize;
                }
            }
            if a.self_loop {
                d += 2;
                edges += 1;
            }
            assert_eq!(a.degree, d, "stale degree at {v}");
            assert!(self.degree_index.contains(&(d, v)), "degree index miss at {v}");
            deg_sum += d as u64;
        }
        assert_eq!(edges, self.edge_count, "edge count mismatch");
        assert_eq!(deg_sum, 2 * self.edge_count as u64, "degree sum mismatch");
        assert_eq!(self.degree_index.len(), self.adj.len());
    }
}

/// Plain union-find with path halving.
pub struct Dsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Union by rank; false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Metadata attached to a reported solution.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveMeta {
    pub algorithm: String,
    pub params: String,
    pub seed: Option<u64>,
    pub elapsed: Duration,
}

/// A vertex set claimed to be an FVS, with provenance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FvsSolution {
    pub vertex_set: BTreeSet<VertexId>,
    pub meta: SolveMeta,
}

impl FvsSolution {
    pub fn new(vertex_set: BTreeSet<VertexId>, algorithm: &str) -> Self {
        Self {
            vertex_set,
            meta: SolveMeta {
                algorithm: algorithm.to_string(),
                ..Default::default()
            },
        }
    }

    pub fn len(&self) -> usize {
        self.vertex_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_set.is_empty()
    }
}

/// True iff g minus s is acyclic; errors on foreign vertex ids.
pub fn verify_fvs(g: &MultiGraph, s: &FvsSolution) -> Result<bool, GraphError> {
    g.is_fvs(&s.vertex_set)
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {0}: expected two vertex ids, got {1:?}")]
    BadLine(usize, String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Parse the edge-list text format: `u v` per line, `#` comments, blank lines
/// ignored; parallel edges and self-loops by repetition.
pub fn parse_edge_list(text: &str) -> Result<MultiGraph, ParseError> {
    let mut g = MultiGraph::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (u, v) = match (it.next(), it.next(), it.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => return Err(ParseError::BadLine(i + 1, line.to_string())),
        };
        let u: VertexId = u
            .parse()
            .map_err(|_| ParseError::BadLine(i + 1, line.to_string()))?;
        let v: VertexId = v
            .parse()
            .map_err(|_| ParseError::BadLine(i + 1, line.to_string()))?;
        g.add_edge(u, v);
    }
    Ok(g)
}

/// Serialize to the edge-list format, including isolated vertices as comments.
pub fn write_edge_list(g: &MultiGraph) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        if g.degree(v) == 0 {
            let _ = writeln!(out, "# isolated {v}");
        }
        if g.has_self_loop(v) {
            let _ = writeln!(out, "{v} {v}");
        }
        for (w, m) in g.neighbor_mults(v) {
            if w > v {
                for _ in 0..m {
                    let _ = writeln!(out, "{v} {w}");
                }
            }
        }
    }
    out
}
