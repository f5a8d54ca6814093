//! Two-step 2-approximation for FVS: greedy removal by score (weight over
//! current degree), then reverse-order minimalization.
//!
//! With unit weights the greedy rule degenerates to "remove a vertex of
//! maximum degree", which we serve straight from the graph's degree index.
//! Minimalization re-inserts redundant vertices with an incremental
//! union-find over the growing forest, so a full pass is near-linear.

use crate::graph::{Dsu, FvsSolution, GraphError, MultiGraph, VertexId};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

/// Union-find view of an acyclic subgraph of `g`, supporting "can this
/// vertex join without closing a cycle" queries.
pub(crate) struct ForestTracker<'a> {
    g: &'a MultiGraph,
    index: BTreeMap<VertexId, usize>,
    dsu: Dsu,
    kept: BTreeSet<VertexId>,
}

impl<'a> ForestTracker<'a> {
    /// Start from `g` minus `removed`; that remainder must be acyclic.
    pub fn new(g: &'a MultiGraph, removed: &BTreeSet<VertexId>) -> Self {
        let index: BTreeMap<VertexId, usize> =
            g.vertices().enumerate().map(|(i, v)| (v, i)).collect();
        let mut t = Self {
            g,
            dsu: Dsu::new(index.len()),
            index,
            kept: BTreeSet::new(),
        };
        for v in g.vertices() {
            if !removed.contains(&v) {
                let ok = t.try_add(v);
                debug_assert!(ok, "initial remainder is not a forest");
            }
        }
        t
    }

    /// Add v to the forest if its kept neighborhood stays acyclic.
    pub fn try_add(&mut self, v: VertexId) -> bool {
        if self.g.has_self_loop(v) {
            return false;
        }
        let vi = self.index[&v];
        let mut roots = Vec::new();
        for (w, m) in self.g.neighbor_mults(v) {
            if !self.kept.contains(&w) {
                continue;
            }
            if m > 1 {
                return false;
            }
            let r = self.dsu.find(self.index[&w]);
            if roots.contains(&r) {
                return false;
            }
            roots.push(r);
        }
        for r in roots {
            self.dsu.union(vi, r);
        }
        self.kept.insert(v);
        true
    }
}

/// Remove redundant vertices of `s`, testing candidates in the order given;
/// ids outside the solution are skipped. The result is feasible and minimal
/// with respect to the scanned vertices.
pub fn minimalize(
    g: &MultiGraph,
    s: &FvsSolution,
    order: &[VertexId],
) -> Result<FvsSolution, GraphError> {
    if !g.is_fvs(&s.vertex_set)? {
        return Err(GraphError::NotFeasible);
    }
    let mut set = s.vertex_set.clone();
    let mut tracker = ForestTracker::new(g, &set);
    for &v in order {
        if set.contains(&v) && tracker.try_add(v) {
            set.remove(&v);
        }
    }
    let mut out = s.clone();
    out.vertex_set = set;
    Ok(out)
}

/// Greedy phase for unit weights: strip degree-≤1 vertices, otherwise take a
/// maximum-degree vertex (smallest id on ties). Returns removals in order.
fn greedy_unit(g: &MultiGraph) -> Vec<VertexId> {
    let mut g = g.clone();
    let mut order = Vec::new();
    loop {
        while let Some(v) = g.min_degree_vertex() {
            if g.degree(v) <= 1 {
                g.delete_vertex(v);
            } else {
                break;
            }
        }
        let Some(v) = g.max_degree_vertex() else { break };
        order.push(v);
        g.delete_vertex(v);
    }
    order
}

/// Greedy phase for general weights via a lazy min-heap on weight/degree.
fn greedy_weighted(g: &MultiGraph, weights: &BTreeMap<VertexId, f64>) -> Vec<VertexId> {
    // max-heap over Reverse ordering: encode score ascending, id ascending
    #[derive(PartialEq)]
    struct Entry {
        score: f64,
        v: VertexId,
        deg: u32,
    }
    impl Eq for Entry {}
    impl Ord for Entry {
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            // reversed so that BinaryHeap pops the minimum score first
            o.score
                .total_cmp(&self.score)
                .then(o.v.cmp(&self.v))
        }
    }
    impl PartialOrd for Entry {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }

    let mut g = g.clone();
    let mut heap: BinaryHeap<Entry> = BinaryHeap::new();
    let mut order = Vec::new();
    let push = |heap: &mut BinaryHeap<Entry>, g: &MultiGraph, v: VertexId| {
        let deg = g.degree(v);
        if deg >= 2 {
            heap.push(Entry {
                score: weights[&v] / deg as f64,
                v,
                deg,
            });
        }
    };
    let strip = |g: &mut MultiGraph, heap: &mut BinaryHeap<Entry>| {
        let mut touched = BTreeSet::new();
        while let Some(v) = g.min_degree_vertex() {
            if g.degree(v) > 1 {
                break;
            }
            touched.extend(g.neighbors(v));
            touched.remove(&v);
            g.delete_vertex(v);
        }
        for v in touched {
            if g.contains(v) {
                push(heap, g, v);
            }
        }
    };
    strip(&mut g, &mut heap);
    for v in g.vertices().collect::<Vec<_>>() {
        push(&mut heap, &g, v);
    }
    while let Some(e) = heap.pop() {
        if !g.contains(e.v) || g.degree(e.v) != e.deg {
            continue; // stale entry
        }
        let nbrs: Vec<VertexId> = g.neighbors(e.v).collect();
        g.delete_vertex(e.v);
        order.push(e.v);
        for w in nbrs {
            push(&mut heap, &g, w);
        }
        strip(&mut g, &mut heap);
    }
    order
}

/// The two-step 2-approximation with unit weights.
pub fn two_approx(g: &MultiGraph) -> FvsSolution {
    let order = greedy_unit(g);
    finish(g, order, "2approx")
}

/// The two-step algorithm with per-vertex positive weights; minimizes
/// cardinality greedily by weight/degree score (weights bias selection only).
pub fn two_approx_weighted(
    g: &MultiGraph,
    weights: &BTreeMap<VertexId, f64>,
) -> Result<FvsSolution, GraphError> {
    for v in g.vertices() {
        let w = weights.get(&v).copied().unwrap_or(1.0);
        if !(w > 0.0) {
            return Err(GraphError::NonpositiveWeight(v));
        }
    }
    let full: BTreeMap<VertexId, f64> = g
        .vertices()
        .map(|v| (v, weights.get(&v).copied().unwrap_or(1.0)))
        .collect();
    let order = greedy_weighted(g, &full);
    Ok(finish(g, order, "2approx-weighted"))
}

fn finish(g: &MultiGraph, order: Vec<VertexId>, algo: &str) -> FvsSolution {
    let set: BTreeSet<VertexId> = order.iter().copied().collect();
    let rev: Vec<VertexId> = order.into_iter().rev().collect();
    let s = FvsSolution::new(set, algo);
    minimalize(g, &s, &rev).expect("greedy phase must produce a feasible FVS")
}
