//! Planarity testing, combinatorial embedding, and triangulation.
//!
//! The tester is the left-right (LR) algorithm: one DFS orients the graph
//! and computes lowpoints and nesting depths, a second checks the LR
//! constraint system over a stack of conflict pairs, and a third lays out
//! every vertex's incident half-edges into a rotation system. Non-planar
//! inputs get a plain verdict; `has_kuratowski_subdivision` is a separate,
//! slow subdivision search used to cross-check the verdict on small graphs.
//!
//! Faces are traced with the convention next(u→v) = (v→x) where x follows u
//! in the clockwise rotation at v. Triangulation first patches cut vertices
//! with face chords (so every face becomes a simple cycle) and then splits
//! faces with chords chosen to never duplicate an existing edge; all added
//! edges are flagged synthetic.

use crate::graph::{MultiGraph, VertexId};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("graph is not planar")]
pub struct NonPlanar;

/// Rotation system: per-vertex clockwise cyclic order of neighbors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Embedding {
    pub rotation: BTreeMap<VertexId, Vec<VertexId>>,
    /// edges added by triangulation/biconnection, normalized (min, max)
    synthetic: BTreeSet<(VertexId, VertexId)>,
}

impl Embedding {
    pub fn is_synthetic(&self, u: VertexId, v: VertexId) -> bool {
        self.synthetic.contains(&(u.min(v), u.max(v)))
    }

    pub fn synthetic_edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.synthetic.iter().copied()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.rotation.get(&u).map_or(false, |r| r.contains(&v))
    }

    pub fn edge_count(&self) -> usize {
        self.rotation.values().map(Vec::len).sum::<usize>() / 2
    }

    /// All faces as closed walks of directed edges.
    pub fn faces(&self) -> Vec<Vec<(VertexId, VertexId)>> {
        let mut seen: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        let mut out = Vec::new();
        for (&u, nbrs) in &self.rotation {
            for &v in nbrs {
                if seen.contains(&(u, v)) {
                    continue;
                }
                let mut walk = Vec::new();
                let (mut a, mut b) = (u, v);
                loop {
                    walk.push((a, b));
                    seen.insert((a, b));
                    let rot = &self.rotation[&b];
                    let i = rot.iter().position(|&x| x == a).expect("symmetric rotation");
                    let c = rot[(i + 1) % rot.len()];
                    a = b;
                    b = c;
                    if (a, b) == (u, v) {
                        break;
                    }
                }
                out.push(walk);
            }
        }
        out
    }

    pub fn face_count(&self) -> usize {
        // isolated vertices contribute their single surrounding face
        let isolated = self
            .rotation
            .values()
            .filter(|r| r.is_empty())
            .count();
        self.faces().len() + isolated
    }

    /// Euler check v − e + f = 2 on every connected component.
    pub fn verify_euler(&self) -> bool {
        let mut comp: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut ncomp = 0;
        for &v in self.rotation.keys() {
            if comp.contains_key(&v) {
                continue;
            }
            let mut stack = vec![v];
            comp.insert(v, ncomp);
            while let Some(u) = stack.pop() {
                for &w in &self.rotation[&u] {
                    if !comp.contains_key(&w) {
                        comp.insert(w, ncomp);
                        stack.push(w);
                    }
                }
            }
            ncomp += 1;
        }
        let mut v_cnt = vec![0i64; ncomp];
        let mut e_cnt = vec![0i64; ncomp];
        let mut f_cnt = vec![0i64; ncomp];
        for (&v, nbrs) in &self.rotation {
            let c = comp[&v];
            v_cnt[c] += 1;
            e_cnt[c] += nbrs.len() as i64;
            if nbrs.is_empty() {
                f_cnt[c] += 1; // the plane around an isolated vertex
            }
        }
        for face in self.faces() {
            f_cnt[comp[&face[0].0]] += 1;
        }
        (0..ncomp).all(|c| v_cnt[c] - e_cnt[c] / 2 + f_cnt[c] == 2)
    }
}

/// Planarity test plus embedding. Parallel edges and self-loops are ignored
/// (the caller's graph is treated as its simple support).
pub fn test_and_embed(g: &MultiGraph) -> Result<Embedding, NonPlanar> {
    let ids: Vec<VertexId> = g.vertices().collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = ids.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut m = 0usize;
    for &v in &ids {
        for w in g.neighbors(v) {
            adj[index[&v]].push(index[&w]);
            if v < w {
                m += 1;
            }
        }
    }
    if n > 2 && m > 3 * n - 6 {
        return Err(NonPlanar);
    }
    // deep recursion: run on a dedicated big-stack thread
    let rotation_idx = std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(512 << 20)
            .spawn_scoped(s, || Lr::new(adj).run())
            .expect("spawn embedder")
            .join()
            .expect("embedder panicked")
    })?;
    let mut rotation = BTreeMap::new();
    for (i, rot) in rotation_idx.into_iter().enumerate() {
        rotation.insert(ids[i], rot.into_iter().map(|j| ids[j]).collect());
    }
    Ok(Embedding {
        rotation,
        synthetic: BTreeSet::new(),
    })
}

type Edge = usize; // oriented edge id

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Interval {
    low: Edge,  // NONE when empty
    high: Edge, // NONE when empty
}

impl Interval {
    const EMPTY: Interval = Interval { low: NONE, high: NONE };
    fn empty(&self) -> bool {
        self.low == NONE && self.high == NONE
    }
}

#[derive(Clone, Copy, Debug)]
struct ConflictPair {
    l: Interval,
    r: Interval,
}

struct Lr {
    adj: Vec<Vec<usize>>,
    n: usize,
    height: Vec<usize>,       // NONE = unvisited
    parent_edge: Vec<Edge>,   // NONE at roots
    roots: Vec<usize>,
    // per oriented edge
    src: Vec<usize>,
    dst: Vec<usize>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting: Vec<i64>,
    refer: Vec<Edge>,
    side: Vec<i8>,
    eid: HashMap<(usize, usize), Edge>,
    out_edges: Vec<Vec<Edge>>, // oriented edges leaving each vertex
    // testing state
    s: Vec<ConflictPair>,
    stack_bottom: Vec<usize>,
    lowpt_edge: Vec<Edge>,
}

impl Lr {
    fn new(adj: Vec<Vec<usize>>) -> Self {
        let n = adj.len();
        Self {
            adj,
            n,
            height: vec![NONE; n],
            parent_edge: vec![NONE; n],
            roots: Vec::new(),
            src: Vec::new(),
            dst: Vec::new(),
            lowpt: Vec::new(),
            lowpt2: Vec::new(),
            nesting: Vec::new(),
            refer: Vec::new(),
            side: Vec::new(),
            eid: HashMap::new(),
            out_edges: vec![Vec::new(); n],
            s: Vec::new(),
            stack_bottom: Vec::new(),
            lowpt_edge: Vec::new(),
        }
    }

    fn new_edge(&mut self, v: usize, w: usize) -> Edge {
        let e = self.src.len();
        self.src.push(v);
        self.dst.push(w);
        self.lowpt.push(self.height[v]);
        self.lowpt2.push(self.height[v]);
        self.nesting.push(0);
        self.refer.push(NONE);
        self.side.push(1);
        self.stack_bottom.push(0);
        self.lowpt_edge.push(NONE);
        self.eid.insert((v, w), e);
        self.out_edges[v].push(e);
        e
    }

    fn run(mut self) -> Result<Vec<Vec<usize>>, NonPlanar> {
        // phase 1: orientation
        for v in 0..self.n {
            if self.height[v] == NONE {
                self.height[v] = 0;
                self.roots.push(v);
                self.dfs_orient(v);
            }
        }
        // phase 2: testing
        let mut ordered: Vec<Vec<Edge>> = (0..self.n)
            .map(|v| {
                let mut es = self.out_edges[v].clone();
                es.sort_by_key(|&e| (self.nesting[e], self.dst[e]));
                es
            })
            .collect();
        for i in 0..self.roots.len() {
            let r = self.roots[i];
            if !self.dfs_test(r, &ordered) {
                return Err(NonPlanar);
            }
        }
        // phase 3: embedding
        for e in 0..self.src.len() {
            self.nesting[e] *= self.sign(e) as i64;
        }
        for v in 0..self.n {
            ordered[v].sort_by_key(|&e| (self.nesting[e], self.dst[e]));
        }
        let mut emb = EmbeddingBuilder::new(self.n);
        for v in 0..self.n {
            let mut prev = NONE;
            for &e in &ordered[v] {
                let w = self.dst[e];
                emb.add_cw(v, w, prev);
                prev = w;
            }
        }
        let mut left_ref = vec![NONE; self.n];
        let mut right_ref = vec![NONE; self.n];
        for i in 0..self.roots.len() {
            let r = self.roots[i];
            self.dfs_embed(r, &ordered, &mut emb, &mut left_ref, &mut right_ref);
        }
        Ok(emb.finish())
    }

    fn dfs_orient(&mut self, v: usize) {
        let e = self.parent_edge[v];
        let nbrs = self.adj[v].clone();
        for w in nbrs {
            if self.eid.contains_key(&(v, w)) || self.eid.contains_key(&(w, v)) {
                continue;
            }
            if w == v {
                continue; // self-loop: irrelevant to planarity
            }
            let vw = self.new_edge(v, w);
            if self.height[w] == NONE {
                self.parent_edge[w] = vw;
                self.height[w] = self.height[v] + 1;
                self.dfs_orient(w);
            } else {
                self.lowpt[vw] = self.height[w];
            }
            self.nesting[vw] = 2 * self.lowpt[vw] as i64;
            if self.lowpt2[vw] < self.height[v] {
                self.nesting[vw] += 1; // chordal: nest inside
            }
            if e != NONE {
                if self.lowpt[vw] < self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                    self.lowpt[e] = self.lowpt[vw];
                } else if self.lowpt[vw] > self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
                } else {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
                }
            }
        }
    }

    fn dfs_test(&mut self, v: usize, ordered: &[Vec<Edge>]) -> bool {
        let e = self.parent_edge[v];
        let edges = ordered[v].clone();
        for (k, &ei) in edges.iter().enumerate() {
            let w = self.dst[ei];
            self.stack_bottom[ei] = self.s.len();
            if ei == self.parent_edge[w] {
                if !self.dfs_test(w, ordered) {
                    return false;
                }
            } else {
                self.lowpt_edge[ei] = ei;
                self.s.push(ConflictPair {
                    l: Interval::EMPTY,
                    r: Interval { low: ei, high: ei },
                });
            }
            if self.lowpt[ei] < self.height[v] {
                // ei has a return edge below v
                if k == 0 {
                    if e != NONE {
                        self.lowpt_edge[e] = self.lowpt_edge[ei];
                    }
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if e != NONE {
            self.remove_back_edges(e);
        }
        true
    }

    fn conflicting(&self, i: Interval, b: Edge) -> bool {
        !i.empty() && self.lowpt[i.high] > self.lowpt[b]
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        if p.l.empty() {
            self.lowpt[p.r.low]
        } else if p.r.empty() {
            self.lowpt[p.l.low]
        } else {
            self.lowpt[p.l.low].min(self.lowpt[p.r.low])
        }
    }

    fn add_constraints(&mut self, ei: Edge, e: Edge) -> bool {
        let mut p = ConflictPair {
            l: Interval::EMPTY,
            r: Interval::EMPTY,
        };
        // merge return edges of ei into p.r
        loop {
            let mut q = self.s.pop().expect("stack underflow");
            if !q.l.empty() {
                std::mem::swap(&mut q.l, &mut q.r);
            }
            if !q.l.empty() {
                return false; // both sides occupied: not planar
            }
            if self.lowpt[q.r.low] > self.lowpt[e] {
                // merge intervals
                if p.r.empty() {
                    p.r.high = q.r.high;
                } else {
                    self.refer[p.r.low] = q.r.high;
                }
                p.r.low = q.r.low;
            } else {
                // align
                self.refer[q.r.low] = self.lowpt_edge[e];
            }
            if self.s.len() == self.stack_bottom[ei] {
                break;
            }
        }
        // merge conflicting return edges of earlier siblings into p.l
        while self
            .s
            .last()
            .map_or(false, |t| self.conflicting(t.l, ei) || self.conflicting(t.r, ei))
        {
            let mut q = self.s.pop().expect("nonempty");
            if self.conflicting(q.r, ei) {
                std::mem::swap(&mut q.l, &mut q.r);
            }
            if self.conflicting(q.r, ei) {
                return false; // not planar
            }
            // merge interval below lowpt(ei) into p.r
            if p.r.low != NONE {
                self.refer[p.r.low] = q.r.high;
            }
            if q.r.low != NONE {
                p.r.low = q.r.low;
            }
            if p.l.empty() {
                p.l.high = q.l.high;
            } else {
                self.refer[p.l.low] = q.l.high;
            }
            p.l.low = q.l.low;
        }
        if !(p.l.empty() && p.r.empty()) {
            self.s.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: Edge) {
        let u = self.src[e];
        // drop entirely-trimmed conflict pairs returning to u
        while let Some(top) = self.s.last() {
            if self.lowest(top) != self.height[u] {
                break;
            }
            let p = self.s.pop().unwrap();
            if p.l.low != NONE {
                self.side[p.l.low] = -1;
            }
        }
        if let Some(mut p) = self.s.pop() {
            // trim left interval
            while p.l.high != NONE && self.dst[p.l.high] == u {
                p.l.high = self.refer[p.l.high];
            }
            if p.l.high == NONE && p.l.low != NONE {
                self.refer[p.l.low] = p.r.low;
                self.side[p.l.low] = -1;
                p.l.low = NONE;
            }
            // trim right interval
            while p.r.high != NONE && self.dst[p.r.high] == u {
                p.r.high = self.refer[p.r.high];
            }
            if p.r.high == NONE && p.r.low != NONE {
                self.refer[p.r.low] = p.l.low;
                self.side[p.r.low] = -1;
                p.r.low = NONE;
            }
            self.s.push(p);
        }
        // side of e is the side of a highest return edge
        if self.lowpt[e] < self.height[u] {
            let top = *self.s.last().expect("return edge implies conflict pair");
            let hl = top.l.high;
            let hr = top.r.high;
            if hl != NONE && (hr == NONE || self.lowpt[hl] > self.lowpt[hr]) {
                self.refer[e] = hl;
            } else {
                self.refer[e] = hr;
            }
        }
    }

    fn sign(&mut self, e: Edge) -> i8 {
        // iterative resolution of the ref chain
        let mut chain = vec![e];
        let mut cur = e;
        while self.refer[cur] != NONE {
            cur = self.refer[cur];
            chain.push(cur);
        }
        let mut s = self.side[cur];
        for &x in chain.iter().rev().skip(1) {
            s *= self.side[x];
            self.side[x] = s;
            self.refer[x] = NONE;
        }
        s
    }

    fn dfs_embed(
        &mut self,
        v: usize,
        ordered: &[Vec<Edge>],
        emb: &mut EmbeddingBuilder,
        left_ref: &mut [usize],
        right_ref: &mut [usize],
    ) {
        for &ei in &ordered[v] {
            let w = self.dst[ei];
            if ei == self.parent_edge[w] {
                emb.add_first(w, v);
                left_ref[v] = w;
                right_ref[v] = w;
                self.dfs_embed(w, ordered, emb, left_ref, right_ref);
            } else if self.side[ei] == 1 {
                emb.add_cw(w, v, right_ref[w]);
            } else {
                emb.add_ccw(w, v, left_ref[w]);
                left_ref[w] = v;
            }
        }
    }
}

/// Clockwise neighbor lists under construction.
struct EmbeddingBuilder {
    rot: Vec<Vec<usize>>,
}

impl EmbeddingBuilder {
    fn new(n: usize) -> Self {
        Self {
            rot: vec![Vec::new(); n],
        }
    }

    /// Insert w immediately after `after` (clockwise) at v; append if NONE.
    fn add_cw(&mut self, v: usize, w: usize, after: usize) {
        if after == NONE {
            self.rot[v].push(w);
            return;
        }
        let i = self.rot[v].iter().position(|&x| x == after).expect("anchor");
        self.rot[v].insert(i + 1, w);
    }

    /// Insert w immediately before `before` (clockwise) at v.
    fn add_ccw(&mut self, v: usize, w: usize, before: usize) {
        if before == NONE {
            self.rot[v].push(w);
            return;
        }
        let i = self.rot[v].iter().position(|&x| x == before).expect("anchor");
        self.rot[v].insert(i, w);
    }

    /// Insert w at the first position of v's list.
    fn add_first(&mut self, v: usize, w: usize) {
        self.rot[v].insert(0, w);
    }

    fn finish(self) -> Vec<Vec<usize>> {
        self.rot
    }
}

/// Make every face a triangle. The input must be connected; graphs with
/// fewer than 3 vertices are returned unchanged. Added edges (including
/// those patching cut vertices) are flagged synthetic.
pub fn triangulate(e: &Embedding) -> Embedding {
    let mut emb = e.clone();
    if emb.rotation.len() < 3 {
        return emb;
    }
    biconnect(&mut emb);
    let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = emb
        .rotation
        .iter()
        .map(|(&v, r)| (v, r.iter().copied().collect()))
        .collect();
    loop {
        let faces = emb.faces();
        let mut changed = false;
        for face in faces {
            if face.len() <= 3 {
                continue;
            }
            // face is a simple cycle after biconnection
            let mut walk: Vec<VertexId> = face.iter().map(|&(a, _)| a).collect();
            while walk.len() > 3 {
                let len = walk.len();
                let mut applied = false;
                for i in 0..len {
                    let a = walk[i];
                    let b = walk[(i + 1) % len];
                    let c = walk[(i + 2) % len];
                    if a != c && !adj[&a].contains(&c) {
                        insert_chord(&mut emb, a, b, c);
                        adj.get_mut(&a).unwrap().insert(c);
                        adj.get_mut(&c).unwrap().insert(a);
                        walk.remove((i + 1) % len);
                        applied = true;
                        changed = true;
                        break;
                    }
                }
                assert!(applied, "triangulation stalled on face {walk:?}");
            }
        }
        if !changed {
            break;
        }
    }
    emb
}

/// Add chord a–c across the face corner a→b→c, inside that face.
fn insert_chord(emb: &mut Embedding, a: VertexId, b: VertexId, c: VertexId) {
    let pos_b_in_a = emb.rotation[&a].iter().position(|&x| x == b).unwrap();
    emb.rotation.get_mut(&a).unwrap().insert(pos_b_in_a, c);
    let pos_b_in_c = emb.rotation[&c].iter().position(|&x| x == b).unwrap();
    emb.rotation.get_mut(&c).unwrap().insert(pos_b_in_c + 1, a);
    emb.synthetic.insert((a.min(c), a.max(c)));
}

/// Add face chords until the embedding is biconnected.
fn biconnect(emb: &mut Embedding) {
    loop {
        let bicomp = edge_bicomps(emb);
        let mut fixed = false;
        'faces: for face in emb.faces() {
            let len = face.len();
            for i in 0..len {
                let (u, v) = face[i];
                let (_, w) = face[(i + 1) % len];
                if u != w && bicomp[&norm(u, v)] != bicomp[&norm(v, w)] {
                    // v is a cut vertex on this face corner
                    insert_chord(emb, u, v, w);
                    fixed = true;
                    break 'faces;
                }
            }
        }
        if !fixed {
            return;
        }
    }
}

fn norm(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    (u.min(v), u.max(v))
}

/// Biconnected component id per undirected edge (iterative DFS lowpoints).
fn edge_bicomps(emb: &Embedding) -> BTreeMap<(VertexId, VertexId), usize> {
    let mut out = BTreeMap::new();
    let mut disc: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut low: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut timer = 0usize;
    let mut comp = 0usize;
    let mut edge_stack: Vec<(VertexId, VertexId)> = Vec::new();
    for &root in emb.rotation.keys() {
        if disc.contains_key(&root) {
            continue;
        }
        // frames: (vertex, parent, next neighbor index)
        let mut frames: Vec<(VertexId, Option<VertexId>, usize)> = vec![(root, None, 0)];
        disc.insert(root, timer);
        low.insert(root, timer);
        timer += 1;
        while let Some(&mut (v, parent, ref mut idx)) = frames.last_mut() {
            if *idx < emb.rotation[&v].len() {
                let w = emb.rotation[&v][*idx];
                *idx += 1;
                if Some(w) == parent {
                    continue;
                }
                if let Some(&dw) = disc.get(&w) {
                    if dw < disc[&v] {
                        edge_stack.push((v, w));
                        let lv = low[&v].min(dw);
                        low.insert(v, lv);
                    }
                } else {
                    edge_stack.push((v, w));
                    disc.insert(w, timer);
                    low.insert(w, timer);
                    timer += 1;
                    frames.push((w, Some(v), 0));
                }
            } else {
                frames.pop();
                if let Some(&mut (u, _, _)) = frames.last_mut() {
                    let lu = low[&u].min(low[&v]);
                    low.insert(u, lu);
                    if low[&v] >= disc[&u] {
                        // u is an articulation point (or root): pop component
                        while let Some((a, b)) = edge_stack.pop() {
                            out.insert(norm(a, b), comp);
                            if (a, b) == (u, v) {
                                break;
                            }
                        }
                        comp += 1;
                    }
                }
            }
        }
    }
    out
}

/// Exhaustive search for a K₅ or K₃,₃ subdivision — the independent
/// planarity reference for small graphs (intended for n ≤ 12).
pub fn has_kuratowski_subdivision(g: &MultiGraph) -> bool {
    let ids: Vec<VertexId> = g.vertices().collect();
    let n = ids.len();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![vec![false; n]; n];
    for &v in &ids {
        for w in g.neighbors(v) {
            adj[index[&v]][index[&w]] = true;
        }
    }
    let deg: Vec<usize> = (0..n).map(|i| (0..n).filter(|&j| adj[i][j]).count()).collect();
    // K5: 5 branch vertices of degree ≥ 4, all 10 pairs linked
    let cand5: Vec<usize> = (0..n).filter(|&i| deg[i] >= 4).collect();
    for combo in combinations(&cand5, 5) {
        let pairs: Vec<(usize, usize)> = (0..5)
            .flat_map(|i| ((i + 1)..5).map(move |j| (i, j)))
            .map(|(i, j)| (combo[i], combo[j]))
            .collect();
        if link_pairs(&adj, n, &combo, &pairs) {
            return true;
        }
    }
    // K3,3: 6 branch vertices of degree ≥ 3 split into two sides
    let cand6: Vec<usize> = (0..n).filter(|&i| deg[i] >= 3).collect();
    for combo in combinations(&cand6, 6) {
        // enumerate 3+3 splits containing combo[0] on side A
        for (x, y) in [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)]
        {
            let a = [combo[0], combo[x], combo[y]];
            let b: Vec<usize> = (1..6).filter(|&i| i != x && i != y).map(|i| combo[i]).collect();
            let pairs: Vec<(usize, usize)> =
                a.iter().flat_map(|&p| b.iter().map(move |&q| (p, q))).collect();
            if link_pairs(&adj, n, &combo, &pairs) {
                return true;
            }
        }
    }
    false
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = items.len();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < i + n - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Try to connect every pair by paths that are internally disjoint and avoid
/// the branch vertices.
fn link_pairs(adj: &[Vec<bool>], n: usize, branch: &[usize], pairs: &[(usize, usize)]) -> bool {
    let mut used = vec![false; n];
    for &b in branch {
        used[b] = true;
    }
    connect(adj, n, pairs, 0, &mut used)
}

fn connect(
    adj: &[Vec<bool>],
    n: usize,
    pairs: &[(usize, usize)],
    k: usize,
    used: &mut Vec<bool>,
) -> bool {
    if k == pairs.len() {
        return true;
    }
    let (s, t) = pairs[k];
    // DFS over simple paths from s to t through unused internal vertices
    fn paths(
        adj: &[Vec<bool>],
        n: usize,
        cur: usize,
        t: usize,
        pairs: &[(usize, usize)],
        k: usize,
        used: &mut Vec<bool>,
        taken: &mut Vec<usize>,
    ) -> bool {
        if adj[cur][t] && connect(adj, n, pairs, k + 1, used) {
            return true;
        }
        for next in 0..n {
            if adj[cur][next] && !used[next] && next != t {
                used[next] = true;
                taken.push(next);
                if paths(adj, n, next, t, pairs, k, used, taken) {
                    return true;
                }
                taken.pop();
                used[next] = false;
            }
        }
        false
    }
    let mut taken = Vec::new();
    paths(adj, n, s, t, pairs, k, used, &mut taken)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn complete(n: u32) -> MultiGraph {
        let mut g = MultiGraph::new();
        for i in 0..n {
            for j in (i + 1)..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    fn grid(r: u32, c: u32) -> MultiGraph {
        let mut g = MultiGraph::new();
        for i in 0..r {
            for j in 0..c {
                let v = i * c + j;
                if j + 1 < c {
                    g.add_edge(v, v + 1);
                }
                if i + 1 < r {
                    g.add_edge(v, v + c);
                }
            }
        }
        g
    }

    #[test]
    fn k4_embeds_with_four_faces() {
        let e = test_and_embed(&complete(4)).unwrap();
        assert_eq!(e.face_count(), 4);
        assert!(e.verify_euler());
    }

    #[test]
    fn k5_and_k33_are_nonplanar() {
        assert_eq!(test_and_embed(&complete(5)), Err(NonPlanar));
        let mut k33 = MultiGraph::new();
        for i in 0..3u32 {
            for j in 3..6u32 {
                k33.add_edge(i, j);
            }
        }
        assert_eq!(test_and_embed(&k33), Err(NonPlanar));
        assert!(has_kuratowski_subdivision(&complete(5)));
        assert!(has_kuratowski_subdivision(&k33));
        assert!(!has_kuratowski_subdivision(&complete(4)));
    }

    #[test]
    fn grid_face_count_matches_euler() {
        let e = test_and_embed(&grid(10, 10)).unwrap();
        assert_eq!(e.face_count(), 82); // 180 − 100 + 2
        assert!(e.verify_euler());
    }

    #[test]
    fn triangulated_edge_count() {
        for g in [grid(3, 3), grid(4, 5), complete(4)] {
            let n = g.vertex_count();
            let e = test_and_embed(&g).unwrap();
            let t = triangulate(&e);
            assert_eq!(t.edge_count(), 3 * n - 6, "n={n}");
            assert!(t.verify_euler());
            assert!(t.faces().iter().all(|f| f.len() == 3));
        }
    }

    #[test]
    fn triangulate_is_idempotent_on_triangulations() {
        let e = test_and_embed(&complete(4)).unwrap();
        let t1 = triangulate(&e);
        let t2 = triangulate(&t1);
        assert_eq!(t1.rotation, t2.rotation);
    }

    #[test]
    fn triangulate_c4_chords_both_faces() {
        let mut c4 = MultiGraph::new();
        for i in 0..4u32 {
            c4.add_edge(i, (i + 1) % 4);
        }
        let t = triangulate(&test_and_embed(&c4).unwrap());
        assert_eq!(t.edge_count(), 6); // one chord inside, one outside
        assert_eq!(t.synthetic_edges().count(), 2);
        assert!(t.faces().iter().all(|f| f.len() == 3));
    }

    #[test]
    fn triangulate_handles_cut_vertices() {
        // two triangles sharing a vertex, plus a pendant path
        let mut g = MultiGraph::new();
        for (u, v) in [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (4, 5), (5, 6)] {
            g.add_edge(u, v);
        }
        let t = triangulate(&test_and_embed(&g).unwrap());
        assert_eq!(t.edge_count(), 3 * 7 - 6);
        assert!(t.faces().iter().all(|f| f.len() == 3));
    }

    fn random_graph(rng: &mut StdRng, n: u32, m: usize) -> MultiGraph {
        let mut g = MultiGraph::new();
        for v in 0..n {
            g.add_vertex_with_id(v);
        }
        let mut added = 0;
        while added < m {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v && g.multiplicity(u, v) == 0 {
                g.add_edge(u, v);
                added += 1;
            }
        }
        g
    }

    #[test]
    fn verdict_matches_kuratowski_search() {
        let mut rng = StdRng::seed_from_u64(77);
        let (mut planar, mut nonplanar) = (0, 0);
        for _ in 0..500 {
            let n = rng.gen_range(5..=12);
            let mmax = (n * (n - 1) / 2) as usize;
            let m = rng.gen_range(4..=mmax.min(3 * n as usize));
            let g = random_graph(&mut rng, n, m);
            let lr = test_and_embed(&g);
            let kur = has_kuratowski_subdivision(&g);
            match &lr {
                Ok(e) => {
                    assert!(!kur, "embedded a graph with a Kuratowski subdivision");
                    assert!(e.verify_euler());
                    planar += 1;
                }
                Err(NonPlanar) => {
                    assert!(kur, "rejected a graph with no Kuratowski subdivision");
                    nonplanar += 1;
                }
            }
        }
        assert!(planar > 50 && nonplanar > 50, "{planar}/{nonplanar}");
    }

    #[test]
    fn random_planar_graphs_triangulate_cleanly() {
        let mut rng = StdRng::seed_from_u64(3);
        let mut done = 0;
        while done < 60 {
            let n = rng.gen_range(4..=11);
            let mmax = (n * (n - 1) / 2) as usize;
            let m = rng.gen_range(3..=(2 * n as usize).min(mmax));
            let g = random_graph(&mut rng, n, m);
            if !g.is_connected() {
                continue;
            }
            if let Ok(e) = test_and_embed(&g) {
                let t = triangulate(&e);
                assert!(t.verify_euler());
                assert!(t.faces().iter().all(|f| f.len() == 3));
                assert_eq!(t.edge_count(), 3 * g.vertex_count() - 6);
                done += 1;
            }
        }
    }
}
