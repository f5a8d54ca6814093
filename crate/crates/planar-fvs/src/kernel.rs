//! Kernelization: local reduction rules applied to exhaustion with an event
//! trace that lifts any kernel FVS back to the original graph.
//!
//! Rules fall into three types. Type 1 rewrites preserve the optimum and
//! need no replay (degree-≤1 deletion, degree-2 suppression, multiplicity
//! capping, the neighbor-triangle rewrite). Type 2 rules mark a vertex that
//! belongs to some optimal solution and delete it (self-loops, forced
//! endpoints of short parallel structures, exactly-solved small components).
//! Type 3 rules exchange vertices: Rule 8 relabels an original vertex into a
//! fresh one (its solution occurrences are substituted back on lift), and
//! Rule 9 replaces a doubled degree-3 pair by a fresh looped vertex whose
//! forced selection is substituted by a pair member.
//!
//! Every rule strictly decreases the vertex count, so the engine terminates
//! after at most n applications.

use crate::exact::brute_force_opt;
use crate::graph::{FvsSolution, GraphError, MultiGraph, VertexId};
use std::collections::{BTreeMap, BTreeSet};

/// Components at or below this size are solved exactly and removed.
const SMALL_COMPONENT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    /// Type-2: `vertex` belongs to some optimal solution and was removed.
    Marked { vertex: VertexId, rule: u8 },
    /// Type-1: optimum-preserving rewrite with identity lift.
    Neutral { rule: u8 },
    /// Type-3 (Rule 8): `original` was relabeled to the fresh id
    /// `introduced`; solution occurrences substitute back.
    Relabel {
        rule: u8,
        introduced: VertexId,
        original: VertexId,
    },
    /// Type-3 (Rule 9): `originals` were replaced by the fresh vertex
    /// `introduced`; its solution occurrences become `substitute`.
    Structured {
        rule: u8,
        originals: Vec<VertexId>,
        introduced: VertexId,
        substitute: VertexId,
    },
}

/// Ordered log of reduction events, replayable in reverse for lifting.
#[derive(Debug, Clone, Default)]
pub struct ReductionTrace {
    pub events: Vec<TraceEvent>,
}

impl ReductionTrace {
    pub fn marked_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, TraceEvent::Marked { .. }))
            .count()
    }

    /// Per-rule application counts (debug aid).
    pub fn rule_counts(&self) -> BTreeMap<u8, usize> {
        let mut m = BTreeMap::new();
        for e in &self.events {
            let rule = match e {
                TraceEvent::Marked { rule, .. }
                | TraceEvent::Neutral { rule }
                | TraceEvent::Relabel { rule, .. }
                | TraceEvent::Structured { rule, .. } => *rule,
            };
            *m.entry(rule).or_insert(0) += 1;
        }
        m
    }
}

#[derive(Debug, Clone)]
pub struct KernelOutput {
    pub kernel: MultiGraph,
    pub trace: ReductionTrace,
    pub marked_count: usize,
}

/// Reduce `g` by rules 1–11 to exhaustion.
pub fn kernelize(g: &MultiGraph) -> KernelOutput {
    let mut r = Reducer::new(g.clone());
    r.run();
    r.into_output()
}

/// Replay `trace` in reverse over a kernel solution, producing a feasible
/// FVS for the original graph.
pub fn lift(
    g_original: &MultiGraph,
    trace: &ReductionTrace,
    s_kernel: &FvsSolution,
) -> Result<FvsSolution, GraphError> {
    lift_tracked(g_original, trace, s_kernel, &[]).map(|(s, _)| s)
}

/// Like [`lift`], but also reports where each vertex of `track` (given in
/// kernel ids) ends up in the lifted solution after substitutions. Tracked
/// vertices absent from the kernel solution keep their identity mapping.
pub fn lift_tracked(
    g_original: &MultiGraph,
    trace: &ReductionTrace,
    s_kernel: &FvsSolution,
    track: &[VertexId],
) -> Result<(FvsSolution, BTreeMap<VertexId, VertexId>), GraphError> {
    let mut set = s_kernel.vertex_set.clone();
    let mut alias: BTreeMap<VertexId, VertexId> = track.iter().map(|&v| (v, v)).collect();
    // current id → tracked kernel ids sitting there
    let mut rev: BTreeMap<VertexId, Vec<VertexId>> =
        track.iter().map(|&v| (v, vec![v])).collect();
    let substitute = |set: &mut BTreeSet<VertexId>,
                          alias: &mut BTreeMap<VertexId, VertexId>,
                          rev: &mut BTreeMap<VertexId, Vec<VertexId>>,
                          from: VertexId,
                          to: VertexId| {
        if set.remove(&from) {
            set.insert(to);
            if let Some(tracked) = rev.remove(&from) {
                for &t in &tracked {
                    alias.insert(t, to);
                }
                rev.entry(to).or_default().extend(tracked);
            }
        }
    };
    for ev in trace.events.iter().rev() {
        match ev {
            TraceEvent::Marked { vertex, .. } => {
                set.insert(*vertex);
            }
            TraceEvent::Neutral { .. } => {}
            TraceEvent::Relabel {
                introduced,
                original,
                ..
            } => substitute(&mut set, &mut alias, &mut rev, *introduced, *original),
            TraceEvent::Structured {
                introduced,
                substitute: sub,
                ..
            } => substitute(&mut set, &mut alias, &mut rev, *introduced, *sub),
        }
    }
    if !g_original.is_fvs(&set)? {
        return Err(GraphError::NotFeasible);
    }
    let mut out = s_kernel.clone();
    out.vertex_set = set;
    Ok((out, alias))
}

/// The rule engine. Shared with the hybrid heuristic, which interleaves
/// greedy deletions (recorded as Marked events) with rule fixpoints.
pub(crate) struct Reducer {
    pub g: MultiGraph,
    pub trace: ReductionTrace,
    /// worklist for rules 1–5
    pa: BTreeSet<VertexId>,
    /// candidate vertices for Rule 6 (parallel-edge endpoints)
    q1: BTreeSet<VertexId>,
    /// candidate vertices for rules 7–11
    q2: BTreeSet<VertexId>,
}

impl Reducer {
    pub fn new(g: MultiGraph) -> Self {
        let all: BTreeSet<VertexId> = g.vertices().collect();
        Self {
            g,
            trace: ReductionTrace::default(),
            pa: all.clone(),
            q1: all.clone(),
            q2: all,
        }
    }

    pub fn into_output(self) -> KernelOutput {
        let marked_count = self.trace.marked_count();
        KernelOutput {
            kernel: self.g,
            trace: self.trace,
            marked_count,
        }
    }

    /// Re-examine v and its neighborhood after a mutation near v.
    fn wake_around(&mut self, v: VertexId) {
        if !self.g.contains(v) {
            return;
        }
        self.pa.insert(v);
        self.q1.insert(v);
        self.q2.insert(v);
        let nbrs: Vec<VertexId> = self.g.neighbors(v).collect();
        for w in nbrs {
            self.pa.insert(w);
            self.q1.insert(w);
            self.q2.insert(w);
        }
    }

    /// Record v as part of the solution and remove it (type-2 action).
    pub fn mark(&mut self, v: VertexId, rule: u8) {
        debug_assert!(self.g.contains(v));
        self.trace.events.push(TraceEvent::Marked { vertex: v, rule });
        let nbrs: Vec<VertexId> = self.g.neighbors(v).collect();
        self.g.delete_vertex(v);
        for w in nbrs {
            self.wake_around(w);
        }
    }

    /// Run all rules to exhaustion: rules 1–5 to fixpoint, then one Rule 6
    /// application, then one of rules 7–11, restarting after every hit.
    pub fn run(&mut self) {
        loop {
            self.run_rules_1_5();
            if self.apply_rule6() {
                continue;
            }
            if self.apply_rules_7_11() {
                continue;
            }
            break;
        }
    }

    fn run_rules_1_5(&mut self) {
        while let Some(&v) = self.pa.iter().next() {
            self.pa.remove(&v);
            if !self.g.contains(v) {
                continue;
            }
            // Rule 2: self-loop forces v
            if self.g.has_self_loop(v) {
                self.mark(v, 2);
                continue;
            }
            let deg = self.g.degree(v);
            // Rule 1: acyclic fringe
            if deg <= 1 {
                let nbrs: Vec<VertexId> = self.g.neighbors(v).collect();
                self.g.delete_vertex(v);
                self.trace.events.push(TraceEvent::Neutral { rule: 1 });
                for w in nbrs {
                    self.wake_around(w);
                }
                continue;
            }
            if deg != 2 {
                continue;
            }
            let nbrs: Vec<(VertexId, u8)> = self.g.neighbor_mults(v).collect();
            match nbrs.as_slice() {
                // Rule 5: 2-cycle where v has nothing else; u dominates v
                [(u, 2)] => {
                    let u = *u;
                    self.mark(u, 5);
                }
                // Rule 3: suppress a plain degree-2 vertex
                [(w1, 1), (w2, 1)] => {
                    let (w1, w2) = (*w1, *w2);
                    self.g.contract_degree_two(v).expect("checked shape");
                    self.trace.events.push(TraceEvent::Neutral { rule: 3 });
                    self.wake_around(w1);
                    self.wake_around(w2);
                }
                _ => unreachable!("degree 2 without self-loop"),
            }
        }
    }

    /// Rule 6: a parallel pair (u, v) with deg(v) = 3 and deg(u) ≥ 4 forces
    /// u (every cycle through v passes u, and the 2-cycle needs one of them).
    /// The deg(u) = 3 case is left for rules 9/10.
    fn apply_rule6(&mut self) -> bool {
        while let Some(&v) = self.q1.iter().next() {
            if self.g.contains(v) {
                let pairs: Vec<(VertexId, u8)> = self.g.neighbor_mults(v).collect();
                for (w, m) in pairs {
                    if m < 2 {
                        continue;
                    }
                    let (dv, dw) = (self.g.degree(v), self.g.degree(w));
                    if dv >= 4 && dw == 3 {
                        self.mark(v, 6);
                        return true;
                    }
                    if dv == 3 && dw >= 4 {
                        self.mark(w, 6);
                        return true;
                    }
                }
            }
            self.q1.remove(&v);
        }
        false
    }

    fn apply_rules_7_11(&mut self) -> bool {
        while let Some(&v) = self.q2.iter().next() {
            if self.g.contains(v) {
                if self.try_rules_7_10(v) || self.try_rule11(v) {
                    return true;
                }
            }
            self.q2.remove(&v);
        }
        false
    }

    /// Rules 7–10 centered at a degree-3 vertex.
    fn try_rules_7_10(&mut self, v: VertexId) -> bool {
        if self.g.degree(v) != 3 {
            return false;
        }
        let nbrs: Vec<(VertexId, u8)> = self.g.neighbor_mults(v).collect();
        // doubled pair: rules 9/10 (Rule 6 already excluded deg(b) ≥ 4)
        if let Some(&(b, 2)) = nbrs.iter().find(|&&(_, m)| m == 2) {
            if self.g.degree(b) != 3 {
                return false;
            }
            let p = nbrs.iter().find(|&&(w, _)| w != b).map(|&(w, _)| w);
            let q = self
                .g
                .neighbor_mults(b)
                .find(|&(w, _)| w != v)
                .map(|(w, _)| w);
            let (Some(p), Some(q)) = (p, q) else { return false };
            let a = v.min(b);
            if p == q {
                // Rule 10: all cycles through the pair meet at a; force it
                self.mark(a, 10);
            } else {
                // Rule 9: replace the pair by a looped proxy between p and q
                self.g.delete_vertex(v);
                self.g.delete_vertex(b);
                let c = self.g.add_vertex();
                self.g.add_edge(c, c);
                self.g.add_edge(c, p);
                self.g.add_edge(c, q);
                self.trace.events.push(TraceEvent::Structured {
                    rule: 9,
                    originals: vec![a, v.max(b), p, q],
                    introduced: c,
                    substitute: a,
                });
                self.wake_around(p);
                self.wake_around(q);
                self.wake_around(c);
            }
            return true;
        }
        // three single edges to distinct neighbors: rules 7/8 when two of
        // them are adjacent (the added edges re-route cycles around v)
        let singles: Vec<VertexId> = nbrs.iter().map(|&(w, _)| w).collect();
        if singles.len() != 3 {
            return false;
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let (x, y) = (singles[i], singles[j]);
            let z = singles[3 - i - j];
            match self.g.multiplicity(x, y) {
                2 => {
                    // Rule 7: neighbors already doubled; drop v, keep its
                    // through-paths as direct edges
                    self.g.delete_vertex(v);
                    self.g.add_edge(x, z);
                    self.g.add_edge(y, z);
                    self.trace.events.push(TraceEvent::Neutral { rule: 7 });
                    self.wake_around(x);
                    self.wake_around(y);
                    self.wake_around(z);
                    return true;
                }
                1 => {
                    // Rule 8: same rewrite, but the surviving endpoint x is
                    // relabeled to a fresh vertex so the lift can substitute
                    self.g.delete_vertex(v);
                    let edges: Vec<(VertexId, u8)> = self.g.neighbor_mults(x).collect();
                    self.g.delete_vertex(x);
                    let fresh = self.g.add_vertex();
                    for (w, m) in edges {
                        for _ in 0..m {
                            self.g.add_edge(fresh, w);
                        }
                    }
                    self.g.add_edge(fresh, y);
                    self.g.add_edge(fresh, z);
                    self.g.add_edge(y, z);
                    self.trace.events.push(TraceEvent::Relabel {
                        rule: 8,
                        introduced: fresh,
                        original: x,
                    });
                    self.wake_around(fresh);
                    self.wake_around(y);
                    self.wake_around(z);
                    return true;
                }
                _ => {}
            }
        }
        false
    }

    /// Rule 11: solve a small connected component exactly and remove it.
    fn try_rule11(&mut self, v: VertexId) -> bool {
        let mut comp = BTreeSet::new();
        let mut frontier = vec![v];
        comp.insert(v);
        while let Some(u) = frontier.pop() {
            for w in self.g.neighbors(u).collect::<Vec<_>>() {
                if comp.insert(w) {
                    if comp.len() > SMALL_COMPONENT {
                        return false;
                    }
                    frontier.push(w);
                }
            }
        }
        let sub = self.g.induced(&comp);
        let opt = brute_force_opt(&sub).expect("component within brute-force guard");
        for &u in &opt.vertex_set {
            self.trace.events.push(TraceEvent::Marked { vertex: u, rule: 11 });
        }
        for &u in &comp {
            self.g.delete_vertex(u);
        }
        true
    }
}

/// Full-scan check that no rule 1–11 applies (test support).
pub fn is_fully_reduced(g: &MultiGraph) -> bool {
    for v in g.vertices() {
        if g.has_self_loop(v) || g.degree(v) <= 2 {
            return false;
        }
        if g.degree(v) == 3 {
            let nbrs: Vec<(VertexId, u8)> = g.neighbor_mults(v).collect();
            if nbrs.iter().any(|&(_, m)| m == 2) {
                return false; // rule 6, 9, or 10
            }
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                if g.multiplicity(nbrs[i].0, nbrs[j].0) > 0 {
                    return false; // rule 7 or 8
                }
            }
        }
    }
    g.components().iter().all(|c| c.len() > SMALL_COMPONENT) || g.vertex_count() == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force_opt;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn cycle(n: u32) -> MultiGraph {
        let mut g = MultiGraph::new();
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    #[test]
    fn forest_reduces_to_empty() {
        let mut g = MultiGraph::new();
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        g.add_edge(1, 3);
        g.add_vertex_with_id(9);
        let k = kernelize(&g);
        assert_eq!(k.kernel.vertex_count(), 0);
        assert_eq!(k.marked_count, 0);
    }

    #[test]
    fn self_loop_with_pendant_path() {
        let mut g = MultiGraph::new();
        g.add_edge(0, 0);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        let k = kernelize(&g);
        assert_eq!(k.kernel.vertex_count(), 0);
        assert_eq!(k.marked_count, 1);
        let lifted = lift(&g, &k.trace, &FvsSolution::default()).unwrap();
        assert_eq!(lifted.vertex_set, [0].into());
    }

    #[test]
    fn c7_accounting() {
        let g = cycle(7);
        let k = kernelize(&g);
        assert_eq!(k.kernel.vertex_count(), 0);
        assert_eq!(k.marked_count, 1);
        let opt = brute_force_opt(&g).unwrap();
        assert_eq!(opt.len(), k.marked_count);
        let lifted = lift(&g, &k.trace, &FvsSolution::default()).unwrap();
        assert_eq!(lifted.len(), 1);
    }

    #[test]
    fn empty_trace_lift_is_identity() {
        let g = cycle(5);
        let s = FvsSolution::new([2].into(), "t");
        let out = lift(&g, &ReductionTrace::default(), &s).unwrap();
        assert_eq!(out.vertex_set, s.vertex_set);
    }

    #[test]
    fn lift_rejects_infeasible() {
        let g = cycle(5);
        let r = lift(&g, &ReductionTrace::default(), &FvsSolution::default());
        assert!(matches!(r, Err(GraphError::NotFeasible)));
    }

    fn random_multigraph(rng: &mut StdRng, n: u32, m: usize) -> MultiGraph {
        let mut g = MultiGraph::new();
        for v in 0..n {
            g.add_vertex_with_id(v);
        }
        for _ in 0..m {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            g.add_edge(u, v);
        }
        g
    }

    #[test]
    fn optimum_preserved_on_random_instances() {
        let mut rng = StdRng::seed_from_u64(11);
        for trial in 0..120 {
            let n = rng.gen_range(4..=13);
            let m = rng.gen_range(3..=22);
            let g = random_multigraph(&mut rng, n, m);
            let k = kernelize(&g);
            assert!(
                is_fully_reduced(&k.kernel),
                "trial {trial}: kernel not exhausted"
            );
            let opt_g = brute_force_opt(&g).unwrap();
            let opt_h = brute_force_opt(&k.kernel).unwrap();
            assert_eq!(
                opt_g.len(),
                opt_h.len() + k.marked_count,
                "trial {trial}: OPT accounting failed"
            );
            let lifted = lift(&g, &k.trace, &opt_h).unwrap();
            assert_eq!(lifted.len(), opt_g.len(), "trial {trial}: lift not optimal");
        }
    }

    #[test]
    fn lift_size_bound_for_arbitrary_kernel_solutions() {
        // |lift(U_H)| − |U_H| ≤ OPT(G) − OPT(H) for any feasible U_H
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..40 {
            let n = rng.gen_range(5..=12);
            let m = rng.gen_range(4..=20);
            let g = random_multigraph(&mut rng, n, m);
            let k = kernelize(&g);
            let gap = brute_force_opt(&g).unwrap().len() - brute_force_opt(&k.kernel).unwrap().len();
            // sample feasible kernel solutions: optimum plus random extras
            let base = brute_force_opt(&k.kernel).unwrap().vertex_set;
            let verts: Vec<VertexId> = k.kernel.vertices().collect();
            for _ in 0..10 {
                let mut s = base.clone();
                for &v in &verts {
                    if rng.gen_bool(0.3) {
                        s.insert(v);
                    }
                }
                let sol = FvsSolution::new(s.clone(), "t");
                let lifted = lift(&g, &k.trace, &sol).unwrap();
                assert!(lifted.len() <= s.len() + gap);
                assert!(g.is_fvs(&lifted.vertex_set).unwrap());
            }
        }
    }

    #[test]
    fn kernel_determinism() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..30 {
            let g = random_multigraph(&mut rng, 12, 18);
            let a = kernelize(&g);
            let b = kernelize(&g);
            assert_eq!(
                a.kernel.vertices().collect::<Vec<_>>(),
                b.kernel.vertices().collect::<Vec<_>>()
            );
            assert_eq!(a.trace.events, b.trace.events);
        }
    }
}
