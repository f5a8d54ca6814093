//! Divide-and-conquer approximation: kernelize, decompose with balanced
//! separators to pieces of at most `r` vertices, solve every piece exactly,
//! take the union with all separators, and lift back.
//!
//! Three variants:
//! * `Vanilla` — the plain pipeline above.
//! * `Minimal` — additionally minimalizes the lifted solution, scanning
//!   only vertices that came from separators (their images after lifting),
//!   in reverse order of separator discovery. Pieces are solved optimally,
//!   so only separator vertices can be redundant.
//! * `Optimized` — re-kernelizes every part right after each separator
//!   removal, keeping one reduction trace per tree node; lifts replay
//!   child-before-parent, and the result is minimalized as in `Minimal`.
//!
//! `r` is the knob: larger r means slower leaf solves but smaller
//! solutions. `sweep_r` automates the "raise r until a leaf becomes
//! unsolvable" schedule.

use crate::exact::{solve_exact, ExactConfig, ExactError};
use crate::graph::{FvsSolution, MultiGraph, VertexId};
use crate::kernel::{kernelize, lift_tracked};
use crate::separator::{decompose, find_separator, DecompositionTree, SeparatorError};
use crate::{approx2, embed};
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PtasError {
    #[error("leaf unsolved at r={0}")]
    LeafUnsolved(usize),
    #[error(transparent)]
    Separator(#[from] SeparatorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtasVariant {
    Vanilla,
    Minimal,
    Optimized,
}

impl std::fmt::Display for PtasVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PtasVariant::Vanilla => "vanilla",
            PtasVariant::Minimal => "minimal",
            PtasVariant::Optimized => "optimized",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PtasConfig {
    /// leaf-size cap; the approximation knob
    pub r: usize,
    pub variant: PtasVariant,
    /// time budget per leaf solve
    pub leaf_budget: Duration,
}

impl Default for PtasConfig {
    fn default() -> Self {
        Self {
            r: 60,
            variant: PtasVariant::Vanilla,
            leaf_budget: Duration::from_secs(15),
        }
    }
}

impl PtasConfig {
    fn exact_cfg(&self, kernelize_first: bool) -> ExactConfig {
        ExactConfig {
            time_budget: self.leaf_budget,
            kernelize_first,
        }
    }
}

pub fn ptas_solve(g: &MultiGraph, cfg: &PtasConfig) -> Result<FvsSolution, PtasError> {
    ptas_solve_with_tree(g, cfg).map(|(s, _)| s)
}

/// As [`ptas_solve`], returning the decomposition tree as well. For the
/// optimized variant the tree carries one reduction trace per node and its
/// vertex sets and separators refer to the per-node kernel graphs.
pub fn ptas_solve_with_tree(
    g: &MultiGraph,
    cfg: &PtasConfig,
) -> Result<(FvsSolution, DecompositionTree), PtasError> {
    let start = Instant::now();
    let (set, tree) = match cfg.variant {
        PtasVariant::Optimized => {
            let mut nodes = Vec::new();
            let (sol, sep_images) = solve_rekernelizing(g, cfg, &mut nodes)?;
            // scan separator images first (most likely redundant), then the
            // rest of the solution, so the result is minimal outright
            let mut order: Vec<VertexId> = sep_images.into_iter().rev().collect();
            let seen: BTreeSet<VertexId> = order.iter().copied().collect();
            order.extend(sol.iter().rev().filter(|v| !seen.contains(v)));
            let minimal = approx2::minimalize(g, &FvsSolution::new(sol, ""), &order)
                .expect("solution feasible by construction");
            let separator_total = nodes.iter().map(|n| n.separator.len()).sum();
            let tree = DecompositionTree {
                nodes,
                root: 0,
                separator_total,
                c2: measured_c2(separator_total, g.vertex_count(), cfg.r),
            };
            (minimal.vertex_set, tree)
        }
        _ => {
            let ko = kernelize(g);
            let tree = decompose(&ko.kernel, cfg.r)?;
            let mut u_h: BTreeSet<VertexId> = BTreeSet::new();
            let mut sep_order: Vec<VertexId> = Vec::new();
            for node in &tree.nodes {
                u_h.extend(&node.separator);
                sep_order.extend(&node.separator);
            }
            for leaf in tree.leaves() {
                let lg = ko.kernel.induced(&tree.nodes[leaf].vertices);
                let sol = solve_exact(&lg, &cfg.exact_cfg(true))
                    .map_err(|e| leaf_error(e, cfg.r))?;
                u_h.extend(sol.vertex_set);
            }
            debug_assert!(ko.kernel.is_fvs(&u_h).unwrap_or(false));
            let (lifted, alias) =
                lift_tracked(g, &ko.trace, &FvsSolution::new(u_h, ""), &sep_order)
                    .expect("union of separators and leaf optima must lift");
            let set = if cfg.variant == PtasVariant::Minimal {
                let order: Vec<VertexId> =
                    sep_order.iter().rev().map(|v| alias[v]).collect();
                approx2::minimalize(g, &lifted, &order)
                    .expect("lifted solution is feasible")
                    .vertex_set
            } else {
                lifted.vertex_set
            };
            (set, tree)
        }
    };
    let mut out = FvsSolution::new(set, "ptas");
    out.meta.params = format!("r={} variant={}", cfg.r, cfg.variant);
    out.meta.elapsed = start.elapsed();
    Ok((out, tree))
}

fn leaf_error(e: ExactError, r: usize) -> PtasError {
    match e {
        ExactError::Timeout => PtasError::LeafUnsolved(r),
        ExactError::TooLarge(_) => unreachable!("leaf solver has no size limit"),
    }
}

fn measured_c2(total: usize, n: usize, r: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        total as f64 * (r as f64).sqrt() / n as f64
    }
}

/// Optimized-variant recursion. Returns a feasible solution for `g` plus
/// the images of all separator vertices in discovery order, both in `g`'s
/// ids. Appends this node's `DecompNode` (and its subtree) to `nodes`.
fn solve_rekernelizing(
    g: &MultiGraph,
    cfg: &PtasConfig,
    nodes: &mut Vec<crate::separator::DecompNode>,
) -> Result<(BTreeSet<VertexId>, Vec<VertexId>), PtasError> {
    let idx = nodes.len();
    nodes.push(crate::separator::DecompNode {
        vertices: g.vertices().collect(),
        separator: Vec::new(),
        phase: None,
        children: Vec::new(),
        trace: None,
    });
    let ko = kernelize(g);
    let h = ko.kernel;
    nodes[idx].trace = Some(ko.trace.clone());

    let mut sol_h: BTreeSet<VertexId> = BTreeSet::new();
    let mut seps_h: Vec<VertexId> = Vec::new();
    if h.vertex_count() <= cfg.r {
        let sol = solve_exact(&h, &cfg.exact_cfg(false)).map_err(|e| leaf_error(e, cfg.r))?;
        sol_h = sol.vertex_set;
    } else if !h.is_connected() {
        for comp in h.components() {
            let child = nodes.len();
            let (s, seps) = solve_rekernelizing(&h.induced(&comp), cfg, nodes)?;
            nodes[idx].children.push(child);
            sol_h.extend(s);
            seps_h.extend(seps);
        }
    } else {
        let e = embed::test_and_embed(&h).map_err(SeparatorError::from)?;
        let res = find_separator(&h, &e)?;
        let sep: BTreeSet<VertexId> = res.separator.iter().copied().collect();
        sol_h.extend(&sep);
        seps_h.extend(&res.separator);
        nodes[idx].separator = res.separator;
        nodes[idx].phase = Some(res.phase);
        for comp in h.without(&sep).components() {
            let child = nodes.len();
            let (s, seps) = solve_rekernelizing(&h.induced(&comp), cfg, nodes)?;
            nodes[idx].children.push(child);
            sol_h.extend(s);
            seps_h.extend(seps);
        }
    }
    let (lifted, alias) = lift_tracked(g, nodes[idx].trace.as_ref().unwrap(),
        &FvsSolution::new(sol_h, ""), &seps_h)
        .expect("per-node solution must lift");
    let seps_g = seps_h.iter().map(|v| alias[v]).collect();
    Ok((lifted.vertex_set, seps_g))
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub best: FvsSolution,
    /// the r that produced `best`
    pub best_r: usize,
    /// largest r that still produced a feasible solution
    pub largest_r: usize,
    /// (r, solution size) per successful step
    pub history: Vec<(usize, usize)>,
}

/// Run [`ptas_solve`] with increasing r until a leaf solve times out (or r
/// covers the whole kernel), keeping the smallest solution seen.
pub fn sweep_r(
    g: &MultiGraph,
    r_start: usize,
    r_step: usize,
    variant: PtasVariant,
    leaf_budget: Duration,
) -> Result<SweepOutcome, PtasError> {
    assert!(r_start >= 3 && r_step >= 1);
    let kernel_n = kernelize(g).kernel.vertex_count();
    let mut best: Option<(FvsSolution, usize)> = None;
    let mut history = Vec::new();
    let mut largest = 0usize;
    let mut r = r_start;
    loop {
        let cfg = PtasConfig {
            r,
            variant,
            leaf_budget,
        };
        match ptas_solve(g, &cfg) {
            Ok(sol) => {
                largest = r;
                history.push((r, sol.vertex_set.len()));
                if best
                    .as_ref()
                    .map_or(true, |(b, _)| sol.vertex_set.len() < b.vertex_set.len())
                {
                    best = Some((sol, r));
                }
            }
            Err(PtasError::LeafUnsolved(_)) if best.is_some() => break,
            Err(e) => return Err(e),
        }
        if r >= kernel_n {
            break; // larger r cannot change the decomposition
        }
        r += r_step;
    }
    let (best, best_r) = best.expect("loop exits only after a success");
    Ok(SweepOutcome {
        best,
        best_r,
        largest_r: largest,
        history,
    })
}
