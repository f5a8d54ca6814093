//! Instance generators, DIMACS road-network ingestion, the grid lower bound,
//! and the benchmark runner behind the CLI.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approx2::two_approx;
use crate::embed::test_and_embed;
use crate::exact::{solve_exact, ExactConfig};
use crate::graph::{FvsSolution, MultiGraph, VertexId};
use crate::heuristics::{has_solve_logged, hybrid_solve, HasConfig, HybridConfig};
use crate::ptas::{ptas_solve, PtasConfig};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("requested {m} edges on {n} vertices is out of range")]
    InfeasibleEdgeCount { n: usize, m: usize },
    #[error("generator needs at least {0} vertices")]
    TooFewVertices(usize),
    #[error("could not realize the requested instance from this seed")]
    Unrealizable,
    #[error("{file} line {line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("vertex {0} has no coordinate")]
    MissingCoord(u64),
    #[error("collinear overlapping segments ({0},{1}) and ({2},{3})")]
    CollinearOverlap(u64, u64, u64, u64),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// rows×cols rectangular grid, vertex r*cols+c for row r, column c.
pub fn gen_grid(rows: usize, cols: usize) -> MultiGraph {
    assert!(rows >= 2 && cols >= 2);
    let mut g = MultiGraph::new();
    for _ in 0..rows * cols {
        g.add_vertex();
    }
    let id = |r: usize, c: usize| (r * cols + c) as VertexId;
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                g.add_edge(id(r, c), id(r, c + 1));
            }
            if r + 1 < rows {
                g.add_edge(id(r, c), id(r + 1, c));
            }
        }
    }
    g
}

/// Luccio's closed-form lower bound on the minimum FVS of a rows×cols grid:
/// ⌈((rows−1)(cols−1)+1)/3⌉.
pub fn grid_lower_bound(rows: usize, cols: usize) -> usize {
    assert!(rows >= 2 && cols >= 2);
    ((rows - 1) * (cols - 1) + 1).div_ceil(3)
}

fn orient(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Triangulate a lex-sorted set of distinct points by the incremental sweep:
/// each point is joined to every hull vertex it sees. Returns the graph and
/// the final hull size, or None when a degenerate (collinear) configuration
/// shows up.
fn triangulate_points(pts: &[(i64, i64)]) -> Option<(MultiGraph, usize)> {
    let n = pts.len();
    let mut g = MultiGraph::new();
    for _ in 0..n {
        g.add_vertex();
    }
    let link = |g: &mut MultiGraph, u: usize, v: usize| {
        if g.multiplicity(u as VertexId, v as VertexId) == 0 {
            g.add_edge(u as VertexId, v as VertexId);
        }
    };
    // hull in counter-clockwise order
    let mut hull: Vec<usize> = vec![0, 1];
    link(&mut g, 0, 1);
    for i in 2..n {
        let p = pts[i];
        if hull.len() == 2 {
            let o = orient(pts[hull[0]], pts[hull[1]], p);
            if o == 0 {
                return None;
            }
            link(&mut g, i, hull[0]);
            link(&mut g, i, hull[1]);
            if o < 0 {
                hull.swap(0, 1);
            }
            hull.push(i);
            continue;
        }
        let h = hull.len();
        let mut vis = vec![false; h];
        for j in 0..h {
            let o = orient(pts[hull[j]], pts[hull[(j + 1) % h]], p);
            if o == 0 {
                return None;
            }
            vis[j] = o < 0;
        }
        // the visible edges form one circular arc; find where it starts
        let s = (0..h).find(|&j| !vis[j] && vis[(j + 1) % h])?;
        let mut arc = vec![hull[(s + 1) % h]];
        let mut j = (s + 1) % h;
        while vis[j] {
            arc.push(hull[(j + 1) % h]);
            j = (j + 1) % h;
        }
        for &v in &arc {
            link(&mut g, i, v);
        }
        // replace the interior of the arc with p
        let mut next: Vec<usize> = Vec::with_capacity(h + 2 - arc.len());
        let mut k = j; // first non-visible edge after the arc starts at hull[j]
        loop {
            next.push(hull[k]);
            if k == (s + 1) % h {
                break;
            }
            k = (k + 1) % h;
        }
        next.push(i);
        hull = next;
    }
    Some((g, hull.len()))
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<(i64, i64)> {
    let mut set: BTreeSet<(i64, i64)> = BTreeSet::new();
    while set.len() < n {
        set.insert((rng.gen_range(0..1 << 20), rng.gen_range(0..1 << 20)));
    }
    set.into_iter().collect() // already lex-sorted
}

/// Random triangulation of n points: every face is a triangle except the
/// outer one, which is the convex hull of the point set.
pub fn gen_triangu(n: usize, seed: u64) -> Result<MultiGraph, BenchError> {
    if n < 3 {
        return Err(BenchError::TooFewVertices(3));
    }
    for attempt in 0..16u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ attempt.wrapping_mul(0x9e3779b97f4a7c15));
        let pts = random_points(&mut rng, n);
        if let Some((g, hull)) = triangulate_points(&pts) {
            debug_assert_eq!(g.edge_count(), 3 * n - 3 - hull);
            debug_assert!(test_and_embed(&g).is_ok());
            return Ok(g);
        }
    }
    Err(BenchError::Unrealizable)
}

/// Connected random planar graph: a random triangulation thinned down to m
/// edges by uniform deletion, rejecting deletions that disconnect.
pub fn gen_random_planar(n: usize, m: usize, seed: u64) -> Result<MultiGraph, BenchError> {
    if n < 3 {
        return Err(BenchError::TooFewVertices(3));
    }
    if m + 6 > 3 * n || m + 1 < n {
        return Err(BenchError::InfeasibleEdgeCount { n, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..16u64 {
        let g = gen_triangu(n, seed ^ attempt.wrapping_mul(0x517cc1b727220a95))?;
        if g.edge_count() < m {
            continue; // large hull left too few edges; redraw the points
        }
        let mut g = g;
        'thin: while g.edge_count() > m {
            let mut edges: Vec<(VertexId, VertexId)> = Vec::with_capacity(g.edge_count());
            for u in g.vertices() {
                for v in g.neighbors(u) {
                    if u < v {
                        edges.push((u, v));
                    }
                }
            }
            edges.shuffle(&mut rng);
            for (u, v) in edges {
                if g.edge_count() == m {
                    break 'thin;
                }
                g.delete_edge(u, v);
                if !g.is_connected() {
                    g.add_edge(u, v);
                }
            }
            break; // a full pass with no removable edge: give up on this draw
        }
        if g.edge_count() == m {
            return Ok(g);
        }
    }
    Err(BenchError::Unrealizable)
}

type Pt = (BigRational, BigRational);

fn big_pt(p: (i64, i64)) -> Pt {
    (
        BigRational::from(BigInt::from(p.0)),
        BigRational::from(BigInt::from(p.1)),
    )
}

fn cross128(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i128 {
    (b.0 - a.0) as i128 * (c.1 - a.1) as i128 - (b.1 - a.1) as i128 * (c.0 - a.0) as i128
}

fn on_segment(a: (i64, i64), b: (i64, i64), p: (i64, i64)) -> bool {
    // assumes p collinear with a,b
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

/// Parameter of the intersection of segment (a,b) with line (c,d), as an
/// exact rational in [0,1] along a→b.
fn intersect_param(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> BigRational {
    let num = cross128(c, d, a);
    let den = cross128(c, d, a) - cross128(c, d, b);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn param_point(a: (i64, i64), b: (i64, i64), t: &BigRational) -> Pt {
    let (ax, ay) = big_pt(a);
    let (bx, by) = big_pt(b);
    (ax.clone() + t * (bx - ax), ay.clone() + t * (by - ay))
}

struct DimacsLine<'a> {
    file: &'a str,
    line: usize,
}

impl DimacsLine<'_> {
    fn err(&self, msg: impl Into<String>) -> BenchError {
        BenchError::Parse {
            file: self.file.to_string(),
            line: self.line,
            msg: msg.into(),
        }
    }
}

/// Load a DIMACS shortest-path instance (`a u v w` arc lines in the .gr file,
/// `v id x y` coordinate lines in the .co file) as an undirected simple graph,
/// planarized: wherever two edges cross in the straight-line drawing, a vertex
/// is inserted at the crossing and both edges are split there.
pub fn load_dimacs(gr_path: &Path, co_path: &Path) -> Result<MultiGraph, BenchError> {
    let gr = std::fs::read_to_string(gr_path)?;
    let co = std::fs::read_to_string(co_path)?;
    load_dimacs_str(
        &gr,
        &gr_path.display().to_string(),
        &co,
        &co_path.display().to_string(),
    )
}

pub fn load_dimacs_str(
    gr: &str,
    gr_name: &str,
    co: &str,
    co_name: &str,
) -> Result<MultiGraph, BenchError> {
    let mut coords: BTreeMap<u64, (i64, i64)> = BTreeMap::new();
    for (i, raw) in co.lines().enumerate() {
        let at = DimacsLine {
            file: co_name,
            line: i + 1,
        };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('p') {
            continue;
        }
        let mut it = line.split_whitespace();
        if it.next() != Some("v") {
            return Err(at.err(format!("expected a `v id x y` line, got {raw:?}")));
        }
        let mut num = |what: &str| -> Result<i64, BenchError> {
            it.next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| at.err(format!("bad or missing {what}")))
        };
        let id = num("vertex id")? as u64;
        let x = num("x coordinate")?;
        let y = num("y coordinate")?;
        coords.insert(id, (x, y));
    }

    let mut arcs: BTreeSet<(u64, u64)> = BTreeSet::new();
    for (i, raw) in gr.lines().enumerate() {
        let at = DimacsLine {
            file: gr_name,
            line: i + 1,
        };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('p') {
            continue;
        }
        let mut it = line.split_whitespace();
        if it.next() != Some("a") {
            return Err(at.err(format!("expected an `a u v w` line, got {raw:?}")));
        }
        let mut num = |what: &str| -> Result<u64, BenchError> {
            it.next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| at.err(format!("bad or missing {what}")))
        };
        let u = num("tail vertex")?;
        let v = num("head vertex")?;
        num("weight")?;
        if u != v {
            arcs.insert((u.min(v), u.max(v))); // reverse arcs merge here
        }
    }

    for &(u, v) in &arcs {
        for w in [u, v] {
            if !coords.contains_key(&w) {
                return Err(BenchError::MissingCoord(w));
            }
        }
    }

    // dense ids for the original vertices, in DIMACS id order
    let ids: Vec<u64> = coords.keys().copied().collect();
    let dense: BTreeMap<u64, VertexId> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i as VertexId))
        .collect();
    let segs: Vec<(u64, u64)> = arcs.into_iter().collect();

    // bucket segment bounding boxes on a uniform grid to prune the pair tests
    let (mut lo, mut hi) = ((i64::MAX, i64::MAX), (i64::MIN, i64::MIN));
    for &(x, y) in coords.values() {
        lo = (lo.0.min(x), lo.1.min(y));
        hi = (hi.0.max(x), hi.1.max(y));
    }
    let cells = (segs.len() as f64).sqrt().ceil().max(1.0) as i64;
    let span = ((hi.0 - lo.0).max(hi.1 - lo.1)).max(1);
    let cell = (span / cells).max(1);
    let mut buckets: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (si, &(u, v)) in segs.iter().enumerate() {
        let (a, b) = (coords[&u], coords[&v]);
        for cx in (a.0.min(b.0) - lo.0) / cell..=(a.0.max(b.0) - lo.0) / cell {
            for cy in (a.1.min(b.1) - lo.1) / cell..=(a.1.max(b.1) - lo.1) / cell {
                buckets.entry((cx, cy)).or_default().push(si);
            }
        }
    }
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for bucket in buckets.values() {
        for (i, &s1) in bucket.iter().enumerate() {
            for &s2 in &bucket[i + 1..] {
                pairs.insert((s1.min(s2), s1.max(s2)));
            }
        }
    }

    // cuts[s] = points splitting segment s, keyed by exact parameter along it
    let mut cuts: Vec<BTreeMap<BigRational, Pt>> = vec![BTreeMap::new(); segs.len()];
    for (s1, s2) in pairs {
        let (u1, v1) = segs[s1];
        let (u2, v2) = segs[s2];
        if u1 == u2 || u1 == v2 || v1 == u2 || v1 == v2 {
            continue; // a shared endpoint is not a crossing
        }
        let (a, b) = (coords[&u1], coords[&v1]);
        let (c, d) = (coords[&u2], coords[&v2]);
        let d1 = cross128(c, d, a);
        let d2 = cross128(c, d, b);
        let d3 = cross128(a, b, c);
        let d4 = cross128(a, b, d);
        if d1 == 0 && d2 == 0 {
            // collinear: an overlap in more than a point is unsupported
            if on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) {
                return Err(BenchError::CollinearOverlap(u1, v1, u2, v2));
            }
            continue;
        }
        let crosses1 = (d1 > 0) != (d2 > 0) || d1 == 0 || d2 == 0;
        let crosses2 = (d3 > 0) != (d4 > 0) || d3 == 0 || d4 == 0;
        if !(crosses1 && crosses2) {
            continue;
        }
        // skip touches outside the closed segments
        if (d1 == 0 && !on_segment(c, d, a))
            || (d2 == 0 && !on_segment(c, d, b))
            || (d3 == 0 && !on_segment(a, b, c))
            || (d4 == 0 && !on_segment(a, b, d))
        {
            continue;
        }
        let p = if d1 == 0 {
            big_pt(a)
        } else if d2 == 0 {
            big_pt(b)
        } else if d3 == 0 {
            big_pt(c)
        } else if d4 == 0 {
            big_pt(d)
        } else {
            param_point(a, b, &intersect_param(a, b, c, d))
        };
        let zero = BigRational::from(BigInt::from(0));
        let one = BigRational::from(BigInt::from(1));
        let t1 = intersect_param(a, b, c, d);
        if t1 > zero && t1 < one {
            cuts[s1].insert(t1, p.clone());
        }
        let t2 = intersect_param(c, d, a, b);
        if t2 > zero && t2 < one {
            cuts[s2].insert(t2, p);
        }
    }

    let mut g = MultiGraph::new();
    for _ in &ids {
        g.add_vertex();
    }
    // id lookup for crossing points; original endpoints are registered so a
    // T-touch reuses the touching vertex instead of minting a new one
    let mut at_point: BTreeMap<(String, String), VertexId> = BTreeMap::new();
    let key = |p: &Pt| (p.0.to_string(), p.1.to_string());
    for &id in &ids {
        at_point.insert(key(&big_pt(coords[&id])), dense[&id]);
    }
    for (si, &(u, v)) in segs.iter().enumerate() {
        let mut chain = vec![dense[&u]];
        for p in cuts[si].values() {
            let k = key(p);
            let vid = *at_point.entry(k).or_insert_with(|| g.add_vertex());
            chain.push(vid);
        }
        chain.push(dense[&v]);
        for w in chain.windows(2) {
            if w[0] != w[1] && g.multiplicity(w[0], w[1]) == 0 {
                g.add_edge(w[0], w[1]);
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone)]
pub enum BenchAlgo {
    TwoApprox,
    KernelExact { budget: Duration },
    Ptas { cfg: PtasConfig },
    Hybrid { cfg: HybridConfig },
    Has { cfg: HasConfig, seeds: Vec<u64> },
}

impl BenchAlgo {
    pub fn name(&self) -> &'static str {
        match self {
            BenchAlgo::TwoApprox => "2approx",
            BenchAlgo::KernelExact { .. } => "kernel-exact",
            BenchAlgo::Ptas { .. } => "ptas",
            BenchAlgo::Hybrid { .. } => "hybrid",
            BenchAlgo::Has { .. } => "has",
        }
    }

    fn params(&self) -> String {
        match self {
            BenchAlgo::TwoApprox => String::new(),
            BenchAlgo::KernelExact { budget } => format!("budget_ms={}", budget.as_millis()),
            BenchAlgo::Ptas { cfg } => format!(
                "r={} variant={} budget_ms={}",
                cfg.r,
                cfg.variant,
                cfg.leaf_budget.as_millis()
            ),
            BenchAlgo::Hybrid { cfg } => format!("freq={}", cfg.frequency),
            BenchAlgo::Has { cfg, .. } => format!(
                "t={}..{} step={} stall={} budget_ms={} passes={}",
                cfg.t_min,
                cfg.t_max,
                cfg.t_step,
                cfg.stall_limit,
                cfg.exact_budget.as_millis(),
                cfg.passes
            ),
        }
    }
}

/// One CSV row of a benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub algo: String,
    pub params: String,
    pub seed: Option<u64>,
    /// None on solver failure; fractional only in aggregate rows.
    pub size: Option<f64>,
    pub feasible: bool,
    pub elapsed: Duration,
    /// size / the instance's 2approx size, when that baseline ran.
    pub normalized: Option<f64>,
}

pub const CSV_HEADER: &str = "instance,n,m,algo,params,seed,size,feasible,elapsed_ms,normalized";

fn fmt_size(s: f64) -> String {
    if s.fract() == 0.0 {
        format!("{}", s as u64)
    } else {
        format!("{s:.1}")
    }
}

pub fn reports_to_csv(rows: &[RunReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.instance,
            r.n,
            r.m,
            r.algo,
            r.params,
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.size.map(fmt_size).unwrap_or_default(),
            r.feasible,
            r.elapsed.as_millis(),
            r.normalized.map(|x| format!("{x:.4}")).unwrap_or_default(),
        ));
    }
    out
}

fn run_one(g: &MultiGraph, algo: &BenchAlgo) -> Vec<(Option<u64>, Result<FvsSolution, String>)> {
    match algo {
        BenchAlgo::TwoApprox => vec![(None, Ok(two_approx(g)))],
        BenchAlgo::KernelExact { budget } => {
            let cfg = ExactConfig {
                time_budget: *budget,
                kernelize_first: true,
            };
            vec![(None, solve_exact(g, &cfg).map_err(|e| e.to_string()))]
        }
        BenchAlgo::Ptas { cfg } => vec![(None, ptas_solve(g, cfg).map_err(|e| e.to_string()))],
        BenchAlgo::Hybrid { cfg } => vec![(None, Ok(hybrid_solve(g, cfg)))],
        BenchAlgo::Has { cfg, seeds } => {
            let initial = hybrid_solve(g, &HybridConfig::default());
            seeds
                .iter()
                .map(|&seed| {
                    let cfg = HasConfig {
                        seed,
                        ..cfg.clone()
                    };
                    let r = has_solve_logged(g, &initial, &cfg)
                        .map(|(s, _)| s)
                        .map_err(|e| e.to_string());
                    (Some(seed), r)
                })
                .collect()
        }
    }
}

/// Run every algorithm on every instance; one report row per run, plus
/// avg/min aggregate rows for multi-seed entries. The feasibility flag comes
/// from an independent check, never from the solver.
pub fn run_benchmark(instances: &[(String, MultiGraph)], algos: &[BenchAlgo]) -> Vec<RunReport> {
    let per_instance: Vec<Vec<RunReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = instances
            .iter()
            .map(|(name, g)| {
                scope.spawn(move || {
                    let mut rows: Vec<RunReport> = Vec::new();
                    for algo in algos {
                        let mut seed_rows: Vec<RunReport> = Vec::new();
                        for (seed, outcome) in run_one(g, algo) {
                            let started = Instant::now();
                            let (size, feasible, elapsed) = match &outcome {
                                Ok(s) => (
                                    Some(s.len() as f64),
                                    g.is_fvs(&s.vertex_set).unwrap_or(false),
                                    if s.meta.elapsed > Duration::ZERO {
                                        s.meta.elapsed
                                    } else {
                                        started.elapsed()
                                    },
                                ),
                                Err(_) => (None, false, started.elapsed()),
                            };
                            seed_rows.push(RunReport {
                                instance: name.clone(),
                                n: g.vertex_count(),
                                m: g.edge_count(),
                                algo: algo.name().to_string(),
                                params: algo.params(),
                                seed,
                                size,
                                feasible,
                                elapsed,
                                normalized: None,
                            });
                        }
                        let multi = seed_rows.len() > 1;
                        rows.extend(seed_rows.clone());
                        if multi {
                            let ok: Vec<&RunReport> =
                                seed_rows.iter().filter(|r| r.size.is_some()).collect();
                            if !ok.is_empty() {
                                let avg = ok.iter().map(|r| r.size.unwrap()).sum::<f64>()
                                    / ok.len() as f64;
                                let min = ok
                                    .iter()
                                    .min_by(|a, b| a.size.partial_cmp(&b.size).unwrap())
                                    .unwrap();
                                let base = RunReport {
                                    seed: None,
                                    ..seed_rows[0].clone()
                                };
                                rows.push(RunReport {
                                    algo: format!("{}-avg", algo.name()),
                                    size: Some(avg),
                                    feasible: ok.iter().all(|r| r.feasible),
                                    elapsed: ok.iter().map(|r| r.elapsed).sum::<Duration>()
                                        / ok.len() as u32,
                                    ..base.clone()
                                });
                                rows.push(RunReport {
                                    algo: format!("{}-min", algo.name()),
                                    size: min.size,
                                    feasible: min.feasible,
                                    elapsed: min.elapsed,
                                    ..base
                                });
                            }
                        }
                    }
                    let baseline = rows
                        .iter()
                        .find(|r| r.algo == "2approx")
                        .and_then(|r| r.size);
                    if let Some(b) = baseline {
                        if b > 0.0 {
                            for r in &mut rows {
                                r.normalized = r.size.map(|s| s / b);
                            }
                        }
                    }
                    rows
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    per_instance.into_iter().flatten().collect()
}
