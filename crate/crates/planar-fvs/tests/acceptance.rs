//! End-to-end acceptance checks. Each test prints a single pass/fail line
//! so the whole gate can be read off `--nocapture` output at a glance.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::time::Duration;

use planar_fvs::approx2::{minimalize, two_approx};
use planar_fvs::bench::{gen_grid, gen_random_planar, gen_triangu, grid_lower_bound};
use planar_fvs::embed::test_and_embed;
use planar_fvs::exact::{brute_force_opt, solve_exact, ExactConfig};
use planar_fvs::graph::{verify_fvs, FvsSolution, MultiGraph, VertexId};
use planar_fvs::heuristics::{
    has_solve_logged, hybrid_solve, round_log_csv, HasConfig, HybridConfig,
};
use planar_fvs::kernel::{kernelize, lift, ReductionTrace, TraceEvent};
use planar_fvs::ptas::{ptas_solve, PtasConfig, PtasVariant};
use planar_fvs::separator::find_separator;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria run one at a time: several are wall-clock-budgeted and timing
/// must not depend on sibling tests fighting for cores.
static GATE: std::sync::Mutex<()> = std::sync::Mutex::new(());

fn report(name: &str, body: impl FnOnce() + UnwindSafe) {
    let _serial = GATE.lock().unwrap_or_else(|e| e.into_inner());
    match catch_unwind(body) {
        Ok(()) => println!("acceptance {name}: pass"),
        Err(e) => {
            println!("acceptance {name}: FAIL");
            resume_unwind(e);
        }
    }
}

/// Random planar graph with a soft edge target: dense targets need a
/// triangular hull, so back off m (and reseed) until a draw realizes.
fn gen_planar(n: usize, mut m: usize, mut seed: u64) -> MultiGraph {
    loop {
        match gen_random_planar(n, m, seed) {
            Ok(g) => return g,
            Err(_) => {
                seed = seed.wrapping_add(0x100003);
                m = m.saturating_sub(1).max(n - 1);
            }
        }
    }
}

/// Small random planar multigraph: a thinned triangulation with every third
/// edge doubled (doubling never breaks planarity).
fn small_multigraph(seed: u64) -> MultiGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=14usize);
    let m = rng.gen_range(n - 1..=3 * n - 6);
    let mut g = gen_planar(n, m, seed);
    let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
    for u in g.vertices() {
        for w in g.neighbors(u) {
            if u < w {
                pairs.push((u, w));
            }
        }
    }
    for (u, w) in pairs.into_iter().step_by(3) {
        g.add_edge(u, w);
    }
    g
}

fn exact_opt(g: &MultiGraph) -> usize {
    solve_exact(g, &ExactConfig::default()).unwrap().len()
}

#[test]
fn c01_oracle_equivalence() {
    report("01 oracle equivalence", || {
        for seed in 0..200u64 {
            let g = small_multigraph(seed);
            let direct = solve_exact(&g, &ExactConfig::default()).unwrap();
            let ko = kernelize(&g);
            let cfg = ExactConfig {
                kernelize_first: false,
                ..Default::default()
            };
            let kern_sol = solve_exact(&ko.kernel, &cfg).unwrap();
            let lifted = lift(&g, &ko.trace, &kern_sol).unwrap();
            let brute = brute_force_opt(&g).unwrap();
            assert_eq!(direct.len(), brute.len(), "seed {seed}");
            assert_eq!(lifted.len(), brute.len(), "seed {seed}");
            for s in [&direct, &lifted, &brute] {
                assert!(verify_fvs(&g, s).unwrap(), "seed {seed}");
            }
        }
    });
}

#[test]
fn c02_two_approx_factor() {
    report("02 2-approximation factor", || {
        let mut worst = 0.0f64;
        for seed in 0..200u64 {
            let g = small_multigraph(seed);
            let opt = brute_force_opt(&g).unwrap().len();
            let approx = two_approx(&g);
            assert!(verify_fvs(&g, &approx).unwrap(), "seed {seed}");
            assert!(approx.len() <= 2 * opt, "seed {seed}: {} > 2*{opt}", approx.len());
            if opt > 0 {
                worst = worst.max(approx.len() as f64 / opt as f64);
            }
        }
        println!("  worst observed ratio: {worst:.3}");
    });
}

#[test]
fn c03_kernel_accounting() {
    report("03 kernel size accounting", || {
        for seed in 0..200u64 {
            let g = small_multigraph(seed);
            let opt_g = brute_force_opt(&g).unwrap().len();
            let ko = kernelize(&g);
            let opt_h = if ko.kernel.vertex_count() == 0 {
                0
            } else {
                brute_force_opt(&ko.kernel).unwrap().len()
            };
            assert_eq!(opt_g, opt_h + ko.marked_count, "seed {seed}");
            // random minimal feasible kernel solutions, not just optima
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
            for _ in 0..20 {
                let mut order: Vec<VertexId> = ko.kernel.vertices().collect();
                order.shuffle(&mut rng);
                let full = FvsSolution::new(ko.kernel.vertices().collect(), "");
                let u_h = minimalize(&ko.kernel, &full, &order).unwrap();
                let lifted = lift(&g, &ko.trace, &u_h).unwrap();
                assert!(verify_fvs(&g, &lifted).unwrap(), "seed {seed}");
                assert!(
                    lifted.len() - u_h.len() <= opt_g - opt_h,
                    "seed {seed}: lift overhead {} exceeds {}",
                    lifted.len() - u_h.len(),
                    opt_g - opt_h
                );
            }
        }
    });
}

#[test]
fn c04_relabel_gadget() {
    report("04 relabel gadget lift", || {
        // the degree-3 configuration the relabeling rule rewrites: v with
        // single edges to x, y, z and an x-y edge, plus enough context
        // cycles that solutions are nontrivial
        let mut g = MultiGraph::new();
        let v = g.add_vertex();
        let x = g.add_vertex();
        let y = g.add_vertex();
        let z = g.add_vertex();
        let a = g.add_vertex();
        let b = g.add_vertex();
        for (p, q) in [(v, x), (v, y), (v, z), (x, y), (a, x), (a, y), (b, x), (b, z)] {
            g.add_edge(p, q);
        }
        // the rewritten graph: v gone, x relabeled fresh, through-paths kept
        let mut h = g.clone();
        h.delete_vertex(v);
        let edges: Vec<(VertexId, u8)> = h.neighbor_mults(x).collect();
        h.delete_vertex(x);
        let fresh = h.add_vertex();
        for (w, m) in edges {
            for _ in 0..m {
                h.add_edge(fresh, w);
            }
        }
        h.add_edge(fresh, y);
        h.add_edge(fresh, z);
        h.add_edge(y, z);
        let trace = ReductionTrace {
            events: vec![TraceEvent::Relabel {
                rule: 8,
                introduced: fresh,
                original: x,
            }],
        };
        // every feasible solution of the rewritten graph must lift to a
        // feasible solution of the original, same size; the branch keeping
        // the introduced vertex must land on the original endpoint
        let verts: Vec<VertexId> = h.vertices().collect();
        let mut with_fresh = 0;
        let mut without_fresh = 0;
        for mask in 0u32..1 << verts.len() {
            let s: BTreeSet<VertexId> = verts
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            if !h.is_fvs(&s).unwrap() {
                continue;
            }
            let has_fresh = s.contains(&fresh);
            let sol = FvsSolution::new(s, "");
            let lifted = lift(&g, &trace, &sol).unwrap();
            assert!(verify_fvs(&g, &lifted).unwrap());
            assert_eq!(lifted.len(), sol.len());
            if has_fresh {
                assert!(lifted.vertex_set.contains(&x));
                with_fresh += 1;
            } else {
                without_fresh += 1;
            }
        }
        assert!(with_fresh > 0 && without_fresh > 0, "both branches exercised");
    });
}

#[test]
fn c05_separator_guarantees() {
    report("05 separator guarantees", || {
        for seed in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e9a);
            // log-ish spread over the size range; sparse targets only for
            // small n, where the thinning passes stay cheap
            let n = (20.0 * (100.0f64).powf(rng.gen::<f64>())) as usize;
            let n = n.clamp(20, 2000);
            let m = if n <= 200 {
                rng.gen_range(n - 1..=3 * n - 6)
            } else {
                rng.gen_range(2 * n..=3 * n - 6)
            };
            let g = gen_planar(n, m, seed);
            let e = test_and_embed(&g).unwrap();
            let res = find_separator(&g, &e).unwrap();
            assert!(res.audit(&g), "seed {seed} n={n} m={m}");
        }
    });
}

#[test]
fn c06_grid_vs_lower_bound() {
    report("06 grid accuracy vs lower bound", || {
        let g = gen_grid(300, 300);
        let s = two_approx(&g);
        assert!(verify_fvs(&g, &s).unwrap());
        let lb = grid_lower_bound(300, 300);
        let ratio = s.len() as f64 / lb as f64;
        println!("  300x300: {} / {lb} = {ratio:.4}", s.len());
        assert!(ratio <= 1.02);
    });
}

#[test]
fn c07_ptas_exact_small_kernels() {
    report("07 approximation scheme exact on small kernels", || {
        let mut checked = 0;
        let mut seed = 0u64;
        while checked < 50 {
            seed += 1;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9a7);
            let n = rng.gen_range(16..=40usize);
            let m = rng.gen_range(n..=3 * n - 6);
            let g = gen_planar(n, m, seed);
            if kernelize(&g).kernel.vertex_count() > 60 {
                continue;
            }
            let opt = exact_opt(&g);
            for variant in [PtasVariant::Vanilla, PtasVariant::Minimal, PtasVariant::Optimized] {
                let cfg = PtasConfig {
                    r: 60,
                    variant,
                    leaf_budget: Duration::from_secs(15),
                };
                let s = ptas_solve(&g, &cfg).unwrap();
                assert!(verify_fvs(&g, &s).unwrap(), "seed {seed} {variant:?}");
                assert_eq!(s.len(), opt, "seed {seed} {variant:?}");
            }
            checked += 1;
        }
    });
}

#[test]
fn c08_ptas_desk_scale() {
    report("08 approximation scheme at scale", || {
        let grid = gen_grid(100, 100);
        let cfg = PtasConfig {
            r: 60,
            variant: PtasVariant::Minimal,
            leaf_budget: Duration::from_secs(2),
        };
        let s = ptas_solve(&grid, &cfg).unwrap();
        assert!(verify_fvs(&grid, &s).unwrap());
        let base = two_approx(&grid).len();
        let ratio = s.len() as f64 / base as f64;
        println!("  grid 100x100 minimal: {} vs {base} = {ratio:.4}", s.len());
        assert!(ratio <= 1.05);

        let tri = gen_triangu(20000, 1).unwrap();
        let cfg = PtasConfig {
            r: 60,
            variant: PtasVariant::Optimized,
            leaf_budget: Duration::from_secs(2),
        };
        let s = ptas_solve(&tri, &cfg).unwrap();
        assert!(verify_fvs(&tri, &s).unwrap());
        let base = two_approx(&tri).len();
        let ratio = s.len() as f64 / base as f64;
        println!("  triangu 20000 optimized: {} vs {base} = {ratio:.4}", s.len());
        assert!(ratio <= 1.05);
    });
}

#[test]
fn c09_hybrid_vs_two_approx() {
    report("09 hybrid vs 2-approximation", || {
        let mut wins = 0;
        for seed in 1..=5u64 {
            let g = gen_triangu(20000, seed).unwrap();
            let h = hybrid_solve(&g, &HybridConfig::default());
            assert!(verify_fvs(&g, &h).unwrap(), "seed {seed}");
            if h.len() <= two_approx(&g).len() {
                wins += 1;
            }
        }
        println!("  hybrid at or below 2approx on {wins}/5");
        assert!(wins >= 4);
    });
}

#[test]
fn c10_has_improvement() {
    report("10 annealing improvement and reproducibility", || {
        let g = gen_triangu(20000, 1).unwrap();
        let init = hybrid_solve(&g, &HybridConfig::default());
        let cfg = HasConfig {
            exact_budget: Duration::from_secs(2),
            ..Default::default()
        };
        let (s1, rounds1) = has_solve_logged(&g, &init, &cfg).unwrap();
        assert!(verify_fvs(&g, &s1).unwrap());
        assert!(
            s1.len() as f64 <= 0.99 * init.len() as f64,
            "{} vs initial {}",
            s1.len(),
            init.len()
        );
        // non-increasing size round over round, feasible at every accept
        let mut size = init.len();
        for r in &rounds1 {
            if r.accepted {
                let state = r.accepted_state.as_ref().unwrap();
                assert!(g.is_fvs(state).unwrap(), "round {}", r.round);
                assert!(state.len() <= size, "round {}", r.round);
                size = state.len();
            }
        }
        assert_eq!(size, s1.len());
        let (s2, rounds2) = has_solve_logged(&g, &init, &cfg).unwrap();
        assert_eq!(s1.vertex_set, s2.vertex_set);
        assert_eq!(round_log_csv(&rounds1), round_log_csv(&rounds2));
        println!("  {} -> {} over {} rounds", init.len(), s1.len(), rounds1.len());
    });
}

#[test]
fn c11_determinism() {
    report("11 determinism", || {
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xde7);
            let n = rng.gen_range(30..=400usize);
            let m = rng.gen_range(n..=3 * n - 6);
            let g = gen_planar(n, m, seed);

            let a1 = two_approx(&g);
            let a2 = two_approx(&g);
            assert_eq!(a1.vertex_set, a2.vertex_set, "seed {seed}");

            let k1 = kernelize(&g);
            let k2 = kernelize(&g);
            assert_eq!(
                planar_fvs::graph::write_edge_list(&k1.kernel),
                planar_fvs::graph::write_edge_list(&k2.kernel),
                "seed {seed}"
            );
            assert_eq!(k1.trace.events, k2.trace.events, "seed {seed}");

            let cfg = PtasConfig {
                r: 30,
                variant: PtasVariant::Optimized,
                leaf_budget: Duration::from_secs(15),
            };
            let p1 = ptas_solve(&g, &cfg).unwrap();
            let p2 = ptas_solve(&g, &cfg).unwrap();
            assert_eq!(p1.vertex_set, p2.vertex_set, "seed {seed}");

            let h1 = hybrid_solve(&g, &HybridConfig::default());
            let h2 = hybrid_solve(&g, &HybridConfig::default());
            assert_eq!(h1.vertex_set, h2.vertex_set, "seed {seed}");
        }
    });
}

#[test]
fn c12_cli_round_trip() {
    report("12 command-line round trip", || {
        use std::process::{Command, Stdio};
        let bin = env!("CARGO_BIN_EXE_planar-fvs");
        let gen = Command::new(bin)
            .args(["gen", "grid", "--rows", "2", "--cols", "2"])
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        let solve = Command::new(bin)
            .args(["solve", "--algo", "2approx", "--input", "-"])
            .stdin(gen.stdout.unwrap())
            .stdout(Stdio::piped())
            .output()
            .unwrap();
        assert!(solve.status.success());
        let out = String::from_utf8(solve.stdout).unwrap();
        let row = out
            .lines()
            .find(|l| l.contains("2approx"))
            .expect("csv row present");
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[6], "1", "size column: {row}");
        assert_eq!(fields[7], "true", "feasible column: {row}");
    });
}
