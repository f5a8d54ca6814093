//! Command-line front end: solve, generate, verify, lower-bound, bench.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use planar_fvs::approx2::two_approx;
use planar_fvs::bench::{
    gen_grid, gen_random_planar, gen_triangu, grid_lower_bound, load_dimacs, reports_to_csv,
    run_benchmark, BenchAlgo,
};
use planar_fvs::exact::{solve_exact, ExactConfig};
use planar_fvs::graph::{parse_edge_list, write_edge_list, FvsSolution, MultiGraph, VertexId};
use planar_fvs::heuristics::{has_solve, hybrid_solve, HasConfig, HybridConfig};
use planar_fvs::ptas::{ptas_solve, PtasConfig, PtasVariant};

#[derive(Parser)]
#[command(name = "planar-fvs", about = "Feedback vertex set toolkit for planar graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a solver on an instance and report a CSV row
    Solve(SolveArgs),
    /// Generate an instance and print it as an edge list
    Gen {
        #[command(subcommand)]
        family: GenCmd,
    },
    /// Check a solution file against an instance
    Verify {
        #[arg(long)]
        input: String,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, value_enum, default_value = "edgelist")]
        format: Format,
        #[arg(long)]
        coords: Option<PathBuf>,
    },
    /// Closed-form lower bounds
    LowerBound {
        #[command(subcommand)]
        kind: LowerBoundCmd,
    },
    /// Run a benchmark suite from a TOML or JSON spec
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Edgelist,
    Dimacs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    #[value(name = "2approx")]
    TwoApprox,
    KernelExact,
    Ptas,
    Hybrid,
    Has,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Vanilla,
    Minimal,
    Optimized,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    /// Instance path, or `-` for stdin
    #[arg(long)]
    input: String,
    #[arg(long, value_enum, default_value = "edgelist")]
    format: Format,
    /// Coordinate file for DIMACS input
    #[arg(long)]
    coords: Option<PathBuf>,
    /// Leaf size for the PTAS
    #[arg(long, default_value_t = 60)]
    r: usize,
    #[arg(long, value_enum, default_value = "vanilla")]
    variant: Variant,
    /// Exact-solver budget (kernel-exact, PTAS leaves, HAS rounds)
    #[arg(long, default_value_t = 15000)]
    budget_ms: u64,
    /// Greedy burst length for hybrid
    #[arg(long, default_value_t = 41)]
    freq: usize,
    #[arg(long, default_value_t = 3)]
    t_min: usize,
    #[arg(long, default_value_t = 30)]
    t_max: usize,
    #[arg(long, default_value_t = 3)]
    t_step: usize,
    #[arg(long, default_value_t = 6)]
    stall: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination, `-` for stdout
    #[arg(long, default_value = "-")]
    out: String,
    /// Also write the solution vertex ids, one per line
    #[arg(long)]
    solution_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCmd {
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value = "-")]
        out: String,
    },
    RandomPlanar {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "-")]
        out: String,
    },
    Triangu {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

#[derive(Subcommand)]
enum LowerBoundCmd {
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
    },
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| e.to_string())?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn write_output(path: &str, text: &str) -> Result<(), String> {
    if path == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|e| format!("{path}: {e}"))
    }
}

fn load_graph(input: &str, format: Format, coords: Option<&Path>) -> Result<MultiGraph, String> {
    match format {
        Format::Edgelist => {
            let text = read_input(input)?;
            parse_edge_list(&text).map_err(|e| e.to_string())
        }
        Format::Dimacs => {
            if input == "-" {
                return Err("dimacs input needs a file path".into());
            }
            let co = coords.ok_or("dimacs input needs --coords")?;
            load_dimacs(Path::new(input), co).map_err(|e| e.to_string())
        }
    }
}

fn instance_name(input: &str) -> String {
    if input == "-" {
        "stdin".to_string()
    } else {
        Path::new(input)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| input.to_string())
    }
}

fn run_solve(a: &SolveArgs) -> Result<(), String> {
    let g = load_graph(&a.input, a.format, a.coords.as_deref())?;
    let budget = Duration::from_millis(a.budget_ms);
    let variant = match a.variant {
        Variant::Vanilla => PtasVariant::Vanilla,
        Variant::Minimal => PtasVariant::Minimal,
        Variant::Optimized => PtasVariant::Optimized,
    };
    let started = std::time::Instant::now();
    let sol: FvsSolution = match a.algo {
        Algo::TwoApprox => two_approx(&g),
        Algo::KernelExact => solve_exact(
            &g,
            &ExactConfig {
                time_budget: budget,
                kernelize_first: true,
            },
        )
        .map_err(|e| e.to_string())?,
        Algo::Ptas => ptas_solve(
            &g,
            &PtasConfig {
                r: a.r,
                variant,
                leaf_budget: budget,
            },
        )
        .map_err(|e| e.to_string())?,
        Algo::Hybrid => hybrid_solve(&g, &HybridConfig { frequency: a.freq }),
        Algo::Has => {
            let initial = hybrid_solve(&g, &HybridConfig::default());
            has_solve(
                &g,
                &initial,
                &HasConfig {
                    t_min: a.t_min,
                    t_max: a.t_max,
                    t_step: a.t_step,
                    stall_limit: a.stall,
                    exact_budget: budget,
                    seed: a.seed,
                    passes: 1,
                },
            )
            .map_err(|e| e.to_string())?
        }
    };
    let elapsed = started.elapsed();
    let feasible = g.is_fvs(&sol.vertex_set).map_err(|e| e.to_string())?;
    let report = planar_fvs::bench::RunReport {
        instance: instance_name(&a.input),
        n: g.vertex_count(),
        m: g.edge_count(),
        algo: match a.algo {
            Algo::TwoApprox => "2approx",
            Algo::KernelExact => "kernel-exact",
            Algo::Ptas => "ptas",
            Algo::Hybrid => "hybrid",
            Algo::Has => "has",
        }
        .to_string(),
        params: sol.meta.params.clone(),
        seed: sol.meta.seed,
        size: Some(sol.len() as f64),
        feasible,
        elapsed,
        normalized: matches!(a.algo, Algo::TwoApprox).then_some(1.0),
    };
    write_output(&a.out, &reports_to_csv(&[report]))?;
    if let Some(p) = &a.solution_out {
        let mut text = String::new();
        for v in &sol.vertex_set {
            text.push_str(&format!("{v}\n"));
        }
        std::fs::write(p, text).map_err(|e| e.to_string())?;
    }
    if !feasible {
        return Err("solver returned an infeasible set".into());
    }
    Ok(())
}

#[derive(Deserialize)]
struct SuiteSpec {
    #[serde(default)]
    instances: Vec<InstanceSpec>,
    #[serde(default)]
    algos: Vec<AlgoSpec>,
}

#[derive(Deserialize)]
struct InstanceSpec {
    name: String,
    kind: String,
    rows: Option<usize>,
    cols: Option<usize>,
    n: Option<usize>,
    m: Option<usize>,
    seed: Option<u64>,
    path: Option<PathBuf>,
    coords: Option<PathBuf>,
}

#[derive(Deserialize)]
struct AlgoSpec {
    algo: String,
    budget_ms: Option<u64>,
    r: Option<usize>,
    variant: Option<String>,
    freq: Option<usize>,
    t_min: Option<usize>,
    t_max: Option<usize>,
    t_step: Option<usize>,
    stall: Option<usize>,
    seeds: Option<Vec<u64>>,
}

fn build_instance(spec: &InstanceSpec) -> Result<MultiGraph, String> {
    let need = |o: Option<usize>, what: &str| {
        o.ok_or_else(|| format!("instance {}: missing {what}", spec.name))
    };
    match spec.kind.as_str() {
        "grid" => Ok(gen_grid(need(spec.rows, "rows")?, need(spec.cols, "cols")?)),
        "random-planar" => gen_random_planar(
            need(spec.n, "n")?,
            need(spec.m, "m")?,
            spec.seed.unwrap_or(0),
        )
        .map_err(|e| e.to_string()),
        "triangu" => gen_triangu(need(spec.n, "n")?, spec.seed.unwrap_or(0))
            .map_err(|e| e.to_string()),
        "edgelist" => {
            let p = spec.path.as_ref().ok_or("missing path")?;
            let text = std::fs::read_to_string(p).map_err(|e| e.to_string())?;
            parse_edge_list(&text).map_err(|e| e.to_string())
        }
        "dimacs" => {
            let p = spec.path.as_ref().ok_or("missing path")?;
            let c = spec.coords.as_ref().ok_or("missing coords")?;
            load_dimacs(p, c).map_err(|e| e.to_string())
        }
        other => Err(format!("unknown instance kind {other:?}")),
    }
}

fn build_algo(spec: &AlgoSpec) -> Result<BenchAlgo, String> {
    let budget = Duration::from_millis(spec.budget_ms.unwrap_or(15000));
    match spec.algo.as_str() {
        "2approx" => Ok(BenchAlgo::TwoApprox),
        "kernel-exact" => Ok(BenchAlgo::KernelExact { budget }),
        "ptas" => {
            let variant = match spec.variant.as_deref().unwrap_or("vanilla") {
                "vanilla" => PtasVariant::Vanilla,
                "minimal" => PtasVariant::Minimal,
                "optimized" => PtasVariant::Optimized,
                other => return Err(format!("unknown ptas variant {other:?}")),
            };
            Ok(BenchAlgo::Ptas {
                cfg: PtasConfig {
                    r: spec.r.unwrap_or(60),
                    variant,
                    leaf_budget: budget,
                },
            })
        }
        "hybrid" => Ok(BenchAlgo::Hybrid {
            cfg: HybridConfig {
                frequency: spec.freq.unwrap_or(41),
            },
        }),
        "has" => Ok(BenchAlgo::Has {
            cfg: HasConfig {
                t_min: spec.t_min.unwrap_or(3),
                t_max: spec.t_max.unwrap_or(30),
                t_step: spec.t_step.unwrap_or(3),
                stall_limit: spec.stall.unwrap_or(6),
                exact_budget: budget,
                seed: 0,
                passes: 1,
            },
            seeds: spec.seeds.clone().unwrap_or_else(|| vec![0]),
        }),
        other => Err(format!("unknown algorithm {other:?}")),
    }
}

fn run_bench(suite: &Path, out: &str) -> Result<(), String> {
    let text = std::fs::read_to_string(suite).map_err(|e| format!("{}: {e}", suite.display()))?;
    let spec: SuiteSpec = if suite.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())?
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())?
    };
    let mut instances = Vec::new();
    for i in &spec.instances {
        instances.push((i.name.clone(), build_instance(i)?));
    }
    let algos: Vec<BenchAlgo> = spec
        .algos
        .iter()
        .map(build_algo)
        .collect::<Result<_, _>>()?;
    let rows = run_benchmark(&instances, &algos);
    let bad: Vec<&str> = rows
        .iter()
        .filter(|r| r.size.is_some() && !r.feasible)
        .map(|r| r.instance.as_str())
        .collect();
    write_output(out, &reports_to_csv(&rows))?;
    if !bad.is_empty() {
        return Err(format!("infeasible results on {bad:?}"));
    }
    Ok(())
}

fn run_verify(
    input: &str,
    solution: &Path,
    format: Format,
    coords: Option<&Path>,
) -> Result<(), String> {
    let g = load_graph(input, format, coords)?;
    let text = std::fs::read_to_string(solution).map_err(|e| e.to_string())?;
    let mut set: BTreeSet<VertexId> = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: VertexId = t
            .parse()
            .map_err(|_| format!("solution line {}: bad vertex id {t:?}", i + 1))?;
        set.insert(v);
    }
    let ok = g.is_fvs(&set).map_err(|e| e.to_string())?;
    println!("feasible={ok} size={}", set.len());
    if ok {
        Ok(())
    } else {
        Err("solution is not a feedback vertex set".into())
    }
}

fn run() -> Result<(), String> {
    match Cli::parse().cmd {
        Cmd::Solve(a) => run_solve(&a),
        Cmd::Gen { family } => {
            let (g, out) = match family {
                GenCmd::Grid { rows, cols, out } => {
                    if rows < 2 || cols < 2 {
                        return Err("grid needs rows ≥ 2 and cols ≥ 2".into());
                    }
                    (gen_grid(rows, cols), out)
                }
                GenCmd::RandomPlanar { n, m, seed, out } => {
                    (gen_random_planar(n, m, seed).map_err(|e| e.to_string())?, out)
                }
                GenCmd::Triangu { n, seed, out } => {
                    (gen_triangu(n, seed).map_err(|e| e.to_string())?, out)
                }
            };
            write_output(&out, &write_edge_list(&g))
        }
        Cmd::Verify {
            input,
            solution,
            format,
            coords,
        } => run_verify(&input, &solution, format, coords.as_deref()),
        Cmd::LowerBound { kind } => match kind {
            LowerBoundCmd::Grid { rows, cols } => {
                if rows < 2 || cols < 2 {
                    return Err("grid needs rows ≥ 2 and cols ≥ 2".into());
                }
                println!("{}", grid_lower_bound(rows, cols));
                Ok(())
            }
        },
        Cmd::Bench { suite, out } => run_bench(&suite, &out),
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
