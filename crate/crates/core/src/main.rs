use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crosskit::cutmetric::{cut_distance, fk_partition_with, FkOptions, DEFAULT_EXACT_LIMIT};
use crosskit::drawing::render_svg;
use crosskit::exact::{crossing_number_exact, Budget};
use crosskit::graphon::{cd_sandwich, rectilinear_density_upper, step_from_graph, sylvester_convex_probability, PlanarRegion, StepGraphon};
use crosskit::pipeline::{draw_cr_with, estimability_probe_with, estimate_cr_with, DrawOptions, EstimateOptions};
use crosskit::{crossing_lower_bound, Result, WeightedGraph};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "crosskit", version, about = "Crossing-number estimates, drawings and crossing-density probes")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sampling; results do not depend on it.
    #[arg(long, global = true, env = "CROSSKIT_THREADS", default_value_t = 1)]
    threads: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SolverArgs {
    /// Search-node cap for the exact solver.
    #[arg(long, default_value_t = 3_000_000)]
    budget: u64,
    /// Wall-clock cap for the exact solver, in seconds.
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Heuristic restarts.
    #[arg(long, default_value_t = 20)]
    restarts: usize,
}

impl SolverArgs {
    fn budget(&self, seed: u64) -> Budget {
        Budget { nodes: self.budget, seconds: self.budget_seconds, restarts: self.restarts, seed }
    }
}

#[derive(Args)]
struct PartitionArgs {
    /// Regularity parameter in (0, 1].
    #[arg(long, value_parser = epsilon)]
    eps: f64,
    /// Class cap for the partition.
    #[arg(long, default_value_t = 16)]
    max_classes: usize,
    /// Size of the starting equitable partition.
    #[arg(long, default_value_t = 6)]
    min_classes: usize,
}

impl PartitionArgs {
    fn options(&self, solver: &SolverArgs, seed: u64) -> EstimateOptions {
        EstimateOptions { min_classes: self.min_classes, budget: solver.budget(seed), ..EstimateOptions::new(self.eps, self.max_classes, seed) }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate cr(G) from the quotient of a weakly regular partition.
    Estimate {
        /// Graph file, text or JSON.
        input: PathBuf,
        #[command(flatten)]
        part: PartitionArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Draw G by blowing up a quotient drawing and transferring it.
    Draw {
        /// Graph file, text or JSON.
        input: PathBuf,
        #[command(flatten)]
        part: PartitionArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Weights are rounded to multiples of 1/q.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        q: u64,
        /// Refinement sweeps on the blown-up drawing.
        #[arg(long, default_value_t = 2)]
        sweeps: usize,
        /// Seconds allowed for each refinement phase.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Write an SVG rendering here.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write the transfer trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Exact crossing number of a small graph.
    Exact {
        /// Graph file, text or JSON.
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write an SVG rendering here.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Labeled cut distance between two graphs on one vertex set.
    Cutnorm {
        /// Graph file, text or JSON.
        first: PathBuf,
        /// Graph on the same vertices.
        second: PathBuf,
        /// Exhaustive search up to this many vertices.
        #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
        exact_limit: usize,
        /// Heuristic restarts above the exhaustive limit.
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
    /// Frieze-Kannan partition with its regularity certificate.
    Regularity {
        /// Graph file, text or JSON.
        input: PathBuf,
        /// Regularity parameter in (0, 1].
        #[arg(long, value_parser = epsilon)]
        eps: f64,
        /// Class cap for the partition.
        #[arg(long, default_value_t = 16)]
        max_classes: usize,
        /// Size of the starting equitable partition.
        #[arg(long, default_value_t = 1)]
        min_classes: usize,
        /// Exhaustive cut search up to this many vertices.
        #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
        exact_limit: usize,
    },
    /// Probability that four uniform points of a region are in convex position.
    Sylvester {
        /// square, disk, triangle, annulus:R, boxes:x0,y0,x1,y1;..., parallelogram:a,b,c,d
        #[arg(long, default_value = "square")]
        region: String,
        /// Four-point samples.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Crossing-density bounds of a step graphon refined to a graph.
    Cdbounds {
        /// Graph whose step graphon is used.
        input: Option<PathBuf>,
        /// Constant graphon instead of a graph.
        #[arg(long, conflicts_with = "input")]
        constant: Option<f64>,
        /// Intervals per block in the refinement graph.
        #[arg(long, default_value_t = 1)]
        refinement: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Fewest straight-line crossings of K_n found over random point sets.
    Recupper {
        /// Order of the complete graph.
        #[arg(long)]
        n: usize,
        /// Point sets tried.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Region the points are drawn from, as for `sylvester`.
        #[arg(long, default_value = "square")]
        region: String,
    },
    /// Normalized estimates on random induced subgraphs.
    Probe {
        /// Graph file, text or JSON.
        input: PathBuf,
        /// Sample size.
        #[arg(long)]
        k: usize,
        /// Induced subgraphs sampled.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        part: PartitionArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

fn epsilon(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if x > 0.0 && x <= 1.0 {
        Ok(x)
    } else {
        Err(format!("{x} outside (0, 1]"))
    }
}

fn read_graph(p: &Path) -> Result<WeightedGraph> {
    WeightedGraph::parse_any(&std::fs::read_to_string(p)?)
}

fn write(p: &Path, text: &str) -> Result<()> {
    std::fs::write(p, text)?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(&'static str, Value)> {
    let seed = cli.seed;
    Ok(match &cli.cmd {
        Cmd::Estimate { input, part, solver } => {
            let g = read_graph(input)?;
            let r = estimate_cr_with(&g, &part.options(solver, seed))?;
            let mut v = r.to_json();
            v["lower_bound"] = json!(crossing_lower_bound(&g));
            ("estimate", v)
        }
        Cmd::Draw { input, part, solver, q, sweeps, time_limit, svg, trace } => {
            let g = read_graph(input)?;
            let o = DrawOptions { estimate: part.options(solver, seed), q: *q, refine_sweeps: *sweeps, final_sweeps: 1, time_limit: time_limit.map(Duration::from_secs_f64) };
            let (d, r) = draw_cr_with(&g, &o)?;
            if let Some(p) = svg {
                write(p, &render_svg(&d))?;
            }
            if let Some(p) = trace {
                write(p, &serde_json::to_string_pretty(&r.transfer)?)?;
            }
            ("draw", json!({"report": r.to_json(), "drawing": d.to_json()}))
        }
        Cmd::Exact { input, solver, svg } => {
            let g = read_graph(input)?;
            let s = crossing_number_exact(&g, &solver.budget(seed))?;
            if let Some(p) = svg {
                write(p, &render_svg(&s.drawing))?;
            }
            ("exact", s.to_json())
        }
        Cmd::Cutnorm { first, second, exact_limit, restarts } => {
            let w = cut_distance(&read_graph(first)?, &read_graph(second)?, *exact_limit, *restarts, seed)?;
            ("cutnorm", serde_json::to_value(w)?)
        }
        Cmd::Regularity { input, eps, max_classes, min_classes, exact_limit } => {
            let g = read_graph(input)?;
            let o = FkOptions { initial_classes: *min_classes, exact_limit: *exact_limit, ..FkOptions::new(*eps, *max_classes, seed) };
            ("regularity", serde_json::to_value(fk_partition_with(&g, &o)?)?)
        }
        Cmd::Sylvester { region, samples } => {
            let r = PlanarRegion::parse(region)?;
            let e = sylvester_convex_probability(&r, *samples, seed, cli.threads)?;
            ("sylvester", json!({"region": r, "result": e}))
        }
        Cmd::Cdbounds { input, constant, refinement, solver } => {
            let w = match (input, constant) {
                (Some(p), _) => step_from_graph(&read_graph(p)?),
                (None, Some(c)) => StepGraphon::constant(*c)?,
                (None, None) => StepGraphon::constant(1.0)?,
            };
            ("cdbounds", serde_json::to_value(cd_sandwich(&w, *refinement, &solver.budget(seed), seed)?)?)
        }
        Cmd::Recupper { n, samples, region } => {
            let r = PlanarRegion::parse(region)?;
            ("recupper", serde_json::to_value(rectilinear_density_upper(*n, *samples, seed, &r)?)?)
        }
        Cmd::Probe { input, k, trials, part, solver } => {
            let g = read_graph(input)?;
            let st = estimability_probe_with(&g, *k, *trials, seed, &part.options(solver, seed), cli.threads)?;
            ("probe", serde_json::to_value(st)?)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((name, result)) => {
            let doc = json!({"schema_version": SCHEMA_VERSION, "command": name, "seed": cli.seed, "result": result});
            let text = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
            match &cli.out {
                Some(p) => {
                    if let Err(e) = write(p, &text) {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
