use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sweepcvrp_core::bounds::{bounds_report, choose_r, BoundsReport, Radius};
use sweepcvrp_core::closed_form::eval_g;
use sweepcvrp_core::experiment::{gen_instance, run_ratio_experiment, summarize, write_csv};
use sweepcvrp_core::interval::iv_g_all;
use sweepcvrp_core::itp::itp_solve;
use sweepcvrp_core::net::{verify_all, Thresholds};
use sweepcvrp_core::sweep::sweep_solve;
use sweepcvrp_core::{Algo, DepotPoint, ExperimentConfig, Instance, KRule, Point, SolverConfig, TspMode};

/// Sweep-partition CVRP solver, bounds and grid verifier.
#[derive(Parser)]
#[command(name = "sweepcvrp", version, about)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance with terminals uniform in the unit square.
    Gen(GenArgs),
    /// Solve an instance with the sweep algorithm or iterated tour partitioning.
    Solve(SolveArgs),
    /// Report radial/local costs and the lower and upper bounds.
    Bounds(BoundsArgs),
    /// Evaluate g1, g2, g3 and the radius at a depot position.
    EvalG(EvalGArgs),
    /// Verify the depot inequalities on the grid with interval arithmetic.
    VerifyNet(VerifyNetArgs),
    /// Run a ratio experiment over several seeds and write CSV rows.
    Experiment(ExperimentArgs),
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let x: f64 = x.trim().parse().map_err(|_| format!("bad x coordinate in {s:?}"))?;
    let y: f64 = y.trim().parse().map_err(|_| format!("bad y coordinate in {s:?}"))?;
    Ok(Point::new(x, y))
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.parse().map_err(|_| format!("bad seed range {s:?}"))?;
        let b: u64 = b.parse().map_err(|_| format!("bad seed range {s:?}"))?;
        return Ok((a..b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| format!("bad seed {t:?}"))).collect()
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Sweep,
    Itp,
}

#[derive(Clone, Copy, ValueEnum)]
enum TspArg {
    Auto,
    Exact,
    Heuristic,
}

impl From<TspArg> for TspMode {
    fn from(t: TspArg) -> Self {
        match t {
            TspArg::Auto => TspMode::Auto,
            TspArg::Exact => TspMode::Exact,
            TspArg::Heuristic => TspMode::Heuristic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GenArgs {
    /// Number of terminals.
    #[arg(long)]
    n: usize,
    /// Vehicle capacity.
    #[arg(long)]
    k: usize,
    /// Depot position as X,Y.
    #[arg(long, value_parser = parse_point, default_value = "0.5,0.5")]
    depot: Point,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file; `-` reads stdin.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "sweep")]
    algo: AlgoArg,
    /// Group multiplier: the sweep routes blocks of M·k terminals.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// TSP subsolver.
    #[arg(long, value_enum, default_value = "auto")]
    tsp: TspArg,
    /// Seed for the heuristic TSP start.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solution file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Instance file; `-` reads stdin.
    #[arg(long)]
    input: PathBuf,
    /// Clipping radius: a number, `auto` for (3/4)·g1(depot), or `inf`.
    #[arg(long, default_value = "auto")]
    r: String,
    /// Group multiplier used by the upper bound.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// TSP subsolver for the local cost; only `exact` yields valid bounds
    /// beyond 14 far terminals.
    #[arg(long, value_enum, default_value = "auto")]
    tsp: TspArg,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct EvalGArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    /// Also print interval enclosures.
    #[arg(long)]
    interval: bool,
}

#[derive(Args)]
struct VerifyNetArgs {
    /// Check every S-th grid index along each axis; 1 checks the full grid.
    #[arg(long, default_value_t = 1)]
    stride: u32,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Write the certificate report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Required lower bound on g2 - (31/48)·g1.
    #[arg(long, default_value_t = 0.0025)]
    threshold_g2: f64,
    /// Required lower bound on g3 - 31/48.
    #[arg(long, default_value_t = 0.0096)]
    threshold_g3: f64,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    n: usize,
    /// Capacity rule: an integer, `sqrt`, or `n^ALPHA` with ALPHA in [0, 1].
    #[arg(long, default_value = "sqrt")]
    k: KRule,
    #[arg(long, value_parser = parse_point, default_value = "0.5,0.5")]
    depot: Point,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Seeds as `A..B` (half-open) or a comma list.
    #[arg(long, value_parser = parse_seeds, default_value = "0..20")]
    seeds: std::vec::Vec<u64>,
    /// Algorithms to run, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "sweep,itp")]
    algos: Vec<AlgoArg>,
    #[arg(long, value_enum, default_value = "auto")]
    tsp: TspArg,
    /// CSV output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn read_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = if path == Path::new("-") {
        io::read_to_string(io::stdin()).context("reading instance from stdin")?
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    Instance::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn gen(args: GenArgs) -> anyhow::Result<ExitCode> {
    let inst = gen_instance(args.n, args.k, args.depot, args.seed)?;
    emit(args.output.as_deref(), &inst.to_text())?;
    Ok(ExitCode::SUCCESS)
}

fn solve(args: SolveArgs) -> anyhow::Result<ExitCode> {
    let inst = read_instance(&args.input)?;
    let config = SolverConfig { tsp_mode: args.tsp.into(), seed: args.seed };
    let solution = match args.algo {
        AlgoArg::Sweep => {
            let res = sweep_solve(&inst, args.m, config)?;
            log::info!(
                "{} groups, {} solved exactly",
                res.groups.len(),
                res.groups.iter().filter(|g| g.path == sweepcvrp_core::group::GroupPath::Exact).count()
            );
            res.solution
        }
        AlgoArg::Itp => itp_solve(&inst, config)?.solution,
    };
    solution.validate(&inst)?;
    emit(args.output.as_deref(), &solution.to_text())?;
    Ok(ExitCode::SUCCESS)
}

fn bounds(args: BoundsArgs) -> anyhow::Result<ExitCode> {
    let inst = read_instance(&args.input)?;
    let r = match args.r.as_str() {
        "auto" => Radius::Finite(choose_r(inst.depot)),
        other => other.parse::<Radius>()?,
    };
    let report = bounds_report(&inst, r, args.m, args.tsp.into())?;
    let text = match args.format {
        Format::Csv => format!("{}\n{}\n", BoundsReport::CSV_HEADER, report.to_csv_row()),
        Format::Json => format!("{}\n", serde_json::to_string(&report)?),
    };
    emit(None, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn eval_g_cmd(args: EvalGArgs) -> anyhow::Result<ExitCode> {
    if !(args.a.is_finite() && args.b.is_finite()) {
        bail!("depot coordinates must be finite");
    }
    let o = DepotPoint::new(args.a, args.b);
    let g = eval_g(o);
    let mut out = format!("g1 {:?}\ng2 {:?}\ng3 {:?}\nradius {:?}\n", g.g1, g.g2, g.g3, g.r);
    if args.interval {
        let e = iv_g_all(o)?;
        out += &format!("g1_interval {}\ng2_interval {}\ng3_interval {}\nradius_interval {}\n", e.g1, e.g2, e.g3, e.r);
    }
    emit(None, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn verify_net(args: VerifyNetArgs) -> anyhow::Result<ExitCode> {
    let thresholds = Thresholds { g2: args.threshold_g2, g3: args.threshold_g3 };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = args.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().context("building thread pool")?;
    let cert = pool.install(|| verify_all(args.stride, thresholds))?;
    if let Some(path) = &args.report {
        cert.write_report(path)?;
    }
    println!("{cert}");
    for f in cert.failures.iter().take(10) {
        println!(
            "failed at ({}, {}) = ({:?}, {:?}): margins {:?} / {:?}",
            f.i, f.j, f.a, f.b, f.margin2_lo, f.margin3_lo
        );
    }
    Ok(if cert.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn experiment(args: ExperimentArgs) -> anyhow::Result<ExitCode> {
    let mut config = ExperimentConfig::new(args.n, args.k, args.depot, args.m, args.seeds);
    config.algos = args
        .algos
        .iter()
        .map(|a| match a {
            AlgoArg::Sweep => Algo::Sweep,
            AlgoArg::Itp => Algo::Itp,
        })
        .collect();
    config.tsp_mode = args.tsp.into();
    let rows = run_ratio_experiment(&config)?;
    match &args.output {
        Some(p) => {
            let file = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            write_csv(io::BufWriter::new(file), &rows)?;
        }
        None => write_csv(io::stdout().lock(), &rows)?,
    }
    for s in summarize(&rows) {
        eprintln!(
            "{}: {} runs, mean cost {:.4}, mean ratio {:.4} (certified lower bound {:.4}){}",
            s.algo,
            s.runs,
            s.mean_cost,
            s.mean_ratio,
            s.mean_certified_ratio,
            if s.all_certified { "" } else { ", indicative" }
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Bounds(a) => bounds(a),
        Command::EvalG(a) => eval_g_cmd(a),
        Command::VerifyNet(a) => verify_net(a),
        Command::Experiment(a) => experiment(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
