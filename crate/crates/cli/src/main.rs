use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use sparse_stress::graph::write_edge_list;
use sparse_stress::metrics::{
    evaluate, Aggregate, MetricOptions, PairDistances, DEFAULT_BINS, DEFAULT_MAX_HOPS,
};
use sparse_stress::pipeline::{
    bench, run_repetitions, write_bench_csv, write_summary_csv, BenchGrid,
};
use sparse_stress::render::write_svg;
use sparse_stress::{
    generate, largest_component, read_graph, read_layout_csv, run, stats, write_layout_csv,
    Algorithm, Error, Graph, GraphFormat, GraphKind, Layout, RunConfig, Strategy,
};

const THREADS_ENV: &str = "SPARSE_STRESS_THREADS";

/// Graph layouts by sparse stress majorization.
#[derive(Parser)]
#[command(name = "sparse-stress", version, about)]
struct Cli {
    /// Run on a single thread.
    #[arg(long, global = true)]
    deterministic: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a layout.
    Layout(LayoutArgs),
    /// Score a layout, optionally against a reference layout.
    Metrics(MetricsArgs),
    /// Sparse runs over a grid of pivot counts, samplers and seeds.
    Bench(BenchArgs),
    /// Draw a layout as SVG.
    Render(RenderArgs),
    /// Print graph statistics.
    Info(InputArgs),
    /// Write a synthetic graph as an edge list.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Edge list or MatrixMarket file, or `gen:KIND:SIZE` (path, cycle, grid, btree, star).
    graph: String,

    /// Input format; guessed from the extension when omitted.
    #[arg(long, value_parser = ["el", "mtx"])]
    format: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    /// Pivot count for the sparse model.
    #[arg(long, default_value_t = 200)]
    k: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Sweep cap; 500 for full stress and 200 otherwise.
    #[arg(long)]
    max_iters: Option<usize>,

    /// Stop once the relative positional change drops to this value.
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,

    #[arg(long, default_value_t = 2)]
    dim: usize,

    /// Pivots for the PivotMDS initial layout.
    #[arg(long, default_value_t = 200)]
    init_pivots: usize,

    /// Repeat each solve this often and report the mean solve time.
    #[arg(long, default_value_t = 1)]
    time_reps: usize,

    /// Evaluate stress on about this many sampled pairs instead of all.
    #[arg(long)]
    sample_pairs: Option<usize>,
}

#[derive(Args)]
struct LayoutArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    solve: SolveArgs,

    /// One of full, sparse, one-stress, pivotmds-only.
    #[arg(long, default_value = "sparse")]
    algo: Algorithm,

    /// One of random, mis, maxmin-euclid, maxmin-sp, maxmin-random-sp,
    /// kmeans-layout, kmeans-sp, kmeans-maxmin-sp.
    #[arg(long, default_value = "kmeans-sp")]
    sampler: Strategy,

    /// Seeds `seed..seed+reps`; the run with the median rescaled stress is kept.
    #[arg(long, default_value_t = 1)]
    reps: usize,

    /// Layout CSV.
    #[arg(short, long)]
    out: PathBuf,

    /// Trace CSV; defaults to the layout path with extension `trace.csv`.
    #[arg(long)]
    trace: Option<PathBuf>,

    /// Per-run CSV when `--reps` exceeds 1; defaults to extension `summary.csv`.
    #[arg(long)]
    summary: Option<PathBuf>,

    /// Also draw the layout as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Layout CSV to score.
    layout: PathBuf,

    /// Reference layout for Procrustes and Gabriel comparisons.
    #[arg(long)]
    reference: Option<PathBuf>,

    /// Largest neighborhood size for the per-k curves.
    #[arg(long, default_value_t = DEFAULT_MAX_HOPS)]
    max_hops: usize,

    /// Distance bins for the error summary of weighted graphs.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,

    /// Evaluate on about this many sampled pairs instead of all.
    #[arg(long)]
    sample_pairs: Option<usize>,

    /// Seed for pair sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Per-node aggregation of the hull error: mean or median.
    #[arg(long, default_value = "mean")]
    aggregate: Aggregate,

    /// Report CSV; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    solve: SolveArgs,

    /// Comma-separated pivot counts.
    #[arg(long = "ks", value_delimiter = ',', default_value = "50,100,200")]
    ks: Vec<usize>,

    /// Comma-separated sampler names.
    #[arg(long = "samplers", value_delimiter = ',', default_value = "kmeans-sp")]
    samplers: Vec<Strategy>,

    /// Seeds per cell, starting at `--seed`.
    #[arg(long, default_value_t = 1)]
    reps: usize,

    /// Reference layout; a full stress layout is computed when omitted.
    #[arg(long)]
    reference: Option<PathBuf>,

    /// Graph column value; defaults to the input name.
    #[arg(long)]
    name: Option<String>,

    /// Summary CSV; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Layout CSV to draw.
    layout: PathBuf,

    /// SVG output.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    /// `KIND:SIZE`, for example `btree:9` or `grid:100x100`.
    spec: GraphKind,

    /// Edge list; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

/// Exit codes by error class.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Size(_) => 2,
        Error::Parse { .. }
        | Error::UnsupportedFormat(_)
        | Error::Validation(_)
        | Error::ShapeMismatch(_) => 3,
        Error::Io(_) => 4,
        _ => 5,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads(cli.deterministic) {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed downstream pipe (`| head`) is not a failure
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn configure_threads(deterministic: bool) -> sparse_stress::Result<()> {
    let threads = if deterministic {
        Some(1)
    } else {
        match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&t| t > 0)
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "{THREADS_ENV} must be a positive integer, got {v:?}"
                        ))
                    })?,
            ),
            Err(_) => None,
        }
    };
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(command: Command) -> sparse_stress::Result<()> {
    match command {
        Command::Layout(a) => cmd_layout(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Render(a) => cmd_render(a),
        Command::Info(a) => cmd_info(a),
        Command::Generate(a) => cmd_generate(a),
    }
}

fn load_graph(input: &InputArgs) -> sparse_stress::Result<Graph> {
    let g = match input.graph.strip_prefix("gen:") {
        Some(spec) => generate(spec.parse()?)?,
        None => {
            let format = input
                .format
                .as_deref()
                .map(str::parse::<GraphFormat>)
                .transpose()?;
            read_graph(Path::new(&input.graph), format)?
        }
    };
    let lc = largest_component(&g);
    if lc.node_count() < g.node_count() {
        warn!(
            "keeping the largest component: {} of {} nodes",
            lc.node_count(),
            g.node_count()
        );
    }
    Ok(lc)
}

fn create(path: &Path) -> sparse_stress::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes to `path`, or stdout when there is none.
fn output(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> sparse_stress::Result<()>,
) -> sparse_stress::Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn read_layout(g: &Graph, path: &Path) -> sparse_stress::Result<Layout> {
    read_layout_csv(g, File::open(path)?)
}

fn pair_distances(
    g: &Graph,
    sample_pairs: Option<usize>,
    seed: u64,
) -> sparse_stress::Result<PairDistances> {
    match sample_pairs {
        Some(target) => PairDistances::sampled(g, target, seed),
        None => PairDistances::all(g),
    }
}

fn run_config(algo: Algorithm, sampler: Strategy, s: &SolveArgs) -> RunConfig {
    RunConfig {
        k: s.k,
        sampler,
        seed: s.seed,
        dim: s.dim,
        init_pivots: s.init_pivots,
        max_iters: s.max_iters,
        eps: s.eps,
        time_reps: s.time_reps,
        ..RunConfig::new(algo)
    }
}

fn cmd_layout(a: LayoutArgs) -> sparse_stress::Result<()> {
    if a.reps == 0 {
        return Err(Error::Config("--reps must be at least 1".into()));
    }
    let g = load_graph(&a.input)?;
    let cfg = run_config(a.algo, a.sampler, &a.solve);
    let out = if a.reps == 1 {
        run(&g, &cfg)?
    } else {
        let pairs = pair_distances(&g, a.solve.sample_pairs, a.solve.seed)?;
        let reps = run_repetitions(&g, &cfg, a.reps, &pairs)?;
        let path = a
            .summary
            .clone()
            .unwrap_or_else(|| a.out.with_extension("summary.csv"));
        let mut w = create(&path)?;
        write_summary_csv(&reps.summaries, reps.median_index, &mut w)?;
        w.flush()?;
        reps.median
    };
    info!(
        "seed {}: init {:.1} ms, sampling {:.1} ms, solve {:.1} ms, converged {}",
        out.seed, out.timings.init_ms, out.timings.sampling_ms, out.timings.solve_ms, out.converged
    );
    let mut w = create(&a.out)?;
    write_layout_csv(&g, &out.layout, &mut w)?;
    w.flush()?;
    if let Some(trace) = &out.trace {
        let path = a
            .trace
            .clone()
            .unwrap_or_else(|| a.out.with_extension("trace.csv"));
        let mut w = create(&path)?;
        trace.write_csv(&mut w)?;
        w.flush()?;
    }
    if let Some(path) = &a.svg {
        let mut w = create(path)?;
        write_svg(&g, &out.layout, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn cmd_metrics(a: MetricsArgs) -> sparse_stress::Result<()> {
    let g = load_graph(&a.input)?;
    let x = read_layout(&g, &a.layout)?;
    let reference = a
        .reference
        .as_deref()
        .map(|p| read_layout(&g, p))
        .transpose()?;
    let opts = MetricOptions {
        max_hops: a.max_hops,
        bins: a.bins,
        sample_pairs: a.sample_pairs,
        seed: a.seed,
        aggregate: a.aggregate,
    };
    let report = evaluate(&g, &x, reference.as_ref(), &opts)?;
    output(a.out.as_deref(), |w| report.write_csv(w))
}

fn cmd_bench(a: BenchArgs) -> sparse_stress::Result<()> {
    if a.reps == 0 || a.ks.is_empty() || a.samplers.is_empty() {
        return Err(Error::Config(
            "bench needs at least one k, sampler and seed".into(),
        ));
    }
    let g = load_graph(&a.input)?;
    let base = run_config(Algorithm::Sparse, a.samplers[0], &a.solve);
    let reference = match &a.reference {
        Some(p) => read_layout(&g, p)?,
        None => {
            run(
                &g,
                &RunConfig {
                    algorithm: Algorithm::Full,
                    max_iters: None,
                    ..base.clone()
                },
            )?
            .layout
        }
    };
    let pairs = pair_distances(&g, a.solve.sample_pairs, a.solve.seed)?;
    let grid = BenchGrid {
        ks: a.ks,
        samplers: a.samplers,
        seeds: (0..a.reps as u64)
            .map(|r| a.solve.seed.wrapping_add(r))
            .collect(),
    };
    let name = a.name.clone().unwrap_or_else(|| graph_name(&a.input.graph));
    let rows = bench(&g, &name, &base, &grid, &reference, &pairs)?;
    output(a.out.as_deref(), |w| write_bench_csv(&rows, w))
}

fn graph_name(input: &str) -> String {
    match input.strip_prefix("gen:") {
        Some(spec) => spec.to_string(),
        None => Path::new(input)
            .file_stem()
            .map_or_else(|| input.to_string(), |s| s.to_string_lossy().into_owned()),
    }
}

fn cmd_render(a: RenderArgs) -> sparse_stress::Result<()> {
    let g = load_graph(&a.input)?;
    let x = read_layout(&g, &a.layout)?;
    let mut w = create(&a.out)?;
    write_svg(&g, &x, &mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_info(a: InputArgs) -> sparse_stress::Result<()> {
    let s = stats(&load_graph(&a)?)?;
    println!(
        "n={} m={} min_deg={} max_deg={} diam={} weighted={}",
        s.nodes, s.edges, s.min_degree, s.max_degree, s.diameter, s.weighted
    );
    Ok(())
}

fn cmd_generate(a: GenerateArgs) -> sparse_stress::Result<()> {
    let g = generate(a.spec)?;
    output(a.out.as_deref(), |w| write_edge_list(&g, w))
}
