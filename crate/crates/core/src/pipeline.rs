//! End-to-end layout runs: initial layout, rescaling, pivot sampling and a
//! solver, plus seeded repetitions and parameter grids.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::init::{pivot_mds, rescale_to_edge_weights, DEFAULT_PIVOT_COUNT};
use crate::layout::Layout;
use crate::metrics::{normalized_stress, optimal_rescale, procrustes, PairDistances};
use crate::sampling::{sample, PivotSet, SamplerConfig, Strategy, DEFAULT_KMEANS_MAX_ITERS};
use crate::solvers::{solve, FullStress, OneStress, SolverConfig, SparseModel, Trace, DEFAULT_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Full,
    Sparse,
    OneStress,
    PivotMdsOnly,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Full => "full",
            Algorithm::Sparse => "sparse",
            Algorithm::OneStress => "one-stress",
            Algorithm::PivotMdsOnly => "pivotmds-only",
        }
    }

    pub fn default_solver(self) -> SolverConfig {
        match self {
            Algorithm::Full => SolverConfig::full(),
            _ => SolverConfig::sparse(),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Algorithm::Full,
            Algorithm::Sparse,
            Algorithm::OneStress,
            Algorithm::PivotMdsOnly,
        ]
        .into_iter()
        .find(|a| a.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    /// Pivot count for the sparse solver.
    pub k: usize,
    pub sampler: Strategy,
    pub seed: u64,
    pub dim: usize,
    pub init_pivots: usize,
    /// Defaults to 500 for the full model and 200 otherwise.
    pub max_iters: Option<usize>,
    pub eps: f64,
    pub kmeans_max_iters: usize,
    /// Solver repetitions per run; the reported solve time is their mean.
    pub time_reps: usize,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            k: 200,
            sampler: Strategy::KMeansSp,
            seed: 0,
            dim: 2,
            init_pivots: DEFAULT_PIVOT_COUNT,
            max_iters: None,
            eps: DEFAULT_EPS,
            kmeans_max_iters: DEFAULT_KMEANS_MAX_ITERS,
            time_reps: 1,
        }
    }

    pub fn solver(&self) -> SolverConfig {
        let mut cfg = self.algorithm.default_solver();
        if let Some(m) = self.max_iters {
            cfg.max_iters = m;
        }
        cfg.eps = self.eps;
        cfg
    }

    fn validate(&self) -> Result<()> {
        self.solver().validate()?;
        if self.time_reps == 0 {
            return Err(Error::Config("time_reps must be at least 1".into()));
        }
        if self.dim == 0 {
            return Err(Error::Config("layout dimension must be at least 1".into()));
        }
        if self.algorithm == Algorithm::Sparse && self.k == 0 {
            return Err(Error::Config("sparse stress needs k >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Timings {
    pub init_ms: f64,
    pub sampling_ms: f64,
    /// Mean over the timing repetitions.
    pub solve_ms: f64,
}

impl Timings {
    pub fn total_ms(&self) -> f64 {
        self.init_ms + self.sampling_ms + self.solve_ms
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub seed: u64,
    pub layout: Layout,
    /// Absent for PivotMDS-only runs and trivial graphs.
    pub trace: Option<Trace>,
    pub pivots: Option<PivotSet>,
    pub converged: bool,
    pub timings: Timings,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// One layout run on a connected graph.
pub fn run(g: &Graph, cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Size("empty graph".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected(
            "layout runs need a connected graph".into(),
        ));
    }
    if cfg.algorithm == Algorithm::Sparse && cfg.k > n {
        return Err(Error::Size(format!(
            "cannot sample {} pivots from {n} nodes",
            cfg.k
        )));
    }
    if n == 1 {
        let pivots = (cfg.algorithm == Algorithm::Sparse).then(|| PivotSet {
            nodes: vec![0],
            strategy: cfg.sampler,
            seed: cfg.seed,
        });
        return Ok(RunOutput {
            seed: cfg.seed,
            layout: Layout::zeros(1, cfg.dim),
            trace: None,
            pivots,
            converged: true,
            timings: Timings::default(),
        });
    }
    let mut timings = Timings::default();
    let start = Instant::now();
    let init = pivot_mds(g, cfg.init_pivots, cfg.seed, cfg.dim)?;
    let x0 = rescale_to_edge_weights(&init.layout, g)?;
    timings.init_ms = ms(start);

    let solver = cfg.solver();
    let (model, pivots): (Box<dyn crate::solvers::StressModel + '_>, _) = match cfg.algorithm {
        Algorithm::PivotMdsOnly => {
            return Ok(RunOutput {
                seed: cfg.seed,
                layout: x0,
                trace: None,
                pivots: None,
                converged: init.converged,
                timings,
            });
        }
        Algorithm::Full => {
            let start = Instant::now();
            let model = FullStress::new(g)?;
            timings.solve_ms += ms(start);
            (Box::new(model), None)
        }
        Algorithm::OneStress => (Box::new(OneStress::new(g)?), None),
        Algorithm::Sparse => {
            let start = Instant::now();
            let mut sampler = SamplerConfig::new(cfg.sampler, cfg.k, cfg.seed);
            sampler.kmeans_max_iters = cfg.kmeans_max_iters;
            let pivots = sample(g, Some(&x0), &sampler)?;
            timings.sampling_ms = ms(start);
            let start = Instant::now();
            let model = SparseModel::new(g, &pivots.nodes)?;
            timings.solve_ms += ms(start);
            (Box::new(model), Some(pivots))
        }
    };
    let mut solution = None;
    let mut solve_ms = 0.0;
    for _ in 0..cfg.time_reps {
        let start = Instant::now();
        solution = Some(solve(model.as_ref(), &x0, &solver)?);
        solve_ms += ms(start);
    }
    timings.solve_ms += solve_ms / cfg.time_reps as f64;
    let solution = solution.expect("time_reps >= 1");
    Ok(RunOutput {
        seed: cfg.seed,
        layout: solution.layout,
        trace: Some(solution.trace),
        pivots,
        converged: solution.converged,
        timings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub seed: u64,
    /// Optimally rescaled stress over all node pairs.
    pub rescaled_stress: f64,
    pub normalized_stress: f64,
    pub sweeps: usize,
    pub converged: bool,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone)]
pub struct Repetitions {
    pub summaries: Vec<RunSummary>,
    /// Index into `summaries` of the selected run.
    pub median_index: usize,
    pub median: RunOutput,
}

/// Runs seeds `cfg.seed..cfg.seed + reps` and keeps the run with the median
/// rescaled stress (the lower one for an even count, ties by seed).
pub fn run_repetitions(
    g: &Graph,
    cfg: &RunConfig,
    reps: usize,
    pairs: &PairDistances,
) -> Result<Repetitions> {
    if reps == 0 {
        return Err(Error::Config("repetitions must be at least 1".into()));
    }
    let mut outputs = Vec::with_capacity(reps);
    let mut summaries = Vec::with_capacity(reps);
    for r in 0..reps as u64 {
        let cfg = RunConfig {
            seed: cfg.seed.wrapping_add(r),
            ..cfg.clone()
        };
        let out = run(g, &cfg)?;
        let (rescaled_stress, normalized) = if g.node_count() < 2 {
            (0.0, 0.0)
        } else {
            (
                optimal_rescale(&out.layout, pairs)?.1,
                normalized_stress(&out.layout, pairs)?,
            )
        };
        summaries.push(RunSummary {
            seed: cfg.seed,
            rescaled_stress,
            normalized_stress: normalized,
            sweeps: out.trace.as_ref().map_or(0, |t| t.rows.len()),
            converged: out.converged,
            elapsed_ms: out.timings.total_ms(),
        });
        outputs.push(out);
    }
    let mut order: Vec<usize> = (0..reps).collect();
    order.sort_by(|&a, &b| {
        summaries[a]
            .rescaled_stress
            .total_cmp(&summaries[b].rescaled_stress)
            .then(summaries[a].seed.cmp(&summaries[b].seed))
    });
    let median_index = order[(reps - 1) / 2];
    let median = outputs.swap_remove(median_index);
    Ok(Repetitions {
        summaries,
        median_index,
        median,
    })
}

pub fn write_summary_csv<W: Write>(
    summaries: &[RunSummary],
    selected: usize,
    mut w: W,
) -> Result<()> {
    writeln!(
        w,
        "seed,rescaled_stress,normalized_stress,sweeps,converged,elapsed_ms,selected"
    )?;
    for (i, s) in summaries.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{},{:.3},{}",
            s.seed,
            s.rescaled_stress,
            s.normalized_stress,
            s.sweeps,
            s.converged,
            s.elapsed_ms,
            i == selected
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub graph: String,
    pub sampler: Strategy,
    pub k: usize,
    pub seed: u64,
    pub normalized_stress: f64,
    /// Against the reference layout.
    pub procrustes: f64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchGrid {
    pub ks: Vec<usize>,
    pub samplers: Vec<Strategy>,
    pub seeds: Vec<u64>,
}

/// Sparse runs over every `(k, sampler, seed)`, scored against `reference`.
pub fn bench(
    g: &Graph,
    graph_name: &str,
    base: &RunConfig,
    grid: &BenchGrid,
    reference: &Layout,
    pairs: &PairDistances,
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &k in &grid.ks {
        for &sampler in &grid.samplers {
            for &seed in &grid.seeds {
                let cfg = RunConfig {
                    algorithm: Algorithm::Sparse,
                    k,
                    sampler,
                    seed,
                    ..base.clone()
                };
                let out = run(g, &cfg)?;
                rows.push(BenchRow {
                    graph: graph_name.to_string(),
                    sampler,
                    k,
                    seed,
                    normalized_stress: normalized_stress(&out.layout, pairs)?,
                    procrustes: procrustes(reference, &out.layout)?,
                    elapsed_ms: out.timings.total_ms(),
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], mut w: W) -> Result<()> {
    writeln!(
        w,
        "graph,sampler,k,seed,normalized_stress,procrustes,elapsed_ms"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{:.3}",
            r.graph, r.sampler, r.k, r.seed, r.normalized_stress, r.procrustes, r.elapsed_ms
        )?;
    }
    Ok(())
}
