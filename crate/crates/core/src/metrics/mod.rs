//! Layout quality measures.

mod gabriel;
mod histogram;
mod hull;
mod procrustes;
mod stress;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

pub use gabriel::{gabriel_graph, gabriel_jaccard, jaccard_curve, GabrielGraph};
pub use histogram::{error_histogram, percentile, HistBin, DEFAULT_BINS};
pub use hull::{convex_hull, hull_contains, hull_error};
pub use procrustes::procrustes;
pub use stress::{normalized_stress, optimal_rescale, stress, PairDistances};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layout::Layout;

pub const DEFAULT_MAX_HOPS: usize = 5;

/// How per-node values are combined into one curve value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregate {
    #[default]
    Mean,
    Median,
}

impl Aggregate {
    /// `None` for no values.
    pub fn apply(self, mut values: Vec<f64>) -> Option<f64> {
        if values.is_empty() {
            return None;
        }
        Some(match self {
            Aggregate::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Aggregate::Median => {
                values.sort_by(f64::total_cmp);
                percentile(&values, 0.5)
            }
        })
    }
}

impl FromStr for Aggregate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Aggregate::Mean),
            "median" => Ok(Aggregate::Median),
            _ => Err(Error::Config(format!("unknown aggregate {s:?}"))),
        }
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregate::Mean => "mean",
            Aggregate::Median => "median",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricOptions {
    /// Largest hop count for the neighborhood curves.
    pub max_hops: usize,
    pub bins: usize,
    /// Evaluate distance-based measures on about this many pairs.
    pub sample_pairs: Option<usize>,
    pub seed: u64,
    pub aggregate: Aggregate,
}

impl Default for MetricOptions {
    fn default() -> Self {
        Self {
            max_hops: DEFAULT_MAX_HOPS,
            bins: DEFAULT_BINS,
            sample_pairs: None,
            seed: 0,
            aggregate: Aggregate::Mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub pair_count: usize,
    pub sampled: bool,
    pub raw_stress: f64,
    pub optimal_scale: f64,
    pub rescaled_stress: f64,
    pub normalized_stress: f64,
    /// Against the reference layout, when one is given.
    pub procrustes: Option<f64>,
    pub gabriel_jaccard: Vec<f64>,
    pub hull_error: Vec<Option<f64>>,
    /// Errors of the optimally rescaled layout.
    pub error_histogram: Vec<HistBin>,
}

/// Scores `x` on graph `g`, and against `reference` when given.
pub fn evaluate(
    g: &Graph,
    x: &Layout,
    reference: Option<&Layout>,
    opts: &MetricOptions,
) -> Result<MetricReport> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::Size("metrics need at least two nodes".into()));
    }
    if x.node_count() != n {
        return Err(Error::ShapeMismatch(format!(
            "layout has {} nodes, graph has {n}",
            x.node_count()
        )));
    }
    let pairs = match opts.sample_pairs {
        Some(target) => PairDistances::sampled(g, target, opts.seed)?,
        None => PairDistances::all(g)?,
    };
    let raw_stress = stress(x, &pairs)?;
    let (optimal_scale, rescaled_stress) = optimal_rescale(x, &pairs)?;
    let (procrustes, gabriel_jaccard) = match reference {
        Some(r) => (
            Some(procrustes(r, x)?),
            gabriel_jaccard(r, x, opts.max_hops, opts.aggregate)?,
        ),
        None => (None, Vec::new()),
    };
    let hull_error = if x.dim() == 2 {
        hull_error(g, x, opts.max_hops, opts.aggregate)?
    } else {
        Vec::new()
    };
    let error_histogram =
        error_histogram(&x.scaled(optimal_scale), &pairs, g.is_weighted(), opts.bins)?;
    Ok(MetricReport {
        pair_count: pairs.pair_count(),
        sampled: opts.sample_pairs.is_some(),
        raw_stress,
        optimal_scale,
        rescaled_stress,
        normalized_stress: rescaled_stress / (n * (n - 1) / 2) as f64,
        procrustes,
        gabriel_jaccard,
        hull_error,
        error_histogram,
    })
}

impl MetricReport {
    /// Three CSV blocks separated by blank lines: scalars, curves, histogram.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "metric,key,value")?;
        writeln!(w, "pairs,count,{}", self.pair_count)?;
        writeln!(w, "pairs,sampled,{}", self.sampled)?;
        writeln!(w, "stress,raw,{}", self.raw_stress)?;
        writeln!(w, "stress,optimal_scale,{}", self.optimal_scale)?;
        writeln!(w, "stress,rescaled,{}", self.rescaled_stress)?;
        writeln!(w, "stress,normalized,{}", self.normalized_stress)?;
        if let Some(p) = self.procrustes {
            writeln!(w, "procrustes,statistic,{p}")?;
        }
        writeln!(w)?;
        writeln!(w, "curve,k,value")?;
        for (k, v) in self.gabriel_jaccard.iter().enumerate() {
            writeln!(w, "gabriel_jaccard,{},{v}", k + 1)?;
        }
        for (k, v) in self.hull_error.iter().enumerate() {
            match v {
                Some(v) => writeln!(w, "hull_error,{},{v}", k + 1)?,
                None => writeln!(w, "hull_error,{},", k + 1)?,
            }
        }
        writeln!(w)?;
        writeln!(w, "hist,bin_lo,bin_hi,min,p5,p25,median,p75,p95,max")?;
        for b in &self.error_histogram {
            write!(w, "error,{},{}", b.lo, b.hi)?;
            for q in b.quantiles {
                write!(w, ",{q}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
