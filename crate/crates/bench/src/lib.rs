//! Shared fixtures for the solver benchmarks.

use sparse_stress::init::{pivot_mds, rescale_to_edge_weights, DEFAULT_PIVOT_COUNT};
use sparse_stress::sampling::sample;
use sparse_stress::{generate, Graph, GraphKind, Layout, SamplerConfig, Strategy};

/// A `side`×`side` grid graph.
pub fn grid(side: usize) -> Graph {
    generate(GraphKind::Grid {
        rows: side,
        cols: side,
    })
    .expect("grid sizes are valid")
}

/// The rescaled PivotMDS layout the solvers start from.
pub fn start_layout(g: &Graph, seed: u64) -> Layout {
    let init = pivot_mds(g, DEFAULT_PIVOT_COUNT, seed, 2).expect("connected graph");
    rescale_to_edge_weights(&init.layout, g).expect("non-degenerate layout")
}

/// `k` pivots chosen by farthest-first traversal.
pub fn maxmin_pivots(g: &Graph, k: usize, seed: u64) -> Vec<usize> {
    sample(g, None, &SamplerConfig::new(Strategy::MaxMinSp, k, seed))
        .expect("k <= n")
        .nodes
}
