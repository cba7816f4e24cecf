//! Sparse stress majorization for graph layout.
//!
//! The sparse model keeps the stress terms of graph edges and replaces all
//! other node pairs by terms towards `k` pivot nodes, weighted by how many
//! nodes each pivot stands for. One sweep costs `O(kn + m)` instead of
//! `O(n²)`.
//!
//! ```
//! use sparse_stress::{generate, run, Algorithm, GraphKind, RunConfig};
//!
//! let g = generate(GraphKind::Grid { rows: 10, cols: 10 }).unwrap();
//! let cfg = RunConfig { k: 20, ..RunConfig::new(Algorithm::Sparse) };
//! let out = run(&g, &cfg).unwrap();
//! assert_eq!(out.layout.node_count(), 100);
//! ```

pub mod distances;
pub mod error;
pub mod graph;
pub mod init;
pub mod layout;
pub mod metrics;
pub mod pipeline;
pub mod render;
pub mod rng;
pub mod sampling;
pub mod solvers;

pub use error::{Error, Result};
pub use graph::{
    generate, largest_component, read_graph, stats, Graph, GraphBuilder, GraphFormat, GraphKind,
    GraphStats,
};
pub use layout::{read_layout_csv, write_layout_csv, Layout};
pub use pipeline::{run, Algorithm, RunConfig, RunOutput};
pub use sampling::{PivotSet, SamplerConfig, Strategy};
pub use solvers::{Solution, SolverConfig, Trace};
