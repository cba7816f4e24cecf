//! Simple undirected graphs with positive edge lengths.
//!
//! Nodes are dense indices `0..n`. Each node also carries the external label
//! it had in the input file so that outputs can be reported in the caller's
//! id space.

mod generate;
mod io;

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;

use crate::distances::single_source;
use crate::error::{Error, Result};

pub use generate::{generate, GraphKind};
pub use io::{parse_edge_list, parse_matrix_market, read_graph, write_edge_list, GraphFormat};

/// Immutable CSR adjacency. Every undirected edge is stored in both
/// directions with the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    lengths: Vec<f64>,
    labels: Vec<u64>,
    edge_count: usize,
    weighted: bool,
}

impl Graph {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// True iff any edge length differs from 1.
    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: usize) -> impl ExactSizeIterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.lengths[range].iter().copied())
    }

    pub fn neighbor_ids(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// External label of node `v`.
    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Each undirected edge once, as `(u, v, length)` with `u < v`, in
    /// ascending order of `u` and then adjacency order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, len)| (u, v, len))
        })
    }

    /// Connected components as node lists, each sorted ascending, ordered
    /// by their smallest node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in self.neighbor_ids(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() <= 1 || self.components().len() == 1
    }

    /// Subgraph induced by `nodes` (which must be sorted ascending), with
    /// ids recompacted in that order.
    fn induced(&self, nodes: &[usize]) -> Graph {
        let mut remap = vec![usize::MAX; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            remap[old] = new;
        }
        let mut b = GraphBuilder::new();
        for &old in nodes {
            b.add_node(self.labels[old]);
        }
        for (u, v, len) in self.edges() {
            if remap[u] != usize::MAX && remap[v] != usize::MAX {
                b.add_edge_internal(remap[u], remap[v], len);
            }
        }
        b.build()
    }
}

/// Accumulates nodes and edges, dropping self-loops and keeping the first
/// occurrence of every duplicate edge.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<u64>,
    index: std::collections::HashMap<u64, usize>,
    edges: Vec<(usize, usize, f64)>,
    seen: HashSet<(usize, usize)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the internal id for an external label, registering it on
    /// first sight.
    pub fn add_node(&mut self, label: u64) -> usize {
        if let Some(&id) = self.index.get(&label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label);
        self.index.insert(label, id);
        id
    }

    /// Adds an edge between external labels. Returns false when the edge was
    /// dropped as a self-loop or duplicate.
    pub fn add_edge(&mut self, a: u64, b: u64, length: f64) -> Result<bool> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Validation(format!(
                "edge {a}-{b} has non-positive or non-finite length {length}"
            )));
        }
        let u = self.add_node(a);
        let v = self.add_node(b);
        Ok(self.add_edge_internal(u, v, length))
    }

    fn add_edge_internal(&mut self, u: usize, v: usize, length: f64) -> bool {
        if u == v {
            return false;
        }
        let key = (u.min(v), u.max(v));
        if !self.seen.insert(key) {
            return false;
        }
        self.edges.push((key.0, key.1, length));
        true
    }

    pub fn build(self) -> Graph {
        let n = self.labels.len();
        let mut degree = vec![0usize; n];
        for &(u, v, _) in &self.edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut targets = vec![0; total];
        let mut lengths = vec![0.0; total];
        let mut cursor = offsets[..n].to_vec();
        for &(u, v, len) in &self.edges {
            targets[cursor[u]] = v;
            lengths[cursor[u]] = len;
            cursor[u] += 1;
            targets[cursor[v]] = u;
            lengths[cursor[v]] = len;
            cursor[v] += 1;
        }
        let weighted = self.edges.iter().any(|&(_, _, len)| len != 1.0);
        Graph {
            offsets,
            targets,
            lengths,
            labels: self.labels,
            edge_count: self.edges.len(),
            weighted,
        }
    }
}

/// The connected component with the most nodes; ties go to the component
/// containing the smallest node id.
pub fn largest_component(g: &Graph) -> Graph {
    let comps = g.components();
    if comps.len() <= 1 {
        return g.clone();
    }
    // components() is ordered by smallest member, so the first maximum wins ties.
    let mut best = &comps[0];
    for c in &comps[1..] {
        if c.len() > best.len() {
            best = c;
        }
    }
    g.induced(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    /// Weighted when the graph is weighted, hop count otherwise.
    pub diameter: f64,
    pub weighted: bool,
}

/// Exact statistics; the diameter runs one shortest-path search per node.
pub fn stats(g: &Graph) -> Result<GraphStats> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Size("graph has no nodes".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected("diameter is infinite".into()));
    }
    let min_degree = (0..n).map(|v| g.degree(v)).min().unwrap_or(0);
    let max_degree = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
    let diameter = (0..n)
        .into_par_iter()
        .map(|s| single_source(g, s).into_iter().fold(0.0f64, f64::max))
        .reduce(|| 0.0, f64::max);
    Ok(GraphStats {
        nodes: n,
        edges: g.edge_count(),
        min_degree,
        max_degree,
        diameter,
        weighted: g.is_weighted(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(text: &str) -> Graph {
        parse_edge_list(text.as_bytes()).unwrap()
    }

    #[test]
    fn adjacency_is_symmetric() {
        let g = el("0 1 2\n1 2 3\n2 0 1.5\n3 1");
        for u in 0..g.node_count() {
            for (v, len) in g.neighbors(u) {
                assert!(g.neighbors(v).any(|(w, l)| w == u && l == len));
            }
        }
        assert_eq!(g.edges().count(), g.edge_count());
    }

    #[test]
    fn largest_component_picks_bigger_part() {
        // P3 on labels 10,11,12 plus P2 on 0,1 (P2 appears first).
        let g = el("0 1\n10 11\n11 12");
        let lc = largest_component(&g);
        assert_eq!(lc.node_count(), 3);
        assert_eq!(lc.edge_count(), 2);
        assert_eq!(lc.labels(), &[10, 11, 12]);
    }

    #[test]
    fn largest_component_identity_on_connected() {
        let g = el("0 1\n1 2\n2 3");
        assert_eq!(largest_component(&g), g);
    }

    #[test]
    fn largest_component_tie_goes_to_node_zero() {
        let g = el("5 6\n6 7\n7 5\n0 1\n1 2\n2 0");
        let lc = largest_component(&g);
        // label 5 is internal node 0
        assert_eq!(lc.labels(), &[5, 6, 7]);
    }

    #[test]
    fn stats_on_small_graphs() {
        let p5 = generate(GraphKind::Path(5)).unwrap();
        let s = stats(&p5).unwrap();
        assert_eq!((s.min_degree, s.max_degree, s.diameter), (1, 2, 4.0));

        let c6 = generate(GraphKind::Cycle(6)).unwrap();
        let s = stats(&c6).unwrap();
        assert_eq!((s.min_degree, s.max_degree, s.diameter), (2, 2, 3.0));
    }

    #[test]
    fn stats_rejects_disconnected() {
        let g = el("0 1\n2 3");
        assert!(matches!(stats(&g), Err(Error::Disconnected(_))));
    }

    #[test]
    fn builder_rejects_bad_lengths() {
        let mut b = GraphBuilder::new();
        assert!(b.add_edge(0, 1, 0.0).is_err());
        assert!(b.add_edge(0, 1, -1.0).is_err());
        assert!(b.add_edge(0, 1, f64::NAN).is_err());
        assert!(b.add_edge(0, 1, f64::INFINITY).is_err());
    }
}
