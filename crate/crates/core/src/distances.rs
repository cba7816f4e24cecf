//! Shortest-path distances from pivots, the pivot regions, and the adapted
//! weights of the sparse model.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then node id
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Distances from `source` to every node; unreachable nodes get `+inf`.
/// BFS for unit-length graphs, Dijkstra otherwise.
pub fn single_source(g: &Graph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.node_count()];
    dist[source] = 0.0;
    if g.is_weighted() {
        let mut heap = BinaryHeap::new();
        heap.push(HeapEntry {
            dist: 0.0,
            node: source,
        });
        while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for (v, len) in g.neighbors(u) {
                let nd = d + len;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(HeapEntry { dist: nd, node: v });
                }
            }
        }
    } else {
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let nd = dist[u] + 1.0;
            for &v in g.neighbor_ids(u) {
                if dist[v].is_infinite() {
                    dist[v] = nd;
                    queue.push_back(v);
                }
            }
        }
    }
    dist
}

/// Symmetric all-pairs distance matrix, stored as the packed strict upper
/// triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from full rows; only the upper triangle is read.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(
                "distance matrix must be square".into(),
            ));
        }
        let data = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r[i + 1..].iter().copied())
            .collect();
        Ok(Self { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Start of row `i`'s entries `j > i`.
    #[inline]
    fn row_start(&self, i: usize) -> usize {
        i * (2 * self.n - i - 1) / 2
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            Ordering::Equal => 0.0,
            Ordering::Less => self.data[self.row_start(i) + j - i - 1],
            Ordering::Greater => self.data[self.row_start(j) + i - j - 1],
        }
    }

    /// Distances `d(i, j)` for `j > i`.
    #[inline]
    pub fn upper_row(&self, i: usize) -> &[f64] {
        let start = self.row_start(i);
        &self.data[start..start + self.n - i - 1]
    }

    /// Number of stored entries.
    pub fn stored_len(&self) -> usize {
        self.data.len()
    }
}

/// All-pairs shortest paths by one search per node.
pub fn all_pairs(g: &Graph) -> Result<DistanceMatrix> {
    let n = g.node_count();
    let tails: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| single_source(g, s).split_off(s + 1))
        .collect();
    if tails.iter().any(|r| r.iter().any(|d| d.is_infinite())) {
        return Err(Error::Disconnected(
            "all-pairs distances are unbounded".into(),
        ));
    }
    Ok(DistanceMatrix {
        n,
        data: tails.concat(),
    })
}

/// The pivot list and the k×n table of pivot-to-node distances.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotDistances {
    pivots: Vec<usize>,
    n: usize,
    dist: Vec<f64>,
}

impl PivotDistances {
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn pivot_count(&self) -> usize {
        self.pivots.len()
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Distances from pivot index `p` to every node.
    #[inline]
    pub fn row(&self, p: usize) -> &[f64] {
        &self.dist[p * self.n..(p + 1) * self.n]
    }

    #[inline]
    pub fn get(&self, p: usize, node: usize) -> f64 {
        self.dist[p * self.n + node]
    }

    /// Number of stored distances; always `k * n`.
    pub fn table_len(&self) -> usize {
        self.dist.len()
    }
}

pub(crate) fn validate_pivots(n: usize, pivots: &[usize]) -> Result<()> {
    if pivots.is_empty() {
        return Err(Error::Config("pivot set is empty".into()));
    }
    let mut seen = vec![false; n];
    for &p in pivots {
        if p >= n {
            return Err(Error::Config(format!("pivot {p} is not a node (n = {n})")));
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::Config(format!("pivot {p} listed twice")));
        }
    }
    Ok(())
}

/// One shortest-path search per pivot, run concurrently; rows are stored
/// in pivot order.
pub fn mssp(g: &Graph, pivots: &[usize]) -> Result<PivotDistances> {
    let n = g.node_count();
    validate_pivots(n, pivots)?;
    let rows: Vec<Vec<f64>> = pivots.par_iter().map(|&p| single_source(g, p)).collect();
    for (row, &p) in rows.iter().zip(pivots) {
        if let Some(v) = row.iter().position(|d| d.is_infinite()) {
            return Err(Error::Disconnected(format!(
                "node {v} unreachable from pivot {p}"
            )));
        }
    }
    Ok(PivotDistances {
        pivots: pivots.to_vec(),
        n,
        dist: rows.concat(),
    })
}

/// Partition of the nodes into pivot regions.
#[derive(Debug, Clone, PartialEq)]
pub struct Regions {
    /// Owning pivot index for every node.
    pub owner: Vec<usize>,
    /// Member nodes per pivot index, in assignment order (the pivot first).
    pub members: Vec<Vec<usize>>,
    /// Ascending distances from each pivot to its members.
    pub sorted_member_dist: Vec<Vec<f64>>,
}

/// Assigns every node to its closest pivot. Nodes are processed by
/// ascending distance to their closest pivot (then by id); equally close
/// pivots are resolved in favor of the currently smallest region, then the
/// lowest pivot index.
pub fn build_regions(pd: &PivotDistances) -> Regions {
    let n = pd.node_count();
    let k = pd.pivot_count();
    let mut owner = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (p, &node) in pd.pivots().iter().enumerate() {
        owner[node] = p;
        members[p].push(node);
    }

    let mut nearest = vec![f64::INFINITY; n];
    for p in 0..k {
        for (v, &d) in pd.row(p).iter().enumerate() {
            if d < nearest[v] {
                nearest[v] = d;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).filter(|&v| owner[v] == usize::MAX).collect();
    order.sort_by(|&a, &b| nearest[a].total_cmp(&nearest[b]).then(a.cmp(&b)));

    for v in order {
        let best = (0..k)
            .filter(|&p| pd.get(p, v) == nearest[v])
            .min_by_key(|&p| (members[p].len(), p))
            .expect("some pivot attains the minimum");
        owner[v] = best;
        members[best].push(v);
    }

    let sorted_member_dist = members
        .iter()
        .enumerate()
        .map(|(p, m)| {
            let mut d: Vec<f64> = m.iter().map(|&v| pd.get(p, v)).collect();
            d.sort_by(f64::total_cmp);
            d
        })
        .collect();
    Regions {
        owner,
        members,
        sorted_member_dist,
    }
}

/// `s(i,p)`: members of region `p` at distance at most `d_ip / 2` from `p`.
pub fn adapted_count(pd: &PivotDistances, regions: &Regions, i: usize, p: usize) -> usize {
    let threshold = pd.get(p, i) / 2.0;
    regions.sorted_member_dist[p].partition_point(|&d| d <= threshold)
}

/// Adapted weight `s / d_ip^2` of the pivot term between node `i` and pivot
/// index `p`.
pub fn adapted_weight(pd: &PivotDistances, regions: &Regions, i: usize, p: usize) -> Result<f64> {
    let d = pd.get(p, i);
    if d <= 0.0 {
        return Err(Error::DegenerateDistance {
            node: i,
            pivot: pd.pivots()[p],
        });
    }
    Ok(adapted_count(pd, regions, i, p) as f64 / (d * d))
}

/// All adapted weights as a k×n table; entries for a pivot's own node are 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedWeightTable {
    n: usize,
    weights: Vec<f64>,
}

impl AdaptedWeightTable {
    pub fn build(pd: &PivotDistances, regions: &Regions) -> Result<Self> {
        let n = pd.node_count();
        let rows: Result<Vec<Vec<f64>>> = (0..pd.pivot_count())
            .into_par_iter()
            .map(|p| {
                let pivot = pd.pivots()[p];
                (0..n)
                    .map(|i| {
                        if i == pivot {
                            Ok(0.0)
                        } else {
                            adapted_weight(pd, regions, i, p)
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            n,
            weights: rows?.concat(),
        })
    }

    #[inline]
    pub fn get(&self, p: usize, i: usize) -> f64 {
        self.weights[p * self.n + i]
    }

    pub fn table_len(&self) -> usize {
        self.weights.len()
    }
}

/// Debug dump `node,owner_pivot,dist_to_owner` with external labels.
pub fn write_regions_csv<W: Write>(
    g: &Graph,
    pd: &PivotDistances,
    regions: &Regions,
    mut w: W,
) -> Result<()> {
    writeln!(w, "node,owner_pivot,dist_to_owner")?;
    for (v, &p) in regions.owner.iter().enumerate() {
        writeln!(
            w,
            "{},{},{}",
            g.label(v),
            g.label(pd.pivots()[p]),
            pd.get(p, v)
        )?;
    }
    Ok(())
}
