//! Pivot selection strategies.
//!
//! Every strategy is deterministic given its random stream. The public
//! entry point is [`sample`], which derives that stream from the configured
//! seed; the per-strategy functions take the generator directly.

use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::distances::{mssp, single_source};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layout::{euclidean, Layout};
use crate::rng::SeedStream;

pub const DEFAULT_KMEANS_MAX_ITERS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Random,
    MisFiltration,
    MaxMinEuclid,
    MaxMinSp,
    MaxMinRandomSp,
    KMeansLayout,
    KMeansSp,
    KMeansMaxMinSp,
}

impl Strategy {
    pub const ALL: [Strategy; 8] = [
        Strategy::Random,
        Strategy::MisFiltration,
        Strategy::MaxMinEuclid,
        Strategy::MaxMinSp,
        Strategy::MaxMinRandomSp,
        Strategy::KMeansLayout,
        Strategy::KMeansSp,
        Strategy::KMeansMaxMinSp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::MisFiltration => "mis",
            Strategy::MaxMinEuclid => "maxmin-euclid",
            Strategy::MaxMinSp => "maxmin-sp",
            Strategy::MaxMinRandomSp => "maxmin-random-sp",
            Strategy::KMeansLayout => "kmeans-layout",
            Strategy::KMeansSp => "kmeans-sp",
            Strategy::KMeansMaxMinSp => "kmeans-maxmin-sp",
        }
    }

    /// Whether the strategy reads node positions from an initial layout.
    pub fn needs_layout(self) -> bool {
        matches!(
            self,
            Strategy::MaxMinEuclid | Strategy::KMeansLayout | Strategy::KMeansMaxMinSp
        )
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown sampler {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub strategy: Strategy,
    pub k: usize,
    pub seed: u64,
    pub kmeans_max_iters: usize,
}

impl SamplerConfig {
    pub fn new(strategy: Strategy, k: usize, seed: u64) -> Self {
        Self {
            strategy,
            k,
            seed,
            kmeans_max_iters: DEFAULT_KMEANS_MAX_ITERS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PivotSet {
    pub nodes: Vec<usize>,
    pub strategy: Strategy,
    pub seed: u64,
}

impl PivotSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Config("at least one pivot is required".into()));
    }
    if k > n {
        return Err(Error::Size(format!(
            "cannot sample {k} pivots from {n} nodes"
        )));
    }
    Ok(())
}

/// Samples `cfg.k` pivots. Layout-based strategies require `layout`.
pub fn sample(g: &Graph, layout: Option<&Layout>, cfg: &SamplerConfig) -> Result<PivotSet> {
    if cfg.kmeans_max_iters == 0 {
        return Err(Error::Config("kmeans_max_iters must be at least 1".into()));
    }
    let mut rng = SeedStream::new(cfg.seed).fork("sampler");
    let need_layout = || {
        layout.ok_or_else(|| {
            Error::Config(format!("sampler {} needs an initial layout", cfg.strategy))
        })
    };
    let (k, iters) = (cfg.k, cfg.kmeans_max_iters);
    let nodes = match cfg.strategy {
        Strategy::Random => sample_random(g.node_count(), k, &mut rng)?,
        Strategy::MisFiltration => sample_mis_filtration(g, k, &mut rng)?,
        Strategy::MaxMinEuclid => sample_maxmin_euclid(need_layout()?, k, &mut rng)?,
        Strategy::MaxMinSp => sample_maxmin_sp(g, k, &mut rng)?,
        Strategy::MaxMinRandomSp => sample_maxmin_random_sp(g, k, &mut rng)?,
        Strategy::KMeansLayout => sample_kmeans_layout(need_layout()?, k, &mut rng, iters)?,
        Strategy::KMeansSp => sample_kmeans_sp(g, k, &mut rng, iters)?,
        Strategy::KMeansMaxMinSp => {
            sample_kmeans_plus_maxmin_sp(g, need_layout()?, k, &mut rng, iters)?
        }
    };
    if let Some(layout) = layout {
        if layout.node_count() != g.node_count() {
            return Err(Error::ShapeMismatch("layout does not match graph".into()));
        }
    }
    Ok(PivotSet {
        nodes,
        strategy: cfg.strategy,
        seed: cfg.seed,
    })
}

/// `k` distinct nodes uniformly without replacement.
pub fn sample_random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    check_k(n, k)?;
    Ok(rand::seq::index::sample(rng, n, k).into_vec())
}

/// Greedy maximal independent set filtration. `levels[0]` is all nodes;
/// `levels[i + 1]` keeps nodes of `levels[i]` pairwise farther apart than
/// `2^i`, picked greedily in random order. Stops at the first level with at
/// most `k` nodes.
pub fn mis_levels<R: Rng + ?Sized>(g: &Graph, k: usize, rng: &mut R) -> Result<Vec<Vec<usize>>> {
    let n = g.node_count();
    check_k(n, k)?;
    let mut levels = vec![(0..n).collect::<Vec<_>>()];
    let mut ball = BallSearch::new(n);
    let total_length: f64 = g.edges().map(|(_, _, len)| len).sum();
    let mut radius = 1.0;
    // Past the total edge length only separate components stay apart.
    while levels.last().unwrap().len() > k && radius <= 2.0 * total_length.max(1.0) {
        let mut order = levels.last().unwrap().clone();
        order.shuffle(rng);
        let mut blocked = vec![false; n];
        let mut next = Vec::new();
        for v in order {
            if blocked[v] {
                continue;
            }
            next.push(v);
            for u in ball.within(g, v, radius) {
                blocked[u] = true;
            }
        }
        levels.push(next);
        radius *= 2.0;
    }
    Ok(levels)
}

pub fn sample_mis_filtration<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut levels = mis_levels(g, k, rng)?;
    let mut pivots = levels.pop().unwrap();
    if pivots.len() > k {
        // more components than pivots
        let keep = rand::seq::index::sample(rng, pivots.len(), k);
        pivots = keep.into_iter().map(|i| pivots[i]).collect();
    } else if pivots.len() < k {
        // Only reachable with at least two levels: level 0 has n >= k nodes.
        let previous = levels.last().expect("a coarser level has a parent");
        let mut taken = vec![false; g.node_count()];
        pivots.iter().for_each(|&v| taken[v] = true);
        let rest: Vec<usize> = previous.iter().copied().filter(|&v| !taken[v]).collect();
        let pad = rand::seq::index::sample(rng, rest.len(), k - pivots.len());
        pivots.extend(pad.into_iter().map(|i| rest[i]));
    }
    Ok(pivots)
}

/// Nodes within a graph distance radius, reusing scratch space across calls.
struct BallSearch {
    dist: Vec<f64>,
    touched: Vec<usize>,
}

impl BallSearch {
    fn new(n: usize) -> Self {
        Self {
            dist: vec![f64::INFINITY; n],
            touched: Vec::new(),
        }
    }

    fn within(&mut self, g: &Graph, source: usize, radius: f64) -> Vec<usize> {
        for &v in &self.touched {
            self.dist[v] = f64::INFINITY;
        }
        self.touched.clear();
        self.dist[source] = 0.0;
        self.touched.push(source);
        let mut heap = BinaryHeap::new();
        heap.push(std::cmp::Reverse((OrdF64(0.0), source)));
        while let Some(std::cmp::Reverse((OrdF64(d), u))) = heap.pop() {
            if d > self.dist[u] {
                continue;
            }
            for (v, len) in g.neighbors(u) {
                let nd = d + len;
                if nd <= radius && nd < self.dist[v] {
                    if self.dist[v].is_infinite() {
                        self.touched.push(v);
                    }
                    self.dist[v] = nd;
                    heap.push(std::cmp::Reverse((OrdF64(nd), v)));
                }
            }
        }
        self.touched.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Index of the largest value among unmarked entries, lowest index on ties.
fn argmax_unmarked(values: &[f64], marked: &[bool]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if marked[i] {
            continue;
        }
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Marks pivot `p` and lowers `min_dist` to the distances from `p`.
fn absorb(g: &Graph, p: usize, marked: &mut [bool], min_dist: &mut [f64]) {
    marked[p] = true;
    for (m, d) in min_dist.iter_mut().zip(single_source(g, p)) {
        *m = m.min(d);
    }
}

/// Farthest-first traversal in graph distance starting from `first`.
pub fn maxmin_sp_from(g: &Graph, first: usize, k: usize) -> Result<Vec<usize>> {
    check_k(g.node_count(), k)?;
    extend_maxmin_sp(g, vec![first], k)
}

/// Extends `pivots` to `k` nodes by repeatedly adding the node farthest
/// (in graph distance) from the current set.
pub fn extend_maxmin_sp(g: &Graph, mut pivots: Vec<usize>, k: usize) -> Result<Vec<usize>> {
    let n = g.node_count();
    check_k(n, k)?;
    let mut marked = vec![false; n];
    let mut min_dist = vec![f64::INFINITY; n];
    for &p in &pivots {
        absorb(g, p, &mut marked, &mut min_dist);
    }
    while pivots.len() < k {
        let next = argmax_unmarked(&min_dist, &marked).expect("k <= n leaves a candidate");
        pivots.push(next);
        absorb(g, next, &mut marked, &mut min_dist);
    }
    Ok(pivots)
}

pub fn sample_maxmin_sp<R: Rng + ?Sized>(g: &Graph, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    check_k(g.node_count(), k)?;
    let first = rng.random_range(0..g.node_count());
    maxmin_sp_from(g, first, k)
}

/// Farthest-first traversal in layout distance starting from `first`.
pub fn maxmin_euclid_from(layout: &Layout, first: usize, k: usize) -> Result<Vec<usize>> {
    let n = layout.node_count();
    check_k(n, k)?;
    let mut marked = vec![false; n];
    let mut min_dist = vec![f64::INFINITY; n];
    let mut pivots = Vec::with_capacity(k);
    let mut next = first;
    loop {
        pivots.push(next);
        marked[next] = true;
        let p = layout.point(next);
        for (v, m) in min_dist.iter_mut().enumerate() {
            *m = m.min(euclidean(layout.point(v), p));
        }
        if pivots.len() == k {
            return Ok(pivots);
        }
        next = argmax_unmarked(&min_dist, &marked).expect("k <= n leaves a candidate");
    }
}

pub fn sample_maxmin_euclid<R: Rng + ?Sized>(
    layout: &Layout,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_k(layout.node_count(), k)?;
    let first = rng.random_range(0..layout.node_count());
    maxmin_euclid_from(layout, first, k)
}

/// Like max/min sp, but the next pivot is drawn with probability
/// proportional to its distance from the current set.
pub fn maxmin_random_sp_from<R: Rng + ?Sized>(
    g: &Graph,
    mut pivots: Vec<usize>,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let n = g.node_count();
    check_k(n, k)?;
    let mut min_dist = vec![f64::INFINITY; n];
    let mut marked = vec![false; n];
    for &p in &pivots {
        absorb(g, p, &mut marked, &mut min_dist);
    }
    while pivots.len() < k {
        let weights: Vec<f64> = (0..n)
            .map(|v| if marked[v] { 0.0 } else { min_dist[v] })
            .collect();
        let next = match WeightedIndex::new(&weights) {
            Ok(dist) => dist.sample(rng),
            Err(_) => {
                let rest: Vec<usize> = (0..n).filter(|&v| !marked[v]).collect();
                rest[rng.random_range(0..rest.len())]
            }
        };
        pivots.push(next);
        absorb(g, next, &mut marked, &mut min_dist);
    }
    Ok(pivots)
}

pub fn sample_maxmin_random_sp<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_k(g.node_count(), k)?;
    let first = rng.random_range(0..g.node_count());
    maxmin_random_sp_from(g, vec![first], k, rng)
}

/// Result of Lloyd's algorithm on row-major feature vectors.
#[derive(Debug, Clone)]
pub struct Clustering {
    pub assignment: Vec<usize>,
    /// k×dim, row-major.
    pub centroids: Vec<f64>,
    /// Within-cluster sum of squares after each iteration.
    pub sse: Vec<f64>,
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd iterations from the given centroids. Points go to the nearest
/// centroid (lowest index on ties). A cluster left empty takes the point
/// farthest from its own centroid among clusters with more than one member.
/// Stops at an assignment fixpoint or after `max_iters` iterations.
pub fn lloyd(
    features: &[f64],
    dim: usize,
    mut centroids: Vec<f64>,
    max_iters: usize,
) -> Clustering {
    let n = features.len() / dim;
    let k = centroids.len() / dim;
    let point = |i: usize| &features[i * dim..(i + 1) * dim];
    let mut assignment = vec![usize::MAX; n];
    let mut sse = Vec::new();
    for _ in 0..max_iters {
        let nearest: Vec<(usize, f64)> = (0..n)
            .map(|i| {
                let p = point(i);
                let mut best = (0, f64::INFINITY);
                for c in 0..k {
                    let d = sq_dist(p, &centroids[c * dim..(c + 1) * dim]);
                    if d < best.1 {
                        best = (c, d);
                    }
                }
                best
            })
            .collect();
        let mut next: Vec<usize> = nearest.iter().map(|&(c, _)| c).collect();
        let mut cost: Vec<f64> = nearest.iter().map(|&(_, d)| d).collect();
        let mut counts = vec![0usize; k];
        next.iter().for_each(|&c| counts[c] += 1);
        for empty in 0..k {
            if counts[empty] > 0 {
                continue;
            }
            let donor = (0..n)
                .filter(|&i| counts[next[i]] > 1)
                .fold(None, |best: Option<usize>, i| match best {
                    Some(b) if cost[b] >= cost[i] => Some(b),
                    _ => Some(i),
                })
                .expect("n >= k guarantees a cluster with spare members");
            counts[next[donor]] -= 1;
            counts[empty] += 1;
            next[donor] = empty;
            cost[donor] = 0.0;
        }
        let changed = next != assignment;
        assignment = next;

        centroids.iter_mut().for_each(|c| *c = 0.0);
        for (i, &c) in assignment.iter().enumerate() {
            for (acc, x) in centroids[c * dim..(c + 1) * dim].iter_mut().zip(point(i)) {
                *acc += x;
            }
        }
        for c in 0..k {
            let inv = 1.0 / counts[c] as f64;
            centroids[c * dim..(c + 1) * dim]
                .iter_mut()
                .for_each(|x| *x *= inv);
        }
        sse.push(
            (0..n)
                .map(|i| {
                    let c = assignment[i];
                    sq_dist(point(i), &centroids[c * dim..(c + 1) * dim])
                })
                .sum(),
        );
        if !changed {
            break;
        }
    }
    Clustering {
        assignment,
        centroids,
        sse,
    }
}

/// Per cluster, the member nearest its centroid (lowest id on ties).
pub fn cluster_representatives(
    features: &[f64],
    dim: usize,
    clustering: &Clustering,
) -> Vec<usize> {
    let k = clustering.centroids.len() / dim;
    let mut best: Vec<Option<(usize, f64)>> = vec![None; k];
    for (i, &c) in clustering.assignment.iter().enumerate() {
        let d = sq_dist(
            &features[i * dim..(i + 1) * dim],
            &clustering.centroids[c * dim..(c + 1) * dim],
        );
        if best[c].is_none_or(|(_, bd)| d < bd) {
            best[c] = Some((i, d));
        }
    }
    best.into_iter()
        .map(|b| b.expect("clusters are non-empty").0)
        .collect()
}

/// k-means++ seeding: returns the chosen point indices.
fn kmeans_plus_plus<R: Rng + ?Sized>(
    features: &[f64],
    dim: usize,
    k: usize,
    rng: &mut R,
) -> Vec<usize> {
    let n = features.len() / dim;
    let point = |i: usize| &features[i * dim..(i + 1) * dim];
    let mut chosen = vec![rng.random_range(0..n)];
    let mut taken = vec![false; n];
    taken[chosen[0]] = true;
    let mut d2: Vec<f64> = (0..n)
        .map(|i| sq_dist(point(i), point(chosen[0])))
        .collect();
    while chosen.len() < k {
        let weights: Vec<f64> = (0..n).map(|i| if taken[i] { 0.0 } else { d2[i] }).collect();
        let next = match WeightedIndex::new(&weights) {
            Ok(dist) => dist.sample(rng),
            Err(_) => {
                let rest: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
                rest[rng.random_range(0..rest.len())]
            }
        };
        taken[next] = true;
        chosen.push(next);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(point(i), point(next)));
        }
    }
    chosen
}

fn gather(features: &[f64], dim: usize, rows: &[usize]) -> Vec<f64> {
    rows.iter()
        .flat_map(|&i| features[i * dim..(i + 1) * dim].iter().copied())
        .collect()
}

/// k-means on node positions with k-means++ seeding; one representative
/// node per cluster.
pub fn sample_kmeans_layout<R: Rng + ?Sized>(
    layout: &Layout,
    k: usize,
    rng: &mut R,
    max_iters: usize,
) -> Result<Vec<usize>> {
    check_k(layout.node_count(), k)?;
    let dim = layout.dim();
    let features = layout.as_flat();
    let seeds = kmeans_plus_plus(features, dim, k, rng);
    let clustering = lloyd(
        features,
        dim,
        gather(features, dim, &seeds),
        max_iters.max(1),
    );
    Ok(cluster_representatives(features, dim, &clustering))
}

/// Node feature vectors `(d(p, i))_p` over the given pivots, row-major n×k.
pub fn distance_features(g: &Graph, pivots: &[usize]) -> Result<Vec<f64>> {
    let pd = mssp(g, pivots)?;
    let (n, k) = (g.node_count(), pivots.len());
    let mut features = vec![0.0; n * k];
    for p in 0..k {
        for (i, &d) in pd.row(p).iter().enumerate() {
            features[i * k + p] = d;
        }
    }
    Ok(features)
}

/// Max/min sp seeds refined by k-means on shortest-path feature vectors.
/// Returns the representatives and the Lloyd run.
pub fn kmeans_sp_clustering<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    rng: &mut R,
    max_iters: usize,
) -> Result<(Vec<usize>, Clustering)> {
    let seeds = sample_maxmin_sp(g, k, rng)?;
    let features = distance_features(g, &seeds)?;
    let clustering = lloyd(&features, k, gather(&features, k, &seeds), max_iters.max(1));
    Ok((
        cluster_representatives(&features, k, &clustering),
        clustering,
    ))
}

pub fn sample_kmeans_sp<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    rng: &mut R,
    max_iters: usize,
) -> Result<Vec<usize>> {
    Ok(kmeans_sp_clustering(g, k, rng, max_iters)?.0)
}

/// `floor(k/2)` pivots from k-means on the layout, the rest by max/min sp.
pub fn sample_kmeans_plus_maxmin_sp<R: Rng + ?Sized>(
    g: &Graph,
    layout: &Layout,
    k: usize,
    rng: &mut R,
    max_iters: usize,
) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::Config("kmeans-maxmin-sp needs k >= 2".into()));
    }
    check_k(g.node_count(), k)?;
    let first = sample_kmeans_layout(layout, k / 2, rng, max_iters)?;
    extend_maxmin_sp(g, first, k)
}
