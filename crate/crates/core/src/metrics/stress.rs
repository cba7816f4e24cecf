use rayon::prelude::*;

use crate::distances::{all_pairs, mssp, DistanceMatrix, PivotDistances};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layout::Layout;
use crate::rng::SeedStream;

/// Graph distances for the node pairs a metric is evaluated on: either all
/// pairs, or every pair touching a random set of source nodes.
#[derive(Debug, Clone)]
pub enum PairDistances {
    All(DistanceMatrix),
    Sampled {
        rows: PivotDistances,
        /// Position of each node in the source list, if it is a source.
        source_rank: Vec<Option<usize>>,
        pair_count: usize,
    },
}

impl PairDistances {
    pub fn all(g: &Graph) -> Result<Self> {
        Ok(Self::All(all_pairs(g)?))
    }

    /// Roughly `target` pairs: all pairs of `ceil(target / (n - 1))` random
    /// source nodes, each unordered pair once.
    pub fn sampled(g: &Graph, target: usize, seed: u64) -> Result<Self> {
        let n = g.node_count();
        if n < 2 {
            return Err(Error::Size("pair sampling needs at least two nodes".into()));
        }
        if target == 0 {
            return Err(Error::Config("sample size must be positive".into()));
        }
        let count = target.div_ceil(n - 1).min(n);
        let mut rng = SeedStream::new(seed).fork("metric-pairs");
        let mut sources = rand::seq::index::sample(&mut rng, n, count).into_vec();
        sources.sort_unstable();
        let rows = mssp(g, &sources)?;
        if (0..count).any(|a| rows.row(a).iter().any(|d| d.is_infinite())) {
            return Err(Error::Disconnected("pair distances are unbounded".into()));
        }
        let mut source_rank = vec![None; n];
        for (a, &s) in sources.iter().enumerate() {
            source_rank[s] = Some(a);
        }
        let pair_count = count * (n - 1) - count * (count - 1) / 2;
        Ok(Self::Sampled {
            rows,
            source_rank,
            pair_count,
        })
    }

    pub fn node_count(&self) -> usize {
        match self {
            Self::All(d) => d.size(),
            Self::Sampled { rows, .. } => rows.node_count(),
        }
    }

    pub fn pair_count(&self) -> usize {
        match self {
            Self::All(d) => d.stored_len(),
            Self::Sampled { pair_count, .. } => *pair_count,
        }
    }

    /// Factor from sums over the stored pairs to sums over all pairs.
    pub fn pair_scale(&self) -> f64 {
        let n = self.node_count() as f64;
        n * (n - 1.0) / 2.0 / self.pair_count() as f64
    }

    /// Number of row groups for [`Self::row_pairs`].
    fn rows(&self) -> usize {
        match self {
            Self::All(d) => d.size(),
            Self::Sampled { rows, .. } => rows.pivot_count(),
        }
    }

    /// Calls `f(i, j, d)` for every stored pair of row group `r`.
    pub(crate) fn row_pairs(&self, r: usize, mut f: impl FnMut(usize, usize, f64)) {
        match self {
            Self::All(d) => {
                for (off, &dij) in d.upper_row(r).iter().enumerate() {
                    f(r, r + 1 + off, dij);
                }
            }
            Self::Sampled {
                rows, source_rank, ..
            } => {
                let s = rows.pivots()[r];
                for (j, &d) in rows.row(r).iter().enumerate() {
                    let duplicate = source_rank[j].is_some_and(|b| b < r);
                    if j != s && !duplicate {
                        f(s, j, d);
                    }
                }
            }
        }
    }

    /// Calls `f` on every stored pair, in a fixed order.
    pub fn for_each(&self, mut f: impl FnMut(usize, usize, f64)) {
        for r in 0..self.rows() {
            self.row_pairs(r, &mut f);
        }
    }

    /// Sums `f` over the stored pairs: parallel over rows, ordered reduction.
    pub(crate) fn sum<const K: usize>(
        &self,
        f: impl Fn(usize, usize, f64) -> [f64; K] + Sync,
    ) -> [f64; K] {
        let partial: Vec<[f64; K]> = (0..self.rows())
            .into_par_iter()
            .map(|r| {
                let mut acc = [0.0; K];
                self.row_pairs(r, |i, j, d| {
                    for (a, v) in acc.iter_mut().zip(f(i, j, d)) {
                        *a += v;
                    }
                });
                acc
            })
            .collect();
        partial.into_iter().fold([0.0; K], |mut acc, p| {
            acc.iter_mut().zip(p).for_each(|(a, v)| *a += v);
            acc
        })
    }

    fn check(&self, x: &Layout) -> Result<()> {
        if x.node_count() != self.node_count() {
            return Err(Error::ShapeMismatch(format!(
                "layout has {} nodes, distances cover {}",
                x.node_count(),
                self.node_count()
            )));
        }
        Ok(())
    }
}

/// `Σ_{i<j} (‖x_i − x_j‖ − d_ij)² / d_ij²`, extrapolated to all pairs in
/// sampled mode.
pub fn stress(x: &Layout, pairs: &PairDistances) -> Result<f64> {
    pairs.check(x)?;
    let [s] = pairs.sum(|i, j, d| {
        let r = x.distance(i, j) - d;
        [r * r / (d * d)]
    });
    Ok(s * pairs.pair_scale())
}

/// The scale `c > 0` minimizing the stress of `c·x`, and that stress.
pub fn optimal_rescale(x: &Layout, pairs: &PairDistances) -> Result<(f64, f64)> {
    pairs.check(x)?;
    let [num, den] = pairs.sum(|i, j, d| {
        let delta = x.distance(i, j);
        let w = 1.0 / (d * d);
        [w * d * delta, w * delta * delta]
    });
    if den <= 0.0 || num <= 0.0 {
        return Err(Error::DegenerateLayout(
            "all node pairs are drawn at distance zero".into(),
        ));
    }
    let c = num / den;
    Ok((c, stress(&x.scaled(c), pairs)?))
}

/// Optimally rescaled stress divided by the number of node pairs.
pub fn normalized_stress(x: &Layout, pairs: &PairDistances) -> Result<f64> {
    let n = x.node_count();
    if n < 2 {
        return Err(Error::Size(
            "normalized stress needs at least two nodes".into(),
        ));
    }
    let (_, s) = optimal_rescale(x, pairs)?;
    Ok(s / (n * (n - 1) / 2) as f64)
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};
    use crate::rng::StreamRng;
    use rand::{Rng, SeedableRng};

    fn random_layout(n: usize, seed: u64) -> Layout {
        let mut rng = StreamRng::seed_from_u64(seed);
        Layout::from_flat(2, (0..2 * n).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap()
    }

    fn naive(g: &Graph, x: &Layout) -> f64 {
        let n = g.node_count();
        let mut s = 0.0;
        for i in 0..n {
            let d = crate::distances::single_source(g, i);
            for j in 0..n {
                if i < j {
                    s += (x.distance(i, j) - d[j]).powi(2) / d[j].powi(2);
                }
            }
        }
        s
    }

    #[test]
    fn stress_examples() {
        let p2 = generate(GraphKind::Path(2)).unwrap();
        let x = Layout::from_points(&[[0.0, 0.0], [1.0, 0.0]]);
        assert_eq!(stress(&x, &PairDistances::all(&p2).unwrap()).unwrap(), 0.0);
        let p3 = generate(GraphKind::Path(3)).unwrap();
        let pairs = PairDistances::all(&p3).unwrap();
        assert_eq!(stress(&Layout::zeros(3, 2), &pairs).unwrap(), 3.0);
        assert!(matches!(
            stress(&Layout::zeros(2, 2), &pairs),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn stress_matches_naive_sum() {
        let g = generate(GraphKind::Grid { rows: 3, cols: 5 }).unwrap();
        let pairs = PairDistances::all(&g).unwrap();
        for seed in 0..10 {
            let x = random_layout(15, seed);
            let (a, b) = (stress(&x, &pairs).unwrap(), naive(&g, &x));
            assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }
    }

    #[test]
    fn optimal_rescale_examples() {
        let p2 = generate(GraphKind::Path(2)).unwrap();
        let pairs = PairDistances::all(&p2).unwrap();
        let (c, s) = optimal_rescale(&Layout::from_points(&[[0.0], [2.0]]), &pairs).unwrap();
        assert_eq!((c, s), (0.5, 0.0));
        assert_eq!(
            normalized_stress(&Layout::from_points(&[[0.0], [1.0]]), &pairs).unwrap(),
            0.0
        );

        let p3 = generate(GraphKind::Path(3)).unwrap();
        let pairs = PairDistances::all(&p3).unwrap();
        let line = Layout::from_points(&[[0.0], [1.0], [2.0]]);
        assert!((optimal_rescale(&line, &pairs).unwrap().0 - 1.0).abs() < 1e-9);
        assert!(matches!(
            optimal_rescale(&Layout::zeros(3, 2), &pairs),
            Err(Error::DegenerateLayout(_))
        ));
        assert!(matches!(
            normalized_stress(&Layout::zeros(3, 2), &pairs),
            Err(Error::DegenerateLayout(_))
        ));
    }

    #[test]
    fn normalized_is_rescaled_over_pairs() {
        let g = generate(GraphKind::Cycle(7)).unwrap();
        let pairs = PairDistances::all(&g).unwrap();
        let x = random_layout(7, 4);
        let (_, s) = optimal_rescale(&x, &pairs).unwrap();
        assert!((normalized_stress(&x, &pairs).unwrap() * 21.0 - s).abs() < 1e-12);
    }

    #[test]
    fn rescale_beats_nearby_scales() {
        let g = generate(GraphKind::CompleteBinaryTree { depth: 3 }).unwrap();
        let pairs = PairDistances::all(&g).unwrap();
        for seed in 0..5 {
            let x = random_layout(15, seed);
            let (c, best) = optimal_rescale(&x, &pairs).unwrap();
            let mut rng = StreamRng::seed_from_u64(seed);
            for _ in 0..100 {
                let f = c * rng.random_range(0.2..5.0);
                assert!(best <= stress(&x.scaled(f), &pairs).unwrap() * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn sampled_pairs() {
        let g = generate(GraphKind::Path(10)).unwrap();
        let all = PairDistances::all(&g).unwrap();
        assert_eq!(all.pair_count(), 45);
        assert_eq!(all.pair_scale(), 1.0);

        // 20 pairs -> 3 sources -> 3·9 − 3 = 24 distinct pairs
        let s = PairDistances::sampled(&g, 20, 1).unwrap();
        assert_eq!(s.pair_count(), 24);
        let mut seen = std::collections::HashSet::new();
        s.for_each(|i, j, d| {
            assert!(seen.insert((i.min(j), i.max(j))));
            assert_eq!(d, all_pairs(&g).unwrap().get(i, j));
        });
        assert_eq!(seen.len(), 24);

        // enough sources for every pair: identical to the full sums
        let full = PairDistances::sampled(&g, 1000, 1).unwrap();
        assert_eq!(full.pair_count(), 45);
        let x = random_layout(10, 2);
        let (a, b) = (stress(&x, &all).unwrap(), stress(&x, &full).unwrap());
        assert!((a - b).abs() < 1e-12 * a);
        assert!(PairDistances::sampled(&g, 0, 1).is_err());
    }
}
