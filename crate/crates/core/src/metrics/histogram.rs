use crate::error::{Error, Result};
use crate::layout::Layout;

use super::stress::PairDistances;

pub const DEFAULT_BINS: usize = 1000;

/// Summary of drawn-minus-graph distance errors for one distance bin.
#[derive(Debug, Clone, PartialEq)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// min, p5, p25, median, p75, p95, max
    pub quantiles: [f64; 7],
}

const LEVELS: [f64; 7] = [0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0];

/// Linear interpolation between closest ranks of sorted data.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Errors `‖x_i − x_j‖ − d_ij` grouped by `d_ij`. Integer distances get one
/// bin each when `weighted` is false; otherwise `bins` equal-width bins
/// cover `(0, max d]`. Empty bins are omitted.
pub fn error_histogram(
    x: &Layout,
    pairs: &PairDistances,
    weighted: bool,
    bins: usize,
) -> Result<Vec<HistBin>> {
    if x.node_count() != pairs.node_count() {
        return Err(Error::ShapeMismatch(
            "layout does not match the distances".into(),
        ));
    }
    if weighted && bins == 0 {
        return Err(Error::Config("bin count must be positive".into()));
    }
    let mut max_d: f64 = 0.0;
    pairs.for_each(|_, _, d| max_d = max_d.max(d));
    let (count, width) = if weighted {
        (bins, max_d / bins as f64)
    } else {
        (max_d.round() as usize, 1.0)
    };
    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); count];
    pairs.for_each(|i, j, d| {
        let b = if weighted {
            ((d / width).ceil() as usize).clamp(1, count) - 1
        } else {
            d.round() as usize - 1
        };
        groups[b].push(x.distance(i, j) - d);
    });
    Ok(groups
        .into_iter()
        .enumerate()
        .filter(|(_, e)| !e.is_empty())
        .map(|(b, mut errors)| {
            errors.sort_by(f64::total_cmp);
            let (lo, hi) = if weighted {
                (b as f64 * width, (b + 1) as f64 * width)
            } else {
                ((b + 1) as f64, (b + 1) as f64)
            };
            HistBin {
                lo,
                hi,
                count: errors.len(),
                quantiles: LEVELS.map(|q| percentile(&errors, q)),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distances::all_pairs;
    use crate::graph::{generate, parse_edge_list, Graph, GraphKind};
    use crate::rng::StreamRng;
    use rand::{Rng, SeedableRng};

    /// Double loop with a linear scan per bin.
    fn naive(g: &Graph, x: &Layout, bins: usize) -> Vec<HistBin> {
        let d = all_pairs(g).unwrap();
        let n = g.node_count();
        let mut all = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                all.push((d.get(i, j), x.distance(i, j) - d.get(i, j)));
            }
        }
        let max_d = all.iter().map(|p| p.0).fold(0.0, f64::max);
        let edges: Vec<(f64, f64)> = if g.is_weighted() {
            let w = max_d / bins as f64;
            (0..bins)
                .map(|b| (b as f64 * w, (b + 1) as f64 * w))
                .collect()
        } else {
            (1..=max_d as usize)
                .map(|k| (k as f64 - 0.5, k as f64 + 0.5))
                .collect()
        };
        let mut out = Vec::new();
        for (b, &(lo, hi)) in edges.iter().enumerate() {
            let last = b + 1 == edges.len();
            let mut e: Vec<f64> = all
                .iter()
                .filter(|p| p.0 > lo && (p.0 <= hi || last) && (g.is_weighted() || p.0 < hi))
                .map(|p| p.1)
                .collect();
            if e.is_empty() {
                continue;
            }
            e.sort_by(f64::total_cmp);
            let q = |f: f64| {
                let r = f * (e.len() - 1) as f64;
                let (a, c) = (r.floor() as usize, r.ceil() as usize);
                e[a] + (e[c] - e[a]) * (r - a as f64)
            };
            let (blo, bhi) = if g.is_weighted() {
                (lo, hi)
            } else {
                (lo + 0.5, lo + 0.5)
            };
            out.push(HistBin {
                lo: blo,
                hi: bhi,
                count: e.len(),
                quantiles: [
                    e[0],
                    q(0.05),
                    q(0.25),
                    q(0.5),
                    q(0.75),
                    q(0.95),
                    e[e.len() - 1],
                ],
            });
        }
        out
    }

    fn random_layout(n: usize, seed: u64) -> Layout {
        let mut rng = StreamRng::seed_from_u64(seed);
        Layout::from_flat(2, (0..2 * n).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap()
    }

    #[test]
    fn percentile_interpolates() {
        let v = [1.0, 2.0, 4.0, 8.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 0.5), 3.0);
        assert_eq!(percentile(&v, 1.0), 8.0);
        assert_eq!(percentile(&[5.0], 0.95), 5.0);
    }

    #[test]
    fn examples() {
        let p3 = generate(GraphKind::Path(3)).unwrap();
        let pairs = PairDistances::all(&p3).unwrap();
        let line = Layout::from_points(&[[0.0], [1.0], [2.0]]);
        let h = error_histogram(&line, &pairs, false, DEFAULT_BINS).unwrap();
        assert_eq!(h.len(), 2);
        assert!(h.iter().all(|b| b.quantiles == [0.0; 7]));
        assert_eq!((h[1].lo, h[1].hi, h[1].count), (2.0, 2.0, 1));

        let p2 = generate(GraphKind::Path(2)).unwrap();
        let x = Layout::from_points(&[[0.0], [1.5]]);
        let h = error_histogram(&x, &PairDistances::all(&p2).unwrap(), false, 10).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].quantiles, [0.5; 7]);
    }

    #[test]
    fn matches_naive_unweighted_and_weighted() {
        let g = parse_edge_list("0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n1 4\n".as_bytes()).unwrap();
        let pairs = PairDistances::all(&g).unwrap();
        for seed in 0..20 {
            let x = random_layout(6, seed);
            assert_eq!(
                error_histogram(&x, &pairs, false, 7).unwrap(),
                naive(&g, &x, 7)
            );
        }
        let w = parse_edge_list(
            "0 1 0.7\n1 2 1.9\n2 3 0.2\n3 4 2.5\n4 5 1.1\n5 0 0.9\n1 4 3.0\n".as_bytes(),
        )
        .unwrap();
        let pairs = PairDistances::all(&w).unwrap();
        for (seed, bins) in [(1, 3), (2, 10), (3, 1000)] {
            let x = random_layout(6, seed);
            let got = error_histogram(&x, &pairs, true, bins).unwrap();
            let want = naive(&w, &x, bins);
            assert_eq!(got.len(), want.len());
            for (a, b) in got.iter().zip(&want) {
                assert_eq!(a.count, b.count);
                assert_eq!(a.quantiles, b.quantiles);
                assert!((a.lo - b.lo).abs() < 1e-12 && (a.hi - b.hi).abs() < 1e-12);
            }
        }
        assert!(error_histogram(&random_layout(6, 0), &pairs, true, 0).is_err());
    }
}
