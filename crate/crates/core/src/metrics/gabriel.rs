use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::layout::Layout;

use super::Aggregate;

/// Relative distance below which two positions count as identical.
const IDENTICAL: f64 = 1e-12;

/// Undirected graph on layout points, as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GabrielGraph {
    adj: Vec<Vec<usize>>,
}

impl GabrielGraph {
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .collect()
    }

    /// Hop distances from `source`, explored up to `max_hops`; farther
    /// nodes get `usize::MAX`. Reached nodes are appended to `reached`.
    fn hops(&self, source: usize, max_hops: usize, hops: &mut [usize], reached: &mut Vec<usize>) {
        hops[source] = 0;
        reached.push(source);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            if hops[u] == max_hops {
                continue;
            }
            for &v in &self.adj[u] {
                if hops[v] == usize::MAX {
                    hops[v] = hops[u] + 1;
                    reached.push(v);
                    queue.push_back(v);
                }
            }
        }
    }
}

/// Whether `q` lies strictly inside the disc with diameter `a`–`b`.
#[inline]
pub(crate) fn in_diameter_disc(a: &[f64], b: &[f64], q: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .zip(q)
        .map(|((a, b), q)| (q - a) * (q - b))
        .sum::<f64>()
        < 0.0
}

/// Pairs whose diameter disc holds no other point strictly inside, plus all
/// pairs at identical positions.
pub fn gabriel_graph(x: &Layout) -> GabrielGraph {
    let n = x.node_count();
    let tol = IDENTICAL * x.diagonal();
    let grid = (x.dim() == 2 && n > 32).then(|| Grid::new(x));
    let adj: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in 0..n {
                if j == i {
                    continue;
                }
                let (a, b) = (x.point(i), x.point(j));
                let linked = x.distance(i, j) <= tol
                    || match &grid {
                        Some(grid) => !grid.blocked(x, i, j),
                        None => {
                            !(0..n).any(|q| q != i && q != j && in_diameter_disc(a, b, x.point(q)))
                        }
                    };
                if linked {
                    out.push(j);
                }
            }
            out
        })
        .collect();
    GabrielGraph { adj }
}

/// Uniform bucket grid over 2D points.
struct Grid {
    origin: [f64; 2],
    cell: f64,
    cols: usize,
    rows: usize,
    buckets: Vec<Vec<usize>>,
}

impl Grid {
    fn new(x: &Layout) -> Self {
        let n = x.node_count();
        let b = x.bounds();
        let (w, h) = (b[0].1 - b[0].0, b[1].1 - b[1].0);
        let side = (n as f64).sqrt().ceil();
        let cell = (w.max(h) / side).max(f64::MIN_POSITIVE);
        let cols = ((w / cell) as usize + 1).min(4 * n);
        let rows = ((h / cell) as usize + 1).min(4 * n);
        let mut grid = Grid {
            origin: [b[0].0, b[1].0],
            cell,
            cols,
            rows,
            buckets: vec![Vec::new(); cols * rows],
        };
        for v in 0..n {
            let (c, r) = grid.cell_of(x.point(v));
            grid.buckets[r * cols + c].push(v);
        }
        grid
    }

    fn cell_of(&self, p: &[f64]) -> (usize, usize) {
        let c = ((p[0] - self.origin[0]) / self.cell)
            .floor()
            .clamp(0.0, (self.cols - 1) as f64) as usize;
        let r = ((p[1] - self.origin[1]) / self.cell)
            .floor()
            .clamp(0.0, (self.rows - 1) as f64) as usize;
        (c, r)
    }

    fn bucket_blocks(&self, x: &Layout, bucket: usize, i: usize, j: usize) -> bool {
        let (a, b) = (x.point(i), x.point(j));
        self.buckets[bucket]
            .iter()
            .any(|&q| q != i && q != j && in_diameter_disc(a, b, x.point(q)))
    }

    fn blocked(&self, x: &Layout, i: usize, j: usize) -> bool {
        let (a, b) = (x.point(i), x.point(j));
        let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
        let (mc, mr) = self.cell_of(&mid);
        if self.bucket_blocks(x, mr * self.cols + mc, i, j) {
            return true;
        }
        // every point strictly inside the disc lies in its padded bounding box
        let r = x.distance(i, j) / 2.0 * (1.0 + 1e-9) + f64::MIN_POSITIVE;
        let (c0, r0) = self.cell_of(&[mid[0] - r, mid[1] - r]);
        let (c1, r1) = self.cell_of(&[mid[0] + r, mid[1] + r]);
        (r0..=r1).any(|row| {
            (c0..=c1).any(|col| {
                (row, col) != (mr, mc) && self.bucket_blocks(x, row * self.cols + col, i, j)
            })
        })
    }
}

/// Per-node Jaccard similarity of `k`-hop neighborhoods (the node itself
/// excluded) in the Gabriel graphs of two layouts, for `k = 1..=max_k`,
/// aggregated over nodes.
pub fn gabriel_jaccard(
    x_ref: &Layout,
    x_cmp: &Layout,
    max_k: usize,
    aggregate: Aggregate,
) -> Result<Vec<f64>> {
    if x_ref.node_count() != x_cmp.node_count() {
        return Err(Error::ShapeMismatch(
            "layouts cover different node counts".into(),
        ));
    }
    let (a, b) = (gabriel_graph(x_ref), gabriel_graph(x_cmp));
    Ok(jaccard_curve(&a, &b, max_k, aggregate))
}

/// Jaccard curve of two graphs on the same nodes.
pub fn jaccard_curve(
    a: &GabrielGraph,
    b: &GabrielGraph,
    max_k: usize,
    aggregate: Aggregate,
) -> Vec<f64> {
    let n = a.node_count();
    if n == 0 || max_k == 0 {
        return Vec::new();
    }
    let per_node: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map_init(
            || {
                (
                    vec![usize::MAX; n],
                    vec![usize::MAX; n],
                    Vec::new(),
                    Vec::new(),
                )
            },
            |(ha, hb, ra, rb), v| {
                a.hops(v, max_k, ha, ra);
                b.hops(v, max_k, hb, rb);
                // counts by hop level: both within, and reached in either
                let mut inter = vec![0usize; max_k + 1];
                let mut only_a = vec![0usize; max_k + 1];
                let mut only_b = vec![0usize; max_k + 1];
                for &u in ra.iter() {
                    if u == v {
                        continue;
                    }
                    let (da, db) = (ha[u], hb[u]);
                    if db == usize::MAX {
                        only_a[da] += 1;
                    } else {
                        inter[da.max(db)] += 1;
                        only_a[da] += 1;
                        only_b[db] += 1;
                    }
                }
                for &u in rb.iter() {
                    if u != v && ha[u] == usize::MAX {
                        only_b[hb[u]] += 1;
                    }
                }
                let mut out = Vec::with_capacity(max_k);
                let (mut i, mut sa, mut sb) = (0, 0, 0);
                for k in 1..=max_k {
                    i += inter[k];
                    sa += only_a[k];
                    sb += only_b[k];
                    let union = sa + sb - i;
                    out.push(if union == 0 {
                        1.0
                    } else {
                        i as f64 / union as f64
                    });
                }
                for &u in ra.iter() {
                    ha[u] = usize::MAX;
                }
                for &u in rb.iter() {
                    hb[u] = usize::MAX;
                }
                ra.clear();
                rb.clear();
                out
            },
        )
        .collect();
    (0..max_k)
        .map(|k| {
            aggregate
                .apply(per_node.iter().map(|row| row[k]).collect())
                .expect("n > 0")
        })
        .collect()
}
