use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layout::Layout;

use super::Aggregate;

type Point = [f64; 2];

#[inline]
fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull by monotone chain, counter-clockwise, without collinear
/// points. One point for a single position, two for collinear input.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 3 {
        // all input collinear: keep the extreme points
        return vec![pts[0], pts[pts.len() - 1]];
    }
    hull
}

/// Whether `p` lies inside or on the boundary of a hull from
/// [`convex_hull`].
pub fn hull_contains(hull: &[Point], p: Point) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0] == p,
        2 => {
            let (a, b) = (hull[0], hull[1]);
            cross(a, b, p) == 0.0
                && p[0] >= a[0].min(b[0])
                && p[0] <= a[0].max(b[0])
                && p[1] >= a[1].min(b[1])
                && p[1] <= a[1].max(b[1])
        }
        m => {
            let o = hull[0];
            if cross(o, hull[1], p) < 0.0 || cross(o, hull[m - 1], p) > 0.0 {
                return false;
            }
            // the wedge o, hull[lo], hull[lo + 1] holding p
            let (mut lo, mut hi) = (1, m - 1);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if cross(o, hull[mid], p) >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            cross(hull[lo], hull[lo + 1], p) >= 0.0
        }
    }
}

/// For each node `v` and `k = 1..=max_k`: the fraction of nodes more than
/// `k` hops from `v` that are drawn inside or on the convex hull of the
/// nodes within `k` hops. Nodes with no farther nodes are skipped; `None`
/// marks a `k` where every node was skipped.
pub fn hull_error(
    g: &Graph,
    x: &Layout,
    max_k: usize,
    aggregate: Aggregate,
) -> Result<Vec<Option<f64>>> {
    if x.dim() != 2 {
        return Err(Error::Config(format!(
            "hull error needs a 2D layout, got {} axes",
            x.dim()
        )));
    }
    let n = g.node_count();
    if x.node_count() != n {
        return Err(Error::ShapeMismatch(format!(
            "layout has {} nodes, graph has {n}",
            x.node_count()
        )));
    }
    let point = |v: usize| -> Point { [x.point(v)[0], x.point(v)[1]] };
    let per_node: Vec<Vec<Option<f64>>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let hops = bfs_hops(g, v, max_k);
            (1..=max_k)
                .map(|k| {
                    let inside: Vec<Point> = (0..n).filter(|&u| hops[u] <= k).map(point).collect();
                    let outside = n - inside.len();
                    if outside == 0 {
                        return None;
                    }
                    let hull = convex_hull(&inside);
                    let covered = (0..n)
                        .filter(|&u| hops[u] > k && hull_contains(&hull, point(u)))
                        .count();
                    Some(covered as f64 / outside as f64)
                })
                .collect()
        })
        .collect();
    Ok((0..max_k)
        .map(|k| aggregate.apply(per_node.iter().filter_map(|row| row[k]).collect()))
        .collect())
}

/// Hop counts from `source` up to `max_hops`; farther nodes get `usize::MAX`.
fn bfs_hops(g: &Graph, source: usize, max_hops: usize) -> Vec<usize> {
    let mut hops = vec![usize::MAX; g.node_count()];
    hops[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        if hops[u] == max_hops {
            continue;
        }
        for &w in g.neighbor_ids(u) {
            if hops[w] == usize::MAX {
                hops[w] = hops[u] + 1;
                queue.push_back(w);
            }
        }
    }
    hops
}
