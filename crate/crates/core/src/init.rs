//! PivotMDS initial layouts and the edge-weight rescaling step.

use rand::Rng;
use rayon::prelude::*;

use crate::distances::mssp;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layout::Layout;
use crate::rng::SeedStream;
use crate::sampling::sample_maxmin_sp;

pub const DEFAULT_PIVOT_COUNT: usize = 200;
const POWER_TOL: f64 = 1e-8;
const POWER_MAX_ITERS: usize = 1000;

#[derive(Debug, Clone)]
pub struct PivotMds {
    pub layout: Layout,
    pub pivots: Vec<usize>,
    /// False if some eigenvector hit the iteration cap.
    pub converged: bool,
}

/// PivotMDS with `p` max/min sp pivots in `dim` dimensions.
pub fn pivot_mds(g: &Graph, p: usize, seed: u64, dim: usize) -> Result<PivotMds> {
    let n = g.node_count();
    if dim == 0 {
        return Err(Error::Config("layout dimension must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::Size("empty graph".into()));
    }
    if p == 0 {
        return Err(Error::Config("PivotMDS needs at least one pivot".into()));
    }
    let p = if p > n {
        log::warn!("PivotMDS pivot count {p} exceeds {n} nodes; using {n}");
        n
    } else {
        p
    };
    let stream = SeedStream::new(seed);
    let pivots = sample_maxmin_sp(g, p, &mut stream.fork("pivotmds-pivots"))?;
    let mut result = pivot_mds_with(g, &pivots, dim, &mut stream.fork("pivotmds-power"))?;
    result.pivots = pivots;
    Ok(result)
}

/// PivotMDS on a given pivot list.
pub fn pivot_mds_with<R: Rng + ?Sized>(
    g: &Graph,
    pivots: &[usize],
    dim: usize,
    rng: &mut R,
) -> Result<PivotMds> {
    let n = g.node_count();
    let pd = mssp(g, pivots)?;
    let p = pivots.len();
    if (0..p).any(|a| pd.row(a).iter().any(|d| d.is_infinite())) {
        return Err(Error::Disconnected(
            "PivotMDS needs a connected graph".into(),
        ));
    }
    let cols = centered_columns(&pd, n, p);

    // B = CᵀC, p×p
    let b: Vec<f64> = (0..p * p)
        .into_par_iter()
        .map(|ab| {
            let (a, c) = (ab / p, ab % p);
            dot(&cols[a], &cols[c])
        })
        .collect();

    let (vectors, values, converged) = top_eigenvectors(&b, p, dim, rng);
    if !converged {
        log::warn!("PivotMDS power iteration hit {POWER_MAX_ITERS} iterations");
    }
    let mut coords = vec![0.0; n * dim];
    for (axis, (v, &lambda)) in vectors.iter().zip(&values).enumerate() {
        // C·v = σu; classical MDS coordinates are √σ·u.
        if lambda <= f64::EPSILON * values[0].max(1.0) * p as f64 {
            continue;
        }
        let scale = lambda.powf(-0.25);
        for i in 0..n {
            let x: f64 = (0..p).map(|a| cols[a][i] * v[a]).sum();
            coords[i * dim + axis] = x * scale;
        }
    }
    Ok(PivotMds {
        layout: Layout::from_flat(dim, coords)?,
        pivots: pivots.to_vec(),
        converged,
    })
}

/// Double-centered squared pivot distances times −1/2, one column per pivot.
fn centered_columns(pd: &crate::distances::PivotDistances, n: usize, p: usize) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = (0..p)
        .map(|a| pd.row(a).iter().map(|d| d * d).collect())
        .collect();
    let col_mean: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().sum::<f64>() / n as f64)
        .collect();
    let row_mean: Vec<f64> = (0..n)
        .map(|i| cols.iter().map(|c| c[i]).sum::<f64>() / p as f64)
        .collect();
    let grand = col_mean.iter().sum::<f64>() / p as f64;
    for (c, &cm) in cols.iter_mut().zip(&col_mean) {
        for (x, &rm) in c.iter_mut().zip(&row_mean) {
            *x = -0.5 * (*x - rm - cm + grand);
        }
    }
    cols
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn mat_vec(m: &[f64], p: usize, v: &[f64]) -> Vec<f64> {
    (0..p).map(|r| dot(&m[r * p..(r + 1) * p], v)).collect()
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for u in basis {
        let c = dot(v, u);
        v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
    }
}

/// Top eigenpairs of a symmetric PSD matrix by power iteration with
/// Gram–Schmidt deflation. Vectors beyond the rank come back as zeros.
fn top_eigenvectors<R: Rng + ?Sized>(
    m: &[f64],
    p: usize,
    count: usize,
    rng: &mut R,
) -> (Vec<Vec<f64>>, Vec<f64>, bool) {
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    let mut converged = true;
    let scale = (0..p)
        .map(|i| m[i * p + i])
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    for _ in 0..count {
        let mut v: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
        orthogonalize(&mut v, &vectors);
        if normalize(&mut v) == 0.0 {
            vectors.push(vec![0.0; p]);
            values.push(0.0);
            continue;
        }
        let mut done = false;
        let mut lambda = 0.0;
        for _ in 0..POWER_MAX_ITERS {
            let mut next = mat_vec(m, p, &v);
            orthogonalize(&mut next, &vectors);
            lambda = normalize(&mut next);
            if lambda <= 1e-14 * scale {
                v = vec![0.0; p];
                lambda = 0.0;
                done = true;
                break;
            }
            let change = next
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            v = next;
            if change < POWER_TOL {
                done = true;
                break;
            }
        }
        converged &= done;
        if lambda > 0.0 {
            // Rayleigh quotient of the final iterate
            lambda = dot(&v, &mat_vec(m, p, &v));
        }
        vectors.push(v);
        values.push(lambda);
    }
    (vectors, values, converged)
}

/// Scales `x` so the drawn edge lengths sum to the sum of edge weights
/// `1/len²`.
pub fn rescale_to_edge_weights(x: &Layout, g: &Graph) -> Result<Layout> {
    if x.node_count() != g.node_count() {
        return Err(Error::ShapeMismatch(format!(
            "layout has {} nodes, graph has {}",
            x.node_count(),
            g.node_count()
        )));
    }
    let (mut weights, mut drawn) = (0.0, 0.0);
    for (u, v, len) in g.edges() {
        weights += 1.0 / (len * len);
        drawn += x.distance(u, v);
    }
    if drawn <= 0.0 || !drawn.is_finite() {
        return Err(Error::DegenerateLayout(
            "all edges have zero drawn length".into(),
        ));
    }
    Ok(x.scaled(weights / drawn))
}
