use crate::error::{Error, Result};
use crate::layout::Layout;

/// Residual dissimilarity of `y` fitted onto `x` by translation, rotation
/// and uniform scaling. 0 is a perfect match, 1 no match at all.
/// Reflections are not allowed, so a mirror image scores poorly.
pub fn procrustes(x: &Layout, y: &Layout) -> Result<f64> {
    if x.node_count() != y.node_count() || x.dim() != y.dim() {
        return Err(Error::ShapeMismatch(format!(
            "cannot compare {}×{} with {}×{} layouts",
            x.node_count(),
            x.dim(),
            y.node_count(),
            y.dim()
        )));
    }
    let (dx, dy) = (x.diagonal() == 0.0, y.diagonal() == 0.0);
    if dx || dy {
        return Ok(if dx && dy { 0.0 } else { 1.0 });
    }
    let dim = x.dim();
    let (xc, yc) = (centered(x), centered(y));
    let (sxx, syy) = (dot(&xc, &xc), dot(&yc, &yc));
    // m = XᵀY
    let mut m = vec![0.0; dim * dim];
    for (px, py) in xc.chunks_exact(dim).zip(yc.chunks_exact(dim)) {
        for a in 0..dim {
            for b in 0..dim {
                m[a * dim + b] += px[a] * py[b];
            }
        }
    }
    let mut sv = singular_values(m.clone(), dim);
    sv.sort_by(|a, b| b.total_cmp(a));
    if determinant(m, dim) < 0.0 {
        let last = sv.len() - 1;
        sv[last] = -sv[last];
    }
    let trace: f64 = sv.iter().sum();
    Ok((1.0 - trace * trace / (sxx * syy)).clamp(0.0, 1.0))
}

fn centered(x: &Layout) -> Vec<f64> {
    let (n, dim) = (x.node_count(), x.dim());
    let mut mean = vec![0.0; dim];
    for i in 0..n {
        mean.iter_mut().zip(x.point(i)).for_each(|(m, c)| *m += c);
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    x.as_flat()
        .iter()
        .enumerate()
        .map(|(k, c)| c - mean[k % dim])
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// One-sided Jacobi: rotate column pairs of a small square matrix until
/// they are orthogonal, then read off the column norms.
fn singular_values(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    let col =
        |a: &[f64], p: usize, q: usize| (0..n).map(|r| a[r * n + p] * a[r * n + q]).sum::<f64>();
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = (col(&a, p, p), col(&a, q, q), col(&a, p, q));
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..n {
                    let (x, y) = (a[r * n + p], a[r * n + q]);
                    a[r * n + p] = c * x - s * y;
                    a[r * n + q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (0..n).map(|p| col(&a, p, p).sqrt()).collect()
}

/// Gaussian elimination with partial pivoting.
fn determinant(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
            .unwrap();
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            for k in col..n {
                a[r * n + k] -= f * a[col * n + k];
            }
        }
    }
    det
}
