//! Stress majorization solvers: the full model, the sparse pivot model and
//! the edge-only (1-stress) model.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::distances::{
    all_pairs, build_regions, mssp, AdaptedWeightTable, DistanceMatrix, PivotDistances,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layout::Layout;
use crate::rng::splitmix64;

pub const DEFAULT_EPS: f64 = 1e-4;
pub const FULL_MAX_ITERS: usize = 500;
pub const SPARSE_MAX_ITERS: usize = 200;
const COINCIDENT: f64 = 1e-9;
const FULL_MEMORY_WARN_NODES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once the relative positional change drops to this value.
    pub eps: f64,
}

impl SolverConfig {
    pub fn full() -> Self {
        Self {
            max_iters: FULL_MAX_ITERS,
            eps: DEFAULT_EPS,
        }
    }

    pub fn sparse() -> Self {
        Self {
            max_iters: SPARSE_MAX_ITERS,
            eps: DEFAULT_EPS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(Error::Config(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub sweep: usize,
    /// Objective of the model being solved, after the sweep.
    pub stress: f64,
    pub relative_change: f64,
    /// Time since the first sweep started.
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub initial_objective: f64,
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "sweep,stress,relative_change,elapsed_ms")?;
        writeln!(w, "0,{},,0", self.initial_objective)?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{:.3}",
                r.sweep, r.stress, r.relative_change, r.elapsed_ms
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub layout: Layout,
    pub trace: Trace,
    pub converged: bool,
}

impl Solution {
    pub fn sweeps(&self) -> usize {
        self.trace.rows.len()
    }
}

/// Largest node displacement divided by the bounding-box diagonal of
/// `prev`; infinite when `prev` has zero extent.
pub fn relative_positional_change(prev: &Layout, next: &Layout) -> Result<f64> {
    prev.check_shape(next)?;
    let diag = prev.diagonal();
    if diag == 0.0 {
        return Ok(f64::INFINITY);
    }
    let moved = (0..prev.node_count())
        .map(|i| crate::layout::euclidean(prev.point(i), next.point(i)))
        .fold(0.0, f64::max);
    Ok(moved / diag)
}

/// Unit vector for a coincident pair, fixed per unordered pair and
/// pointing away from `j` as seen from `i`.
fn guard_direction(i: usize, j: usize, out: &mut [f64]) {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    let mut h = splitmix64((a as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b as u64);
    loop {
        for c in out.iter_mut() {
            h = splitmix64(h);
            *c = (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
        }
        let norm = out.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-3 {
            let sign = if i < j { 1.0 } else { -1.0 };
            out.iter_mut().for_each(|c| *c *= sign / norm);
            return;
        }
    }
}

/// Scratch buffers for one node update.
struct Update {
    num: Vec<f64>,
    dir: Vec<f64>,
    den: f64,
}

impl Update {
    fn new(dim: usize) -> Self {
        Self {
            num: vec![0.0; dim],
            dir: vec![0.0; dim],
            den: 0.0,
        }
    }

    fn reset(&mut self) {
        self.num.iter_mut().for_each(|v| *v = 0.0);
        self.den = 0.0;
    }

    /// Adds the vote of `j` at target distance `d` with weight `w`.
    #[inline]
    #[allow(clippy::needless_range_loop)]
    fn add(&mut self, coords: &[f64], dim: usize, i: usize, j: usize, d: f64, w: f64) {
        let (xi, xj) = (
            &coords[i * dim..(i + 1) * dim],
            &coords[j * dim..(j + 1) * dim],
        );
        let mut dist2 = 0.0;
        for a in 0..dim {
            let diff = xi[a] - xj[a];
            dist2 += diff * diff;
        }
        let dist = dist2.sqrt();
        if dist < COINCIDENT {
            guard_direction(i, j, &mut self.dir);
            for a in 0..dim {
                self.num[a] += w * (xj[a] + d * self.dir[a]);
            }
        } else {
            let f = d / dist;
            for a in 0..dim {
                self.num[a] += w * (xj[a] + f * (xi[a] - xj[a]));
            }
        }
        self.den += w;
    }

    fn apply(&self, coords: &mut [f64], dim: usize, i: usize) {
        if self.den > 0.0 {
            for a in 0..dim {
                coords[i * dim + a] = self.num[a] / self.den;
            }
        }
    }
}

/// A stress model that can be minimized by majorization sweeps.
pub trait StressModel {
    fn node_count(&self) -> usize;

    /// One Gauss–Seidel pass over all nodes in id order.
    fn sweep(&self, x: &mut Layout);

    /// The objective this model's updates target.
    fn objective(&self, x: &Layout) -> f64;
}

/// Runs sweeps until the relative positional change is at most `cfg.eps` or
/// `cfg.max_iters` sweeps have run.
pub fn solve<M: StressModel + ?Sized>(
    model: &M,
    x0: &Layout,
    cfg: &SolverConfig,
) -> Result<Solution> {
    cfg.validate()?;
    if x0.node_count() != model.node_count() {
        return Err(Error::ShapeMismatch(format!(
            "layout has {} nodes, model has {}",
            x0.node_count(),
            model.node_count()
        )));
    }
    let mut x = x0.clone();
    let mut trace = Trace {
        initial_objective: model.objective(&x),
        rows: Vec::new(),
    };
    let start = Instant::now();
    let mut converged = false;
    for sweep in 1..=cfg.max_iters {
        let prev = x.clone();
        model.sweep(&mut x);
        let change = relative_positional_change(&prev, &x)?;
        trace.rows.push(TraceRow {
            sweep,
            stress: model.objective(&x),
            relative_change: change,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        if change <= cfg.eps {
            converged = true;
            break;
        }
    }
    if x.as_flat().iter().any(|c| !c.is_finite()) {
        return Err(Error::DegenerateLayout(
            "solver produced non-finite coordinates".into(),
        ));
    }
    Ok(Solution {
        layout: x,
        trace,
        converged,
    })
}

fn require_connected(g: &Graph) -> Result<()> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected(
            "stress solvers need a connected graph".into(),
        ))
    }
}

/// All-pairs stress with weights `1/d²`.
pub struct FullStress {
    dist: DistanceMatrix,
}

impl FullStress {
    pub fn new(g: &Graph) -> Result<Self> {
        if g.node_count() > FULL_MEMORY_WARN_NODES {
            log::warn!(
                "full stress on {} nodes stores {} distances",
                g.node_count(),
                g.node_count() * (g.node_count() - 1) / 2
            );
        }
        Ok(Self {
            dist: all_pairs(g)?,
        })
    }

    pub fn from_distances(dist: DistanceMatrix) -> Self {
        Self { dist }
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dist
    }
}

impl StressModel for FullStress {
    fn node_count(&self) -> usize {
        self.dist.size()
    }

    fn sweep(&self, x: &mut Layout) {
        let (n, dim) = (self.dist.size(), x.dim());
        let coords = x.coords_mut();
        let mut up = Update::new(dim);
        for i in 0..n {
            up.reset();
            for j in 0..n {
                if j != i {
                    let d = self.dist.get(i, j);
                    up.add(coords, dim, i, j, d, 1.0 / (d * d));
                }
            }
            up.apply(coords, dim, i);
        }
    }

    fn objective(&self, x: &Layout) -> f64 {
        let n = self.dist.size();
        let mut s = 0.0;
        for i in 0..n {
            for (off, &d) in self.dist.upper_row(i).iter().enumerate() {
                let r = x.distance(i, i + 1 + off) - d;
                s += r * r / (d * d);
            }
        }
        s
    }
}

/// Edge terms plus adapted-weight pivot terms.
pub struct SparseModel<'g> {
    g: &'g Graph,
    pivots: Vec<usize>,
    /// Node-major `[d, w′]` for every (node, pivot) pair, so a node's pivot
    /// terms are contiguous. `w′ = 0` marks pairs that carry no pivot term:
    /// the node itself and its neighbors.
    terms: Vec<[f64; 2]>,
}

impl<'g> SparseModel<'g> {
    pub fn new(g: &'g Graph, pivots: &[usize]) -> Result<Self> {
        if pivots.is_empty() {
            return Err(Error::Config(
                "sparse stress needs at least one pivot".into(),
            ));
        }
        require_connected(g)?;
        let pd = mssp(g, pivots)?;
        let regions = build_regions(&pd);
        let weights = AdaptedWeightTable::build(&pd, &regions)?;
        Ok(Self::from_tables(g, &pd, &weights))
    }

    fn from_tables(g: &'g Graph, pd: &PivotDistances, weights: &AdaptedWeightTable) -> Self {
        let (n, k) = (g.node_count(), pd.pivot_count());
        let nodes = pd.pivots();
        let mut terms = vec![[0.0; 2]; n * k];
        terms.par_chunks_mut(k).enumerate().for_each_init(
            || vec![usize::MAX; n],
            |mark, (i, row)| {
                mark[i] = i;
                for &j in g.neighbor_ids(i) {
                    mark[j] = i;
                }
                for (p, t) in row.iter_mut().enumerate() {
                    let w = if mark[nodes[p]] == i {
                        0.0
                    } else {
                        weights.get(p, i)
                    };
                    *t = [pd.get(p, i), w];
                }
            },
        );
        Self {
            g,
            pivots: nodes.to_vec(),
            terms,
        }
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Stored (node, pivot) entries; always `k * n`.
    pub fn table_len(&self) -> usize {
        self.terms.len()
    }

    /// Target distance and adapted weight of every pivot term of node `i`.
    #[inline]
    fn pivot_terms(&self, i: usize) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        let k = self.pivots.len();
        self.pivots
            .iter()
            .zip(&self.terms[i * k..(i + 1) * k])
            .filter(|(_, t)| t[1] > 0.0)
            .map(|(&node, t)| (node, t[0], t[1]))
    }
}

impl StressModel for SparseModel<'_> {
    fn node_count(&self) -> usize {
        self.g.node_count()
    }

    fn sweep(&self, x: &mut Layout) {
        let dim = x.dim();
        let coords = x.coords_mut();
        let mut up = Update::new(dim);
        for i in 0..self.g.node_count() {
            up.reset();
            for (j, len) in self.g.neighbors(i) {
                up.add(coords, dim, i, j, len, 1.0 / (len * len));
            }
            for (node, d, w) in self.pivot_terms(i) {
                up.add(coords, dim, i, node, d, w);
            }
            up.apply(coords, dim, i);
        }
    }

    fn objective(&self, x: &Layout) -> f64 {
        let mut s = edge_stress(self.g, x);
        for i in 0..self.g.node_count() {
            for (node, d, w) in self.pivot_terms(i) {
                let r = x.distance(i, node) - d;
                s += w * r * r;
            }
        }
        s
    }
}

/// Stress over edge pairs only.
pub struct OneStress<'g> {
    g: &'g Graph,
}

impl<'g> OneStress<'g> {
    pub fn new(g: &'g Graph) -> Result<Self> {
        require_connected(g)?;
        Ok(Self { g })
    }
}

impl StressModel for OneStress<'_> {
    fn node_count(&self) -> usize {
        self.g.node_count()
    }

    fn sweep(&self, x: &mut Layout) {
        let dim = x.dim();
        let coords = x.coords_mut();
        let mut up = Update::new(dim);
        for i in 0..self.g.node_count() {
            up.reset();
            for (j, len) in self.g.neighbors(i) {
                up.add(coords, dim, i, j, len, 1.0 / (len * len));
            }
            up.apply(coords, dim, i);
        }
    }

    fn objective(&self, x: &Layout) -> f64 {
        edge_stress(self.g, x)
    }
}

/// `Σ_E (‖x_i − x_j‖ − len)² / len²`.
pub fn edge_stress(g: &Graph, x: &Layout) -> f64 {
    g.edges()
        .map(|(u, v, len)| {
            let r = x.distance(u, v) - len;
            r * r / (len * len)
        })
        .sum()
}

pub fn solve_full_stress(g: &Graph, x0: &Layout, cfg: &SolverConfig) -> Result<Solution> {
    solve(&FullStress::new(g)?, x0, cfg)
}

pub fn solve_sparse_stress(
    g: &Graph,
    pivots: &[usize],
    x0: &Layout,
    cfg: &SolverConfig,
) -> Result<Solution> {
    solve(&SparseModel::new(g, pivots)?, x0, cfg)
}

pub fn solve_1_stress(g: &Graph, x0: &Layout, cfg: &SolverConfig) -> Result<Solution> {
    solve(&OneStress::new(g)?, x0, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, parse_edge_list, GraphKind};
    use crate::rng::StreamRng;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn random_layout(n: usize, dim: usize, seed: u64) -> Layout {
        let mut rng = StreamRng::seed_from_u64(seed);
        Layout::from_flat(
            dim,
            (0..n * dim).map(|_| rng.random_range(-2.0..2.0)).collect(),
        )
        .unwrap()
    }

    fn tight() -> SolverConfig {
        SolverConfig {
            max_iters: 5000,
            eps: 1e-12,
        }
    }

    /// Naive all-pairs stress.
    fn stress_oracle(g: &Graph, x: &Layout) -> f64 {
        let d = all_pairs(g).unwrap();
        let n = g.node_count();
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let dij = d.get(i, j);
                s += (x.distance(i, j) - dij).powi(2) / (dij * dij);
            }
        }
        s
    }

    /// Gradient descent from random starts on the full stress.
    fn gradient_descent_minimum(g: &Graph, restarts: u64) -> f64 {
        let n = g.node_count();
        let d = all_pairs(g).unwrap();
        let mut best = f64::INFINITY;
        for seed in 0..restarts {
            let mut x = random_layout(n, 2, 1000 + seed).as_flat().to_vec();
            let mut step = 0.05;
            let f = |x: &[f64]| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in i + 1..n {
                        let dd = ((x[2 * i] - x[2 * j]).powi(2)
                            + (x[2 * i + 1] - x[2 * j + 1]).powi(2))
                        .sqrt();
                        s += (dd - d.get(i, j)).powi(2) / d.get(i, j).powi(2);
                    }
                }
                s
            };
            let mut fx = f(&x);
            for _ in 0..20000 {
                let mut grad = vec![0.0; 2 * n];
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let (dx, dy) = (x[2 * i] - x[2 * j], x[2 * i + 1] - x[2 * j + 1]);
                        let dd = (dx * dx + dy * dy).sqrt().max(1e-12);
                        let c = 2.0 * (dd - d.get(i, j)) / (d.get(i, j).powi(2) * dd);
                        grad[2 * i] += c * dx;
                        grad[2 * i + 1] += c * dy;
                    }
                }
                let trial: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
                let ft = f(&trial);
                if ft < fx {
                    x = trial;
                    fx = ft;
                    step *= 1.1;
                } else {
                    step *= 0.5;
                }
            }
            best = best.min(fx);
        }
        best
    }

    #[test]
    fn relative_change_examples() {
        let x = Layout::from_points(&[[0.0, 0.0], [3.0, 4.0]]);
        assert_eq!(relative_positional_change(&x, &x).unwrap(), 0.0);
        let moved = Layout::from_points(&[[0.0, 0.0], [6.0, 8.0]]);
        assert!((relative_positional_change(&x, &moved).unwrap() - 1.0).abs() < 1e-15);
        let shifted = Layout::from_points(&[[1.0, 1.0], [4.0, 5.0]]);
        assert!(
            (relative_positional_change(&x, &shifted).unwrap() - 2f64.sqrt() / 5.0).abs() < 1e-15
        );
        let point = Layout::zeros(3, 2);
        assert!(relative_positional_change(&point, &x).is_err());
        assert_eq!(
            relative_positional_change(&point, &point).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn guard_directions_are_unit_and_opposite() {
        for dim in 1..4 {
            let (mut a, mut b) = (vec![0.0; dim], vec![0.0; dim]);
            guard_direction(3, 8, &mut a);
            guard_direction(8, 3, &mut b);
            assert!((a.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-12);
            for (p, q) in a.iter().zip(&b) {
                assert_eq!(*p, -q);
            }
        }
    }

    #[test]
    fn p2_reaches_target_length() {
        let g = parse_edge_list("0 1 1.7\n".as_bytes()).unwrap();
        let x0 = Layout::from_points(&[[0.0, 0.0], [0.3, -0.2]]);
        for sol in [
            solve_full_stress(&g, &x0, &tight()).unwrap(),
            solve_1_stress(&g, &x0, &tight()).unwrap(),
        ] {
            assert!((sol.layout.distance(0, 1) - 1.7).abs() < 1e-6);
            assert!(sol.trace.rows.last().unwrap().stress < 1e-12);
            assert!(sol.converged);
        }
    }

    #[test]
    fn coincident_start_is_guarded() {
        let g = generate(GraphKind::Path(3)).unwrap();
        let sol = solve_full_stress(&g, &Layout::zeros(3, 2), &tight()).unwrap();
        assert!(sol.layout.as_flat().iter().all(|c| c.is_finite()));
        // bending out of line costs only fourth order, so zero is approached slowly
        assert!(
            stress_oracle(&g, &sol.layout) < 1e-6,
            "{}",
            stress_oracle(&g, &sol.layout)
        );
        assert!((sol.layout.distance(0, 2) - 2.0).abs() < 1e-3);
    }

    #[test]
    fn p3_realizes_zero_stress() {
        let g = generate(GraphKind::Path(3)).unwrap();
        let x0 = Layout::from_points(&[[0.0, 0.0], [0.5, 0.9], [1.1, 0.2]]);
        let full = solve_full_stress(&g, &x0, &tight()).unwrap();
        assert!(
            stress_oracle(&g, &full.layout) < 1e-6,
            "{}",
            stress_oracle(&g, &full.layout)
        );
        let rows = &full.trace.rows;
        assert!(rows.windows(2).all(|w| w[1].stress <= w[0].stress + 1e-15));
        let sparse = solve_sparse_stress(&g, &[0, 2], &x0, &tight()).unwrap();
        assert!(
            stress_oracle(&g, &sparse.layout) < 1e-6,
            "{}",
            stress_oracle(&g, &sparse.layout)
        );
        assert!(crate::metrics::procrustes(&full.layout, &sparse.layout).unwrap() < 1e-3);
    }

    #[test]
    fn four_cycle_matches_gradient_descent() {
        let g = generate(GraphKind::Cycle(4)).unwrap();
        let oracle = gradient_descent_minimum(&g, 8);
        let mut best = f64::INFINITY;
        for seed in 0..4 {
            let sol = solve_full_stress(&g, &random_layout(4, 2, seed), &tight()).unwrap();
            best = best.min(stress_oracle(&g, &sol.layout));
            assert!(
                (sol.trace.rows.last().unwrap().stress - stress_oracle(&g, &sol.layout)).abs()
                    < 1e-12
            );
        }
        assert!(oracle > 0.0);
        assert!((best - oracle).abs() <= 0.01 * oracle, "{best} vs {oracle}");
    }

    #[test]
    fn one_stress_ignores_non_edges() {
        let star = generate(GraphKind::Star { leaves: 4 }).unwrap();
        let x0 = random_layout(5, 2, 3);
        let sol = solve_1_stress(&star, &x0, &tight()).unwrap();
        assert!(edge_stress(&star, &sol.layout) < 1e-12);
        assert!(stress_oracle(&star, &sol.layout) > 0.0);
        // 4 leaves at distance 2 cannot all be pairwise 2 apart in the plane
        assert!(gradient_descent_minimum(&star, 2) > 0.0);

        let c4 = generate(GraphKind::Cycle(4)).unwrap();
        let sol = solve_1_stress(&c4, &random_layout(4, 2, 5), &tight()).unwrap();
        assert!(edge_stress(&c4, &sol.layout) < 1e-9);
        assert!(stress_oracle(&c4, &sol.layout) > 0.0);
    }

    #[test]
    fn realization_is_a_fixpoint() {
        let g = generate(GraphKind::Path(6)).unwrap();
        let x: Vec<[f64; 2]> = (0..6).map(|i| [i as f64, 0.0]).collect();
        let x = Layout::from_points(&x);
        let model = FullStress::new(&g).unwrap();
        let mut y = x.clone();
        model.sweep(&mut y);
        assert!(relative_positional_change(&x, &y).unwrap() * x.diagonal() < 1e-12);

        let sparse = SparseModel::new(&g, &[0, 3]).unwrap();
        let mut y = x.clone();
        sparse.sweep(&mut y);
        assert!(relative_positional_change(&x, &y).unwrap() * x.diagonal() < 1e-12);
    }

    #[test]
    fn sparse_with_all_pivots_is_full_stress() {
        let g = generate(GraphKind::Grid { rows: 3, cols: 4 }).unwrap();
        let all: Vec<usize> = (0..12).rev().collect();
        let full = FullStress::new(&g).unwrap();
        let sparse = SparseModel::new(&g, &all).unwrap();
        let mut a = random_layout(12, 2, 9);
        let mut b = a.clone();
        // pivot terms are counted from both ends of a non-edge pair
        let both_ends = 2.0 * full.objective(&a) - edge_stress(&g, &a);
        assert!((both_ends - sparse.objective(&b)).abs() < 1e-9);
        for _ in 0..30 {
            full.sweep(&mut a);
            sparse.sweep(&mut b);
            for (p, q) in a.as_flat().iter().zip(b.as_flat()) {
                assert!((p - q).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sparse_errors() {
        let g = generate(GraphKind::Path(4)).unwrap();
        assert!(matches!(SparseModel::new(&g, &[]), Err(Error::Config(_))));
        assert!(SparseModel::new(&g, &[0, 0]).is_err());
        assert!(matches!(
            solve(
                &SparseModel::new(&g, &[1]).unwrap(),
                &Layout::zeros(3, 2),
                &SolverConfig::sparse()
            ),
            Err(Error::ShapeMismatch(_))
        ));
        let cfg = SolverConfig {
            max_iters: 0,
            eps: 1e-4,
        };
        assert!(matches!(
            solve_1_stress(&g, &Layout::zeros(4, 2), &cfg),
            Err(Error::Config(_))
        ));
        let cfg = SolverConfig {
            max_iters: 3,
            eps: 0.0,
        };
        assert!(matches!(
            solve_1_stress(&g, &Layout::zeros(4, 2), &cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn trace_csv_and_iteration_cap() {
        let g = generate(GraphKind::Cycle(6)).unwrap();
        let cfg = SolverConfig {
            max_iters: 3,
            eps: 1e-30,
        };
        let sol = solve_full_stress(&g, &random_layout(6, 2, 1), &cfg).unwrap();
        assert_eq!(sol.sweeps(), 3);
        assert!(!sol.converged);
        let mut out = Vec::new();
        sol.trace.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "sweep,stress,relative_change,elapsed_ms");
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("3,"));
    }

    #[test]
    fn three_dimensional_layouts() {
        let g = generate(GraphKind::CompleteBinaryTree { depth: 3 }).unwrap();
        let sol = solve_full_stress(&g, &random_layout(15, 3, 2), &SolverConfig::full()).unwrap();
        assert_eq!(sol.layout.dim(), 3);
        assert!(sol.trace.rows.last().unwrap().stress < sol.trace.initial_objective);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn full_sweeps_never_increase_stress(
            n in 3usize..14, extra in prop::collection::vec((0usize..100, 0usize..100, 1u8..4), 0..20), seed in 0u64..500
        ) {
            let mut text = String::new();
            for v in 1..n {
                text += &format!("{} {} {}\n", (seed as usize + v * 7) % v, v, 1 + v % 3);
            }
            for (a, b, l) in extra {
                if a % n != b % n {
                    text += &format!("{} {} {}\n", a % n, b % n, l);
                }
            }
            let g = parse_edge_list(text.as_bytes()).unwrap();
            let model = FullStress::new(&g).unwrap();
            let mut x = random_layout(n, 2, seed);
            let mut prev = model.objective(&x);
            for _ in 0..40 {
                model.sweep(&mut x);
                let s = model.objective(&x);
                prop_assert!(s <= prev * (1.0 + 1e-9) + 1e-15, "{} > {}", s, prev);
                prev = s;
            }
        }
    }
}
