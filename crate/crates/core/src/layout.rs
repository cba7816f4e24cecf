//! Node coordinates and the layout CSV format.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// n×dim coordinate table, row-major, indexed like the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    dim: usize,
    coords: Vec<f64>,
}

impl Layout {
    pub fn zeros(n: usize, dim: usize) -> Self {
        assert!(dim >= 1, "layouts need at least one dimension");
        Self {
            dim,
            coords: vec![0.0; n * dim],
        }
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates do not fill rows of dimension {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Validation(
                "layout coordinates must be finite".into(),
            ));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points<const D: usize>(points: &[[f64; D]]) -> Self {
        Self::from_flat(D, points.iter().flatten().copied().collect())
            .expect("finite points of fixed dimension")
    }

    pub fn node_count(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn point_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }

    pub fn scale(&mut self, factor: f64) {
        self.coords.iter_mut().for_each(|c| *c *= factor);
    }

    pub fn scaled(&self, factor: f64) -> Layout {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    /// Per-axis (min, max); empty for an empty layout.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        if self.node_count() == 0 {
            return Vec::new();
        }
        let mut b = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim];
        for p in self.coords.chunks_exact(self.dim) {
            for (axis, &c) in b.iter_mut().zip(p) {
                axis.0 = axis.0.min(c);
                axis.1 = axis.1.max(c);
            }
        }
        b
    }

    /// Length of the bounding-box diagonal.
    pub fn diagonal(&self) -> f64 {
        self.bounds()
            .iter()
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn check_shape(&self, other: &Layout) -> Result<()> {
        if self.node_count() != other.node_count() || self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "layouts are {}x{} and {}x{}",
                self.node_count(),
                self.dim,
                other.node_count(),
                other.dim
            )));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn axis_name(axis: usize) -> String {
    match axis {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        a => format!("c{a}"),
    }
}

/// Writes `id,x,y[,z]` with external labels. Rust's float formatting is the
/// shortest representation that round-trips exactly.
pub fn write_layout_csv<W: Write>(g: &Graph, layout: &Layout, mut w: W) -> Result<()> {
    if g.node_count() != layout.node_count() {
        return Err(Error::ShapeMismatch(format!(
            "graph has {} nodes, layout has {}",
            g.node_count(),
            layout.node_count()
        )));
    }
    let header: Vec<String> = (0..layout.dim()).map(axis_name).collect();
    writeln!(w, "id,{}", header.join(","))?;
    for v in 0..layout.node_count() {
        write!(w, "{}", g.label(v))?;
        for c in layout.point(v) {
            write!(w, ",{c}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Reads a layout CSV and orders its rows by the graph's node indices.
/// Every graph node must appear exactly once and no other ids may appear.
pub fn read_layout_csv<R: Read>(g: &Graph, reader: R) -> Result<Layout> {
    let index: HashMap<u64, usize> = g
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i))
        .collect();
    let mut lines = BufReader::new(reader).lines().enumerate();
    let header = match lines.next() {
        Some((_, l)) => l?,
        None => return Err(Error::parse(1, "empty layout file")),
    };
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.first().map(|c| c.trim()) != Some("id") || cols.len() < 2 {
        return Err(Error::parse(1, "layout header must be `id,x[,y,...]`"));
    }
    let dim = cols.len() - 1;
    let mut coords = vec![0.0; g.node_count() * dim];
    let mut seen = vec![false; g.node_count()];
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 1 {
            return Err(Error::parse(lineno, format!("expected {} fields", dim + 1)));
        }
        let label: u64 = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("invalid id {:?}", fields[0])))?;
        let v = *index.get(&label).ok_or_else(|| {
            Error::ShapeMismatch(format!("layout id {label} is not a graph node"))
        })?;
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::parse(lineno, format!("id {label} listed twice")));
        }
        for (a, f) in fields[1..].iter().enumerate() {
            coords[v * dim + a] = f
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("invalid coordinate {f:?}")))?;
        }
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Error::ShapeMismatch(format!(
            "graph node {} missing from layout",
            g.label(v)
        )));
    }
    Layout::from_flat(dim, coords)
}
