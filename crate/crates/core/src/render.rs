//! SVG drawings of layouts.

use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layout::Layout;

/// Draws edges as lines and nodes as small circles, using the first two
/// axes. The view box fits the drawing with a 5% margin.
pub fn write_svg<W: Write>(g: &Graph, x: &Layout, mut w: W) -> Result<()> {
    let n = g.node_count();
    if x.node_count() != n {
        return Err(Error::ShapeMismatch(format!(
            "layout has {} nodes, graph has {n}",
            x.node_count()
        )));
    }
    let pos = |v: usize| {
        let p = x.point(v);
        // SVG y grows downwards
        (p[0], -p.get(1).copied().unwrap_or(0.0))
    };
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in 0..n {
        let (px, py) = pos(v);
        lo = [lo[0].min(px), lo[1].min(py)];
        hi = [hi[0].max(px), hi[1].max(py)];
    }
    if n == 0 {
        (lo, hi) = ([0.0; 2], [0.0; 2]);
    }
    let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let extent = if extent > 0.0 { extent } else { 1.0 };
    let margin = 0.05 * extent;
    let radius = 0.005 * extent;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        lo[0] - margin,
        lo[1] - margin,
        hi[0] - lo[0] + 2.0 * margin,
        hi[1] - lo[1] + 2.0 * margin
    )?;
    writeln!(
        w,
        r#"<g stroke="black" stroke-width="1" vector-effect="non-scaling-stroke">"#
    )?;
    for (u, v, _) in g.edges() {
        let ((x1, y1), (x2, y2)) = (pos(u), pos(v));
        writeln!(
            w,
            r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" vector-effect="non-scaling-stroke"/>"#
        )?;
    }
    writeln!(w, "</g>")?;
    writeln!(w, r#"<g fill="steelblue">"#)?;
    for v in 0..n {
        let (cx, cy) = pos(v);
        writeln!(w, r#"<circle cx="{cx}" cy="{cy}" r="{radius}"/>"#)?;
    }
    writeln!(w, "</g>")?;
    writeln!(w, "</svg>")?;
    Ok(())
}
