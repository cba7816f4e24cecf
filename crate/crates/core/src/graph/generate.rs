use std::str::FromStr;

use super::{Graph, GraphBuilder};
use crate::error::{Error, Result};

/// Largest graph the generators will build.
const MAX_NODES: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Path(usize),
    Cycle(usize),
    Grid {
        rows: usize,
        cols: usize,
    },
    /// Complete binary tree with `depth` levels below the root.
    CompleteBinaryTree {
        depth: u32,
    },
    /// One center plus `leaves` leaves.
    Star {
        leaves: usize,
    },
}

impl FromStr for GraphKind {
    type Err = Error;

    /// `path:5`, `cycle:6`, `grid:3x4`, `btree:9`, `star:4`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("generator spec {s:?} needs `kind:size`")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("invalid generator size {t:?}")))
        };
        match kind {
            "path" => Ok(GraphKind::Path(num(arg)?)),
            "cycle" => Ok(GraphKind::Cycle(num(arg)?)),
            "grid" => {
                let (r, c) = arg
                    .split_once('x')
                    .ok_or_else(|| Error::Config("grid expects `grid:ROWSxCOLS`".into()))?;
                Ok(GraphKind::Grid {
                    rows: num(r)?,
                    cols: num(c)?,
                })
            }
            "btree" | "binary-tree" => {
                let d = num(arg)?;
                let depth = u32::try_from(d).map_err(|_| Error::Size(format!("depth {d}")))?;
                Ok(GraphKind::CompleteBinaryTree { depth })
            }
            "star" => Ok(GraphKind::Star { leaves: num(arg)? }),
            other => Err(Error::Config(format!("unknown generator {other:?}"))),
        }
    }
}

fn check_size(n: Option<usize>) -> Result<usize> {
    match n {
        Some(n) if (1..=MAX_NODES).contains(&n) => Ok(n),
        Some(0) => Err(Error::Size("graph must have at least one node".into())),
        _ => Err(Error::Size(format!(
            "more than {MAX_NODES} nodes requested"
        ))),
    }
}

/// Builds a synthetic unit-length graph. Nodes are numbered naturally:
/// along the path or cycle, row-major on grids, heap order (level by level)
/// for binary trees, center first for stars.
pub fn generate(kind: GraphKind) -> Result<Graph> {
    let mut b = GraphBuilder::new();
    let nodes = |b: &mut GraphBuilder, n: usize| {
        for v in 0..n as u64 {
            b.add_node(v);
        }
    };
    match kind {
        GraphKind::Path(n) => {
            let n = check_size(Some(n))?;
            nodes(&mut b, n);
            for v in 1..n as u64 {
                b.add_edge(v - 1, v, 1.0)?;
            }
        }
        GraphKind::Cycle(n) => {
            let n = check_size(Some(n))?;
            if n < 3 {
                return Err(Error::Size(format!(
                    "a cycle needs at least 3 nodes, got {n}"
                )));
            }
            nodes(&mut b, n);
            for v in 0..n as u64 {
                b.add_edge(v, (v + 1) % n as u64, 1.0)?;
            }
        }
        GraphKind::Grid { rows, cols } => {
            check_size(Some(rows))?;
            check_size(Some(cols))?;
            let n = check_size(rows.checked_mul(cols))?;
            nodes(&mut b, n);
            for r in 0..rows {
                for c in 0..cols {
                    let v = (r * cols + c) as u64;
                    if c + 1 < cols {
                        b.add_edge(v, v + 1, 1.0)?;
                    }
                    if r + 1 < rows {
                        b.add_edge(v, v + cols as u64, 1.0)?;
                    }
                }
            }
        }
        GraphKind::CompleteBinaryTree { depth } => {
            let n = check_size(
                depth
                    .checked_add(1)
                    .and_then(|d| 1usize.checked_shl(d))
                    .and_then(|p| p.checked_sub(1)),
            )?;
            nodes(&mut b, n);
            for v in 1..n as u64 {
                b.add_edge((v - 1) / 2, v, 1.0)?;
            }
        }
        GraphKind::Star { leaves } => {
            let n = check_size(leaves.checked_add(1))?;
            nodes(&mut b, n);
            for v in 1..n as u64 {
                b.add_edge(0, v, 1.0)?;
            }
        }
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::stats;

    #[test]
    fn binary_tree_depth_nine() {
        let g = generate(GraphKind::CompleteBinaryTree { depth: 9 }).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1023, 1022));
        let s = stats(&g).unwrap();
        assert_eq!((s.min_degree, s.max_degree, s.diameter), (1, 3, 18.0));
    }

    #[test]
    fn binary_tree_sizes() {
        for d in 0..12u32 {
            let g = generate(GraphKind::CompleteBinaryTree { depth: d }).unwrap();
            let n = (1usize << (d + 1)) - 1;
            assert_eq!(g.node_count(), n);
            assert_eq!(g.edge_count(), n - 1);
            assert!(g.is_connected());
        }
    }

    #[test]
    fn small_generators() {
        let g = generate(GraphKind::Grid { rows: 2, cols: 2 }).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (4, 4));
        let g = generate(GraphKind::Path(5)).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (5, 4));
        assert_eq!(stats(&g).unwrap().diameter, 4.0);
        let g = generate(GraphKind::Star { leaves: 4 }).unwrap();
        assert_eq!((g.node_count(), g.edge_count(), g.degree(0)), (5, 4, 4));
        let g = generate(GraphKind::Path(1)).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
    }

    #[test]
    fn size_errors() {
        assert!(matches!(generate(GraphKind::Path(0)), Err(Error::Size(_))));
        assert!(matches!(generate(GraphKind::Cycle(2)), Err(Error::Size(_))));
        assert!(matches!(
            generate(GraphKind::CompleteBinaryTree { depth: 70 }),
            Err(Error::Size(_))
        ));
        assert!(matches!(
            generate(GraphKind::Grid {
                rows: usize::MAX,
                cols: 2
            }),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn parses_generator_specs() {
        assert_eq!("path:5".parse::<GraphKind>().unwrap(), GraphKind::Path(5));
        assert_eq!(
            "grid:3x4".parse::<GraphKind>().unwrap(),
            GraphKind::Grid { rows: 3, cols: 4 }
        );
        assert_eq!(
            "btree:9".parse::<GraphKind>().unwrap(),
            GraphKind::CompleteBinaryTree { depth: 9 }
        );
        assert!("blob:3".parse::<GraphKind>().is_err());
        assert!("path".parse::<GraphKind>().is_err());
    }
}
