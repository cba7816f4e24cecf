use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use super::{Graph, GraphBuilder};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// Whitespace-separated `u v [length]`, `#` comments.
    EdgeList,
    /// MatrixMarket coordinate format, pattern semantics.
    MatrixMarket,
}

impl GraphFormat {
    /// Guess from the file extension; anything but `.mtx` is an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") => GraphFormat::MatrixMarket,
            _ => GraphFormat::EdgeList,
        }
    }
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "el" | "edgelist" => Ok(GraphFormat::EdgeList),
            "mtx" | "matrixmarket" => Ok(GraphFormat::MatrixMarket),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

pub fn read_graph(path: &Path, format: Option<GraphFormat>) -> Result<Graph> {
    let format = format.unwrap_or_else(|| GraphFormat::from_path(path));
    let file = fs::File::open(path)?;
    match format {
        GraphFormat::EdgeList => parse_edge_list(file),
        GraphFormat::MatrixMarket => parse_matrix_market(file),
    }
}

fn parse_id(tok: &str, line: usize) -> Result<u64> {
    tok.parse::<u64>()
        .map_err(|_| Error::parse(line, format!("invalid node id {tok:?}")))
}

/// Parses an edge list. Ids are compacted to `0..n` in order of first
/// appearance; self-loops still register their node.
pub fn parse_edge_list<R: Read>(reader: R) -> Result<Graph> {
    let mut b = GraphBuilder::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 2 || toks.len() > 3 {
            return Err(Error::parse(
                lineno,
                format!("expected `u v [length]`, got {} fields", toks.len()),
            ));
        }
        let u = parse_id(toks[0], lineno)?;
        let v = parse_id(toks[1], lineno)?;
        let length = match toks.get(2) {
            Some(t) => t
                .parse::<f64>()
                .map_err(|_| Error::parse(lineno, format!("invalid length {t:?}")))?,
            None => 1.0,
        };
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Validation(format!(
                "line {lineno}: edge length must be positive and finite, got {length}"
            )));
        }
        b.add_edge(u, v, length)?;
    }
    Ok(b.build())
}

/// Writes the canonical edge list: one line per undirected edge using
/// external labels, the length column only for weighted graphs.
pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    for (u, v, len) in g.edges() {
        if g.is_weighted() {
            writeln!(w, "{} {} {}", g.label(u), g.label(v), len)?;
        } else {
            writeln!(w, "{} {}", g.label(u), g.label(v))?;
        }
    }
    Ok(())
}

/// Parses a MatrixMarket coordinate file as an unweighted graph. Values are
/// ignored; general matrices are symmetrized and the diagonal is dropped.
/// Labels are the 1-based matrix indices.
pub fn parse_matrix_market<R: Read>(reader: R) -> Result<Graph> {
    let mut lines = BufReader::new(reader).lines().enumerate();
    let header = match lines.next() {
        Some((_, l)) => l?,
        None => return Err(Error::parse(1, "empty file")),
    };
    let fields: Vec<String> = header
        .split_whitespace()
        .map(|s| s.to_ascii_lowercase())
        .collect();
    if fields.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(Error::parse(1, "missing %%MatrixMarket header"));
    }
    if fields.get(1).map(String::as_str) != Some("matrix") {
        return Err(Error::UnsupportedFormat(format!(
            "object {:?}",
            fields.get(1)
        )));
    }
    match fields.get(2).map(String::as_str) {
        Some("coordinate") => {}
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "only coordinate matrices are supported, got {other:?}"
            )))
        }
    }

    let mut b = GraphBuilder::new();
    let mut size: Option<(u64, u64, usize)> = None;
    let mut entries = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if toks.len() != 3 {
                    return Err(Error::parse(lineno, "expected `rows cols entries`"));
                }
                let rows = parse_id(toks[0], lineno)?;
                let cols = parse_id(toks[1], lineno)?;
                let nnz = toks[2]
                    .parse::<usize>()
                    .map_err(|_| Error::parse(lineno, "invalid entry count"))?;
                size = Some((rows, cols, nnz));
            }
            Some((rows, cols, _)) => {
                if toks.len() < 2 {
                    return Err(Error::parse(lineno, "expected `row col [value]`"));
                }
                let i = parse_id(toks[0], lineno)?;
                let j = parse_id(toks[1], lineno)?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(Error::parse(
                        lineno,
                        format!("entry ({i},{j}) out of range"),
                    ));
                }
                if i == j {
                    b.add_node(i);
                } else {
                    b.add_edge(i, j, 1.0)?;
                }
                entries += 1;
            }
        }
    }
    match size {
        None => Err(Error::parse(1, "missing size line")),
        Some((_, _, nnz)) if nnz != entries => Err(Error::Validation(format!(
            "header announces {nnz} entries, found {entries}"
        ))),
        Some(_) => Ok(b.build()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn el(text: &str) -> Result<Graph> {
        parse_edge_list(text.as_bytes())
    }

    fn mtx(text: &str) -> Result<Graph> {
        parse_matrix_market(text.as_bytes())
    }

    #[test]
    fn edge_list_path() {
        let g = el("0 1\n1 2").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        assert!(!g.is_weighted());
        assert!(g.edges().all(|(_, _, l)| l == 1.0));
    }

    #[test]
    fn edge_list_duplicate_collapsed() {
        let g = el("0 1 2.5\n1 0 2.5").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges().next().unwrap().2, 2.5);
        assert!(g.is_weighted());
    }

    #[test]
    fn duplicate_keeps_first_length() {
        let g = el("0 1 2\n1 0 7").unwrap();
        assert_eq!(g.edges().next().unwrap().2, 2.0);
    }

    #[test]
    fn edge_list_self_loop_dropped() {
        let g = el("0 0\n0 1").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn edge_list_compacts_in_first_appearance_order() {
        let g = el("# comment\n7 3\n\n3 100\n").unwrap();
        assert_eq!(g.labels(), &[7, 3, 100]);
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        match el("0 1\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(el("0 1 2 3"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(el("-1 2"), Err(Error::Parse { .. })));
        assert!(matches!(el("0 1 0"), Err(Error::Validation(_))));
        assert!(matches!(el("0 1 -2.5"), Err(Error::Validation(_))));
    }

    #[test]
    fn matrix_market_symmetric_pattern() {
        let g = mtx("%%MatrixMarket matrix coordinate pattern symmetric\n% c\n3 3 2\n2 1\n3 2\n")
            .unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        assert_eq!(g.degree(0), 2); // label 2 appears first and is the middle node
    }

    #[test]
    fn matrix_market_diagonal_only() {
        let g = mtx("%%MatrixMarket matrix coordinate real general\n3 3 1\n1 1 4.0\n").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
    }

    #[test]
    fn matrix_market_general_is_symmetrized() {
        let g =
            mtx("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 0.5\n2 1 3\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(!g.is_weighted());
    }

    #[test]
    fn matrix_market_rejects_array() {
        let r = mtx("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
        assert!(matches!(r, Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn matrix_market_checks_entry_count() {
        let r = mtx("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n");
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    fn write(g: &Graph) -> String {
        let mut out = Vec::new();
        write_edge_list(g, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    /// Edge lists that serialize back to themselves: arbitrary text pushed
    /// through parse and serialize until nothing changes.
    fn canonical_edge_list() -> impl Strategy<Value = String> {
        (2usize..15, prop::bool::ANY).prop_flat_map(|(n, weighted)| {
            prop::collection::vec((0..n as u64, 0..n as u64, 1u32..50), 1..30).prop_filter_map(
                "no fixpoint",
                move |raw| {
                    let mut text: String = raw
                        .iter()
                        .map(|&(u, v, l)| {
                            if weighted {
                                format!("{u} {v} {}\n", f64::from(l) / 4.0)
                            } else {
                                format!("{u} {v}\n")
                            }
                        })
                        .collect();
                    for _ in 0..50 {
                        let next = write(&el(&text).unwrap());
                        if next == text {
                            return Some(text);
                        }
                        text = next;
                    }
                    None
                },
            )
        })
    }

    proptest! {
        #[test]
        fn parse_serialize_parse_is_identity(text in canonical_edge_list()) {
            let g = el(&text).unwrap();
            prop_assert_eq!(write(&g), text.clone());
            prop_assert_eq!(el(&write(&g)).unwrap(), g);
        }
    }
}
