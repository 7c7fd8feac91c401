//! Plain-text graph and tree formats.
//!
//! Edge list: header `n m root`, then `m` lines `u v`.
//! Tree: header `n`, then `n - 1` lines `child parent`, optionally followed
//! by extra numeric columns (birth time, edge weight).

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::graph::graph::{Graph, RootedGraph};
use crate::graph::tree::{RootedTree, NO_PARENT};

pub fn write_edge_list(g: &RootedGraph) -> String {
    let edges = g.graph.edges();
    let mut s = format!("{} {} {}\n", g.n(), edges.len(), g.root);
    for (u, v) in edges {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}

fn fields(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("bad {what}: {s:?}")))
}

pub fn parse_edge_list(text: &str) -> Result<RootedGraph> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let head = fields(lines.next().ok_or_else(|| Error::Parse("empty input".into()))?);
    if head.len() != 3 {
        return Err(Error::Parse("header must be `n m root`".into()));
    }
    let n: usize = num(head[0], "vertex count")?;
    let m: usize = num(head[1], "edge count")?;
    let root: usize = num(head[2], "root")?;
    let mut edges = Vec::with_capacity(m);
    for line in lines.by_ref().take(m) {
        let f = fields(line);
        if f.len() != 2 {
            return Err(Error::Parse(format!("edge line {line:?}")));
        }
        edges.push((num(f[0], "vertex")?, num(f[1], "vertex")?));
    }
    if edges.len() != m || lines.next().is_some() {
        return Err(Error::Parse(format!("expected exactly {m} edge lines")));
    }
    RootedGraph::new(Graph::from_edges(n, &edges)?, root)
}

/// Tree file. Birth times and edge weights are appended as extra columns when
/// present (birth time first).
pub fn write_tree(t: &RootedTree) -> String {
    let mut s = format!("{}\n", t.n());
    for v in 1..t.n() {
        write!(s, "{v} {}", t.parents()[v]).unwrap();
        if let Some(b) = &t.birth_times {
            write!(s, " {}", b[v]).unwrap();
        }
        if let Some(w) = &t.edge_weights {
            write!(s, " {}", w[v]).unwrap();
        }
        s.push('\n');
    }
    s
}

/// Parse a tree file; extra columns are returned row-aligned with vertex ids
/// (the root row is 0.0).
pub fn parse_tree(text: &str) -> Result<(RootedTree, Vec<Vec<f64>>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let head = fields(lines.next().ok_or_else(|| Error::Parse("empty input".into()))?);
    if head.len() != 1 {
        return Err(Error::Parse("header must be `n`".into()));
    }
    let n: usize = num(head[0], "vertex count")?;
    if n == 0 {
        return Err(Error::Parse("tree must have at least one vertex".into()));
    }
    let mut parent = vec![NO_PARENT; n];
    let mut seen = vec![false; n];
    let mut extra: Vec<Vec<f64>> = Vec::new();
    let mut rows = 0;
    for line in lines {
        let f = fields(line);
        if f.len() < 2 {
            return Err(Error::Parse(format!("tree line {line:?}")));
        }
        let c: usize = num(f[0], "vertex")?;
        let p: usize = num(f[1], "vertex")?;
        if c == 0 || c >= n || p >= n || seen[c] {
            return Err(Error::Parse(format!("tree line {line:?}")));
        }
        seen[c] = true;
        parent[c] = p;
        if extra.is_empty() {
            extra = vec![vec![0.0; n]; f.len() - 2];
        }
        if f.len() - 2 != extra.len() {
            return Err(Error::Parse("ragged extra columns".into()));
        }
        for (col, s) in f[2..].iter().enumerate() {
            extra[col][c] = num(s, "value")?;
        }
        rows += 1;
    }
    if rows != n - 1 {
        return Err(Error::Parse(format!("expected {} tree lines", n - 1)));
    }
    Ok((RootedTree::from_parents(parent)?, extra))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip() {
        let g = RootedGraph::new(Graph::from_edges(3, &[(0, 1), (1, 1), (1, 2)]).unwrap(), 2).unwrap();
        let s = write_edge_list(&g);
        assert_eq!(s, "3 3 2\n0 1\n1 1\n1 2\n");
        assert_eq!(parse_edge_list(&s).unwrap(), g);
        assert!(parse_edge_list("3 2 0\n0 1\n").is_err());
        assert!(parse_edge_list("2 1 0\n0 5\n").is_err());
    }

    #[test]
    fn tree_round_trip_with_columns() {
        let mut t = RootedTree::from_growth(vec![NO_PARENT, 0, 1]);
        t.birth_times = Some(vec![0.0, 0.5, 1.25]);
        let s = write_tree(&t);
        assert_eq!(s, "3\n1 0 0.5\n2 1 1.25\n");
        let (back, extra) = parse_tree(&s).unwrap();
        assert_eq!(back.parents(), t.parents());
        assert_eq!(extra, vec![vec![0.0, 0.5, 1.25]]);
        assert!(parse_tree("3\n1 2\n2 1\n").is_err());
    }
}
