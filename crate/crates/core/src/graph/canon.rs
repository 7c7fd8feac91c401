//! Canonical forms for rooted (multi)graphs up to root-preserving isomorphism.
//!
//! Trees get the classic bracket encoding: a vertex is `(` followed by the
//! sorted encodings of its children and `)`. General graphs first have their
//! pendant trees folded into vertex labels, then the remaining core is put in
//! canonical order by colour refinement plus individualization search, keeping
//! the lexicographically smallest adjacency certificate.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::graph::RootedGraph;
use crate::graph::tree::{RootedTree, NO_PARENT};

/// Default vertex cap for non-tree inputs.
pub const DEFAULT_CAP: usize = 64;
/// Default number of search leaves explored before giving up.
pub const DEFAULT_BUDGET: usize = 200_000;

/// ASCII byte string identifying a rooted graph up to isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalCode(pub Vec<u8>);

impl CanonicalCode {
    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("codes are ASCII")
    }

    pub fn is_tree(&self) -> bool {
        self.0.first() == Some(&b'T')
    }

    /// Code of the single-vertex graph.
    pub fn point() -> Self {
        CanonicalCode(b"T()".to_vec())
    }

    fn from_bracket(s: &[u8]) -> Self {
        let mut v = Vec::with_capacity(s.len() + 1);
        v.push(b'T');
        v.extend_from_slice(s);
        CanonicalCode(v)
    }

    /// Bracket string without the leading tag (tree codes only).
    pub fn bracket(&self) -> Option<&[u8]> {
        self.is_tree().then(|| &self.0[1..])
    }

    /// Decode a tree code back into a tree (children in code order).
    pub fn to_tree(&self) -> Result<RootedTree> {
        let s = self
            .bracket()
            .ok_or_else(|| Error::Parse(format!("not a tree code: {}", self.as_str())))?;
        parse_bracket(s)
    }

    /// Codes of the root's child subtrees, in code order (tree codes only).
    pub fn child_codes(&self) -> Result<Vec<CanonicalCode>> {
        let s = self
            .bracket()
            .ok_or_else(|| Error::Parse(format!("not a tree code: {}", self.as_str())))?;
        if s.len() < 2 || s[0] != b'(' || s[s.len() - 1] != b')' {
            return Err(Error::Parse("unbalanced tree code".into()));
        }
        let inner = &s[1..s.len() - 1];
        let mut out = Vec::new();
        let mut depth = 0i64;
        let mut start = 0;
        for (i, &b) in inner.iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => depth -= 1,
                _ => return Err(Error::Parse("unexpected byte in tree code".into())),
            }
            if depth < 0 {
                return Err(Error::Parse("unbalanced tree code".into()));
            }
            if depth == 0 {
                out.push(CanonicalCode::from_bracket(&inner[start..=i]));
                start = i + 1;
            }
        }
        if depth != 0 {
            return Err(Error::Parse("unbalanced tree code".into()));
        }
        Ok(out)
    }

    /// Vertex count of a tree code.
    pub fn tree_size(&self) -> Option<usize> {
        self.bracket().map(|s| s.len() / 2)
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn parse_bracket(s: &[u8]) -> Result<RootedTree> {
    let mut parent = Vec::with_capacity(s.len() / 2);
    let mut stack: Vec<usize> = Vec::new();
    for &b in s {
        match b {
            b'(' => {
                if parent.is_empty() {
                    parent.push(NO_PARENT);
                } else {
                    let p = *stack
                        .last()
                        .ok_or_else(|| Error::Parse("more than one root in tree code".into()))?;
                    parent.push(p);
                }
                stack.push(parent.len() - 1);
            }
            b')' => {
                stack.pop().ok_or_else(|| Error::Parse("unbalanced tree code".into()))?;
            }
            _ => return Err(Error::Parse("unexpected byte in tree code".into())),
        }
    }
    if !stack.is_empty() || parent.is_empty() {
        return Err(Error::Parse("unbalanced tree code".into()));
    }
    Ok(RootedTree::from_growth(parent))
}

/// Interns subtree shapes so that many subtrees of one (or several) trees can
/// be classified in linear time. Class ids are local to the interner; the
/// string codes are canonical.
#[derive(Debug, Default, Clone)]
pub struct ShapeInterner {
    ids: HashMap<Vec<u32>, u32>,
    kids: Vec<Vec<u32>>,
    strings: Vec<Vec<u8>>,
}

impl ShapeInterner {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, mut kids: Vec<u32>) -> u32 {
        kids.sort_unstable();
        if let Some(&id) = self.ids.get(&kids) {
            return id;
        }
        let id = self.kids.len() as u32;
        self.kids.push(kids.clone());
        self.ids.insert(kids, id);
        id
    }

    /// Shape class of the subtree below every vertex.
    pub fn classify(&mut self, t: &RootedTree) -> Vec<u32> {
        let mut class = vec![0u32; t.n()];
        for u in t.preorder().into_iter().rev() {
            let kids = t.children(u).iter().map(|&c| class[c]).collect();
            class[u] = self.intern(kids);
        }
        class
    }

    /// Class of the tree whose root has children of the given classes.
    pub fn join(&mut self, kids: Vec<u32>) -> u32 {
        self.intern(kids)
    }

    /// Child classes of a class, sorted by id.
    pub fn kids(&self, class: u32) -> &[u32] {
        &self.kids[class as usize]
    }

    pub fn size(&mut self, class: u32) -> usize {
        self.bracket(class).len() / 2
    }

    fn bracket(&mut self, class: u32) -> &[u8] {
        // children always get smaller ids than their parent, so filling the
        // table in id order never needs recursion
        while self.strings.len() <= class as usize {
            let id = self.strings.len();
            let mut parts: Vec<&[u8]> = self.kids[id]
                .iter()
                .map(|&k| self.strings[k as usize].as_slice())
                .collect();
            parts.sort_unstable();
            let len = 2 + parts.iter().map(|p| p.len()).sum::<usize>();
            let mut s = Vec::with_capacity(len);
            s.push(b'(');
            for p in parts {
                s.extend_from_slice(p);
            }
            s.push(b')');
            self.strings.push(s);
        }
        &self.strings[class as usize]
    }

    pub fn code(&mut self, class: u32) -> CanonicalCode {
        CanonicalCode::from_bracket(self.bracket(class))
    }
}

/// Canonical code of a rooted tree.
pub fn tree_code(t: &RootedTree) -> CanonicalCode {
    let mut interner = ShapeInterner::new();
    let class = interner.classify(t);
    interner.code(class[0])
}

/// Limits for general-graph canonicalization.
#[derive(Debug, Clone, Copy)]
pub struct CanonOptions {
    pub cap: usize,
    pub budget: usize,
}

impl Default for CanonOptions {
    fn default() -> Self {
        CanonOptions {
            cap: DEFAULT_CAP,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Canonical code with the default cap and search budget.
pub fn canonical_code(g: &RootedGraph) -> Result<CanonicalCode> {
    canonical_code_with(g, CanonOptions::default())
}

pub fn canonical_code_with(g: &RootedGraph, opts: CanonOptions) -> Result<CanonicalCode> {
    let n = g.n();
    let adj = &g.graph;
    let mut deg: Vec<usize> = adj.degrees();
    let mut removed = vec![false; n];
    let mut pending: Vec<Vec<Vec<u8>>> = vec![Vec::new(); n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| v != g.root && deg[v] == 1).collect();
    while let Some(v) = queue.pop_front() {
        if removed[v] || deg[v] != 1 {
            continue;
        }
        let p = *adj
            .neighbors(v)
            .iter()
            .find(|&&w| !removed[w])
            .expect("degree-one vertex has a live neighbor");
        let s = bracket_of(std::mem::take(&mut pending[v]));
        pending[p].push(s);
        removed[v] = true;
        deg[v] = 0;
        deg[p] -= 1;
        if p != g.root && deg[p] == 1 {
            queue.push_back(p);
        }
    }
    let core: Vec<usize> = std::iter::once(g.root)
        .chain((0..n).filter(|&v| v != g.root && !removed[v]))
        .collect();
    if core.len() == 1 && adj.loops(g.root) == 0 {
        return Ok(CanonicalCode::from_bracket(&bracket_of(std::mem::take(
            &mut pending[g.root],
        ))));
    }
    if n > opts.cap {
        return Err(Error::CanonicalCap {
            vertices: n,
            cap: opts.cap,
            origin: None,
        });
    }
    let labels: Vec<Vec<u8>> = core
        .iter()
        .map(|&v| bracket_of(std::mem::take(&mut pending[v])))
        .collect();
    let m = core.len();
    let mut mat = vec![vec![0u32; m]; m];
    let mut index = vec![usize::MAX; n];
    for (i, &v) in core.iter().enumerate() {
        index[v] = i;
    }
    for (i, &v) in core.iter().enumerate() {
        for &w in adj.neighbors(v) {
            let j = index[w];
            if j != usize::MAX {
                mat[i][j] += 1;
            }
        }
        // a loop is listed twice in the adjacency of its endpoint
        mat[i][i] /= 2;
    }
    let cert = CoreSearch::new(&labels, mat, opts.budget).run()?;
    let mut out = format!("G{m}:").into_bytes();
    out.extend_from_slice(&cert);
    Ok(CanonicalCode(out))
}

fn bracket_of(mut parts: Vec<Vec<u8>>) -> Vec<u8> {
    parts.sort_unstable();
    let mut s = vec![b'('];
    for p in parts {
        s.extend_from_slice(&p);
    }
    s.push(b')');
    s
}

/// Individualization-refinement search over a small labelled multigraph whose
/// vertex 0 is the root.
struct CoreSearch<'a> {
    labels: &'a [Vec<u8>],
    mat: Vec<Vec<u32>>,
    budget: usize,
    leaves: usize,
    best: Option<Vec<u8>>,
}

impl<'a> CoreSearch<'a> {
    fn new(labels: &'a [Vec<u8>], mat: Vec<Vec<u32>>, budget: usize) -> Self {
        CoreSearch {
            labels,
            mat,
            budget,
            leaves: 0,
            best: None,
        }
    }

    fn run(mut self) -> Result<Vec<u8>> {
        let m = self.labels.len();
        let mut keys: Vec<(u8, &[u8], u32)> = (0..m)
            .map(|v| (u8::from(v != 0), self.labels[v].as_slice(), self.mat[v][v]))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let colors: Vec<usize> = keys
            .drain(..)
            .map(|k| sorted.binary_search(&k).expect("key present"))
            .collect();
        let colors = self.refine(colors);
        self.search(colors)?;
        Ok(self.best.expect("search visits at least one leaf"))
    }

    /// Split colour classes by the multiset of neighbour colours until stable.
    /// New colours are ranks of (old colour, signature), so the order of the
    /// old classes is preserved.
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let m = colors.len();
        let mut count = distinct(&colors);
        loop {
            let sigs: Vec<(usize, Vec<(usize, u32)>)> = (0..m)
                .map(|v| {
                    let mut s: Vec<(usize, u32)> = (0..m)
                        .filter(|&u| u != v && self.mat[v][u] > 0)
                        .map(|u| (colors[u], self.mat[v][u]))
                        .collect();
                    s.sort_unstable();
                    let mut merged: Vec<(usize, u32)> = Vec::with_capacity(s.len());
                    for (c, k) in s {
                        match merged.last_mut() {
                            Some(last) if last.0 == c => last.1 += k,
                            _ => merged.push((c, k)),
                        }
                    }
                    (colors[v], merged)
                })
                .collect();
            let mut order: Vec<&(usize, Vec<(usize, u32)>)> = sigs.iter().collect();
            order.sort_unstable();
            order.dedup();
            colors = sigs
                .iter()
                .map(|s| order.binary_search(&s).expect("signature present"))
                .collect();
            let next = order.len();
            if next == count {
                return colors;
            }
            count = next;
        }
    }

    fn twins(&self, u: usize, w: usize) -> bool {
        let m = self.mat.len();
        self.mat[u][u] == self.mat[w][w] && (0..m).all(|x| x == u || x == w || self.mat[u][x] == self.mat[w][x])
    }

    fn search(&mut self, colors: Vec<usize>) -> Result<()> {
        let m = colors.len();
        let mut sizes = vec![0usize; m];
        for &c in &colors {
            sizes[c] += 1;
        }
        let Some(target) = (0..m).find(|&c| sizes[c] > 1) else {
            self.leaves += 1;
            if self.leaves > self.budget {
                return Err(Error::CanonicalBudget(self.budget));
            }
            let cert = self.certificate(&colors);
            if self.best.as_ref().is_none_or(|b| cert < *b) {
                self.best = Some(cert);
            }
            return Ok(());
        };
        let cell: Vec<usize> = (0..m).filter(|&v| colors[v] == target).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if tried.iter().any(|&u| self.twins(u, v)) {
                continue;
            }
            tried.push(v);
            let mut next: Vec<usize> = colors.iter().map(|&c| 2 * c).collect();
            next[v] += 1;
            let next = self.refine(next);
            self.search(next)?;
        }
        Ok(())
    }

    fn certificate(&self, colors: &[usize]) -> Vec<u8> {
        let m = colors.len();
        let mut order = vec![0usize; m];
        for (v, &c) in colors.iter().enumerate() {
            order[c] = v;
        }
        let mut out = Vec::new();
        for &v in &order {
            out.extend_from_slice(&self.labels[v]);
            out.push(b';');
        }
        out.push(b'|');
        for i in 0..m {
            for j in i..m {
                out.extend_from_slice(self.mat[order[i]][order[j]].to_string().as_bytes());
                out.push(b',');
            }
        }
        out
    }
}

fn distinct(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph::Graph;

    fn rooted(n: usize, e: &[(usize, usize)], root: usize) -> RootedGraph {
        RootedGraph::new(Graph::from_edges(n, e).unwrap(), root).unwrap()
    }

    #[test]
    fn star_relabeling() {
        let a = rooted(4, &[(0, 1), (0, 2), (0, 3)], 0);
        let b = rooted(4, &[(3, 1), (3, 2), (3, 0)], 3);
        assert_eq!(canonical_code(&a).unwrap(), canonical_code(&b).unwrap());
        assert_eq!(canonical_code(&a).unwrap().as_str(), "T(()()())");
    }

    #[test]
    fn path_root_position_matters() {
        let e = [(0, 1), (1, 2), (2, 3), (3, 4)];
        let end = canonical_code(&rooted(5, &e, 0)).unwrap();
        let mid = canonical_code(&rooted(5, &e, 2)).unwrap();
        assert_ne!(end, mid);
    }

    #[test]
    fn tree_code_matches_graph_code() {
        let t = RootedTree::from_growth(vec![NO_PARENT, 0, 0, 1, 1, 2]);
        assert_eq!(tree_code(&t), canonical_code(&t.to_graph()).unwrap());
        assert_eq!(tree_code(&t).to_tree().unwrap().n(), 6);
    }

    #[test]
    fn child_codes_split_top_level() {
        let c = CanonicalCode(b"T(()(()))".to_vec());
        let kids = c.child_codes().unwrap();
        assert_eq!(kids.len(), 2);
        assert_eq!(kids[0].as_str(), "T()");
        assert_eq!(kids[1].as_str(), "T(())");
        assert!(CanonicalCode(b"T(()".to_vec()).child_codes().is_err());
    }

    #[test]
    fn cycles_and_loops() {
        let tri = rooted(3, &[(0, 1), (1, 2), (2, 0)], 0);
        let tri2 = rooted(3, &[(2, 1), (1, 0), (0, 2)], 1);
        assert_eq!(canonical_code(&tri).unwrap(), canonical_code(&tri2).unwrap());
        let looped = rooted(1, &[(0, 0)], 0);
        let point = rooted(1, &[], 0);
        assert_ne!(canonical_code(&looped).unwrap(), canonical_code(&point).unwrap());
        let double = rooted(2, &[(0, 1), (0, 1)], 0);
        let single = rooted(2, &[(0, 1)], 0);
        assert_ne!(canonical_code(&double).unwrap(), canonical_code(&single).unwrap());
    }

    #[test]
    fn cap_is_enforced_for_non_trees() {
        let mut e: Vec<(usize, usize)> = (1..70).map(|i| (i - 1, i)).collect();
        e.push((69, 0));
        let g = rooted(70, &e, 0);
        assert!(matches!(
            canonical_code(&g),
            Err(Error::CanonicalCap { vertices: 70, .. })
        ));
        e.pop();
        assert!(canonical_code(&rooted(70, &e, 0)).is_ok());
    }
}
