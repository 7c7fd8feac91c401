use crate::error::{Error, Result};
use crate::graph::graph::{Graph, RootedGraph};

/// Parent value stored for the root.
pub const NO_PARENT: usize = usize::MAX;

/// Rooted tree stored as a parent array with the root at index 0.
///
/// Optional per-vertex data: an attribute mark, a birth time (continuous-time
/// embeddings) and the weight of the edge to the parent (weighted trees).
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree {
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    pub marks: Option<Vec<u32>>,
    pub birth_times: Option<Vec<f64>>,
    pub edge_weights: Option<Vec<f64>>,
}

impl RootedTree {
    /// Single vertex.
    pub fn point() -> Self {
        Self::from_growth(vec![NO_PARENT])
    }

    /// Tree whose vertices were added in order, so `parent[v] < v` for `v > 0`.
    /// Panics otherwise; this is the fast path used by the generators.
    pub fn from_growth(parent: Vec<usize>) -> Self {
        let n = parent.len();
        assert!(n > 0 && parent[0] == NO_PARENT, "root must be vertex 0");
        let mut counts = vec![0usize; n];
        for v in 1..n {
            assert!(parent[v] < v, "vertex {v} attached to a later vertex");
            counts[parent[v]] += 1;
        }
        let mut children: Vec<Vec<usize>> = counts.into_iter().map(Vec::with_capacity).collect();
        for v in 1..n {
            children[parent[v]].push(v);
        }
        RootedTree {
            parent,
            children,
            marks: None,
            birth_times: None,
            edge_weights: None,
        }
    }

    /// Validate an arbitrary parent array: vertex 0 is the only root and
    /// every vertex reaches it.
    pub fn from_parents(parent: Vec<usize>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::Parse("tree must have at least one vertex".into()));
        }
        if parent[0] != NO_PARENT {
            return Err(Error::Parse("vertex 0 must be the root".into()));
        }
        let mut children = vec![Vec::new(); n];
        for (v, &p) in parent.iter().enumerate().skip(1) {
            if p >= n {
                return Err(Error::InvalidVertex { vertex: p, n });
            }
            children[p].push(v);
        }
        let mut seen = 1;
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            for &c in &children[u] {
                seen += 1;
                stack.push(c);
            }
            if seen > n {
                break;
            }
        }
        if seen != n {
            return Err(Error::Parse("parent array contains a cycle".into()));
        }
        Ok(RootedTree {
            parent,
            children,
            marks: None,
            birth_times: None,
            edge_weights: None,
        })
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        let p = self.parent[v];
        (p != NO_PARENT).then_some(p)
    }

    pub fn parents(&self) -> &[usize] {
        &self.parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn check(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::InvalidVertex { vertex: v, n: self.n() })
        }
    }

    /// Vertices in an order where every parent precedes its children.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n());
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children[u].iter().rev());
        }
        out
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.n()];
        for u in self.preorder() {
            for &c in &self.children[u] {
                d[c] = d[u] + 1;
            }
        }
        d
    }

    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Number of vertices in the subtree below each vertex (itself included).
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut s = vec![1; self.n()];
        for u in self.preorder().into_iter().rev() {
            if let Some(p) = self.parent(u) {
                s[p] += s[u];
            }
        }
        s
    }

    /// The subtree below `v`, re-rooted at `v` and compacted in preorder.
    /// Marks, birth times and edge weights are carried over.
    pub fn subtree(&self, v: usize) -> Result<RootedTree> {
        self.check(v)?;
        let mut order = vec![v];
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            order.extend_from_slice(&self.children[u]);
            i += 1;
        }
        Ok(self.restrict(&order))
    }

    /// Tree induced on `order`, which must list a connected vertex set with
    /// each parent before its children; `order[0]` becomes the root.
    pub(crate) fn restrict(&self, order: &[usize]) -> RootedTree {
        let mut index = std::collections::HashMap::with_capacity(order.len());
        for (i, &u) in order.iter().enumerate() {
            index.insert(u, i);
        }
        let parent: Vec<usize> = order
            .iter()
            .enumerate()
            .map(|(i, &u)| if i == 0 { NO_PARENT } else { index[&self.parent[u]] })
            .collect();
        let mut t = RootedTree::from_growth(parent);
        t.marks = self.marks.as_ref().map(|m| order.iter().map(|&u| m[u]).collect());
        t.birth_times = self.birth_times.as_ref().map(|b| order.iter().map(|&u| b[u]).collect());
        t.edge_weights = self.edge_weights.as_ref().map(|w| {
            order
                .iter()
                .enumerate()
                .map(|(i, &u)| if i == 0 { 0.0 } else { w[u] })
                .collect()
        });
        t
    }

    /// Undirected view rooted at vertex 0.
    pub fn to_graph(&self) -> RootedGraph {
        let edges: Vec<(usize, usize)> = (1..self.n()).map(|v| (self.parent[v], v)).collect();
        RootedGraph {
            graph: Graph::from_edges(self.n(), &edges).expect("parent ids are in range"),
            root: 0,
        }
    }

    /// Directed edges child -> parent.
    pub fn edges_to_parent(&self) -> Vec<(usize, usize)> {
        (1..self.n()).map(|v| (v, self.parent[v])).collect()
    }

    /// Rebuild a rooted tree from an undirected tree graph by BFS from the root.
    pub fn from_graph(g: &RootedGraph) -> Result<RootedTree> {
        if !g.graph.is_tree() {
            return Err(Error::InvalidParameter("graph is not a tree".into()));
        }
        let order = g.graph.component(g.root)?;
        let mut index = vec![usize::MAX; g.n()];
        for (i, &u) in order.iter().enumerate() {
            index[u] = i;
        }
        let mut parent = vec![NO_PARENT; g.n()];
        for &u in &order {
            for &w in g.graph.neighbors(u) {
                if index[w] > index[u] && parent[index[w]] == NO_PARENT {
                    parent[index[w]] = index[u];
                }
            }
        }
        Ok(RootedTree::from_growth(parent))
    }
}
