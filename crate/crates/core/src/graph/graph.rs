use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};

/// Finite undirected multigraph stored as sorted neighbor lists.
///
/// Parallel edges repeat the neighbor; a self-loop at `v` lists `v` twice in
/// its own adjacency so that it contributes 2 to the degree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Build from an undirected edge list. `(v, v)` adds a self-loop.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::InvalidVertex { vertex: x, n });
                }
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { adj })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edge list with `u <= v`, one entry per edge (multiplicity repeated).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (u, list) in self.adj.iter().enumerate() {
            let mut loop_seen = false;
            for &v in list {
                if v > u {
                    out.push((u, v));
                } else if v == u {
                    // each loop appears twice in the list
                    if loop_seen {
                        out.push((u, u));
                    }
                    loop_seen = !loop_seen;
                }
            }
        }
        out
    }

    /// Number of self-loops at `v`.
    pub fn loops(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&u| u == v).count() / 2
    }

    /// Multiplicity of the edge `{u, v}` (`u != v`).
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        let list = &self.adj[u];
        let lo = list.partition_point(|&x| x < v);
        let hi = list.partition_point(|&x| x <= v);
        if u == v {
            (hi - lo) / 2
        } else {
            hi - lo
        }
    }

    pub fn is_simple(&self) -> bool {
        self.adj
            .iter()
            .enumerate()
            .all(|(u, l)| l.windows(2).all(|w| w[0] != w[1]) && !l.contains(&u))
    }

    fn check(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            Err(Error::InvalidVertex { vertex: v, n: self.n() })
        } else {
            Ok(())
        }
    }

    /// BFS distances from `src`, `usize::MAX` for unreachable vertices.
    pub fn distances(&self, src: usize) -> Result<Vec<usize>> {
        self.check(src)?;
        let mut dist = vec![usize::MAX; self.n()];
        dist[src] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(u) = q.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// Induced subgraph on the vertices within distance `radius` of `center`,
    /// rooted at `center` which becomes vertex 0; other vertices are numbered
    /// in BFS order.
    pub fn ball(&self, center: usize, radius: usize) -> Result<RootedGraph> {
        self.check(center)?;
        let mut scratch = BallScratch::new(self.n());
        Ok(self.ball_with(center, radius, &mut scratch))
    }

    pub(crate) fn ball_with(&self, center: usize, radius: usize, scratch: &mut BallScratch) -> RootedGraph {
        let order = scratch.collect(self, center, radius);
        let mut adj = vec![Vec::new(); order.len()];
        for (i, &u) in order.iter().enumerate() {
            for &w in &self.adj[u] {
                let j = scratch.index[w];
                if j != usize::MAX {
                    adj[i].push(j);
                }
            }
            adj[i].sort_unstable();
        }
        scratch.clear(&order);
        RootedGraph {
            graph: Graph { adj },
            root: 0,
        }
    }

    /// Vertices of the connected component of `v`, in BFS order.
    pub fn component(&self, v: usize) -> Result<Vec<usize>> {
        let dist = self.distances(v)?;
        let mut order: Vec<usize> = (0..self.n()).filter(|&u| dist[u] != usize::MAX).collect();
        order.sort_by_key(|&u| (dist[u], u));
        Ok(order)
    }

    /// Induced subgraph on `vertices`; vertex `vertices[i]` becomes `i`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let adj = vertices
            .iter()
            .map(|&u| {
                let mut l: Vec<usize> = self.adj[u]
                    .iter()
                    .filter_map(|&w| (index[w] != usize::MAX).then_some(index[w]))
                    .collect();
                l.sort_unstable();
                l
            })
            .collect();
        Graph { adj }
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.component(0).map(|c| c.len() == self.n()).unwrap_or(false)
    }

    /// A connected simple graph with `n - 1` edges.
    pub fn is_tree(&self) -> bool {
        self.n() > 0 && self.num_edges() == self.n() - 1 && self.is_simple() && self.is_connected()
    }
}

/// Reusable BFS buffers so that repeated ball extraction on a large graph
/// does not allocate O(n) per call.
pub(crate) struct BallScratch {
    index: Vec<usize>,
}

impl BallScratch {
    pub(crate) fn new(n: usize) -> Self {
        BallScratch {
            index: vec![usize::MAX; n],
        }
    }

    fn collect(&mut self, g: &Graph, center: usize, radius: usize) -> Vec<usize> {
        let mut order = vec![center];
        self.index[center] = 0;
        let mut frontier = 0;
        for _ in 0..radius {
            let end = order.len();
            if frontier == end {
                break;
            }
            for i in frontier..end {
                let u = order[i];
                for &w in &g.adj[u] {
                    if self.index[w] == usize::MAX {
                        self.index[w] = order.len();
                        order.push(w);
                    }
                }
            }
            frontier = end;
        }
        order
    }

    fn clear(&mut self, order: &[usize]) {
        for &u in order {
            self.index[u] = usize::MAX;
        }
    }
}

/// A graph with a distinguished root vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedGraph {
    pub graph: Graph,
    pub root: usize,
}

impl RootedGraph {
    pub fn new(graph: Graph, root: usize) -> Result<Self> {
        graph.check(root)?;
        Ok(RootedGraph { graph, root })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Ball of radius `r` around the root.
    pub fn ball(&self, r: usize) -> RootedGraph {
        self.graph.ball(self.root, r).expect("root is a valid vertex")
    }
}

/// Pick a uniform vertex and return its connected component rooted there.
pub fn standard_construction<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<RootedGraph> {
    if g.n() == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    let v = rng.random_range(0..g.n());
    let comp = g.component(v)?;
    Ok(RootedGraph {
        graph: g.induced(&comp),
        root: 0,
    })
}
