//! PageRank on directed graphs and trees, its local limit on growing trees
//! and power-law tail estimation.

use rand::Rng;
use serde::Serialize;

use crate::branching::{ctbp_sample, malthusian_rate, thinned_malthusian_rate, Stop};
use crate::error::{Error, Result};
use crate::generators::AttachmentFn;
use crate::graph::RootedTree;

/// Directed multigraph stored as out-neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut out = vec![Vec::new(); n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::InvalidVertex { vertex: x, n });
                }
            }
            out[u].push(v);
        }
        Ok(Digraph { out })
    }

    /// Every non-root vertex points to its parent.
    pub fn from_tree(t: &RootedTree) -> Self {
        let out = (0..t.n()).map(|v| t.parent(v).into_iter().collect()).collect();
        Digraph { out }
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n()];
        for vs in &self.out {
            for &v in vs {
                d[v] += 1;
            }
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PageRankScores {
    pub damping: f64,
    /// Scores solving the linear system; they sum to at most one.
    pub raw: Vec<f64>,
    /// `n` times the raw scores.
    pub normalized: Vec<f64>,
    /// Largest change of a normalized score in the last iteration.
    pub residual: f64,
}

fn check_damping(c: f64) -> Result<()> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("damping {c} outside (0, 1)")))
    }
}

/// Solve `r_v = (1 − c)/n + c Σ_{u → v} r_u / d⁺(u)` by fixed-point
/// iteration. Vertices without out-edges pass their mass to nobody.
pub fn pagerank_linear(g: &Digraph, c: f64) -> Result<PageRankScores> {
    check_damping(c)?;
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    let base = (1.0 - c) / n as f64;
    let mut r = vec![base; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    // the map contracts by c in l1, which bounds the iterations needed
    let max_iter = ((1e-14 / n as f64).ln() / c.ln()).ceil() as usize + 10;
    for _ in 0..max_iter {
        next.fill(base);
        for (u, vs) in g.out.iter().enumerate() {
            if !vs.is_empty() {
                let share = c * r[u] / vs.len() as f64;
                for &v in vs {
                    next[v] += share;
                }
            }
        }
        residual = n as f64 * r.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut r, &mut next);
        if residual <= 1e-13 {
            break;
        }
    }
    Ok(PageRankScores {
        damping: c,
        normalized: r.iter().map(|x| x * n as f64).collect(),
        raw: r,
        residual,
    })
}

/// PageRank on a tree whose edges point from child to parent, from
/// `R_v = (1 − c)(1 + Σ_{l≥1} c^l P_l(v))` where `P_l(v)` counts descendants
/// at distance `l`. The sum stops at depth `⌈log tol / log c⌉`.
pub fn pagerank_path_counts(g: &Digraph, c: f64, tol: f64) -> Result<PageRankScores> {
    check_damping(c)?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter("tol must lie in (0, 1)".into()));
    }
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    if let Some(v) = (0..n).find(|&v| g.out_degree(v) > 1) {
        return Err(Error::InvalidParameter(format!(
            "vertex {v} has out-degree {}: not a child-to-parent tree",
            g.out_degree(v)
        )));
    }
    let parent: Vec<Option<usize>> = (0..n).map(|v| g.out[v].first().copied()).collect();
    // depth of each vertex below its root, which also rules out cycles
    let mut depth = vec![usize::MAX; n];
    for start in 0..n {
        let mut path = Vec::new();
        let mut v = start;
        while depth[v] == usize::MAX {
            path.push(v);
            if path.len() > n {
                return Err(Error::InvalidParameter("edges contain a cycle".into()));
            }
            match parent[v] {
                Some(p) => v = p,
                None => {
                    depth[v] = 0;
                    path.pop();
                    break;
                }
            }
        }
        for &u in path.iter().rev() {
            depth[u] = depth[parent[u].expect("non-root on path")] + 1;
        }
    }
    let height = depth.iter().copied().max().unwrap_or(0);
    let levels = ((tol.ln() / c.ln()).ceil() as usize).min(height);
    let mut count = vec![1.0; n];
    let mut total = vec![1.0; n];
    let mut weight = 1.0;
    let mut next = vec![0.0; n];
    for _ in 0..levels {
        weight *= c;
        next.fill(0.0);
        for v in 0..n {
            if let Some(p) = parent[v] {
                next[p] += count[v];
            }
        }
        std::mem::swap(&mut count, &mut next);
        for (t, k) in total.iter_mut().zip(&count) {
            *t += weight * k;
        }
    }
    let normalized: Vec<f64> = total.iter().map(|t| (1.0 - c) * t).collect();
    Ok(PageRankScores {
        damping: c,
        raw: normalized.iter().map(|r| r / n as f64).collect(),
        normalized,
        residual: 0.0,
    })
}

/// One draw of the limiting root PageRank on a growing tree with affine
/// attachment `f`: sample the branching process up to an independent
/// exponential time at the Malthusian rate and return
/// `(1 − c) Σ_v c^{depth(v)}`, the expected size of the root cluster after
/// keeping each edge with probability `c`, times `1 − c`.
pub fn limit_root_pagerank_sample<R: Rng + ?Sized>(f: &AttachmentFn, c: f64, cap: usize, rng: &mut R) -> Result<f64> {
    check_damping(c)?;
    let lambda = malthusian_rate(f)?.lambda;
    let t = ctbp_sample(f, Stop::ExpTime(lambda), cap, rng)?.tree;
    Ok(root_cluster_pagerank(&t, c))
}

/// `(1 − c) Σ_v c^{depth(v)}` over a rooted tree.
pub fn root_cluster_pagerank(t: &RootedTree, c: f64) -> f64 {
    (1.0 - c) * t.depths().iter().map(|&d| c.powi(d as i32)).sum::<f64>()
}

/// Exponents predicted for the in-degree and PageRank tails of the linear
/// preferential attachment tree with `f(k) = k + 1 + β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentTargets {
    pub degree: f64,
    pub pagerank: f64,
    /// Malthusian rate `2 + β`.
    pub lambda: f64,
    /// Growth rate of the percolated process, `1 + (1 + β) c`.
    pub lambda_thinned: f64,
}

pub fn exponent_targets(beta: f64, c: f64) -> ExponentTargets {
    let lambda = 2.0 + beta;
    let lambda_thinned = 1.0 + (1.0 + beta) * c;
    ExponentTargets {
        degree: lambda,
        pagerank: lambda / lambda_thinned,
        lambda,
        lambda_thinned,
    }
}

/// Same targets computed from the growth rates of the branching process and
/// of its percolation, for any attachment function.
pub fn exponent_targets_from_rates(f: &AttachmentFn, c: f64) -> Result<ExponentTargets> {
    check_damping(c)?;
    let lambda = malthusian_rate(f)?.lambda;
    let lambda_thinned = thinned_malthusian_rate(f, c)?.lambda;
    Ok(ExponentTargets {
        degree: lambda,
        pagerank: lambda / lambda_thinned,
        lambda,
        lambda_thinned,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub exponent: f64,
    /// Threshold used for the reported estimate.
    pub k_min: f64,
    /// Number of samples at or above `k_min`.
    pub tail_count: usize,
    pub samples: usize,
    pub stderr: f64,
    /// Whether a threshold was found where doubling it moves the estimate
    /// by less than 5%. Without one the data show no power-law tail.
    pub stable: bool,
    /// `(threshold, estimate)` for every threshold tried.
    pub path: Vec<(f64, f64)>,
}

/// Options for [`tail_exponent`].
#[derive(Debug, Clone, PartialEq)]
pub struct TailOptions {
    /// Thresholds to try; by default the smallest positive sample times
    /// successive powers of two.
    pub grid: Option<Vec<f64>>,
    /// Fewest exceedances a threshold needs to be used.
    pub min_tail: usize,
    pub bootstrap: usize,
}

impl Default for TailOptions {
    fn default() -> Self {
        TailOptions {
            grid: None,
            min_tail: 100,
            bootstrap: 200,
        }
    }
}

/// Hill estimate of the exponent `α` in `P(X ≥ x) ≈ C x^{-α}`. The
/// threshold is the smallest one on the grid whose estimate changes by less
/// than 5% when the threshold is doubled. Integer-valued data are treated
/// with a half-unit continuity correction. The standard error is a
/// bootstrap over the samples.
pub fn tail_exponent<R: Rng + ?Sized>(samples: &[f64], opts: &TailOptions, rng: &mut R) -> Result<TailEstimate> {
    if samples.len() < 1000 {
        return Err(Error::InsufficientTail(format!(
            "{} samples, at least 1000 needed",
            samples.len()
        )));
    }
    let mut pos: Vec<f64> = samples.iter().copied().filter(|&x| x > 0.0 && x.is_finite()).collect();
    pos.sort_unstable_by(|a, b| b.total_cmp(a));
    if pos.is_empty() {
        return Err(Error::InsufficientTail("no positive samples".into()));
    }
    let integer = pos.iter().all(|x| x.fract() == 0.0);
    let count_at_least = |u: f64| pos.partition_point(|&x| x >= u);
    let hill_at = |tail: &[f64], u: f64| -> f64 {
        let base = if integer { u - 0.5 } else { u };
        tail.len() as f64 / tail.iter().map(|x| (x / base).ln()).sum::<f64>()
    };
    let grid: Vec<f64> = match &opts.grid {
        Some(g) => g.clone(),
        None => {
            let lo = *pos.last().expect("non-empty");
            let mut g = vec![lo];
            while count_at_least(2.0 * g[g.len() - 1]) >= opts.min_tail {
                let next = 2.0 * g[g.len() - 1];
                g.push(next);
            }
            g
        }
    };
    let path: Vec<(f64, f64)> = grid
        .iter()
        .filter_map(|&u| {
            let k = count_at_least(u);
            (k >= opts.min_tail).then(|| (u, hill_at(&pos[..k], u)))
        })
        .filter(|(_, a)| a.is_finite())
        .collect();
    if path.len() < 2 {
        return Err(Error::InsufficientTail(format!(
            "only {} usable thresholds with at least {} exceedances",
            path.len(),
            opts.min_tail
        )));
    }
    let pick = path.windows(2).position(|w| (w[1].1 - w[0].1).abs() < 0.05 * w[0].1);
    let stable = pick.is_some();
    let (k_min, exponent) = path[pick.unwrap_or(path.len() - 1)];
    let k = count_at_least(k_min);
    let tail = &pos[..k];
    let n = pos.len();
    let mut boots = Vec::with_capacity(opts.bootstrap);
    for _ in 0..opts.bootstrap {
        // resample the whole data set: the tail count is binomial and the
        // exceedances are a resample of the observed tail
        let kb = binomial(n, k as f64 / n as f64, rng);
        if kb == 0 {
            continue;
        }
        let resampled: Vec<f64> = (0..kb).map(|_| tail[rng.random_range(0..k)]).collect();
        boots.push(hill_at(&resampled, k_min));
    }
    let (_, sd) = crate::stats::mean_se(&boots);
    let stderr = sd * (boots.len() as f64).sqrt();
    Ok(TailEstimate {
        exponent,
        k_min,
        tail_count: k,
        samples: samples.len(),
        stderr,
        stable,
        path,
    })
}

fn binomial<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> usize {
    use rand_distr::{Binomial, Distribution};
    Binomial::new(n as u64, p).expect("valid binomial").sample(rng) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NO_PARENT;

    #[test]
    fn single_vertex() {
        let g = Digraph::from_edges(1, &[]).unwrap();
        let s = pagerank_linear(&g, 0.3).unwrap();
        assert!((s.raw[0] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn hub_with_leaves() {
        let c = 0.4;
        for k in 1..5 {
            let edges: Vec<(usize, usize)> = (1..=k).map(|v| (v, 0)).collect();
            let g = Digraph::from_edges(k + 1, &edges).unwrap();
            let s = pagerank_linear(&g, c).unwrap();
            assert!((s.normalized[0] - (1.0 - c) * (1.0 + k as f64 * c)).abs() < 1e-12);
        }
    }

    #[test]
    fn path_counts_on_a_path() {
        let c = 0.6;
        let t = RootedTree::from_growth(vec![NO_PARENT, 0, 1]);
        let g = Digraph::from_tree(&t);
        let s = pagerank_path_counts(&g, c, 1e-15).unwrap();
        assert!((s.normalized[0] - (1.0 - c) * (1.0 + c + c * c)).abs() < 1e-15);
        assert!((s.normalized[2] - (1.0 - c)).abs() < 1e-15);
        assert!((root_cluster_pagerank(&t, c) - s.normalized[0]).abs() < 1e-15);
    }

    #[test]
    fn path_counts_reject_non_trees() {
        let g = Digraph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        assert!(pagerank_path_counts(&g, 0.5, 1e-9).is_err());
        let g = Digraph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        assert!(pagerank_path_counts(&g, 0.5, 1e-9).is_err());
        assert!(pagerank_linear(&g, 1.0).is_err());
    }

    #[test]
    fn targets() {
        let t = exponent_targets(1.0, 0.5);
        assert_eq!((t.degree, t.pagerank), (3.0, 1.5));
        let t = exponent_targets(0.0, 0.5);
        assert!((t.pagerank - 4.0 / 3.0).abs() < 1e-15);
        let r = exponent_targets_from_rates(&AttachmentFn::linear(1.0), 0.5).unwrap();
        assert!((r.pagerank - 1.5).abs() < 1e-12);
    }
}
