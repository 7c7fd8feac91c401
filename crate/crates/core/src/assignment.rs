//! Minimum-cost assignment, the random assignment experiment, the logistic
//! fixed point and greedy matching on the Poisson weighted infinite tree.

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branching::pwit_sample;
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::stats;

pub const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    costs: Vec<f64>,
}

impl CostMatrix {
    /// Row-major `n × n` matrix.
    pub fn new(n: usize, costs: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("empty cost matrix".into()));
        }
        if costs.len() != n * n {
            return Err(Error::InvalidParameter(format!(
                "{} entries for a {n}x{n} matrix",
                costs.len()
            )));
        }
        if let Some(c) = costs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite cost {c}")));
        }
        Ok(CostMatrix { n, costs })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("cost matrix must be square".into()));
        }
        Self::new(n, rows.concat())
    }

    /// IID exponential costs with the given mean.
    pub fn exponential<R: Rng + ?Sized>(n: usize, mean: f64, rng: &mut R) -> Result<Self> {
        let costs = (0..n * n)
            .map(|_| mean * Distribution::<f64>::sample(&Exp1, rng))
            .collect();
        Self::new(n, costs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.costs[i * self.n + j]
    }

    pub fn cost_of(&self, perm: &[usize]) -> f64 {
        perm.iter().enumerate().map(|(i, &j)| self.get(i, j)).sum()
    }
}

/// An assignment row `i` ↦ column `perm[i]` together with the dual
/// potentials that certify it.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub perm: Vec<usize>,
    pub total_cost: f64,
    pub row_potential: Vec<f64>,
    pub col_potential: Vec<f64>,
}

impl Matching {
    /// Largest violation of dual feasibility or complementary slackness.
    pub fn slackness_residual(&self, m: &CostMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..m.n() {
            for j in 0..m.n() {
                let reduced = m.get(i, j) - self.row_potential[i] - self.col_potential[j];
                worst = worst.max(-reduced);
                if self.perm[i] == j {
                    worst = worst.max(reduced.abs());
                }
            }
        }
        worst
    }
}

/// Exact minimum-cost assignment by shortest augmenting paths with
/// potentials, O(n³). Among optimal permutations the lexicographically
/// smallest is returned.
pub fn optimal_assignment(m: &CostMatrix) -> Matching {
    let n = m.n();
    let inf = f64::INFINITY;
    // 1-indexed arrays, column 0 is the virtual start
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = m.get(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        while j0 != 0 {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        }
    }
    let mut perm = vec![0; n];
    for j in 1..=n {
        perm[owner[j] - 1] = j - 1;
    }
    let row_potential: Vec<f64> = u[1..].to_vec();
    let col_potential: Vec<f64> = v[1..].to_vec();
    lexicographic_optimum(m, &mut perm, &row_potential, &col_potential);
    Matching {
        total_cost: m.cost_of(&perm),
        perm,
        row_potential,
        col_potential,
    }
}

/// Move to the lexicographically smallest perfect matching of the equality
/// subgraph: every such matching is optimal under the same potentials.
fn lexicographic_optimum(m: &CostMatrix, perm: &mut [usize], u: &[f64], v: &[f64]) {
    let n = m.n();
    let scale = 1.0 + m.costs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let tight = |i: usize, j: usize| (m.get(i, j) - u[i] - v[j]).abs() <= 1e-9 * scale;
    let mut col_owner = vec![0; n];
    for (i, &j) in perm.iter().enumerate() {
        col_owner[j] = i;
    }
    let mut locked = vec![false; n];
    for i in 0..n {
        for j in 0..perm[i] {
            if locked[j] || !tight(i, j) {
                continue;
            }
            // give column j to row i; its previous owner must reach the freed
            // column through an alternating path among unlocked columns
            let freed = perm[i];
            let start = col_owner[j];
            let mut prev_col = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            seen[j] = true;
            let mut queue = std::collections::VecDeque::from([start]);
            let mut found = None;
            'bfs: while let Some(r) = queue.pop_front() {
                for c in 0..n {
                    if seen[c] || locked[c] || !tight(r, c) {
                        continue;
                    }
                    seen[c] = true;
                    prev_col[c] = r;
                    if c == freed {
                        found = Some(c);
                        break 'bfs;
                    }
                    if col_owner[c] != i {
                        queue.push_back(col_owner[c]);
                    }
                }
            }
            if let Some(mut c) = found {
                while c != usize::MAX {
                    let r = prev_col[c];
                    let next = if r == start { usize::MAX } else { perm[r] };
                    perm[r] = c;
                    col_owner[c] = r;
                    c = next;
                }
                perm[i] = j;
                col_owner[j] = i;
                break;
            }
        }
        locked[perm[i]] = true;
    }
}

/// How random costs are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CostScaling {
    /// Exponential costs with mean `n`.
    #[default]
    MeanN,
    /// Exponential costs with mean one, multiplied by `n`.
    MeanOne,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssignmentEstimate {
    pub n: usize,
    pub replicas: usize,
    /// Replica mean of `A_n / n`.
    pub mean: f64,
    pub se: f64,
    /// Normal 95% interval.
    pub ci: (f64, f64),
    pub target: f64,
}

/// Replica mean of the optimal assignment cost divided by `n`. Replicas run
/// in parallel on streams seeded from `rng` in index order.
pub fn random_assignment_experiment<R: Rng + ?Sized>(
    n: usize,
    replicas: usize,
    scaling: CostScaling,
    rng: &mut R,
) -> Result<AssignmentEstimate> {
    if n == 0 || replicas == 0 {
        return Err(Error::InvalidParameter("n and replicas must be positive".into()));
    }
    let seeds: Vec<u64> = (0..replicas).map(|_| rng.random()).collect();
    let values: Vec<f64> = seeds
        .par_iter()
        .map(|&s| {
            let mut r = StreamRng::seed_from_u64(s);
            let m = match scaling {
                CostScaling::MeanN => CostMatrix::exponential(n, n as f64, &mut r),
                CostScaling::MeanOne => CostMatrix::exponential(n, 1.0, &mut r).map(|m| {
                    let scaled = m.costs.iter().map(|c| c * n as f64).collect();
                    CostMatrix { n, costs: scaled }
                }),
            }
            .expect("exponential costs are finite");
            optimal_assignment(&m).total_cost / n as f64
        })
        .collect();
    let (mean, se) = stats::mean_se(&values);
    let se = if se.is_nan() { 0.0 } else { se };
    Ok(AssignmentEstimate {
        n,
        replicas,
        mean,
        se,
        ci: (mean - 1.96 * se, mean + 1.96 * se),
        target: ZETA2,
    })
}

/// Logistic density `(e^{x/2} + e^{-x/2})^{-2}`.
pub fn logistic_density(x: f64) -> f64 {
    let h = (x.abs() / 2.0).exp();
    1.0 / (h + 1.0 / h).powi(2)
}

pub fn logistic_cdf(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticOptions {
    pub pool_size: usize,
    pub sweeps: usize,
    /// Number of Poisson points kept in each minimum.
    pub cutoff: usize,
    /// Fraction trimmed from each end of the pool after every sweep.
    pub temper: f64,
    /// Convergence threshold on the Kolmogorov distance between the last
    /// two pools. Pools too small to resolve it are held to the 99%
    /// two-sample critical value `1.63·sqrt(2/N)` instead.
    pub tol: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        LogisticOptions {
            pool_size: 100_000,
            sweeps: 60,
            cutoff: 30,
            temper: 1e-6,
            tol: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogisticPool {
    pub values: Vec<f64>,
    pub sweeps: usize,
    /// Kolmogorov distance between the last two pools.
    pub last_change: f64,
    pub converged: bool,
    /// Fraction of updates in the final sweep whose minimum sat at the last
    /// kept point.
    pub cutoff_hits: f64,
    /// Mean of the last kept Poisson point minus the pool range.
    pub cutoff_margin: f64,
}

/// Population dynamics for `X = min_{i≤M} (ξ_i − X_i)` with `ξ` a rate-one
/// Poisson process. After each sweep the new pool is relocated to the mean
/// of the old and new locations: the map sends a shift by `c` to a shift by
/// `−c`, so without this the location wanders with the sampling noise.
pub fn logistic_rde_solve<R: Rng + ?Sized>(opts: &LogisticOptions, rng: &mut R) -> Result<LogisticPool> {
    let n = opts.pool_size;
    let m = opts.cutoff;
    if n < 2 || m == 0 || opts.sweeps == 0 {
        return Err(Error::InvalidParameter(
            "pool size, cutoff and sweeps must be positive".into(),
        ));
    }
    if !(0.0..0.5).contains(&opts.temper) {
        return Err(Error::InvalidParameter("temper must be in [0, 0.5)".into()));
    }
    let mut pool: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let mut next = vec![0.0; n];
    let mut last_change = 1.0;
    let mut hits = 0usize;
    for _ in 0..opts.sweeps {
        hits = 0;
        for slot in next.iter_mut() {
            let mut xi = 0.0;
            let mut best = f64::INFINITY;
            let mut at = 0;
            for i in 0..m {
                xi += Distribution::<f64>::sample(&Exp1, rng);
                let cand = xi - pool[rng.random_range(0..n)];
                if cand < best {
                    best = cand;
                    at = i;
                }
            }
            hits += usize::from(at + 1 == m);
            *slot = best;
        }
        let old_mean = pool.iter().sum::<f64>() / n as f64;
        let new_mean = next.iter().sum::<f64>() / n as f64;
        let shift = (old_mean - new_mean) / 2.0;
        for x in next.iter_mut() {
            *x += shift;
        }
        temper(&mut next, opts.temper, rng);
        last_change = stats::ks_two_sample(&pool, &next);
        std::mem::swap(&mut pool, &mut next);
    }
    let cutoff_hits = hits as f64 / n as f64;
    if cutoff_hits > 1e-3 {
        return Err(Error::InvalidParameter(format!(
            "cutoff {m} too small: minimum attained at the last point in {:.2}% of updates",
            100.0 * cutoff_hits
        )));
    }
    let (lo, hi) = pool
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    Ok(LogisticPool {
        values: pool,
        sweeps: opts.sweeps,
        last_change,
        converged: last_change <= opts.tol.max(1.63 * (2.0 / n as f64).sqrt()),
        cutoff_hits,
        cutoff_margin: m as f64 - (hi - lo),
    })
}

/// Replace values outside the central `1 − 2q` quantile range with fresh
/// draws from inside it.
fn temper<R: Rng + ?Sized>(pool: &mut [f64], q: f64, rng: &mut R) {
    if q == 0.0 {
        return;
    }
    let s = stats::sorted(pool);
    let lo = stats::quantile_sorted(&s, q);
    let hi = stats::quantile_sorted(&s, 1.0 - q);
    let inside: Vec<f64> = s.iter().copied().filter(|x| (lo..=hi).contains(x)).collect();
    for x in pool.iter_mut() {
        if *x < lo || *x > hi {
            *x = inside[rng.random_range(0..inside.len())];
        }
    }
}

pub enum ZetaSource<'a> {
    /// Numerical integration of the exact tail of a sum of two logistics.
    Analytic,
    /// Monte Carlo over independent pairs drawn from a converged pool.
    Pool { pool: &'a LogisticPool, pairs: usize },
}

/// `∫₀^∞ x P(X₁ + X₂ > x) dx` for independent `X₁, X₂`. Returns the value
/// and a standard error (zero for the analytic mode).
pub fn zeta2_integral<R: Rng + ?Sized>(source: ZetaSource<'_>, rng: &mut R) -> Result<(f64, f64)> {
    match source {
        ZetaSource::Analytic => Ok((simpson(|x| x * logistic_sum_tail(x), 0.0, 60.0, 1200), 0.0)),
        ZetaSource::Pool { pool, pairs } => {
            if !pool.converged {
                return Err(Error::NonConvergence(format!(
                    "logistic pool still moving (last change {:.4})",
                    pool.last_change
                )));
            }
            if pool.values.is_empty() || pairs < 2 {
                return Err(Error::InvalidParameter("need a pool and at least two pairs".into()));
            }
            let v = &pool.values;
            // the integral of x over [0, s] for each sampled sum s
            let contrib: Vec<f64> = (0..pairs)
                .map(|_| {
                    let s = v[rng.random_range(0..v.len())] + v[rng.random_range(0..v.len())];
                    if s > 0.0 {
                        s * s / 2.0
                    } else {
                        0.0
                    }
                })
                .collect();
            Ok(stats::mean_se(&contrib))
        }
    }
}

/// `P(X₁ + X₂ > x)` for independent standard logistics, by quadrature of
/// `∫ f(y) (1 − F(x − y)) dy`.
pub fn logistic_sum_tail(x: f64) -> f64 {
    simpson(
        |y| logistic_density(y) * logistic_cdf(y - x),
        x / 2.0 - 45.0,
        x / 2.0 + 45.0,
        1800,
    )
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let steps = steps + steps % 2;
    let h = (b - a) / steps as f64;
    let mut s = f(a) + f(b);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyMatching {
    /// `mate[v]` for every vertex of the sampled tree.
    pub mate: Vec<Option<usize>>,
    /// Weight of the edge matched at the root, if any.
    pub root_weight: Option<f64>,
}

/// Top-down greedy matching on a weighted tree: each vertex still unmatched
/// when reached takes its lightest child.
pub fn pwit_greedy_matching(t: &crate::graph::RootedTree) -> Result<GreedyMatching> {
    let w = t
        .edge_weights
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("tree carries no edge weights".into()))?;
    let mut mate = vec![None; t.n()];
    for v in t.preorder() {
        if mate[v].is_some() {
            continue;
        }
        let best = t.children(v).iter().copied().min_by(|&a, &b| w[a].total_cmp(&w[b]));
        if let Some(c) = best {
            mate[v] = Some(c);
            mate[c] = Some(v);
        }
    }
    let root_weight = mate[0].map(|c| w[c]);
    Ok(GreedyMatching { mate, root_weight })
}

/// Mean and standard error of the greedy root edge weight over independent
/// PWIT samples of the given depth.
pub fn greedy_root_weight<R: Rng + ?Sized>(samples: usize, depth: usize, rng: &mut R) -> Result<(f64, f64)> {
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let mut ws = Vec::with_capacity(samples);
    for _ in 0..samples {
        let t = pwit_sample(depth, 12.0, rng)?;
        // a root with no child below the cutoff is left out
        if let Some(w) = pwit_greedy_matching(&t)?.root_weight {
            ws.push(w);
        }
    }
    Ok(stats::mean_se(&ws))
}
