//! Ferromagnetic Ising model: exact enumeration on small graphs, the exact
//! field recursion on trees, population dynamics for the local-field
//! fixed point on unimodular trees and the limiting free energy.

use rand::Rng;
use serde::Serialize;

use crate::branching::size_biased;
use crate::error::{Error, Result};
use crate::generators::DegreePmf;
use crate::graph::{Graph, RootedTree};
use crate::stats;

/// Largest graph handled by exact enumeration.
pub const ENUMERATION_CAP: usize = 22;

const ATANH_CLAMP: f64 = 1.0 - 1e-15;

/// External field: one value for all vertices or one per vertex.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Uniform(f64),
    PerVertex(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsingParams {
    pub beta: f64,
    pub field: Field,
}

impl IsingParams {
    pub fn uniform(beta: f64, b: f64) -> Self {
        IsingParams {
            beta,
            field: Field::Uniform(b),
        }
    }

    pub fn field_at(&self, v: usize) -> f64 {
        match &self.field {
            Field::Uniform(b) => *b,
            Field::PerVertex(bs) => bs[v],
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::InvalidParameter("beta must be finite and >= 0".into()));
        }
        if let Field::PerVertex(bs) = &self.field {
            if bs.len() != n {
                return Err(Error::InvalidParameter(format!("{} fields for {n} vertices", bs.len())));
            }
        }
        Ok(())
    }
}

/// Boundary condition for exact enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Boundary {
    Free,
    /// Spins on these vertices are fixed to +1.
    Plus(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsSummary {
    pub log_z: f64,
    /// `log Z / n`.
    pub phi: f64,
    pub magnetization: Vec<f64>,
    pub pair_correlations: Vec<((usize, usize), f64)>,
    pub boundary: Boundary,
}

/// `atanh(tanh β · tanh h)`: the field a neighbour with cavity field `h`
/// exerts through an edge of strength `β`.
pub fn edge_field(beta: f64, h: f64) -> f64 {
    let x = (beta.tanh() * h.tanh()).clamp(-ATANH_CLAMP, ATANH_CLAMP);
    // f64::atanh is not exactly odd near ±1; keep the spin-flip symmetry exact
    x.signum() * x.abs().atanh()
}

/// Exact Gibbs summary by summing over all spin configurations with weight
/// `exp(β Σ_{uv} x_u x_v + Σ_u B_u x_u)` (each parallel edge counted, a
/// self-loop adding the constant β).
pub fn exact_gibbs(
    g: &Graph,
    params: &IsingParams,
    boundary: &Boundary,
    pairs: &[(usize, usize)],
) -> Result<GibbsSummary> {
    let n = g.n();
    params.validate(n)?;
    if n > ENUMERATION_CAP {
        return Err(Error::SizeCap {
            size: n,
            cap: ENUMERATION_CAP,
        });
    }
    let fixed: Vec<bool> = match boundary {
        Boundary::Free => vec![false; n],
        Boundary::Plus(set) => {
            let mut f = vec![false; n];
            for &v in set {
                if v >= n {
                    return Err(Error::InvalidVertex { vertex: v, n });
                }
                f[v] = true;
            }
            f
        }
    };
    for &(u, v) in pairs {
        for x in [u, v] {
            if x >= n {
                return Err(Error::InvalidVertex { vertex: x, n });
            }
        }
    }
    let free: Vec<usize> = (0..n).filter(|&v| !fixed[v]).collect();
    let beta = params.beta;
    let fields: Vec<f64> = (0..n).map(|v| params.field_at(v)).collect();
    let edges = g.edges();
    let loops = edges.iter().filter(|(u, v)| u == v).count() as f64;
    let proper: Vec<(usize, usize)> = edges.into_iter().filter(|(u, v)| u != v).collect();

    // start from all +1 and walk a Gray code over the free spins
    let mut x = vec![1i8; n];
    let mut energy = beta * (proper.len() as f64 + loops) + fields.iter().sum::<f64>();
    let mut local = vec![0.0; n];
    for &(u, v) in &proper {
        local[u] += beta;
        local[v] += beta;
    }
    // online log-sum-exp: all sums are scaled by exp(-max)
    let mut max = energy;
    let mut z = 0.0;
    let mut mag = vec![0.0; n];
    let mut corr = vec![0.0; pairs.len()];
    let total = 1u64 << free.len();
    for step in 0..total {
        if step > 0 {
            let i = free[step.trailing_zeros() as usize];
            let xi = f64::from(x[i]);
            energy -= 2.0 * xi * (local[i] + fields[i]);
            x[i] = -x[i];
            for &w in g.neighbors(i) {
                if w != i {
                    local[w] -= 2.0 * beta * xi;
                }
            }
        }
        if energy > max {
            let s = (max - energy).exp();
            z *= s;
            for m in &mut mag {
                *m *= s;
            }
            for c in &mut corr {
                *c *= s;
            }
            max = energy;
        }
        let w = (energy - max).exp();
        z += w;
        for (m, &xi) in mag.iter_mut().zip(&x) {
            *m += w * f64::from(xi);
        }
        for (c, &(u, v)) in corr.iter_mut().zip(pairs) {
            *c += w * f64::from(x[u] * x[v]);
        }
    }
    let log_z = max + z.ln();
    Ok(GibbsSummary {
        log_z,
        phi: log_z / n as f64,
        magnetization: mag.iter().map(|m| m / z).collect(),
        pair_correlations: pairs.iter().copied().zip(corr.iter().map(|c| c / z)).collect(),
        boundary: boundary.clone(),
    })
}

/// Effective fields on a tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeFields {
    /// Field at `v` in the Ising model on the subtree below `v`.
    pub subtree: Vec<f64>,
    /// Field at `v` in the Ising model on the whole tree.
    pub full: Vec<f64>,
}

impl TreeFields {
    pub fn root_magnetization(&self) -> f64 {
        self.full[0].tanh()
    }

    pub fn magnetization(&self) -> Vec<f64> {
        self.full.iter().map(|h| h.tanh()).collect()
    }
}

/// Bottom-up recursion `h_v = B_v + Σ_c edge_field(β, h_c)`, followed by a
/// top-down pass adding the contribution of the parent's side.
pub fn tree_local_fields(t: &RootedTree, params: &IsingParams) -> Result<TreeFields> {
    params.validate(t.n())?;
    let beta = params.beta;
    let order = t.preorder();
    let n = t.n();
    let mut incoming = vec![0.0; n];
    let mut sub = vec![0.0; n];
    for &v in order.iter().rev() {
        sub[v] = params.field_at(v) + incoming[v];
        if let Some(p) = t.parent(v) {
            incoming[p] += edge_field(beta, sub[v]);
        }
    }
    let mut up = vec![0.0; n];
    let mut full = vec![0.0; n];
    for &v in &order {
        let from_parent = if t.parent(v).is_some() {
            edge_field(beta, up[v])
        } else {
            0.0
        };
        full[v] = sub[v] + from_parent;
        for &c in t.children(v) {
            up[c] = full[v] - edge_field(beta, sub[c]);
        }
    }
    Ok(TreeFields { subtree: sub, full })
}

/// Largest absolute difference between the exact joint law of the root and
/// its children and the law of the star obtained by replacing each child's
/// subtree with the field `atanh(magnetization of the child in its subtree)`.
pub fn pruning_check(t: &RootedTree, params: &IsingParams) -> Result<f64> {
    params.validate(t.n())?;
    if t.n() > 15 {
        return Err(Error::SizeCap { size: t.n(), cap: 15 });
    }
    let kids = t.children(0).to_vec();
    let d = kids.len();
    let g = t.to_graph().graph;
    let exact = joint_marginal(
        &g,
        params,
        &std::iter::once(0).chain(kids.iter().copied()).collect::<Vec<_>>(),
    )?;
    let mut star_fields = vec![params.field_at(0)];
    for &c in &kids {
        let sub = t.subtree(c)?;
        let sub_params = IsingParams {
            beta: params.beta,
            field: match &params.field {
                Field::Uniform(b) => Field::Uniform(*b),
                Field::PerVertex(_) => {
                    let mut order = vec![c];
                    let mut i = 0;
                    while i < order.len() {
                        order.extend_from_slice(t.children(order[i]));
                        i += 1;
                    }
                    Field::PerVertex(order.iter().map(|&u| params.field_at(u)).collect())
                }
            },
        };
        let m = exact_gibbs(&sub.to_graph().graph, &sub_params, &Boundary::Free, &[])?.magnetization[0];
        star_fields.push(m.clamp(-ATANH_CLAMP, ATANH_CLAMP).atanh());
    }
    let star_edges: Vec<(usize, usize)> = (1..=d).map(|i| (0, i)).collect();
    let star = Graph::from_edges(d + 1, &star_edges)?;
    let star_params = IsingParams {
        beta: params.beta,
        field: Field::PerVertex(star_fields),
    };
    let approx = joint_marginal(&star, &star_params, &(0..=d).collect::<Vec<_>>())?;
    Ok(exact
        .iter()
        .zip(&approx)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Exact joint law of the spins on `vars`, indexed by the bit pattern
/// (bit i set means `vars[i]` is +1).
fn joint_marginal(g: &Graph, params: &IsingParams, vars: &[usize]) -> Result<Vec<f64>> {
    let n = g.n();
    if n > ENUMERATION_CAP {
        return Err(Error::SizeCap {
            size: n,
            cap: ENUMERATION_CAP,
        });
    }
    let edges: Vec<(usize, usize)> = g.edges();
    let mut logw = Vec::with_capacity(1 << n);
    let mut keys = Vec::with_capacity(1 << n);
    for cfg in 0u64..(1u64 << n) {
        let spin = |v: usize| if cfg >> v & 1 == 1 { 1.0 } else { -1.0 };
        let mut e = 0.0;
        for &(u, v) in &edges {
            e += params.beta * spin(u) * spin(v);
        }
        for v in 0..n {
            e += params.field_at(v) * spin(v);
        }
        logw.push(e);
        let mut key = 0usize;
        for (i, &v) in vars.iter().enumerate() {
            if cfg >> v & 1 == 1 {
                key |= 1 << i;
            }
        }
        keys.push(key);
    }
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = vec![0.0; 1 << vars.len()];
    let mut z = 0.0;
    for (lw, k) in logw.into_iter().zip(keys) {
        let w = (lw - max).exp();
        out[k] += w;
        z += w;
    }
    for o in &mut out {
        *o /= z;
    }
    Ok(out)
}

/// Converged local-field pools from the two monotone starting points.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingPool {
    /// Pool started from the field `B` everywhere.
    pub lower: Vec<f64>,
    /// Pool started from an effectively infinite field.
    pub upper: Vec<f64>,
    pub sweeps: usize,
    /// Kolmogorov distance between the two final pools.
    pub ks: f64,
    pub log: Vec<(usize, f64)>,
}

impl IsingPool {
    pub fn pool(&self) -> &[f64] {
        &self.lower
    }
}

/// Settings for [`ising_rde_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingRdeOptions {
    pub pool_size: usize,
    pub max_sweeps: usize,
    pub min_sweeps: usize,
    pub tol: f64,
}

impl Default for IsingRdeOptions {
    fn default() -> Self {
        IsingRdeOptions {
            pool_size: 100_000,
            max_sweeps: 1_000,
            min_sweeps: 5,
            tol: 1e-6,
        }
    }
}

/// Population dynamics for `Y =d B + Σ_{i≤K} edge_field(β, Y_i)` where `K`
/// follows the size-biased law `p°` (the child count of a non-root vertex of
/// the unimodular tree). Two pools are run from the monotone extremes; the
/// run stops when both pool means have stopped drifting, sit within noise of
/// each other, and the Kolmogorov distance between the pools is below
/// `max(0.01, 1.63·sqrt(2/N))`.
pub fn ising_rde_solve<R: Rng + ?Sized>(
    p: &DegreePmf,
    beta: f64,
    b: f64,
    opts: &IsingRdeOptions,
    rng: &mut R,
) -> Result<IsingPool> {
    IsingParams::uniform(beta, b).validate(0)?;
    if !(b >= 0.0) {
        return Err(Error::InvalidParameter("field must be >= 0".into()));
    }
    let n = opts.pool_size;
    if n == 0 {
        return Err(Error::InvalidParameter("pool size must be positive".into()));
    }
    let kids = if p.mean() > 0.0 {
        Some(size_biased(p)?.sampler())
    } else {
        None
    };
    let mut lower = vec![b; n];
    let mut upper = vec![b + 1e6; n];
    let mut scratch = vec![0.0; n];
    let mut means = (b, b + 1e6);
    let mut log = Vec::new();
    // 99% two-sample KS critical value, floored at 0.01
    let ks_tol = (1.63 * (2.0 / n as f64).sqrt()).max(0.01);
    for sweep in 1..=opts.max_sweeps {
        for pool in [&mut lower, &mut upper] {
            for s in scratch.iter_mut() {
                let k = kids.as_ref().map_or(0, |d| d.sample(rng));
                let mut h = b;
                for _ in 0..k {
                    h += edge_field(beta, pool[rng.random_range(0..n)]);
                }
                *s = h;
            }
            std::mem::swap(pool, &mut scratch);
        }
        let (ml, sl) = stats::mean_se(&lower);
        let (mu, su) = stats::mean_se(&upper);
        let drift = (ml - means.0).abs().max((mu - means.1).abs());
        means = (ml, mu);
        log.push((sweep, drift));
        let noise = 4.0 * sl.max(su).max(0.0);
        let noise = if noise.is_nan() { 0.0 } else { noise };
        if sweep >= opts.min_sweeps && drift <= opts.tol.max(noise) && (ml - mu).abs() <= opts.tol.max(noise) {
            // snap to a 1e-12 grid centred between the pools, so that
            // last-bit differences between equal point masses vanish
            let centre = 0.5 * (ml + mu);
            let snap = |xs: &[f64]| xs.iter().map(|x| ((x - centre) * 1e12).round()).collect::<Vec<_>>();
            let ks = stats::ks_two_sample(&snap(&lower), &snap(&upper));
            if ks > ks_tol {
                continue;
            }
            return Ok(IsingPool {
                lower,
                upper,
                sweeps: sweep,
                ks,
                log,
            });
        }
    }
    Err(Error::NonConvergence(format!(
        "local-field pools after {} sweeps (means {:.6} vs {:.6})",
        opts.max_sweeps, means.0, means.1
    )))
}

/// Monte Carlo estimate of the limiting free energy
///
/// `(μ/2) log cosh β − (μ/2) E log(1 + tanh β tanh Y₁ tanh Y₂)
///   + E log(e^B Π_{i≤D}(1 + tanh β tanh Y_i) + e^{−B} Π_{i≤D}(1 − tanh β tanh Y_i))`
///
/// with `D ~ p` and the `Y`s drawn from the converged pool. Returns the
/// estimate and its standard error.
pub fn free_energy_limit<R: Rng + ?Sized>(
    p: &DegreePmf,
    beta: f64,
    b: f64,
    pool: &IsingPool,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let ys = pool.pool();
    if ys.is_empty() || samples < 2 {
        return Err(Error::InvalidParameter("need a pool and at least two samples".into()));
    }
    let mu = p.mean();
    let tb = beta.tanh();
    let deg = p.sampler();
    let edge_term = 0.5 * mu * beta.cosh().ln();
    let draw = |rng: &mut R| ys[rng.random_range(0..ys.len())].tanh();
    let mut vals = Vec::with_capacity(samples);
    for _ in 0..samples {
        let pair = (1.0 + tb * draw(rng) * draw(rng)).ln();
        let d = deg.sample(rng);
        let (mut plus, mut minus) = (b, -b);
        for _ in 0..d {
            let t = tb * draw(rng);
            plus += (1.0 + t).ln();
            minus += (1.0 - t).ln();
        }
        let hi = plus.max(minus);
        let vertex = hi + ((plus - hi).exp() + (minus - hi).exp()).ln();
        vals.push(edge_term - 0.5 * mu * pair + vertex);
    }
    Ok(stats::mean_se(&vals))
}

/// Monte Carlo estimate of the limiting root magnetization
/// `E tanh(B + Σ_{i≤D} edge_field(β, Y_i))` with `D ~ p` and the `Y`s drawn
/// from the converged pool.
pub fn root_magnetization_limit<R: Rng + ?Sized>(
    p: &DegreePmf,
    beta: f64,
    b: f64,
    pool: &IsingPool,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let ys = pool.pool();
    if ys.is_empty() || samples < 2 {
        return Err(Error::InvalidParameter("need a pool and at least two samples".into()));
    }
    let deg = p.sampler();
    let vals: Vec<f64> = (0..samples)
        .map(|_| {
            let d = deg.sample(rng);
            let h: f64 = b
                + (0..d)
                    .map(|_| edge_field(beta, ys[rng.random_range(0..ys.len())]))
                    .sum::<f64>();
            h.tanh()
        })
        .collect();
    Ok(stats::mean_se(&vals))
}

/// One Griffiths monotonicity violation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub what: String,
    pub amount: f64,
}

/// Check that one- and two-point correlations are nonnegative and
/// nondecreasing in β (for each B) and in B (for each β). Grids are sorted
/// before use.
pub fn griffiths_check(g: &Graph, beta_grid: &[f64], b_grid: &[f64]) -> Result<Vec<Violation>> {
    const TOL: f64 = 1e-10;
    if g.n() > 15 {
        return Err(Error::SizeCap { size: g.n(), cap: 15 });
    }
    if beta_grid.iter().chain(b_grid).any(|&x| !(x >= 0.0)) {
        return Err(Error::InvalidParameter("grids must be nonnegative".into()));
    }
    let mut betas = beta_grid.to_vec();
    betas.sort_unstable_by(f64::total_cmp);
    let mut bs = b_grid.to_vec();
    bs.sort_unstable_by(f64::total_cmp);
    let n = g.n();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let table: Vec<Vec<Vec<f64>>> = betas
        .iter()
        .map(|&beta| {
            bs.iter()
                .map(|&b| {
                    let s = exact_gibbs(g, &IsingParams::uniform(beta, b), &Boundary::Free, &pairs)?;
                    let mut v = s.magnetization;
                    v.extend(s.pair_correlations.iter().map(|&(_, c)| c));
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let name = |idx: usize| {
        if idx < n {
            format!("<x_{idx}>")
        } else {
            let (u, v) = pairs[idx - n];
            format!("<x_{u} x_{v}>")
        }
    };
    let mut out = Vec::new();
    for (i, &beta) in betas.iter().enumerate() {
        for (j, &b) in bs.iter().enumerate() {
            for (idx, &val) in table[i][j].iter().enumerate() {
                if val < -TOL {
                    out.push(Violation {
                        what: format!("{} < 0 at beta={beta}, B={b}", name(idx)),
                        amount: -val,
                    });
                }
                if i > 0 && val < table[i - 1][j][idx] - TOL {
                    out.push(Violation {
                        what: format!("{} decreases in beta at {beta}, B={b}", name(idx)),
                        amount: table[i - 1][j][idx] - val,
                    });
                }
                if j > 0 && val < table[i][j - 1][idx] - TOL {
                    out.push(Violation {
                        what: format!("{} decreases in B at beta={beta}, B={b}", name(idx)),
                        amount: table[i][j - 1][idx] - val,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NO_PARENT;

    #[test]
    fn single_edge_partition_function() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let beta: f64 = 0.7;
        let s = exact_gibbs(&g, &IsingParams::uniform(beta, 0.0), &Boundary::Free, &[(0, 1)]).unwrap();
        let z = 2.0 * beta.exp() + 2.0 * (-beta).exp();
        assert!((s.log_z - z.ln()).abs() < 1e-12);
        assert!((s.pair_correlations[0].1 - beta.tanh()).abs() < 1e-12);
    }

    #[test]
    fn independent_spins() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let b: f64 = 0.4;
        let s = exact_gibbs(&g, &IsingParams::uniform(0.0, b), &Boundary::Free, &[]).unwrap();
        assert!((s.phi - (2.0 * b.cosh()).ln()).abs() < 1e-12);
        let sat = exact_gibbs(&g, &IsingParams::uniform(0.5, 10.0), &Boundary::Free, &[]).unwrap();
        assert!(sat.magnetization.iter().all(|&m| (1.0 - m) < 1e-6));
    }

    #[test]
    fn plus_boundary_clamps() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let beta: f64 = 0.5;
        let s = exact_gibbs(&g, &IsingParams::uniform(beta, 0.0), &Boundary::Plus(vec![0]), &[]).unwrap();
        assert_eq!(s.magnetization[0], 1.0);
        assert!((s.magnetization[1] - beta.tanh()).abs() < 1e-12);
        assert!(exact_gibbs(&g, &IsingParams::uniform(beta, 0.0), &Boundary::Plus(vec![5]), &[]).is_err());
    }

    #[test]
    fn loops_add_constant() {
        let plain = Graph::from_edges(1, &[]).unwrap();
        let looped = Graph::from_edges(1, &[(0, 0)]).unwrap();
        let p = IsingParams::uniform(0.3, 0.2);
        let a = exact_gibbs(&plain, &p, &Boundary::Free, &[]).unwrap();
        let b = exact_gibbs(&looped, &p, &Boundary::Free, &[]).unwrap();
        assert!((b.log_z - a.log_z - 0.3).abs() < 1e-12);
    }

    #[test]
    fn cherry_fields() {
        let t = RootedTree::from_growth(vec![NO_PARENT, 0, 0]);
        let p = IsingParams::uniform(1.0, 0.5);
        let f = tree_local_fields(&t, &p).unwrap();
        assert!((f.full[0] - (0.5 + 2.0 * edge_field(1.0, 0.5))).abs() < 1e-12);
        let exact = exact_gibbs(&t.to_graph().graph, &p, &Boundary::Free, &[]).unwrap();
        for (a, b) in f.magnetization().iter().zip(&exact.magnetization) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(pruning_check(&t, &p).unwrap() < 1e-12);
    }

    #[test]
    fn degenerate_rde_pools() {
        let mut rng = crate::rng::seeded(3);
        let opts = IsingRdeOptions {
            pool_size: 1000,
            ..IsingRdeOptions::default()
        };
        let pool = ising_rde_solve(&DegreePmf::delta(3), 0.0, 0.3, &opts, &mut rng).unwrap();
        assert!(pool.lower.iter().all(|&h| h == 0.3));
        let pool = ising_rde_solve(&DegreePmf::delta(1), 0.8, 0.3, &opts, &mut rng).unwrap();
        assert!(pool.lower.iter().all(|&h| h == 0.3));
    }

    #[test]
    fn griffiths_on_triangle() {
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(griffiths_check(&tri, &[0.0, 0.3, 0.6], &[0.2]).unwrap().is_empty());
    }
}
