//! Adjacency spectra of finite graphs, Stieltjes transforms, the resolvent
//! recursion on trees, the population-dynamics solver for the resolvent
//! fixed-point equation of unimodular trees, and the Kesten–McKay law.

pub mod eigen;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::branching::size_biased;
use crate::error::{Error, Result};
use crate::generators::DegreePmf;
use crate::graph::{EmpiricalMeasure, Graph, RealBin, RootedTree};
use crate::rng::StreamRng;
use eigen::PackedSymmetric;

pub use eigen::tridiagonal_eigenvalues;

/// Default vertex cap for dense eigenvalue computations.
pub const DEFAULT_EIGEN_CAP: usize = 10_000;

/// Adjacency eigenvalues in ascending order. Parallel edges contribute their
/// multiplicity, each self-loop contributes 1 to the diagonal. Components are
/// diagonalized separately.
pub fn eigenvalues_symmetric(g: &Graph) -> Result<Vec<f64>> {
    eigenvalues_symmetric_with_cap(g, DEFAULT_EIGEN_CAP)
}

pub fn eigenvalues_symmetric_with_cap(g: &Graph, cap: usize) -> Result<Vec<f64>> {
    if g.n() > cap {
        return Err(Error::SizeCap { size: g.n(), cap });
    }
    let mut seen = vec![false; g.n()];
    let mut out = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        if seen[v] {
            continue;
        }
        let comp = g.component(v)?;
        for &u in &comp {
            seen[u] = true;
        }
        let sub = g.induced(&comp);
        let mut m = PackedSymmetric::zeros(sub.n());
        for (a, b) in sub.edges() {
            m.add(a, b, 1.0);
        }
        out.extend(m.eigenvalues()?);
    }
    out.sort_unstable_by(f64::total_cmp);
    Ok(out)
}

/// Binned empirical spectral distribution (total mass 1).
pub fn esd(g: &Graph, bin_width: f64) -> Result<EmpiricalMeasure<RealBin>> {
    let ev = eigenvalues_symmetric(g)?;
    Ok(histogram(&ev, bin_width))
}

/// Normalized histogram of real values.
pub fn histogram(xs: &[f64], bin_width: f64) -> EmpiricalMeasure<RealBin> {
    let mut m = EmpiricalMeasure::new();
    let w = 1.0 / xs.len() as f64;
    for &x in xs {
        m.add(RealBin::of(x, bin_width), w);
    }
    m
}

fn check_upper(z: Complex64) -> Result<()> {
    if z.im > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("need Im z > 0, got {z}")))
    }
}

/// Stieltjes transform `(1/n) Σ 1/(λ_i - z)` of a list of atoms.
pub fn stieltjes(eigs: &[f64], z: Complex64) -> Result<Complex64> {
    check_upper(z)?;
    let s: Complex64 = eigs.iter().map(|&l| 1.0 / (l - z)).sum();
    Ok(s / eigs.len() as f64)
}

/// Stieltjes transform of a binned measure, atoms at the bin midpoints.
pub fn stieltjes_of_measure(m: &EmpiricalMeasure<RealBin>, z: Complex64) -> Result<Complex64> {
    check_upper(z)?;
    let total = m.total();
    if total <= 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok(m.iter().map(|(b, w)| w / (b.mid() - z)).sum::<Complex64>() / total)
}

/// Density estimate `Im s(x + iy) / π` from a Stieltjes transform value.
/// Smooths the true density by a Cauchy kernel of width `y`.
pub fn stieltjes_invert(s: Complex64) -> f64 {
    s.im / std::f64::consts::PI
}

/// Diagonal resolvent entries of a tree's adjacency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeResolvent {
    /// `[(A_v - z)^{-1}]_{vv}` where `A_v` is the adjacency of the subtree below `v`.
    pub subtree: Vec<Complex64>,
    /// `[(A - z)^{-1}]_{vv}` for the whole tree.
    pub full: Vec<Complex64>,
}

/// Resolvent diagonal of a tree by the Schur-complement recursion
/// `R_v = -1 / (z + Σ_c R_c)`, first bottom-up over subtrees, then top-down
/// adding the cavity field coming from the parent's side.
pub fn resolvent_tree(t: &RootedTree, z: Complex64) -> Result<TreeResolvent> {
    check_upper(z)?;
    let n = t.n();
    let order = t.preorder();
    let mut sub = vec![Complex64::new(0.0, 0.0); n];
    let mut child_sum = vec![Complex64::new(0.0, 0.0); n];
    for &v in order.iter().rev() {
        sub[v] = -1.0 / (z + child_sum[v]);
        if let Some(p) = t.parent(v) {
            child_sum[p] += sub[v];
        }
    }
    // cavity[v]: resolvent at the parent of v with v's subtree removed
    let mut cavity = vec![Complex64::new(0.0, 0.0); n];
    let mut full = vec![Complex64::new(0.0, 0.0); n];
    for &v in &order {
        let up = t.parent(v).map_or(Complex64::new(0.0, 0.0), |_| cavity[v]);
        full[v] = -1.0 / (z + child_sum[v] + up);
        for &c in t.children(v) {
            cavity[c] = -1.0 / (z + child_sum[v] - sub[c] + up);
        }
    }
    Ok(TreeResolvent { subtree: sub, full })
}

/// How a spectral pool is initialized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoolInit {
    /// Every member equal to `-1/z`.
    Isolated,
    /// Independent `-1/(z + w)` with `w` uniform on `[-4, 4] + i[0, 4]`.
    Random,
}

/// Numerical settings of the population-dynamics solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdeOptions {
    pub pool_size: usize,
    pub max_sweeps: usize,
    pub min_sweeps: usize,
    /// Drift tolerance on the pool mean.
    pub tol: f64,
    /// Fresh draws used to evaluate expectations after convergence.
    pub samples: usize,
    pub init: PoolInit,
}

impl Default for RdeOptions {
    fn default() -> Self {
        RdeOptions {
            pool_size: 100_000,
            max_sweeps: 2_000,
            min_sweeps: 5,
            tol: 1e-4,
            samples: 100_000,
            init: PoolInit::Isolated,
        }
    }
}

/// Default evaluation grid: x on [-6, 6] in steps of 0.1, y in {1, 0.1, 0.01}.
pub fn default_grid() -> Vec<Complex64> {
    let mut g = Vec::new();
    for y in [1.0, 0.1, 0.01] {
        for i in 0..=120 {
            g.push(Complex64::new(-6.0 + 0.1 * i as f64, y));
        }
    }
    g
}

/// Converged pool and limit Stieltjes transform at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint {
    pub z: Complex64,
    pub pool: Vec<Complex64>,
    pub sweeps: usize,
    /// (sweep, drift of the pool mean) per sweep.
    pub log: Vec<(usize, f64)>,
    /// Estimate of `E X(z)`.
    pub s_inf: Complex64,
    pub s_inf_se: f64,
}

/// Solve `Y =d -1/(z + Σ_{i≤D°} Y_i)`, `D° ~ p°`, at every grid point by
/// population dynamics, then estimate `s(z) = E[-1/(z + Σ_{i≤D} Y_i)]`,
/// `D ~ p`, from fresh pool draws.
///
/// A grid point has converged once the change of the pool mean over a sweep
/// is below `tol`, or below four standard errors of the pool mean when the
/// pool is genuinely random and its sampling noise exceeds `tol`.
/// Grid points are independent and run in parallel, each on its own stream
/// derived from one draw of `rng`.
pub fn spectral_rde_solve<R: Rng + ?Sized>(
    p: &DegreePmf,
    grid: &[Complex64],
    opts: &RdeOptions,
    rng: &mut R,
) -> Result<Vec<SpectralPoint>> {
    if !p.second_moment().is_finite() {
        return Err(Error::InvalidParameter(
            "degree law needs a finite second moment".into(),
        ));
    }
    if opts.pool_size == 0 {
        return Err(Error::InvalidParameter("pool size must be positive".into()));
    }
    for &z in grid {
        check_upper(z)?;
    }
    let master: u64 = rng.random();
    grid.par_iter()
        .enumerate()
        .map(|(i, &z)| {
            let mut r = crate::rng::stream(master, "spectral-rde", i as u64);
            solve_point(p, z, opts, &mut r)
        })
        .collect()
}

fn solve_point(p: &DegreePmf, z: Complex64, opts: &RdeOptions, rng: &mut StreamRng) -> Result<SpectralPoint> {
    let n = opts.pool_size;
    let child_law = if p.mean() > 0.0 {
        Some(size_biased(p)?.sampler())
    } else {
        None
    };
    let mut pool: Vec<Complex64> = match opts.init {
        PoolInit::Isolated => vec![-1.0 / z; n],
        PoolInit::Random => (0..n)
            .map(|_| {
                let w = Complex64::new(rng.random_range(-4.0..4.0), rng.random_range(0.0..4.0));
                -1.0 / (z + w)
            })
            .collect(),
    };
    let mut next = vec![Complex64::new(0.0, 0.0); n];
    let mut mean = pool.iter().sum::<Complex64>() / n as f64;
    let mut log = Vec::new();
    let mut sweeps = 0;
    loop {
        if sweeps >= opts.max_sweeps {
            return Err(Error::NonConvergence(format!(
                "resolvent pool at z = {z} after {sweeps} sweeps (last drift {:.3e})",
                log.last().map_or(f64::NAN, |l: &(usize, f64)| l.1)
            )));
        }
        for slot in next.iter_mut() {
            let k = child_law.as_ref().map_or(0, |s| s.sample(rng));
            let mut acc = z;
            for _ in 0..k {
                acc += pool[rng.random_range(0..n)];
            }
            *slot = -1.0 / acc;
        }
        std::mem::swap(&mut pool, &mut next);
        sweeps += 1;
        let new_mean = pool.iter().sum::<Complex64>() / n as f64;
        let drift = (new_mean - mean).norm();
        mean = new_mean;
        log.push((sweeps, drift));
        let var = pool.iter().map(|y| (y - mean).norm_sqr()).sum::<f64>() / n as f64;
        let noise = 4.0 * (var / n as f64).sqrt();
        if sweeps >= opts.min_sweeps && drift <= opts.tol.max(noise) {
            break;
        }
    }
    let root_law = p.sampler();
    let m = opts.samples.max(1);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sq = 0.0;
    let mut xs = Vec::with_capacity(m);
    for _ in 0..m {
        let k = root_law.sample(rng);
        let mut acc = z;
        for _ in 0..k {
            acc += pool[rng.random_range(0..n)];
        }
        let x = -1.0 / acc;
        sum += x;
        xs.push(x);
    }
    let s_inf = sum / m as f64;
    for x in &xs {
        sq += (x - s_inf).norm_sqr();
    }
    let s_inf_se = if m > 1 {
        (sq / (m - 1) as f64 / m as f64).sqrt()
    } else {
        0.0
    };
    Ok(SpectralPoint {
        z,
        pool,
        sweeps,
        log,
        s_inf,
        s_inf_se,
    })
}

/// Root of `(k-1) Y² + z Y + 1 = 0` in the upper half plane: the fixed point
/// of `Y = -1/(z + (k-1) Y)` for the k-regular tree.
pub fn regular_tree_cavity(k: usize, z: Complex64) -> Complex64 {
    let a = (k as f64 - 1.0).max(0.0);
    if a == 0.0 {
        return -1.0 / z;
    }
    let disc = (z * z - 4.0 * a).sqrt();
    let y1 = (-z + disc) / (2.0 * a);
    let y2 = (-z - disc) / (2.0 * a);
    if y1.im > 0.0 {
        y1
    } else {
        y2
    }
}

/// Stieltjes transform of the Kesten–McKay law, `-1/(z + k Y(z))`.
pub fn kesten_mckay_stieltjes(k: usize, z: Complex64) -> Complex64 {
    -1.0 / (z + k as f64 * regular_tree_cavity(k, z))
}

/// Stieltjes transform of the semicircle law on [-2, 2].
pub fn semicircle_stieltjes(z: Complex64) -> Complex64 {
    regular_tree_cavity(2, z)
}

/// Kesten–McKay density `(k/2π) √(4(k-1) - x²) / (k² - x²)` on
/// `|x| ≤ 2√(k-1)`, zero outside.
pub fn kesten_mckay_density(k: usize, x: f64) -> Result<f64> {
    if k < 3 {
        return Err(Error::InvalidParameter("Kesten–McKay needs k >= 3".into()));
    }
    let kf = k as f64;
    let r2 = 4.0 * (kf - 1.0);
    if x * x >= r2 {
        return Ok(0.0);
    }
    Ok(kf / (2.0 * std::f64::consts::PI) * (r2 - x * x).sqrt() / (kf * kf - x * x))
}

/// Integral of `density` from the left support edge `-r` to `x`, computed in
/// the angle variable `x = r sin θ` where the square-root edge becomes smooth.
pub fn edge_cdf(density: impl Fn(f64) -> f64, r: f64, x: f64) -> f64 {
    if x <= -r {
        return 0.0;
    }
    let x = x.min(r);
    let (a, b) = (-std::f64::consts::FRAC_PI_2, (x / r).asin());
    let steps = 2000;
    let h = (b - a) / steps as f64;
    let g = |th: f64| density(r * th.sin()) * r * th.cos();
    let mut s = g(a) + g(b);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Kesten–McKay distribution function.
pub fn kesten_mckay_cdf(k: usize, x: f64) -> Result<f64> {
    kesten_mckay_density(k, 0.0)?;
    let r = 2.0 * ((k - 1) as f64).sqrt();
    Ok(edge_cdf(|t| kesten_mckay_density(k, t).unwrap_or(0.0), r, x))
}

/// Kolmogorov distance between sorted eigenvalues and a continuous cdf.
pub fn ks_to_cdf(sorted_eigs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    crate::stats::ks_one_sample(sorted_eigs, cdf)
}
