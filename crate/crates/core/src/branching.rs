//! Continuous-time branching processes (Yule and general pure-birth
//! reproduction), Malthusian rates, unimodular Galton–Watson trees,
//! bond percolation on trees and the Poisson weighted infinite tree.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::fenwick::Fenwick;
use crate::generators::{AttachmentFn, DegreePmf};
use crate::graph::{RootedTree, NO_PARENT};

/// Default population cap for branching-process samplers.
pub const DEFAULT_CAP: usize = 1_000_000;

/// When to stop a continuous-time branching process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// Run up to a fixed time.
    Time(f64),
    /// Run up to an independent Exp(rate) time.
    ExpTime(f64),
    /// Stop as soon as the population reaches this size.
    Population(usize),
}

/// Genealogical tree of a branching process with birth times, together with
/// the time at which it was observed.
#[derive(Debug, Clone, PartialEq)]
pub struct CtbpTree {
    pub tree: RootedTree,
    pub horizon: f64,
}

impl CtbpTree {
    pub fn size(&self) -> usize {
        self.tree.n()
    }
}

fn exp_gap<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    Exp::new(rate).expect("positive rate").sample(rng)
}

fn resolve_stop<R: Rng + ?Sized>(stop: Stop, rng: &mut R) -> Result<(f64, usize)> {
    match stop {
        Stop::Time(t) if t >= 0.0 => Ok((t, usize::MAX)),
        Stop::ExpTime(rate) if rate > 0.0 => Ok((exp_gap(rate, rng), usize::MAX)),
        Stop::Population(k) if k >= 1 => Ok((f64::INFINITY, k)),
        other => Err(Error::InvalidParameter(format!("invalid stopping rule {other:?}"))),
    }
}

/// Rate-one Yule process: every individual gives birth at rate 1.
pub fn yule_sample<R: Rng + ?Sized>(stop: Stop, cap: usize, rng: &mut R) -> Result<CtbpTree> {
    let (horizon, target) = resolve_stop(stop, rng)?;
    let mut parent = vec![NO_PARENT];
    let mut birth = vec![0.0];
    let mut t = 0.0;
    while parent.len() < target {
        // the total birth rate equals the population size
        let next = t + exp_gap(parent.len() as f64, rng);
        if next > horizon {
            break;
        }
        if parent.len() >= cap {
            return Err(Error::PopulationCap { cap, time: next });
        }
        t = next;
        parent.push(rng.random_range(0..parent.len()));
        birth.push(t);
    }
    let mut tree = RootedTree::from_growth(parent);
    tree.birth_times = Some(birth);
    let horizon = if horizon.is_finite() { horizon } else { t };
    Ok(CtbpTree { tree, horizon })
}

/// Branching process where an individual with `k` children gives birth at
/// rate `f(k)`. Simulated through its embedded jump chain: the holding time
/// is exponential with the total rate and the mother is chosen with
/// probability proportional to her current rate.
pub fn ctbp_sample<R: Rng + ?Sized>(f: &AttachmentFn, stop: Stop, cap: usize, rng: &mut R) -> Result<CtbpTree> {
    let (horizon, target) = resolve_stop(stop, rng)?;
    // general f is checked lazily, on the values the run actually uses
    if f.affine().is_some() {
        f.validate(cap.min(1_000_000))?;
    }
    let mut parent = vec![NO_PARENT];
    let mut birth = vec![0.0];
    let mut t = 0.0;
    let affine = f.affine().filter(|&(s, _)| s >= 0.0);
    let mut children = vec![0usize];
    let mut fw = if affine.is_none() {
        let mut fw = Fenwick::new(64);
        fw.set(0, rate(f, 0)?);
        Some(fw)
    } else {
        None
    };
    while parent.len() < target {
        let m = parent.len();
        let total = match (affine, &fw) {
            (Some((s, b)), _) => s * (m - 1) as f64 + b * m as f64,
            (None, Some(fw)) => fw.total(),
            _ => unreachable!(),
        };
        let next = t + exp_gap(total, rng);
        if next > horizon {
            break;
        }
        if m >= cap {
            return Err(Error::PopulationCap { cap, time: next });
        }
        t = next;
        let mother = match (affine, &mut fw) {
            (Some((_, b)), _) => {
                if m == 1 || rng.random::<f64>() * total < b * m as f64 {
                    rng.random_range(0..m)
                } else {
                    parent[rng.random_range(1..m)]
                }
            }
            (None, Some(fw)) => {
                if m >= fw.len() {
                    *fw = grow(fw, &children, f);
                }
                let v = fw.sample(rng);
                children[v] += 1;
                fw.set(v, rate(f, children[v])?);
                fw.set(m, rate(f, 0)?);
                v
            }
            _ => unreachable!(),
        };
        if affine.is_some() {
            children[mother] += 1;
        }
        children.push(0);
        parent.push(mother);
        birth.push(t);
    }
    let mut tree = RootedTree::from_growth(parent);
    tree.birth_times = Some(birth);
    let horizon = if horizon.is_finite() { horizon } else { t };
    Ok(CtbpTree { tree, horizon })
}

fn rate(f: &AttachmentFn, k: usize) -> Result<f64> {
    let r = f.eval(k);
    if r > 0.0 && r.is_finite() {
        Ok(r)
    } else {
        Err(Error::InvalidParameter(format!(
            "attachment function must be positive (fails at k = {k})"
        )))
    }
}

fn grow(old: &Fenwick, children: &[usize], f: &AttachmentFn) -> Fenwick {
    let mut fw = Fenwick::new(2 * old.len());
    for (v, &c) in children.iter().enumerate() {
        fw.set(v, f.eval(c));
    }
    fw
}

/// Solution of `∫ e^{-λt} μ(dt) = 1/c` for the mean reproduction measure μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MalthusianRate {
    pub lambda: f64,
    /// `|c ∫ e^{-λt} μ(dt) - 1|` at the returned λ.
    pub residual: f64,
}

/// Laplace transform of the mean reproduction measure,
/// `sum_{k>=1} prod_{j<k} f(j) / (λ + f(j))`: the k-th birth happens after
/// independent Exp(f(0)), ..., Exp(f(k-1)) gaps. Infinite when the series
/// diverges.
pub fn reproduction_transform(f: &AttachmentFn, lambda: f64) -> f64 {
    if let Some((s, b)) = f.affine() {
        return if lambda > s { b / (lambda - s) } else { f64::INFINITY };
    }
    const MAX_TERMS: usize = 2_000_000;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut half_term = 0.0;
    for k in 1..=MAX_TERMS {
        let fk = f.eval(k - 1);
        term *= fk / (lambda + fk);
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
        if k == MAX_TERMS / 2 {
            half_term = term;
        }
    }
    // polynomial tail term ~ C k^{-a}: estimate a from the last doubling
    let a = (half_term / term).log2();
    if a <= 1.0 + 1e-9 {
        return f64::INFINITY;
    }
    sum + term * MAX_TERMS as f64 / (a - 1.0)
}

/// Malthusian rate: the λ solving `∫ e^{-λt} μ(dt) = 1`.
pub fn malthusian_rate(f: &AttachmentFn) -> Result<MalthusianRate> {
    thinned_malthusian_rate(f, 1.0)
}

/// Growth rate of the process in which each birth is kept independently with
/// probability `c`: the λ solving `c ∫ e^{-λt} μ(dt) = 1`.
pub fn thinned_malthusian_rate(f: &AttachmentFn, c: f64) -> Result<MalthusianRate> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidParameter("retention must lie in (0, 1]".into()));
    }
    f.validate(1_000_000)?;
    if let Some((s, b)) = f.affine() {
        if s >= 0.0 {
            let lambda = s + c * b;
            let residual = (c * reproduction_transform(f, lambda) - 1.0).abs();
            return Ok(MalthusianRate { lambda, residual });
        }
    }
    let g = |l: f64| c * reproduction_transform(f, l) - 1.0;
    let mut hi = 1.0;
    while g(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoSolution("Malthusian rate not bracketed".into()));
        }
    }
    let mut lo = hi / 2.0;
    while g(lo) <= 0.0 {
        lo /= 2.0;
        if lo < 1e-12 {
            return Err(Error::NoSolution("Malthusian rate not bracketed".into()));
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    Ok(MalthusianRate {
        lambda,
        residual: g(lambda).abs(),
    })
}

/// Size-biased law `p°_k = (k + 1) p_{k+1} / μ`.
pub fn size_biased(p: &DegreePmf) -> Result<DegreePmf> {
    let mu = p.mean();
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter("size-biasing needs a positive mean".into()));
    }
    let probs = p.probs();
    let q: Vec<f64> = (0..probs.len().saturating_sub(1).max(1))
        .map(|k| (k + 1) as f64 * probs.get(k + 1).copied().unwrap_or(0.0) / mu)
        .collect();
    DegreePmf::new(q)
}

/// Galton–Watson tree whose root has offspring law `p` and every other
/// vertex offspring law `p°`, cut after `generations` generations.
pub fn unimodular_bp_sample<R: Rng + ?Sized>(
    p: &DegreePmf,
    generations: usize,
    cap: usize,
    rng: &mut R,
) -> Result<RootedTree> {
    let root_law = p.sampler();
    let other = if p.mean() > 0.0 {
        Some(size_biased(p)?.sampler())
    } else {
        None
    };
    let mut parent = vec![NO_PARENT];
    let mut frontier = vec![0usize];
    for g in 0..generations {
        let mut next = Vec::new();
        for &u in &frontier {
            let k = if g == 0 {
                root_law.sample(rng)
            } else {
                other.as_ref().map_or(0, |s| s.sample(rng))
            };
            for _ in 0..k {
                if parent.len() >= cap {
                    return Err(Error::SizeCap {
                        size: parent.len() + 1,
                        cap,
                    });
                }
                parent.push(u);
                next.push(parent.len() - 1);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(RootedTree::from_growth(parent))
}

/// Keep every edge independently with probability `c` and return the
/// cluster of the root (birth times and weights carried over).
pub fn percolate<R: Rng + ?Sized>(t: &RootedTree, c: f64, rng: &mut R) -> Result<RootedTree> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidParameter("retention must lie in [0, 1]".into()));
    }
    let mut order = vec![0];
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        for &ch in t.children(u) {
            if rng.random::<f64>() < c {
                order.push(ch);
            }
        }
        i += 1;
    }
    Ok(t.restrict(&order))
}

/// Poisson weighted infinite tree cut at `depth` generations, keeping only
/// children whose edge weight is below `cutoff`. Each vertex's children sit at
/// the points of a rate-one Poisson process; weights are stored on the child.
pub fn pwit_sample<R: Rng + ?Sized>(depth: usize, cutoff: f64, rng: &mut R) -> Result<RootedTree> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::InvalidParameter("cutoff must be positive and finite".into()));
    }
    let mut parent = vec![NO_PARENT];
    let mut weight = vec![0.0];
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &u in &frontier {
            let mut x = exp_gap(1.0, rng);
            while x < cutoff {
                parent.push(u);
                weight.push(x);
                next.push(parent.len() - 1);
                x += exp_gap(1.0, rng);
            }
        }
        frontier = next;
    }
    let mut t = RootedTree::from_growth(parent);
    t.edge_weights = Some(weight);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn zero_horizon_is_a_point() {
        let mut rng = seeded(1);
        assert_eq!(yule_sample(Stop::Time(0.0), 10, &mut rng).unwrap().size(), 1);
        let f = AttachmentFn::linear(1.0);
        assert_eq!(ctbp_sample(&f, Stop::Time(0.0), 10, &mut rng).unwrap().size(), 1);
        assert!(yule_sample(Stop::Time(-1.0), 10, &mut rng).is_err());
    }

    #[test]
    fn population_stop_and_cap() {
        let mut rng = seeded(2);
        let t = yule_sample(Stop::Population(7), 100, &mut rng).unwrap();
        assert_eq!(t.size(), 7);
        let b = t.tree.birth_times.as_ref().unwrap();
        for v in 1..7 {
            assert!(b[v] > b[t.tree.parent(v).unwrap()]);
        }
        assert!(matches!(
            yule_sample(Stop::Time(50.0), 100, &mut rng),
            Err(Error::PopulationCap { cap: 100, .. })
        ));
        let f = AttachmentFn::custom(|k| 1.0 + (k as f64).sqrt());
        assert_eq!(
            ctbp_sample(&f, Stop::Population(3000), 10_000, &mut rng)
                .unwrap()
                .size(),
            3000
        );
    }

    #[test]
    fn malthusian_closed_forms() {
        let l = malthusian_rate(&AttachmentFn::uniform()).unwrap();
        assert_eq!(l.lambda, 1.0);
        assert_eq!(malthusian_rate(&AttachmentFn::linear(1.0)).unwrap().lambda, 3.0);
        assert_eq!(malthusian_rate(&AttachmentFn::linear(0.0)).unwrap().lambda, 2.0);
        let t = thinned_malthusian_rate(&AttachmentFn::linear(1.0), 0.5).unwrap();
        assert!((t.lambda - 2.0).abs() < 1e-15);
    }

    #[test]
    fn series_solver_matches_closed_form() {
        // the same affine functions evaluated through the generic series
        let pa = AttachmentFn::custom(|k| k as f64 + 2.0);
        let l = malthusian_rate(&pa).unwrap();
        assert!((l.lambda - 3.0).abs() < 1e-6, "{l:?}");
        let uni = AttachmentFn::custom(|_| 1.0);
        assert!((malthusian_rate(&uni).unwrap().lambda - 1.0).abs() < 1e-9);
        let thin = thinned_malthusian_rate(&pa, 0.5).unwrap();
        assert!((thin.lambda - 2.0).abs() < 1e-4, "{thin:?}");
    }

    #[test]
    fn size_biased_examples() {
        let p = DegreePmf::new(vec![0.0, 0.5, 0.0, 0.5]).unwrap();
        let q = size_biased(&p).unwrap();
        assert!((q.prob(0) - 0.25).abs() < 1e-15);
        assert!((q.prob(2) - 0.75).abs() < 1e-15);
        assert_eq!(size_biased(&DegreePmf::delta(4)).unwrap(), DegreePmf::delta(3));
        assert!(size_biased(&DegreePmf::delta(0)).is_err());
    }

    #[test]
    fn regular_unimodular_tree() {
        let mut rng = seeded(3);
        let t = unimodular_bp_sample(&DegreePmf::delta(4), 3, 1000, &mut rng).unwrap();
        assert_eq!(t.n(), 1 + 4 + 12 + 36);
        assert_eq!(t.children(0).len(), 4);
        assert_eq!(t.children(1).len(), 3);
        assert_eq!(
            unimodular_bp_sample(&DegreePmf::delta(0), 3, 10, &mut rng).unwrap().n(),
            1
        );
        assert!(unimodular_bp_sample(&DegreePmf::delta(4), 3, 20, &mut rng).is_err());
    }

    #[test]
    fn percolation_extremes() {
        let mut rng = seeded(4);
        let t = RootedTree::from_growth(vec![NO_PARENT, 0, 1, 1]);
        assert_eq!(percolate(&t, 1.0, &mut rng).unwrap().n(), 4);
        assert_eq!(percolate(&t, 0.0, &mut rng).unwrap().n(), 1);
    }

    #[test]
    fn pwit_shape() {
        let mut rng = seeded(5);
        assert_eq!(pwit_sample(0, 5.0, &mut rng).unwrap().n(), 1);
        let t = pwit_sample(2, 3.0, &mut rng).unwrap();
        let w = t.edge_weights.as_ref().unwrap();
        for v in 0..t.n() {
            let ws: Vec<f64> = t.children(v).iter().map(|&c| w[c]).collect();
            assert!(ws.windows(2).all(|p| p[0] <= p[1]));
            assert!(ws.iter().all(|&x| x < 3.0));
        }
    }
}
