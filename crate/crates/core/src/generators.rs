//! Random graph and random tree models.

use std::fmt;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fenwick::Fenwick;
use crate::graph::{Graph, RootedTree, NO_PARENT};

/// Erdős–Rényi graph: each pair joined independently with probability λ/n.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, lambda: f64, rng: &mut R) -> Result<Graph> {
    if !(lambda >= 0.0) || lambda > n as f64 {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in [0, n], got {lambda} with n = {n}"
        )));
    }
    let p = if n == 0 { 0.0 } else { lambda / n as f64 };
    let mut edges = Vec::new();
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push((w, v));
            }
        }
    } else if p > 0.0 {
        // geometric skipping over the pairs (w, v), w < v, in row order
        let log_q = (1.0 - p).ln();
        let (mut v, mut w) = (1usize, -1i64);
        while v < n {
            let r: f64 = rng.random();
            w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((w as usize, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Degree distribution on {0, 1, 2, ...}.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreePmf {
    probs: Vec<f64>,
    mean: f64,
    second_moment: f64,
}

impl DegreePmf {
    /// Normalize nonnegative weights; the raw sum must be 1 within 1e-9.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let s: f64 = probs.iter().sum();
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter("pmf entries must be nonnegative".into()));
        }
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("pmf sums to {s}")));
        }
        Ok(Self::from_weights(probs))
    }

    fn from_weights(mut probs: Vec<f64>) -> Self {
        let s: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= s;
        }
        while probs.len() > 1 && probs.last() == Some(&0.0) {
            probs.pop();
        }
        let mean = probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        let second_moment = probs.iter().enumerate().map(|(k, p)| (k * k) as f64 * p).sum();
        DegreePmf {
            probs,
            mean,
            second_moment,
        }
    }

    /// Point mass at `k`.
    pub fn delta(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        Self::from_weights(probs)
    }

    /// Poisson(λ) truncated to {0..=kmax} and renormalized.
    pub fn poisson(lambda: f64, kmax: usize) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter("Poisson mean must be positive".into()));
        }
        let mut probs = Vec::with_capacity(kmax + 1);
        let mut p = (-lambda).exp();
        for k in 0..=kmax {
            probs.push(p);
            p *= lambda / (k + 1) as f64;
        }
        Ok(Self::from_weights(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }

    pub fn max_degree(&self) -> usize {
        self.probs.len() - 1
    }

    /// Reusable sampler.
    pub fn sampler(&self) -> DegreeSampler {
        DegreeSampler {
            dist: WeightedIndex::new(&self.probs).expect("pmf has positive mass"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DegreeSampler {
    dist: WeightedIndex<f64>,
}

impl DegreeSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.dist.sample(rng)
    }
}

/// Configuration model on a realized degree sequence with even sum.
///
/// Half-edges are paired sequentially: the smallest-indexed unpaired half-edge
/// is matched with a uniformly chosen other unpaired half-edge. Self-loops and
/// multiple edges are kept.
pub fn configuration_model<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Result<Graph> {
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(Error::InvalidParameter("degree sum is odd".into()));
    }
    let owner: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    // unpaired half-edges, plus the position of each one in that list
    let mut pool: Vec<usize> = (0..total).collect();
    let mut pos: Vec<usize> = (0..total).collect();
    let mut paired = vec![false; total];
    let mut edges = Vec::with_capacity(total / 2);
    let remove = |h: usize, pool: &mut Vec<usize>, pos: &mut Vec<usize>| {
        let i = pos[h];
        let last = *pool.last().expect("pool not empty");
        pool.swap_remove(i);
        if last != h {
            pos[last] = i;
        }
    };
    let mut next = 0;
    while !pool.is_empty() {
        while paired[next] {
            next += 1;
        }
        let h = next;
        remove(h, &mut pool, &mut pos);
        let partner = pool[rng.random_range(0..pool.len())];
        remove(partner, &mut pool, &mut pos);
        paired[h] = true;
        paired[partner] = true;
        edges.push((owner[h], owner[partner]));
    }
    Graph::from_edges(degrees.len(), &edges)
}

/// Draw `n` iid degrees from `pmf`; if the sum is odd the last degree is
/// increased by one.
pub fn iid_degrees<R: Rng + ?Sized>(pmf: &DegreePmf, n: usize, rng: &mut R) -> Vec<usize> {
    let s = pmf.sampler();
    let mut d: Vec<usize> = (0..n).map(|_| s.sample(rng)).collect();
    if d.iter().sum::<usize>() % 2 == 1 {
        *d.last_mut().expect("odd sum implies n > 0") += 1;
    }
    d
}

/// Configuration model with iid degrees from `pmf`.
pub fn configuration_model_iid<R: Rng + ?Sized>(pmf: &DegreePmf, n: usize, rng: &mut R) -> Result<Graph> {
    let d = iid_degrees(pmf, n, rng);
    configuration_model(&d, rng)
}

/// Attachment weight as a function of a vertex's current number of children.
#[derive(Clone)]
pub enum AttachmentFn {
    /// f(k) = slope * k + offset.
    Affine {
        slope: f64,
        offset: f64,
    },
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl fmt::Debug for AttachmentFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttachmentFn::Affine { slope, offset } => {
                write!(f, "Affine {{ slope: {slope}, offset: {offset} }}")
            }
            AttachmentFn::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl AttachmentFn {
    /// f ≡ 1: uniform attachment.
    pub fn uniform() -> Self {
        AttachmentFn::Affine {
            slope: 0.0,
            offset: 1.0,
        }
    }

    /// f(k) = k + 1 + β: linear preferential attachment.
    pub fn linear(beta: f64) -> Self {
        AttachmentFn::Affine {
            slope: 1.0,
            offset: 1.0 + beta,
        }
    }

    pub fn custom(f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        AttachmentFn::Custom(Arc::new(f))
    }

    pub fn eval(&self, k: usize) -> f64 {
        match self {
            AttachmentFn::Affine { slope, offset } => slope * k as f64 + offset,
            AttachmentFn::Custom(f) => f(k),
        }
    }

    pub fn affine(&self) -> Option<(f64, f64)> {
        match *self {
            AttachmentFn::Affine { slope, offset } => Some((slope, offset)),
            AttachmentFn::Custom(_) => None,
        }
    }

    /// Check f(k) > 0 on 0..=limit.
    pub fn validate(&self, limit: usize) -> Result<()> {
        let bad = match self.affine() {
            Some((s, b)) => (b <= 0.0 || s * limit as f64 + b <= 0.0).then_some(0),
            None => (0..=limit).find(|&k| !(self.eval(k) > 0.0) || !self.eval(k).is_finite()),
        };
        match bad {
            Some(k) => Err(Error::InvalidParameter(format!(
                "attachment function must be positive (fails at k = {k})"
            ))),
            None => Ok(()),
        }
    }
}

/// Sequential recursive tree: vertex k attaches to an earlier vertex v with
/// probability proportional to f(number of children of v).
pub fn recursive_tree<R: Rng + ?Sized>(n: usize, f: &AttachmentFn, rng: &mut R) -> Result<RootedTree> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    f.validate(n.min(1_000_000))?;
    let mut parent = vec![NO_PARENT; n];
    match f.affine() {
        Some((slope, offset)) if slope >= 0.0 => {
            // total weight slope*(k-1) + offset*k splits into a uniform vertex
            // part and a child-count part; the latter picks the parent of a
            // uniform non-root vertex
            for k in 1..n {
                let uniform = offset * k as f64;
                let total = uniform + slope * (k - 1) as f64;
                let u = rng.random::<f64>() * total;
                parent[k] = if u < uniform || k == 1 {
                    rng.random_range(0..k)
                } else {
                    parent[rng.random_range(1..k)]
                };
            }
        }
        _ => {
            let mut children = vec![0usize; n];
            let mut fw = Fenwick::new(n);
            fw.set(0, f.eval(0));
            for k in 1..n {
                let v = fw.sample(rng);
                parent[k] = v;
                children[v] += 1;
                fw.set(v, f.eval(children[v]));
                fw.set(k, f.eval(0));
            }
        }
    }
    Ok(RootedTree::from_growth(parent))
}

/// Attribute-dependent attachment kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeKernel {
    pub pi: Vec<f64>,
    pub kappa: Vec<Vec<f64>>,
    pub gamma: f64,
}

impl AttributeKernel {
    pub fn new(pi: Vec<f64>, kappa: Vec<Vec<f64>>, gamma: f64) -> Result<Self> {
        let s = pi.len();
        if s == 0 || (pi.iter().sum::<f64>() - 1.0).abs() > 1e-9 || pi.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidParameter("pi must be a pmf".into()));
        }
        if kappa.len() != s || kappa.iter().any(|r| r.len() != s || r.iter().any(|&x| !(x > 0.0))) {
            return Err(Error::InvalidParameter("kappa must be a positive s x s matrix".into()));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter("gamma must lie in [0, 1]".into()));
        }
        Ok(AttributeKernel { pi, kappa, gamma })
    }

    /// Two attributes with affinity `same` within a class and `cross` across.
    pub fn two_class(p_first: f64, same: f64, cross: f64, gamma: f64) -> Result<Self> {
        Self::new(
            vec![p_first, 1.0 - p_first],
            vec![vec![same, cross], vec![cross, same]],
            gamma,
        )
    }
}

/// Attributed preferential attachment tree.
///
/// Every vertex draws an attribute from π. A newcomer with attribute a★
/// attaches to v with probability proportional to κ(a(v), a★)·deg(v)^γ, where
/// deg is the graph degree and the initial vertex starts at degree 1. Marks
/// hold the attribute indices.
pub fn attribute_tree<R: Rng + ?Sized>(n: usize, kernel: &AttributeKernel, rng: &mut R) -> Result<RootedTree> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let s = kernel.pi.len();
    let attr_dist = WeightedIndex::new(&kernel.pi).map_err(|e| Error::InvalidParameter(format!("pi: {e}")))?;
    let mut parent = vec![NO_PARENT; n];
    let mut marks = vec![0u32; n];
    let mut deg = vec![0usize; n];
    let mut classes: Vec<Fenwick> = (0..s).map(|_| Fenwick::new(n)).collect();
    let weight = |d: usize| (d as f64).powf(kernel.gamma);

    marks[0] = attr_dist.sample(rng) as u32;
    deg[0] = 1;
    classes[marks[0] as usize].set(0, weight(1));
    for k in 1..n {
        let a = attr_dist.sample(rng);
        let totals: Vec<f64> = (0..s).map(|c| kernel.kappa[c][a] * classes[c].total()).collect();
        let mut u = rng.random::<f64>() * totals.iter().sum::<f64>();
        let mut c = 0;
        while c + 1 < s && (u >= totals[c] || totals[c] == 0.0) {
            u -= totals[c];
            c += 1;
        }
        let v = classes[c].sample(rng);
        parent[k] = v;
        marks[k] = a as u32;
        deg[v] += 1;
        deg[k] = 1;
        classes[c].set(v, weight(deg[v]));
        classes[a].set(k, weight(1));
    }
    let mut t = RootedTree::from_growth(parent);
    t.marks = Some(marks);
    Ok(t)
}

/// Law of the number of steps walked toward the root in the co-evolving model.
#[derive(Debug, Clone, PartialEq)]
pub enum StepPmf {
    /// Probabilities of 0, 1, 2, ...
    Finite(Vec<f64>),
    /// P(Z = k) = p (1 - p)^k on {0, 1, 2, ...}.
    Geometric { p: f64 },
    /// Z ≡ k.
    Point(usize),
}

impl StepPmf {
    pub fn validate(&self) -> Result<()> {
        match self {
            StepPmf::Finite(p) => {
                if p.is_empty() || p.iter().any(|&x| !(x >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidParameter("step pmf must sum to 1".into()));
                }
            }
            StepPmf::Geometric { p } => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return Err(Error::InvalidParameter("geometric p must lie in (0, 1]".into()));
                }
            }
            StepPmf::Point(_) => {}
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match self {
            StepPmf::Finite(p) => p.iter().enumerate().map(|(k, x)| k as f64 * x).sum(),
            StepPmf::Geometric { p } => (1.0 - p) / p,
            StepPmf::Point(k) => *k as f64,
        }
    }

    pub fn prob(&self, k: usize) -> f64 {
        match self {
            StepPmf::Finite(p) => p.get(k).copied().unwrap_or(0.0),
            StepPmf::Geometric { p } => p * (1.0 - p).powi(k as i32),
            StepPmf::Point(j) => f64::from(u8::from(*j == k)),
        }
    }

    fn sampler(&self) -> Result<StepSampler> {
        self.validate()?;
        Ok(match self {
            StepPmf::Finite(p) => {
                StepSampler::Table(WeightedIndex::new(p).map_err(|e| Error::InvalidParameter(e.to_string()))?)
            }
            StepPmf::Geometric { p } if *p >= 1.0 => StepSampler::Point(0),
            StepPmf::Geometric { p } => StepSampler::Geometric((1.0 - p).ln()),
            StepPmf::Point(k) => StepSampler::Point(*k),
        })
    }
}

enum StepSampler {
    Table(WeightedIndex<f64>),
    Geometric(f64),
    Point(usize),
}

impl StepSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self {
            StepSampler::Table(d) => d.sample(rng),
            StepSampler::Geometric(log_q) => {
                let u: f64 = rng.random();
                let z = ((1.0 - u).ln() / log_q).floor();
                if z >= usize::MAX as f64 {
                    usize::MAX
                } else {
                    z as usize
                }
            }
            StepSampler::Point(k) => *k,
        }
    }
}

/// One arrival of the co-evolving model: the uniformly chosen vertex, the
/// step length drawn and the vertex finally attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoevolvingStep {
    pub chosen: usize,
    pub steps: usize,
    pub target: usize,
}

/// Co-evolving tree: starting from the edge 1 -> 0, each arrival picks a
/// uniform existing vertex, walks Z steps toward the root (stopping there)
/// and attaches to the vertex reached.
pub fn coevolving_tree<R: Rng + ?Sized>(n: usize, step: &StepPmf, rng: &mut R) -> Result<RootedTree> {
    coevolving_tree_traced(n, step, rng).map(|(t, _)| t)
}

pub fn coevolving_tree_traced<R: Rng + ?Sized>(
    n: usize,
    step: &StepPmf,
    rng: &mut R,
) -> Result<(RootedTree, Vec<CoevolvingStep>)> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let sampler = step.sampler()?;
    let mut parent = vec![NO_PARENT; n];
    let mut depth = vec![0usize; n];
    let mut trace = Vec::with_capacity(n.saturating_sub(2));
    if n >= 2 {
        parent[1] = 0;
        depth[1] = 1;
    }
    for k in 2..n {
        let chosen = rng.random_range(0..k);
        let steps = sampler.sample(rng);
        let mut v = chosen;
        for _ in 0..steps.min(depth[chosen]) {
            v = parent[v];
        }
        parent[k] = v;
        depth[k] = depth[v] + 1;
        trace.push(CoevolvingStep {
            chosen,
            steps,
            target: v,
        });
    }
    Ok((RootedTree::from_growth(parent), trace))
}

/// Fraction of all vertices that are children of the root.
pub fn root_degree_fraction(t: &RootedTree) -> f64 {
    t.children(0).len() as f64 / t.n() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn er_degenerate_cases() {
        let mut rng = seeded(1);
        assert_eq!(erdos_renyi(2, 2.0, &mut rng).unwrap().num_edges(), 1);
        assert_eq!(erdos_renyi(3, 0.0, &mut rng).unwrap().num_edges(), 0);
        assert_eq!(erdos_renyi(4, 4.0, &mut rng).unwrap().num_edges(), 6);
        assert!(erdos_renyi(3, 4.0, &mut rng).is_err());
        let g = erdos_renyi(500, 3.0, &mut rng).unwrap();
        assert!(g.is_simple());
    }

    #[test]
    fn cm_forced_cases() {
        let mut rng = seeded(2);
        let g = configuration_model(&[1, 1], &mut rng).unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);
        let g = configuration_model(&[2], &mut rng).unwrap();
        assert_eq!(g.edges(), vec![(0, 0)]);
        assert_eq!(g.degree(0), 2);
        assert!(configuration_model(&[1, 2], &mut rng).is_err());
    }

    #[test]
    fn pmf_constructors() {
        let p = DegreePmf::poisson(2.0, 40).unwrap();
        assert!((p.mean() - 2.0).abs() < 1e-10);
        assert!((p.second_moment() - 6.0).abs() < 1e-9);
        assert_eq!(DegreePmf::delta(3).probs(), &[0.0, 0.0, 0.0, 1.0]);
        assert!(DegreePmf::new(vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn tiny_recursive_trees() {
        let mut rng = seeded(3);
        for f in [
            AttachmentFn::uniform(),
            AttachmentFn::linear(1.0),
            AttachmentFn::custom(|k| (k + 1) as f64),
        ] {
            let t = recursive_tree(2, &f, &mut rng).unwrap();
            assert_eq!(t.parents(), &[NO_PARENT, 0]);
            assert_eq!(recursive_tree(200, &f, &mut rng).unwrap().n(), 200);
        }
        assert!(AttachmentFn::custom(|k| 3.0 - k as f64).validate(10).is_err());
        assert!(AttachmentFn::linear(-1.0).validate(10).is_err());
    }

    #[test]
    fn attribute_tree_marks() {
        let mut rng = seeded(4);
        let k = AttributeKernel::two_class(0.35, 0.75, 0.25, 1.0).unwrap();
        let t = attribute_tree(1000, &k, &mut rng).unwrap();
        let marks = t.marks.as_ref().unwrap();
        let red = marks.iter().filter(|&&m| m == 0).count() as f64 / 1000.0;
        assert!((red - 0.35).abs() < 0.06);
        assert!(AttributeKernel::two_class(0.35, 0.75, 0.0, 1.0).is_err());
        assert!(AttributeKernel::two_class(0.35, 0.75, 0.25, 1.5).is_err());
    }

    #[test]
    fn coevolving_extremes() {
        let mut rng = seeded(5);
        let star = coevolving_tree(50, &StepPmf::Point(1_000_000), &mut rng).unwrap();
        assert_eq!(star.children(0).len(), 49);
        let (_, trace) = coevolving_tree_traced(300, &StepPmf::Geometric { p: 0.5 }, &mut rng).unwrap();
        assert_eq!(trace.len(), 298);
        assert_eq!(StepPmf::Geometric { p: 0.35 }.mean(), 0.65 / 0.35);
        assert!(StepPmf::Finite(vec![0.5]).validate().is_err());
    }
}
