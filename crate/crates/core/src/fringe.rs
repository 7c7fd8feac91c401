//! Fringe and extended-fringe decompositions of rooted trees, empirical fringe
//! measures, the child-count matrix Q and the stationarity check for fringe
//! laws.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{tree_code, CanonicalCode, EmpiricalMeasure, MeasureKey, RootedTree, ShapeInterner};

/// Default vertex cap for the finite projection of the stationarity identity.
pub const DEFAULT_SUPPORT_CAP: usize = 6;

/// `(f_0, ..., f_h)`: the subtree below `v`, then for each ancestor the
/// subtree below it with the branch leading back to `v` removed.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeStack {
    pub trees: Vec<RootedTree>,
    /// The requested depth exceeded the depth of `v`.
    pub truncated: bool,
}

/// Canonical key of a fringe stack.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StackKey {
    pub levels: Vec<CanonicalCode>,
    pub truncated: bool,
}

impl MeasureKey for StackKey {
    fn key_string(&self) -> String {
        let parts: Vec<&str> = self.levels.iter().map(CanonicalCode::as_str).collect();
        format!("{}{}", if self.truncated { "!" } else { "" }, parts.join("/"))
    }
}

impl FringeStack {
    pub fn key(&self) -> StackKey {
        StackKey {
            levels: self.trees.iter().map(tree_code).collect(),
            truncated: self.truncated,
        }
    }

    /// Re-attach each level below the root of the next one; the result is the
    /// subtree below the highest ancestor in the stack.
    pub fn assemble(&self) -> RootedTree {
        let mut parent: Vec<usize> = Vec::new();
        let mut below: Option<usize> = None;
        // build top-down so that parents precede children
        let mut offsets = vec![0; self.trees.len()];
        let mut total = 0;
        for (i, t) in self.trees.iter().enumerate().rev() {
            offsets[i] = total;
            total += t.n();
        }
        parent.resize(total, 0);
        for (i, t) in self.trees.iter().enumerate().rev() {
            let off = offsets[i];
            for v in 0..t.n() {
                parent[off + v] = match t.parent(v) {
                    Some(p) => off + p,
                    None => below.map_or(crate::graph::NO_PARENT, |b| b),
                };
            }
            below = Some(off);
        }
        RootedTree::from_parents(parent).expect("stack levels form a tree")
    }
}

/// Fringe decomposition of `t` about `v` up to `k` ancestors (fewer when `v`
/// is shallower, in which case the stack is flagged as truncated).
pub fn fringe_decompose(t: &RootedTree, v: usize, k: usize) -> Result<FringeStack> {
    t.check(v)?;
    let mut trees = vec![t.subtree(v)?];
    let mut below = v;
    let mut truncated = false;
    for _ in 0..k {
        let Some(a) = t.parent(below) else {
            truncated = true;
            break;
        };
        let mut order = vec![a];
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            order.extend(t.children(u).iter().copied().filter(|&c| c != below));
            i += 1;
        }
        trees.push(t.restrict(&order));
        below = a;
    }
    Ok(FringeStack { trees, truncated })
}

/// Empirical law of the depth-`k` fringe stack at a uniform vertex. Vertices
/// closer than `k` to the root contribute truncated stacks.
pub fn empirical_fringe(t: &RootedTree, k: usize) -> EmpiricalMeasure<StackKey> {
    let mut interner = ShapeInterner::new();
    let class = interner.classify(t);
    let mut counts: HashMap<(Vec<u32>, bool), usize> = HashMap::new();
    for v in 0..t.n() {
        let mut levels = vec![class[v]];
        let mut below = v;
        let mut truncated = false;
        for _ in 0..k {
            let Some(a) = t.parent(below) else {
                truncated = true;
                break;
            };
            let mut kids: Vec<u32> = t.children(a).iter().map(|&c| class[c]).collect();
            let pos = kids
                .iter()
                .position(|&c| c == class[below])
                .expect("child class present");
            kids.swap_remove(pos);
            levels.push(interner.join(kids));
            below = a;
        }
        *counts.entry((levels, truncated)).or_insert(0) += 1;
    }
    let n = t.n() as f64;
    let mut m = EmpiricalMeasure::new();
    for ((levels, truncated), c) in counts {
        let key = StackKey {
            levels: levels.into_iter().map(|l| interner.code(l)).collect(),
            truncated,
        };
        m.add(key, c as f64 / n);
    }
    m
}

/// Number of root children of `s` whose subtree is isomorphic to `t`.
pub fn subtree_count_q(s: &RootedTree, t: &RootedTree) -> usize {
    let mut interner = ShapeInterner::new();
    let target = interner.classify(t)[0];
    let class = interner.classify(s);
    s.children(0).iter().filter(|&&c| class[c] == target).count()
}

/// Same count on canonical tree codes.
pub fn subtree_count_q_codes(s: &CanonicalCode, t: &CanonicalCode) -> Result<usize> {
    Ok(s.child_codes()?.iter().filter(|c| *c == t).count())
}

/// Where the atoms of a fringe law came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawSource {
    Empirical,
    Sampler,
}

/// Probability law on tree shapes, stored by canonical code.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeLaw {
    pub measure: EmpiricalMeasure<CanonicalCode>,
    pub source: LawSource,
}

impl FringeLaw {
    pub fn new(measure: EmpiricalMeasure<CanonicalCode>, source: LawSource) -> Result<Self> {
        if measure.keys().any(|c| !c.is_tree()) {
            return Err(Error::InvalidParameter("fringe law atoms must be tree codes".into()));
        }
        Ok(FringeLaw {
            measure: measure.normalized()?,
            source,
        })
    }

    /// Empirical law of the fringe at a uniform vertex of `t`.
    pub fn of_tree(t: &RootedTree) -> Self {
        let m = empirical_fringe(t, 0).map_keys(|k| k.levels[0].clone());
        FringeLaw {
            measure: m,
            source: LawSource::Empirical,
        }
    }

    /// Law of iid sampled trees.
    pub fn from_samples<'a>(trees: impl IntoIterator<Item = &'a RootedTree>) -> Result<Self> {
        let m = EmpiricalMeasure::from_counts(trees.into_iter().map(tree_code));
        FringeLaw::new(m, LawSource::Sampler)
    }

    pub fn prob(&self, t: &CanonicalCode) -> f64 {
        self.measure.prob(t)
    }
}

/// Accumulates both sides of the stationarity identity
/// `sum_s w(s) Q(s, t) = w(t)` restricted to shapes `t` with at most `cap`
/// vertices. Feeding trees directly avoids materializing codes of large ones.
#[derive(Debug, Clone)]
pub struct StationarityCheck {
    cap: usize,
    mass: BTreeMap<CanonicalCode, f64>,
    flow: BTreeMap<CanonicalCode, f64>,
    total: f64,
}

impl StationarityCheck {
    pub fn new(cap: usize) -> Self {
        StationarityCheck {
            cap,
            mass: BTreeMap::new(),
            flow: BTreeMap::new(),
            total: 0.0,
        }
    }

    pub fn add_tree(&mut self, t: &RootedTree, w: f64) {
        self.total += w;
        let sizes = t.subtree_sizes();
        let small = |v: usize, t: &RootedTree| -> Option<CanonicalCode> {
            (sizes[v] <= self.cap).then(|| tree_code(&t.subtree(v).expect("valid vertex")))
        };
        if let Some(c) = small(0, t) {
            *self.mass.entry(c).or_insert(0.0) += w;
        }
        for &c in t.children(0) {
            if let Some(code) = small(c, t) {
                *self.flow.entry(code).or_insert(0.0) += w;
            }
        }
    }

    pub fn add_code(&mut self, s: &CanonicalCode, w: f64) -> Result<()> {
        let kids = s.child_codes()?;
        self.total += w;
        if s.tree_size().is_some_and(|n| n <= self.cap) {
            *self.mass.entry(s.clone()).or_insert(0.0) += w;
        }
        for c in kids {
            if c.tree_size().is_some_and(|n| n <= self.cap) {
                *self.flow.entry(c).or_insert(0.0) += w;
            }
        }
        Ok(())
    }

    /// `sum_t |sum_s w(s) Q(s, t) - w(t)|` over small `t`, with `w` normalized.
    pub fn residual(&self) -> f64 {
        if self.total <= 0.0 {
            return 0.0;
        }
        let mut keys: Vec<&CanonicalCode> = self.mass.keys().chain(self.flow.keys()).collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|k| {
                let m = self.mass.get(k).copied().unwrap_or(0.0);
                let f = self.flow.get(k).copied().unwrap_or(0.0);
                (f - m).abs() / self.total
            })
            .sum()
    }
}

/// Stationarity residual of a fringe law on shapes with at most
/// `support_cap` vertices; 0 means the law is a left fixed point of Q there.
pub fn stationarity_residual(law: &FringeLaw, support_cap: usize) -> Result<f64> {
    let mut check = StationarityCheck::new(support_cap);
    for (code, w) in law.measure.iter() {
        check.add_code(code, w)?;
    }
    Ok(check.residual())
}

/// Number of vertices at distance `depth` from the root, read off a tree code.
fn generation_size(code: &CanonicalCode, depth: usize) -> usize {
    let mut level = 0usize;
    let mut count = 0;
    for &b in code.bracket().unwrap_or(&[]) {
        if b == b'(' {
            if level == depth {
                count += 1;
            }
            level += 1;
        } else {
            level -= 1;
        }
    }
    count
}

/// Sample an extended fringe `(f_0, ..., f_depth)` from the law whose weight is
/// `w(t_depth) * prod Q(t_i, t_{i-1})`, `t_i` being the fringe of the i-th
/// ancestor. The top tree is drawn with probability proportional to
/// `w(t) * (vertices of t at generation depth)`, then a uniform vertex of
/// that generation is unwrapped into the stack. For a stationary law the
/// normalizing constant is 1.
pub fn extended_fringe_sampler<R: Rng + ?Sized>(law: &FringeLaw, depth: usize, rng: &mut R) -> Result<FringeStack> {
    ExtendedFringeSampler::new(law, depth)?.sample(rng)
}

/// Precomputed weights for repeated extended-fringe sampling.
#[derive(Debug, Clone)]
pub struct ExtendedFringeSampler {
    atoms: Vec<(CanonicalCode, usize)>,
    cumulative: Vec<f64>,
    depth: usize,
    decoded: HashMap<usize, RootedTree>,
}

impl ExtendedFringeSampler {
    pub fn new(law: &FringeLaw, depth: usize) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for (code, w) in law.measure.iter() {
            let z = generation_size(code, depth);
            if z > 0 && w > 0.0 {
                acc += w * z as f64;
                atoms.push((code.clone(), z));
                cumulative.push(acc);
            }
        }
        if atoms.is_empty() {
            return Err(Error::NoSolution(format!(
                "no atom of the law has a vertex at generation {depth}"
            )));
        }
        Ok(ExtendedFringeSampler {
            atoms,
            cumulative,
            depth,
            decoded: HashMap::new(),
        })
    }

    /// Normalizing constant `sum_t w(t) Z_depth(t)`; equals 1 for a
    /// stationary law.
    pub fn mass(&self) -> f64 {
        *self.cumulative.last().expect("nonempty")
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<FringeStack> {
        let u = rng.random::<f64>() * self.mass();
        let i = self.cumulative.partition_point(|&c| c <= u).min(self.atoms.len() - 1);
        let (code, z) = &self.atoms[i];
        let pick = rng.random_range(0..*z);
        if !self.decoded.contains_key(&i) {
            self.decoded.insert(i, code.to_tree()?);
        }
        let t = &self.decoded[&i];
        let depths = t.depths();
        let v = (0..t.n())
            .filter(|&v| depths[v] == self.depth)
            .nth(pick)
            .expect("generation size matches the code");
        fringe_decompose(t, v, self.depth)
    }
}

/// Law of the fringe size at a uniform vertex.
pub fn fringe_size_pmf(t: &RootedTree) -> EmpiricalMeasure<usize> {
    EmpiricalMeasure::from_counts(t.subtree_sizes())
        .normalized()
        .expect("a tree has at least one vertex")
}
