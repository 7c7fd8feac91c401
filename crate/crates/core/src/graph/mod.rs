//! Rooted graphs and trees, balls, canonical codes, the local metric on rooted
//! graphs and empirical measures.

pub mod canon;
#[allow(clippy::module_inception)]
pub mod graph;
pub mod io;
pub mod measure;
pub mod tree;

pub use canon::{canonical_code, canonical_code_with, tree_code, CanonOptions, CanonicalCode, ShapeInterner};
pub use graph::{standard_construction, Graph, RootedGraph};
pub use measure::{tv_distance, EmpiricalMeasure, MeasureJson, MeasureKey, RealBin};
pub use tree::{RootedTree, NO_PARENT};

use crate::error::{Error, Result};
use graph::BallScratch;

/// Distance `1 / (1 + R)` where `R` is the largest radius at which the two
/// root balls are isomorphic; 0 when they agree at every radius.
pub fn lwc_distance(g1: &RootedGraph, g2: &RootedGraph) -> Result<f64> {
    let mut prev = (0usize, 0usize);
    for r in 0.. {
        let b1 = g1.ball(r);
        let b2 = g2.ball(r);
        if canonical_code(&b1)? != canonical_code(&b2)? {
            // r = 0 balls are single vertices and always agree
            return Ok(1.0 / r as f64);
        }
        let sizes = (b1.n(), b2.n());
        if r > 0 && sizes == prev {
            // both balls stopped growing: the components are isomorphic
            return Ok(0.0);
        }
        prev = sizes;
    }
    unreachable!()
}

/// Empirical law of the radius-`k` ball around a uniform vertex.
pub fn empirical_neighborhoods(g: &Graph, k: usize) -> Result<EmpiricalMeasure<CanonicalCode>> {
    empirical_neighborhoods_with(g, k, CanonOptions::default())
}

pub fn empirical_neighborhoods_with(
    g: &Graph,
    k: usize,
    opts: CanonOptions,
) -> Result<EmpiricalMeasure<CanonicalCode>> {
    let mut counts: std::collections::BTreeMap<CanonicalCode, usize> = Default::default();
    let mut scratch = BallScratch::new(g.n());
    for v in 0..g.n() {
        let b = g.ball_with(v, k, &mut scratch);
        let code = canonical_code_with(&b, opts).map_err(|e| match e {
            Error::CanonicalCap { vertices, cap, .. } => Error::CanonicalCap {
                vertices,
                cap,
                origin: Some(v),
            },
            other => other,
        })?;
        *counts.entry(code).or_insert(0) += 1;
    }
    let mut m = EmpiricalMeasure::new();
    let n = g.n() as f64;
    for (code, c) in counts {
        m.add(code, c as f64 / n);
    }
    Ok(m)
}
