use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::canon::CanonicalCode;

/// Default width of real-valued bins.
pub const DEFAULT_BIN_WIDTH: f64 = 0.05;

/// Keys that can be written into the measure JSON.
pub trait MeasureKey: Ord + Clone {
    fn key_string(&self) -> String;
}

impl MeasureKey for CanonicalCode {
    fn key_string(&self) -> String {
        self.as_str().to_string()
    }
}

impl MeasureKey for usize {
    fn key_string(&self) -> String {
        self.to_string()
    }
}

impl MeasureKey for i64 {
    fn key_string(&self) -> String {
        self.to_string()
    }
}

impl MeasureKey for String {
    fn key_string(&self) -> String {
        self.clone()
    }
}

/// Half-open bin `[index * width, (index + 1) * width)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealBin {
    pub index: i64,
    pub width: f64,
}

impl RealBin {
    pub fn of(x: f64, width: f64) -> Self {
        RealBin {
            index: (x / width).floor() as i64,
            width,
        }
    }

    pub fn lo(&self) -> f64 {
        self.index as f64 * self.width
    }

    pub fn hi(&self) -> f64 {
        (self.index + 1) as f64 * self.width
    }

    pub fn mid(&self) -> f64 {
        (self.index as f64 + 0.5) * self.width
    }
}

impl Eq for RealBin {}

impl PartialOrd for RealBin {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RealBin {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index.cmp(&other.index).then(self.width.total_cmp(&other.width))
    }
}

impl MeasureKey for RealBin {
    fn key_string(&self) -> String {
        format!("[{},{})", self.lo(), self.hi())
    }
}

/// Finite nonnegative measure on keys.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure<K: Ord> {
    atoms: BTreeMap<K, f64>,
    total: f64,
}

impl<K: Ord> Default for EmpiricalMeasure<K> {
    fn default() -> Self {
        EmpiricalMeasure {
            atoms: BTreeMap::new(),
            total: 0.0,
        }
    }
}

impl<K: Ord + Clone> EmpiricalMeasure<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: K, w: f64) {
        assert!(w >= 0.0, "negative weight");
        *self.atoms.entry(key).or_insert(0.0) += w;
        self.total += w;
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight(&self, key: &K) -> f64 {
        self.atoms.get(key).copied().unwrap_or(0.0)
    }

    /// Normalized probability of `key`; 0 for a zero measure.
    pub fn prob(&self, key: &K) -> f64 {
        if self.total > 0.0 {
            self.weight(key) / self.total
        } else {
            0.0
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.atoms.iter().map(|(k, &w)| (k, w))
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.atoms.keys()
    }

    /// Copy scaled to total mass 1.
    pub fn normalized(&self) -> Result<Self> {
        if self.total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let atoms: BTreeMap<K, f64> = self.atoms.iter().map(|(k, &w)| (k.clone(), w / self.total)).collect();
        let total = atoms.values().sum();
        Ok(EmpiricalMeasure { atoms, total })
    }

    /// Add all atoms of `other` (merging is order independent up to
    /// floating-point summation; callers merge in key order).
    pub fn merge(&mut self, other: &Self) {
        for (k, &w) in &other.atoms {
            self.add(k.clone(), w);
        }
    }

    /// Push the measure forward along `f`.
    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> EmpiricalMeasure<K2> {
        let mut out = EmpiricalMeasure::new();
        for (k, &w) in &self.atoms {
            out.add(f(k), w);
        }
        out
    }

    pub fn from_counts(items: impl IntoIterator<Item = K>) -> Self {
        let mut m = Self::new();
        for k in items {
            m.add(k, 1.0);
        }
        m
    }
}

/// Total variation distance between the normalizations of two measures.
pub fn tv_distance<K: Ord + Clone>(a: &EmpiricalMeasure<K>, b: &EmpiricalMeasure<K>) -> Result<f64> {
    if a.total <= 0.0 || b.total <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let mut sum = 0.0;
    for (k, &w) in &a.atoms {
        sum += (w / a.total - b.prob(k)).abs();
    }
    for (k, &w) in &b.atoms {
        if !a.atoms.contains_key(k) {
            sum += w / b.total;
        }
    }
    Ok((0.5 * sum).min(1.0))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AtomJson {
    pub key: String,
    pub w: f64,
}

/// Serialized form of a measure.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MeasureJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub meta: Option<serde_json::Value>,
    pub atoms: Vec<AtomJson>,
    pub total: f64,
}

impl<K: MeasureKey> EmpiricalMeasure<K> {
    pub fn to_json(&self) -> MeasureJson {
        MeasureJson {
            kind: None,
            meta: None,
            atoms: self
                .atoms
                .iter()
                .map(|(k, &w)| AtomJson { key: k.key_string(), w })
                .collect(),
            total: self.total,
        }
    }
}

impl MeasureJson {
    pub fn into_value(self) -> serde_json::Value {
        serde_json::to_value(self).expect("measure serializes")
    }

    /// Rebuild a measure keyed by the serialized strings.
    pub fn to_measure(&self) -> EmpiricalMeasure<String> {
        let mut m = EmpiricalMeasure::new();
        for a in &self.atoms {
            m.add(a.key.clone(), a.w);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(pairs: &[(&str, f64)]) -> EmpiricalMeasure<String> {
        let mut out = EmpiricalMeasure::new();
        for &(k, w) in pairs {
            out.add(k.to_string(), w);
        }
        out
    }

    #[test]
    fn tv_examples() {
        let a = m(&[("a", 0.75), ("b", 0.25)]);
        let b = m(&[("a", 0.25), ("b", 0.75)]);
        assert!((tv_distance(&a, &b).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
        let c = m(&[("c", 2.0)]);
        assert!((tv_distance(&a, &c).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(tv_distance(&a, &EmpiricalMeasure::new()), Err(Error::ZeroMass));
    }

    #[test]
    fn bins_are_half_open() {
        assert_eq!(RealBin::of(0.0, 0.05).index, 0);
        assert_eq!(RealBin::of(0.05, 0.05).index, 1);
        assert_eq!(RealBin::of(-0.01, 0.05).index, -1);
        assert_eq!(RealBin::of(0.12, 0.05).key_string(), "[0.1,0.15000000000000002)");
    }

    #[test]
    fn json_round_trip() {
        let a = m(&[("x", 1.0), ("y", 3.0)]);
        let j = serde_json::to_string(&a.to_json()).unwrap();
        assert_eq!(j, r#"{"atoms":[{"key":"x","w":1.0},{"key":"y","w":3.0}],"total":4.0}"#);
        let back: MeasureJson = serde_json::from_str(&j).unwrap();
        assert_eq!(back.to_measure(), a);
    }
}
