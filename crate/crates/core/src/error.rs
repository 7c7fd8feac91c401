use thiserror::Error;

/// Errors produced by the model, limit and experiment routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid vertex id {vertex} (graph has {n} vertices)")]
    InvalidVertex { vertex: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("canonicalization cap exceeded: {vertices} vertices > cap {cap}{}", .origin.map(|v| format!(" (ball around vertex {v})")).unwrap_or_default())]
    CanonicalCap {
        vertices: usize,
        cap: usize,
        origin: Option<usize>,
    },

    #[error("canonical search budget of {0} leaves exhausted")]
    CanonicalBudget(usize),

    #[error("measure has zero total mass")]
    ZeroMass,

    #[error("population cap {cap} exceeded at time {time}")]
    PopulationCap { cap: usize, time: f64 },

    #[error("size cap exceeded: {size} > {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("insufficient tail mass: {0}")]
    InsufficientTail(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
