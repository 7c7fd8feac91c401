//! Random graph models, their local limits and the numerical limit objects
//! attached to them: fringe laws of recursive trees, branching-process
//! embeddings, sparse spectra, Ising free energies, the random assignment
//! constant and PageRank tails.

pub mod assignment;
pub mod branching;
pub mod cli;
pub mod error;
mod fenwick;
pub mod fringe;
pub mod generators;
pub mod graph;
pub mod ising;
pub mod pagerank;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
