//! Effective resistance on weighted simplicial complexes.

pub mod circuits;
pub mod cli;
pub mod complex;
mod dense;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod io;
pub mod laplacian;
pub mod metrics;
pub mod resistance;
pub mod spectral;

pub use complex::{Basis, BasisKind, BasisTag, ChainVec, OpMatrix, Side, Simplex, WeightedComplex};
pub use error::{Error, Result};
