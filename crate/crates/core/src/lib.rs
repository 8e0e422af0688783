//! Numerical toolkit for entropy inequalities on finite-dimensional
//! tensor-product Hilbert spaces: von Neumann and classical entropies,
//! measurement ensembles, trace-exponential concavity, SU(2) Wehrl entropy,
//! and seeded suites that check each inequality on random instances.

pub mod checks;
pub mod entropy;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod measurement;
pub mod random;
pub mod suite;
pub mod wehrl;

pub use error::{Error, Result};
