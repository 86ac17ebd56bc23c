//! Least-action rationality engine: simplex geometry, on-shell and lifted
//! amplitude dynamics, split-complex and complex packagings, and readouts.

pub mod clar;
pub mod error;
pub mod grid;
pub mod lifted;
pub mod linalg;
pub mod onshell;
pub mod par;
pub mod readout;
pub mod rng;
pub mod simplex;
pub mod split_complex;
pub mod tol;

pub use error::{LarError, Result};
pub use onshell::PreferenceOperator;
pub use par::Execution;
pub use tol::Tolerances;
