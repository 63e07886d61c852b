//! Empirical optimal transport: exact Wasserstein distances, dyadic bounds,
//! finite-sample dimension estimates and convergence-rate experiments on
//! `[0,1]^m`.

pub mod bounds;
pub mod dimension;
pub mod dyadic;
pub mod error;
pub mod ground;
pub mod harness;
pub mod transport;

pub use error::{Error, Result};
