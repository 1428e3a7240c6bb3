//! Computational toolkit for matrix-bundle stratification, holomorphic
//! Jordanizability tests, and formal power-series solvers for integrable
//! deformations of Birkhoff normal forms.

pub mod appendix;
pub mod bundles;
pub mod darboux;
pub mod error;
pub mod gap;
pub mod gauge;
pub mod linalg;
pub mod partitions;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
