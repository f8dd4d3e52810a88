//! Exact and multiplierless approximate DCT-II construction, 2N-point
//! scaling, orthogonalization, fast-algorithm costing and coding metrics.

pub mod analysis;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod exact;
pub mod fastpath;
pub mod matkit;
pub mod metrics;
pub mod scaler;

pub use error::{Error, Result};
