//! Analytical and Monte Carlo engines for self-backhauled millimeter-wave
//! cellular networks.

pub mod config;
pub mod coverage;
pub mod curve;
pub mod error;
pub mod geometry;
pub mod load;
pub mod numerics;
pub mod propagation;
pub mod rate;
pub mod simulator;
pub mod units;

pub use error::{Error, Result};

/// Library version, recorded in study outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
