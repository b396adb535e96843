//! Monte Carlo simulation of mmWave deployments with wired and wireless backhaul.

mod channel;
mod config;
mod deployment;
mod estimate;
mod evaluate;
mod hybrid;
mod index;
mod loads;
mod rng;
mod window;

pub use channel::Link;
pub use config::{BlockageSource, SimConfig};
pub use deployment::{generate_snapshot, DeploymentSnapshot};
pub use estimate::{ccdf_from_samples, estimate_ccdf, sample_typical, typical_value, wilson_interval, Estimate, Metric, Samples};
pub use evaluate::{airtime, evaluate_snapshot, UserRecord};
pub use loads::{cell_loads, CellLoads, LoadHistogram};
pub use rng::{splitmix64, Purpose, TrialStreams, NORMAL_BOUND};
pub use window::{EdgeMode, Window};
