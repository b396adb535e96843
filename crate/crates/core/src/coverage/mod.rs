//! Coverage probabilities: SNR in closed form, the INR bound, and SINR.

pub mod radio;
pub mod shot_noise;
pub mod sinr;
pub mod snr;

pub use radio::{FpcParams, InterfererGainDist, LinkKind, RadioConfig};
pub use shot_noise::{inr_bound_ccdf, inr_uniform_closed_form, Kernel, ShotNoise};
pub use sinr::{sinr_coverage, Fading, SinrOptions};
pub use snr::{coverage_below_path_loss, snr_coverage, uplink_fpc_coverage};
