//! Rate model and network-level rate distributions.

pub mod coverage;
pub mod dimensioning;
pub mod hybrid;
pub mod instant;

pub use coverage::{rate_coverage, rate_coverage_meanload, rate_coverage_with, LinkCoverage, LoadSupports, RateAnalysis, Support};
pub use dimensioning::{
    median_rate_contour, network_rate_coverage, rate_percentile, saturation_condition, saturation_density, ContourPoint, SaturationQuery,
    CONTOUR_OMEGA_TOL,
};
pub use hybrid::{HybridAnalysis, UhfCoverageTable};
pub use instant::{instantaneous_rate, spectral_threshold, Loads, RateConfig};
