//! Building footprints, line-of-sight testing and blockage fitting.

pub mod buildings;
pub mod fit;
pub mod los;

pub use buildings::{segments_intersect, BoundingBox, BuildingSet, Point, Polygon};
pub use fit::{fit_blockage, los_area_fraction, BlockageFit, PolarSampling};
pub use los::{blocking_distance, los_test, los_test_brute_force};
