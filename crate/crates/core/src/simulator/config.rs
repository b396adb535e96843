//! Simulation settings.

use serde::{Deserialize, Serialize};

use super::window::{EdgeMode, Window};
use crate::config::NetworkConfig;
use crate::coverage::Fading;
use crate::error::{invalid, Result};

/// Where LOS states come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockageSource {
    /// Independent Bernoulli per link from the LOS-ball parameters.
    Stochastic,
    /// Segment tests against building footprints.
    Polygons,
}

/// Monte Carlo settings. Lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub width: f64,
    pub height: f64,
    pub trials: u64,
    pub seed: u64,
    pub edge_mode: EdgeMode,
    pub blockage_source: BlockageSource,
    pub fading: Fading,
    pub interference: bool,
    /// Only BSs with at least one associated user transmit on the downlink.
    pub activity_thinning: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            width: 2000.0,
            height: 2000.0,
            trials: 10_000,
            seed: 1,
            edge_mode: EdgeMode::Torus,
            blockage_source: BlockageSource::Stochastic,
            fading: Fading::None,
            interference: true,
            activity_thinning: false,
        }
    }
}

impl SimConfig {
    pub fn window(&self) -> Result<Window> {
        Window::new(self.width, self.height, self.edge_mode)
    }

    pub fn validate(&self, net: &NetworkConfig) -> Result<()> {
        self.window()?;
        if self.trials == 0 {
            return invalid("at least one trial is required");
        }
        match (self.edge_mode, self.blockage_source) {
            (EdgeMode::Torus, BlockageSource::Polygons) => {
                return invalid("polygon blockage needs a guard margin; a torus has no meaning on a real map")
            }
            (EdgeMode::Guard { margin }, BlockageSource::Stochastic) => {
                let d = net.access_blockage.d_ball.max(net.backhaul_blockage.d_ball);
                if margin < d {
                    return invalid(format!("guard margin {margin} m is below the LOS ball radius {d} m"));
                }
            }
            _ => {}
        }
        net.radio.validate()?;
        net.access.validate()?;
        net.backhaul.validate()?;
        net.access_blockage.validate()?;
        net.backhaul_blockage.validate()?;
        if !(net.bs_density > 0.0 && net.bs_density.is_finite()) || !(net.user_density >= 0.0 && net.user_density.is_finite()) {
            return invalid(format!("densities must satisfy BS > 0, users >= 0 (got {}, {})", net.bs_density, net.user_density));
        }
        if !(net.abs_fraction > 0.0 && net.abs_fraction <= 1.0) {
            return invalid(format!("A-BS fraction must lie in (0, 1], got {}", net.abs_fraction));
        }
        net.rate_config().validate()
    }
}
