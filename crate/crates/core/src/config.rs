//! Network-wide parameters in internal units (mW, Hz, m, per m²).

use crate::coverage::{LinkKind, RadioConfig};
use crate::error::{invalid, Result};
use crate::load::LoadModel;
use crate::numerics::special::LognormalParams;
use crate::propagation::{BlockageParams, LinkClassParams, PropagationModel};
use crate::rate::RateConfig;
use crate::units::{db_to_linear, dbm_to_mw, per_km2_to_per_m2};

/// Deployment, propagation and radio parameters of a self-backhauled
/// network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// Users per m².
    pub user_density: f64,
    /// BSs per m² (A-BSs included).
    pub bs_density: f64,
    /// Fraction of BSs with wired backhaul.
    pub abs_fraction: f64,
    pub radio: RadioConfig,
    pub access: LinkClassParams,
    pub backhaul: LinkClassParams,
    pub access_blockage: BlockageParams,
    pub backhaul_blockage: BlockageParams,
    /// Minimum decodable SINR (linear); 0 disables.
    pub min_mcs_snr: f64,
    pub sum_eps: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        let blockage = BlockageParams::new(0.11, 200.0);
        Self {
            user_density: per_km2_to_per_m2(1000.0),
            bs_density: per_km2_to_per_m2(100.0),
            abs_fraction: 0.5,
            radio: RadioConfig::default(),
            access: LinkClassParams { alpha_los: 2.0, alpha_nlos: 3.3, xi_los: 5.2, xi_nlos: 7.6, beta: 70.0 },
            backhaul: LinkClassParams { alpha_los: 2.0, alpha_nlos: 3.5, xi_los: 4.2, xi_nlos: 7.9, beta: 70.0 },
            access_blockage: blockage,
            backhaul_blockage: blockage,
            min_mcs_snr: 0.0,
            sum_eps: 1e-9,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        self.radio.validate()?;
        self.access.validate()?;
        self.backhaul.validate()?;
        self.access_blockage.validate()?;
        self.backhaul_blockage.validate()?;
        LoadModel::new(self.user_density, self.bs_density, self.abs_fraction)?;
        self.rate_config().validate()?;
        Ok(())
    }

    /// BS-to-user propagation process (density `lambda`).
    pub fn access_model(&self) -> Result<PropagationModel> {
        PropagationModel::new(self.access, self.access_blockage, self.bs_density)
    }

    /// A-BS-to-BS propagation process (density `lambda * omega`).
    pub fn backhaul_model(&self) -> Result<PropagationModel> {
        PropagationModel::new(self.backhaul, self.backhaul_blockage, self.bs_density * self.abs_fraction)
    }

    pub fn load_model(&self) -> Result<LoadModel> {
        LoadModel::new(self.user_density, self.bs_density, self.abs_fraction)
    }

    pub fn rate_config(&self) -> RateConfig {
        RateConfig { min_mcs_snr: self.min_mcs_snr, sum_eps: self.sum_eps, ..RateConfig::new(self.radio.bandwidth) }
    }

    pub fn rate_config_for(&self, access_link: LinkKind) -> RateConfig {
        RateConfig { access_link, ..self.rate_config() }
    }
}

/// UHF macro tier used for offloading low-SINR users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridConfig {
    /// UHF BSs per m².
    pub uhf_density: f64,
    pub uhf_bandwidth: f64,
    pub uhf_alpha: f64,
    pub uhf_shadow: LognormalParams,
    /// UHF transmit power in mW.
    pub uhf_power: f64,
    /// Serving-link mmWave SNR below which a user is offloaded (linear).
    pub offload_threshold: f64,
}

impl Default for HybridConfig {
    fn default() -> Self {
        Self {
            uhf_density: per_km2_to_per_m2(5.0),
            uhf_bandwidth: 20e6,
            uhf_alpha: 4.0,
            // Free-space loss at 1 m for a 2 GHz carrier, 8 dB shadowing.
            uhf_shadow: LognormalParams::from_db(38.5, 8.0).expect("valid shadowing"),
            uhf_power: dbm_to_mw(46.0),
            offload_threshold: db_to_linear(-10.0),
        }
    }
}

impl HybridConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("uhf_density", self.uhf_density),
            ("uhf_bandwidth", self.uhf_bandwidth),
            ("uhf_alpha", self.uhf_alpha),
            ("uhf_power", self.uhf_power),
            ("offload_threshold", self.offload_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.uhf_alpha > 2.0) {
            return invalid(format!("UHF path-loss exponent must exceed 2, got {}", self.uhf_alpha));
        }
        Ok(())
    }

    /// Single-slope UHF propagation (every link in one class).
    pub fn uhf_model(&self) -> Result<PropagationModel> {
        let beta = self.uhf_shadow.beta_db();
        let xi = self.uhf_shadow.xi_db();
        let link = LinkClassParams { alpha_los: self.uhf_alpha, alpha_nlos: self.uhf_alpha, xi_los: xi, xi_nlos: xi, beta };
        PropagationModel::new(link, BlockageParams::new(1.0, 1.0), self.uhf_density)
    }

    /// UHF radio: omnidirectional, same noise density and figure as `base`.
    pub fn uhf_radio(&self, base: &RadioConfig) -> RadioConfig {
        RadioConfig {
            p_bs: self.uhf_power,
            bandwidth: self.uhf_bandwidth,
            g_max: 1.0,
            g_min: 1.0,
            beamwidth: std::f64::consts::PI,
            carrier_hz: 2e9,
            ..*base
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = NetworkConfig::default();
        c.validate().unwrap();
        assert!((c.backhaul_model().unwrap().density() - 0.5e-4).abs() < 1e-18);
        HybridConfig::default().validate().unwrap();
        let h = HybridConfig::default();
        assert!((h.uhf_shadow.beta_db() - 38.5).abs() < 1e-12);
        h.uhf_model().unwrap();
    }
}
