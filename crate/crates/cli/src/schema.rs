//! Study configuration file: TOML in user units (dB, dBm, per km², degrees).
//!
//! Every field is optional and defaults to the reference deployment. The
//! JSON sidecar written next to each output embeds the resolved file under
//! `config`, so it can be fed back with `--config`.

use std::path::Path;

use mmw::config::{HybridConfig, NetworkConfig};
use mmw::coverage::{Fading, FpcParams, RadioConfig};
use mmw::numerics::LognormalParams;
use mmw::propagation::{BlockageParams, LinkClassParams};
use mmw::simulator::{BlockageSource, EdgeMode, SimConfig};
use mmw::units::{db_to_linear, dbm_to_mw, per_km2_to_per_m2};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::CliError;
use crate::grid::GridSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub bs_density_per_km2: f64,
    pub user_density_per_km2: f64,
    pub abs_fraction: f64,
    /// Minimum decodable SINR; omitted means no floor.
    pub min_mcs_snr_db: Option<f64>,
    pub load_sum_eps: f64,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self { bs_density_per_km2: 100.0, user_density_per_km2: 1000.0, abs_fraction: 0.5, min_mcs_snr_db: None, load_sum_eps: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioSection {
    pub bs_power_dbm: f64,
    pub ue_power_dbm: f64,
    pub bandwidth_hz: f64,
    pub carrier_ghz: f64,
    pub max_gain_db: f64,
    pub min_gain_db: f64,
    pub beamwidth_deg: f64,
    pub noise_figure_db: f64,
    pub noise_psd_dbm_hz: f64,
}

impl Default for RadioSection {
    fn default() -> Self {
        Self {
            bs_power_dbm: 30.0,
            ue_power_dbm: 20.0,
            bandwidth_hz: 2e9,
            carrier_ghz: 73.0,
            max_gain_db: 18.0,
            min_gain_db: -2.0,
            beamwidth_deg: 10.0,
            noise_figure_db: 10.0,
            noise_psd_dbm_hz: -174.0,
        }
    }
}

/// Declares a link-class section with its own defaults, so a partial table
/// is completed from the right class.
macro_rules! link_section {
    ($name:ident, $alpha_nlos:expr, $xi_los:expr, $xi_nlos:expr) => {
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name {
            pub alpha_los: f64,
            pub alpha_nlos: f64,
            pub xi_los_db: f64,
            pub xi_nlos_db: f64,
            pub beta_db: f64,
        }

        impl Default for $name {
            fn default() -> Self {
                Self { alpha_los: 2.0, alpha_nlos: $alpha_nlos, xi_los_db: $xi_los, xi_nlos_db: $xi_nlos, beta_db: 70.0 }
            }
        }

        impl $name {
            fn to_core(&self) -> LinkClassParams {
                LinkClassParams {
                    alpha_los: self.alpha_los,
                    alpha_nlos: self.alpha_nlos,
                    xi_los: self.xi_los_db,
                    xi_nlos: self.xi_nlos_db,
                    beta: self.beta_db,
                }
            }
        }
    };
}

link_section!(AccessSection, 3.3, 5.2, 7.6);
link_section!(BackhaulSection, 3.5, 4.2, 7.9);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockageSection {
    pub los_inside: f64,
    pub ball_radius_m: f64,
    pub los_beyond: f64,
}

impl Default for BlockageSection {
    fn default() -> Self {
        Self { los_inside: 0.11, ball_radius_m: 200.0, los_beyond: 0.0 }
    }
}

impl BlockageSection {
    fn to_core(&self) -> BlockageParams {
        BlockageParams { c_inside: self.los_inside, d_ball: self.ball_radius_m, c_beyond: self.los_beyond }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingChoice {
    None,
    Rayleigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeChoice {
    Torus,
    Guard,
}

/// Channel options shared by analysis and simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub fading: FadingChoice,
    pub interference: bool,
    /// Only BSs with at least one user transmit on the downlink.
    pub activity_thinning: bool,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self { fading: FadingChoice::None, interference: true, activity_thinning: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub width_m: f64,
    pub height_m: f64,
    pub trials: u64,
    pub seed: u64,
    pub edge: EdgeChoice,
    pub guard_margin_m: f64,
    pub blockage_source: BlockageSource,
    /// GeoJSON building footprints (projected meters) for polygon blockage.
    pub buildings: Option<String>,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            width_m: 2000.0,
            height_m: 2000.0,
            trials: 10_000,
            seed: 1,
            edge: EdgeChoice::Torus,
            guard_margin_m: 300.0,
            blockage_source: BlockageSource::Stochastic,
            buildings: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HybridSection {
    pub uhf_density_per_km2: f64,
    pub uhf_bandwidth_hz: f64,
    pub uhf_alpha: f64,
    pub uhf_beta_db: f64,
    pub uhf_xi_db: f64,
    pub uhf_power_dbm: f64,
    pub offload_threshold_db: f64,
}

impl Default for HybridSection {
    fn default() -> Self {
        Self {
            uhf_density_per_km2: 5.0,
            uhf_bandwidth_hz: 20e6,
            uhf_alpha: 4.0,
            uhf_beta_db: 38.5,
            uhf_xi_db: 8.0,
            uhf_power_dbm: 46.0,
            offload_threshold_db: -10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FpcSection {
    pub p0_dbm: f64,
    pub epsilon: f64,
}

impl Default for FpcSection {
    fn default() -> Self {
        Self { p0_dbm: 20.0, epsilon: 0.0 }
    }
}

/// The whole configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub network: NetworkSection,
    pub radio: RadioSection,
    pub access: AccessSection,
    pub backhaul: BackhaulSection,
    pub access_blockage: BlockageSection,
    pub backhaul_blockage: BlockageSection,
    pub channel: ChannelSection,
    pub sim: SimSection,
    pub hybrid: HybridSection,
    pub fpc: FpcSection,
    /// Threshold grid; command-line grid flags take precedence.
    pub grid: Option<GridSpec>,
}

/// Core-library view of a configuration, in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub net: NetworkConfig,
    pub sim: SimConfig,
    pub hybrid: HybridConfig,
    pub fpc: FpcParams,
}

impl FileConfig {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let r = &self.radio;
        let radio = RadioConfig {
            p_bs: dbm_to_mw(r.bs_power_dbm),
            p_ue: dbm_to_mw(r.ue_power_dbm),
            bandwidth: r.bandwidth_hz,
            noise_psd: r.noise_psd_dbm_hz,
            noise_figure: r.noise_figure_db,
            g_max: db_to_linear(r.max_gain_db),
            g_min: db_to_linear(r.min_gain_db),
            beamwidth: r.beamwidth_deg.to_radians(),
            carrier_hz: r.carrier_ghz * 1e9,
        };
        let n = &self.network;
        let net = NetworkConfig {
            user_density: per_km2_to_per_m2(n.user_density_per_km2),
            bs_density: per_km2_to_per_m2(n.bs_density_per_km2),
            abs_fraction: n.abs_fraction,
            radio,
            access: self.access.to_core(),
            backhaul: self.backhaul.to_core(),
            access_blockage: self.access_blockage.to_core(),
            backhaul_blockage: self.backhaul_blockage.to_core(),
            min_mcs_snr: n.min_mcs_snr_db.map_or(0.0, db_to_linear),
            sum_eps: n.load_sum_eps,
        };
        net.validate()?;
        let s = &self.sim;
        let sim = SimConfig {
            width: s.width_m,
            height: s.height_m,
            trials: s.trials,
            seed: s.seed,
            edge_mode: match s.edge {
                EdgeChoice::Torus => EdgeMode::Torus,
                EdgeChoice::Guard => EdgeMode::Guard { margin: s.guard_margin_m },
            },
            blockage_source: s.blockage_source,
            fading: match self.channel.fading {
                FadingChoice::None => Fading::None,
                FadingChoice::Rayleigh => Fading::Rayleigh,
            },
            interference: self.channel.interference,
            activity_thinning: self.channel.activity_thinning,
        };
        sim.validate(&net)?;
        let h = &self.hybrid;
        let hybrid = HybridConfig {
            uhf_density: per_km2_to_per_m2(h.uhf_density_per_km2),
            uhf_bandwidth: h.uhf_bandwidth_hz,
            uhf_alpha: h.uhf_alpha,
            uhf_shadow: LognormalParams::from_db(h.uhf_beta_db, h.uhf_xi_db)?,
            uhf_power: dbm_to_mw(h.uhf_power_dbm),
            offload_threshold: db_to_linear(h.offload_threshold_db),
        };
        hybrid.validate()?;
        let fpc = FpcParams::new(dbm_to_mw(self.fpc.p0_dbm), self.fpc.epsilon)?;
        Ok(Resolved { net, sim, hybrid, fpc })
    }
}

/// Sets `dotted.key = value` in `table`; `value` is read as a TOML value
/// and falls back to a plain string.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<(), CliError> {
    let (key, raw) =
        assignment.split_once('=').ok_or_else(|| CliError::Config(format!("override `{assignment}` is not of the form key=value")))?;
    let value = match format!("v = {}", raw.trim()).parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => Value::String(raw.trim().to_string()),
    };
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("override key `{key}` is malformed")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        cur = match cur.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new())) {
            Value::Table(t) => t,
            _ => return Err(CliError::Config(format!("override key `{key}`: `{p}` is not a section"))),
        };
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Reads a TOML config (or a JSON sidecar, via its `config` member) and
/// applies overrides in order.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<FileConfig, CliError> {
    let mut table = match path {
        None => Table::new(),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            if p.extension().is_some_and(|e| e == "json") {
                let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                let config = doc.get("config").cloned().unwrap_or(doc);
                let file: FileConfig = serde_json::from_value(config).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                Table::try_from(file).map_err(|e| CliError::Config(e.to_string()))?
            } else {
                text.parse::<Table>().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
        }
    };
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    FileConfig::deserialize(Value::Table(table)).map_err(|e| CliError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_reference_deployment() {
        let cfg = load_config(None, &[]).unwrap();
        assert_eq!(cfg, FileConfig::default());
        let r = cfg.resolve().unwrap();
        assert_eq!(r.net, NetworkConfig::default());
        assert_eq!(r.sim, SimConfig::default());
        assert_eq!(r.hybrid, HybridConfig::default());
    }

    #[test]
    fn overrides_convert_units() {
        let cfg = load_config(None, &["network.bs_density_per_km2=250".into(), "channel.fading=rayleigh".into()]).unwrap();
        let r = cfg.resolve().unwrap();
        assert!((r.net.bs_density - 2.5e-4).abs() < 1e-18);
        assert_eq!(r.sim.fading, Fading::Rayleigh);
    }

    #[test]
    fn partial_sections_keep_their_own_defaults() {
        let cfg = load_config(None, &["backhaul.alpha_nlos=3.6".into()]).unwrap();
        assert_eq!(cfg.backhaul, BackhaulSection { alpha_nlos: 3.6, ..BackhaulSection::default() });
        assert_eq!(cfg.backhaul.xi_los_db, 4.2);
    }

    #[test]
    fn bad_values_are_config_errors() {
        let zero_beam = load_config(None, &["radio.beamwidth_deg=0".into()]).unwrap();
        assert!(matches!(zero_beam.resolve(), Err(CliError::Config(_))));
        assert!(matches!(load_config(None, &["network.nonsense=1".into()]), Err(CliError::Config(_))));
        assert!(matches!(load_config(None, &["network".into()]), Err(CliError::Config(_))));
        assert!(matches!(load_config(None, &["network.abs_fraction=\"half\"".into()]), Err(CliError::Config(_))));
    }

    #[test]
    fn toml_parse_errors_carry_location() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.toml");
        std::fs::write(&p, "[network]\nbs_density_per_km2 = = 3\n").unwrap();
        let Err(CliError::Config(msg)) = load_config(Some(&p), &[]) else { panic!("expected a config error") };
        assert!(msg.contains("line 2"), "{msg}");
    }
}
