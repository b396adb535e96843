//! Downlink rate of a user when low-SNR users are offloaded to a UHF tier.

use super::channel::Channel;
use super::config::SimConfig;
use super::deployment::{drop_ppp, DeploymentSnapshot};
use super::evaluate::{evaluate_snapshot, user_rate};
use super::rng::Purpose;
use crate::config::{HybridConfig, NetworkConfig};
use crate::coverage::LinkKind;
use crate::error::Result;
use crate::geometry::{BuildingSet, Point};
use crate::rate::RateConfig;

struct UhfTier {
    bs: Vec<Point>,
    /// Log-mean and log-spread of the shadowing gain.
    m: f64,
    sigma: f64,
    alpha: f64,
}

impl UhfTier {
    fn drop(ch: &Channel, h: &HybridConfig) -> Self {
        let bs = drop_ppp(&mut ch.streams.rng(Purpose::UhfPoints), h.uhf_density, &ch.window.tx_region(), |_| true);
        Self { bs, m: h.uhf_shadow.m(), sigma: h.uhf_shadow.sigma(), alpha: h.uhf_alpha }
    }

    fn path_loss(&self, ch: &Channel, k: usize, user: u64, p: Point) -> f64 {
        let d = ch.window.distance(self.bs[k], p).max(1.0);
        let z = ch.streams.normal(Purpose::UhfShadow, k as u64, user);
        (self.alpha * d.ln() - self.m - self.sigma * z).exp()
    }

    /// Minimum path-loss UHF BS of a user and all its path losses.
    fn serve(&self, ch: &Channel, user: u64, p: Point) -> Option<(usize, Vec<f64>)> {
        let losses: Vec<f64> = (0..self.bs.len()).map(|k| self.path_loss(ch, k, user, p)).collect();
        let best = losses.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?.0;
        Some((best, losses))
    }
}

/// Hybrid rate of user `u` of `snap`.
///
/// A user whose serving mmWave SNR falls below the offload threshold joins
/// the UHF BS of least path loss and shares its bandwidth equally with the
/// other offloaded users there; the UHF channel is Rayleigh faded and every
/// other UHF BS interferes. Remaining users keep the mmWave rate computed
/// with loads and mean cell load restricted to users that stayed.
pub(crate) fn hybrid_rate(
    ch: &Channel,
    snap: &DeploymentSnapshot,
    net: &NetworkConfig,
    sim: &SimConfig,
    buildings: Option<&BuildingSet>,
    h: &HybridConfig,
    u: usize,
) -> Result<f64> {
    let radio = &net.radio;
    let noise = radio.noise_power();
    let snr = |v: usize| {
        let b = snap.serving[v] as u64;
        radio.p_bs * radio.g_max * ch.fading(LinkKind::Downlink, b, v as u64) / (snap.serving_link[v].path_loss * noise)
    };
    let offloaded: Vec<bool> = (0..snap.users.len()).map(|v| snr(v) < h.offload_threshold).collect();

    if !offloaded[u] {
        let mut mm_counts = vec![0u32; snap.bs.len()];
        for (v, &off) in offloaded.iter().enumerate() {
            if !off {
                mm_counts[snap.serving[v] as usize] += 1;
            }
        }
        let stayed = offloaded.iter().filter(|&&o| !o).count() as f64;
        let kappa = net.user_density / net.bs_density * stayed / snap.users.len() as f64;
        let rec = evaluate_snapshot(snap, net, sim, buildings, &[u])?[0];
        let base = net.rate_config_for(LinkKind::Downlink);
        let cfg = RateConfig { min_mcs_snr: base.min_mcs_snr.max(h.offload_threshold), ..base };
        return user_rate(snap, &mm_counts, kappa, rec.serving, rec.sinr_dl, rec.sinr_bh, &cfg);
    }

    let tier = UhfTier::drop(ch, h);
    let Some((k, losses)) = tier.serve(ch, u as u64, snap.users[u]) else {
        return Ok(0.0);
    };
    let sharing = offloaded
        .iter()
        .enumerate()
        .filter(|&(v, &off)| off && (v == u || tier.serve(ch, v as u64, snap.users[v]).is_some_and(|(kv, _)| kv == k)))
        .count();
    let uhf_radio = h.uhf_radio(radio);
    let fade = |j: usize| ch.streams.exponential(Purpose::FadingUhf, j as u64, u as u64);
    let signal = h.uhf_power * fade(k) / losses[k];
    let interference: f64 = (0..losses.len()).filter(|&j| j != k).map(|j| h.uhf_power * fade(j) / losses[j]).sum();
    let sinr = signal / (interference + uhf_radio.noise_power());
    Ok(h.uhf_bandwidth / sharing as f64 * sinr.ln_1p() / std::f64::consts::LN_2)
}
