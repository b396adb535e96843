//! Per-user SNR, SINR, INR and rates of a snapshot.

use serde::{Deserialize, Serialize};

use super::channel::Channel;
use super::config::SimConfig;
use super::deployment::{check_inputs, DeploymentSnapshot};
use super::rng::Purpose;
use crate::config::NetworkConfig;
use crate::coverage::{InterfererGainDist, LinkKind, RadioConfig};
use crate::error::Result;
use crate::geometry::{BuildingSet, Point};
use crate::rate::{instantaneous_rate, Loads, RateConfig};

/// Transmitter positions and marks used when summing interference.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Nodes<'a> {
    pub(crate) points: &'a [Point],
    pub(crate) is_abs: &'a [bool],
    pub(crate) indoor: &'a [bool],
}

/// Downlink interference at receiver `user` (position `p`) served by `serving`.
/// `active`, when given, holds per-BS user counts; idle BSs stay silent.
pub(crate) fn downlink_interference(
    ch: &Channel,
    radio: &RadioConfig,
    nodes: Nodes,
    active: Option<&[u32]>,
    serving: usize,
    user: u64,
    p: Point,
) -> f64 {
    let gains = InterfererGainDist::access(radio);
    (0..nodes.points.len())
        .filter(|&c| c != serving && active.is_none_or(|a| a[c] > 0))
        .map(|c| {
            let l = ch.access_link(c as u64, nodes.points[c], nodes.indoor[c], user, p);
            radio.p_bs * ch.interferer_gain(&gains, LinkKind::Downlink, c as u64, user) * ch.fading(LinkKind::Downlink, c as u64, user)
                / l.path_loss
        })
        .sum()
}

/// Uplink interference at BS `serving` from one scheduled user of every
/// other BS with users.
pub(crate) fn uplink_interference(
    ch: &Channel,
    radio: &RadioConfig,
    snap: &DeploymentSnapshot,
    users_of: &[Vec<u32>],
    serving: usize,
) -> f64 {
    let gains = InterfererGainDist::access(radio);
    let pb = snap.bs[serving];
    users_of
        .iter()
        .enumerate()
        .filter(|(c, us)| *c != serving && !us.is_empty())
        .map(|(c, us)| {
            let pick = us[(ch.streams.uniform(Purpose::UplinkPick, c as u64, 0) * us.len() as f64) as usize] as u64;
            let l = ch.access_link(serving as u64, pb, snap.bs_indoor[serving], pick, snap.users[pick as usize]);
            radio.p_ue
                * ch.interferer_gain(&gains, LinkKind::Uplink, pick, serving as u64)
                * ch.fading(LinkKind::Uplink, pick, serving as u64)
                / l.path_loss
        })
        .sum()
}

/// Backhaul interference at BS `rx` from every A-BS other than its anchor.
pub(crate) fn backhaul_interference(ch: &Channel, radio: &RadioConfig, nodes: Nodes, anchor: usize, rx: usize) -> f64 {
    let gains = InterfererGainDist::backhaul(radio);
    (0..nodes.points.len())
        .filter(|&c| nodes.is_abs[c] && c != anchor && c != rx)
        .map(|c| {
            let l = ch.backhaul_link(c as u64, nodes.points[c], nodes.indoor[c], rx as u64, nodes.points[rx], nodes.indoor[rx]);
            radio.p_bs
                * ch.interferer_gain(&gains, LinkKind::Backhaul, c as u64, rx as u64)
                * ch.fading(LinkKind::Backhaul, c as u64, rx as u64)
                / l.path_loss
        })
        .sum()
}

/// Link metrics and rates of one user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserRecord {
    pub user: usize,
    pub serving: usize,
    pub on_abs: bool,
    pub snr_dl: f64,
    pub sinr_dl: f64,
    pub inr_dl: f64,
    pub snr_ul: f64,
    pub sinr_ul: f64,
    pub inr_ul: f64,
    /// Backhaul of the serving BS; `None` on an A-BS or without any A-BS.
    pub snr_bh: Option<f64>,
    pub sinr_bh: Option<f64>,
    pub rate_dl: f64,
    pub rate_ul: f64,
}

/// Rate of a user given its access SINR and the backhaul SINR of its BS.
pub(crate) fn user_rate(
    snap: &DeploymentSnapshot,
    users_per_bs: &[u32],
    kappa: f64,
    serving: usize,
    sinr_access: f64,
    sinr_bh: Option<f64>,
    cfg: &RateConfig,
) -> Result<f64> {
    if snap.is_abs[serving] {
        let loads = Loads {
            users: users_per_bs[serving] as u64,
            abs_users: users_per_bs[serving] as u64,
            backhauled_bs: snap.bs_per_abs[serving] as u64,
        };
        return instantaneous_rate(loads, kappa, sinr_access, 1.0, true, cfg);
    }
    match (snap.anchor[serving], sinr_bh) {
        (Some(a), Some(sb)) => {
            let a = a as usize;
            let loads =
                Loads { users: users_per_bs[serving] as u64, abs_users: users_per_bs[a] as u64, backhauled_bs: snap.bs_per_abs[a] as u64 };
            instantaneous_rate(loads, kappa, sinr_access, sb, false, cfg)
        }
        _ => Ok(0.0),
    }
}

/// Evaluates the listed users of `snap`.
pub fn evaluate_snapshot(
    snap: &DeploymentSnapshot,
    net: &NetworkConfig,
    sim: &SimConfig,
    buildings: Option<&BuildingSet>,
    users: &[usize],
) -> Result<Vec<UserRecord>> {
    check_inputs(net, sim, buildings)?;
    let ch = Channel::new(net, sim, buildings, snap.trial)?;
    let radio = &net.radio;
    let noise = radio.noise_power();
    let nodes = Nodes { points: &snap.bs, is_abs: &snap.is_abs, indoor: &snap.bs_indoor };
    let users_of = snap.users_of();
    let active = sim.activity_thinning.then_some(snap.users_per_bs.as_slice());
    let kappa = net.user_density / net.bs_density;
    let (cfg_dl, cfg_ul) = (net.rate_config_for(LinkKind::Downlink), net.rate_config_for(LinkKind::Uplink));
    users
        .iter()
        .map(|&u| {
            let b = snap.serving[u] as usize;
            let l = snap.serving_link[u].path_loss;
            let p = snap.users[u];
            let h_dl = ch.fading(LinkKind::Downlink, b as u64, u as u64);
            let h_ul = ch.fading(LinkKind::Uplink, u as u64, b as u64);
            let (s_dl, s_ul) = (radio.p_bs * radio.g_max * h_dl / l, radio.p_ue * radio.g_max * h_ul / l);
            let (i_dl, i_ul) = if sim.interference {
                (downlink_interference(&ch, radio, nodes, active, b, u as u64, p), uplink_interference(&ch, radio, snap, &users_of, b))
            } else {
                (0.0, 0.0)
            };
            let (snr_bh, sinr_bh) = match (snap.anchor[b], snap.anchor_link[b]) {
                (Some(a), Some(link)) => {
                    let s = radio.p_bs * radio.g_max * radio.g_max * ch.fading(LinkKind::Backhaul, a as u64, b as u64) / link.path_loss;
                    let i = if sim.interference { backhaul_interference(&ch, radio, nodes, a as usize, b) } else { 0.0 };
                    (Some(s / noise), Some(s / (i + noise)))
                }
                _ => (None, None),
            };
            let (snr_dl, snr_ul) = (s_dl / noise, s_ul / noise);
            let (sinr_dl, sinr_ul) = (s_dl / (i_dl + noise), s_ul / (i_ul + noise));
            Ok(UserRecord {
                user: u,
                serving: b,
                on_abs: snap.is_abs[b],
                snr_dl,
                sinr_dl,
                inr_dl: i_dl / noise,
                snr_ul,
                sinr_ul,
                inr_ul: i_ul / noise,
                snr_bh,
                sinr_bh,
                rate_dl: user_rate(snap, &snap.users_per_bs, kappa, b, sinr_dl, sinr_bh, &cfg_dl)?,
                rate_ul: user_rate(snap, &snap.users_per_bs, kappa, b, sinr_ul, sinr_bh, &cfg_ul)?,
            })
        })
        .collect()
}

/// Fraction of each BS's resources in use under the proportional split:
/// exactly 1 at loaded A-BSs, at most 1 at backhauled BSs.
pub fn airtime(snap: &DeploymentSnapshot, kappa: f64) -> Vec<f64> {
    (0..snap.bs.len())
        .map(|b| {
            let nu = snap.users_per_bs[b] as f64;
            if snap.is_abs[b] {
                let nb = snap.bs_per_abs[b] as f64;
                let total = nu + kappa * nb;
                if total == 0.0 {
                    0.0
                } else {
                    nu / total + kappa * nb / total
                }
            } else {
                match snap.anchor[b] {
                    Some(a) if nu > 0.0 => {
                        let a = a as usize;
                        let share = kappa / (kappa * snap.bs_per_abs[a] as f64 + snap.users_per_bs[a] as f64);
                        nu * (1.0 - share) / nu
                    }
                    _ => 0.0,
                }
            }
        })
        .collect()
}
