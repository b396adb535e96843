//! Typical-user CCDF estimation with Wilson confidence bounds.

use rand::Rng;
use rayon::prelude::*;

use super::channel::{Channel, SYNTHETIC_ID};
use super::config::SimConfig;
use super::deployment::{check_inputs, snapshot_from_layer, BsLayer, DeploymentSnapshot};
use super::evaluate::{backhaul_interference, downlink_interference, evaluate_snapshot, Nodes};
use super::hybrid::hybrid_rate;
use super::rng::Purpose;
use crate::config::{HybridConfig, NetworkConfig};
use crate::coverage::{FpcParams, LinkKind};
use crate::curve::CcdfCurve;
use crate::error::{invalid, Result};
use crate::geometry::{BuildingSet, Point};

/// Statistic recorded for the typical user (or typical BS for backhaul).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Snr,
    Sinr,
    /// Interference-to-noise ratio.
    Inr,
    /// Rate in bits/s per the proportional access/backhaul split.
    Rate,
    /// Uplink SNR with fractional power control.
    FpcSnr(FpcParams),
    /// Downlink rate with offloading to a UHF tier.
    HybridRate(HybridConfig),
}

/// Per-trial typical-user values.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub values: Vec<f64>,
    /// Trials without a usable typical receiver.
    pub skipped: u64,
}

/// Empirical CCDF and the trials behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub curve: CcdfCurve,
    pub trials_used: u64,
    pub skipped: u64,
}

/// Two-sided 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let (nf, p) = (n as f64, k as f64 / n as f64);
    let denom = 1.0 + z * z / nf;
    let center = (p + z * z / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt();
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Empirical `P(X > t)` on `thresholds` with Wilson bounds.
pub fn ccdf_from_samples(values: &[f64], thresholds: &[f64]) -> Result<CcdfCurve> {
    if thresholds.windows(2).any(|w| !(w[0] < w[1])) {
        return invalid("thresholds must be strictly ascending");
    }
    let n = values.len() as u64;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mut probs, mut lo, mut hi) = (Vec::new(), Vec::new(), Vec::new());
    for &t in thresholds {
        let k = (sorted.len() - sorted.partition_point(|&v| v <= t)) as u64;
        let (l, h) = wilson_interval(k, n);
        probs.push(if n == 0 { 0.0 } else { k as f64 / n as f64 });
        lo.push(l);
        hi.push(h);
    }
    CcdfCurve::new(thresholds.to_vec(), probs)?.with_ci(lo, hi)
}

fn typical_index(ch: &Channel, n: usize) -> usize {
    ((ch.streams.uniform(Purpose::Typical, 0, 0) * n as f64) as usize).min(n - 1)
}

fn outdoor_point(ch: &Channel, buildings: Option<&BuildingSet>) -> Option<Point> {
    let region = ch.window.rx_region();
    let mut rng = ch.streams.rng(Purpose::Typical);
    (0..10_000)
        .map(|_| Point::new(region.min.x + rng.gen::<f64>() * region.width(), region.min.y + rng.gen::<f64>() * region.height()))
        .find(|&p| !buildings.is_some_and(|b| b.contains(p)))
}

fn needs_all_users(metric: &Metric, kind: LinkKind, sim: &SimConfig) -> bool {
    match metric {
        Metric::Rate | Metric::HybridRate(_) => true,
        Metric::Sinr | Metric::Inr => sim.interference && (sim.activity_thinning || kind == LinkKind::Uplink),
        Metric::Snr | Metric::FpcSnr(_) => false,
    }
}

fn check_metric(metric: &Metric, kind: LinkKind) -> Result<()> {
    let ok = match metric {
        Metric::Snr | Metric::Sinr => true,
        Metric::Inr | Metric::Rate => kind != LinkKind::Backhaul,
        Metric::FpcSnr(_) => kind == LinkKind::Uplink,
        Metric::HybridRate(h) => {
            h.validate()?;
            kind == LinkKind::Downlink
        }
    };
    if ok {
        Ok(())
    } else {
        invalid(format!("metric {metric:?} is not defined for {kind:?} links"))
    }
}

fn backhaul_value(metric: &Metric, ch: &Channel, net: &NetworkConfig, sim: &SimConfig, layer: &BsLayer) -> Option<f64> {
    let region = ch.window.rx_region();
    let candidates: Vec<usize> = (0..layer.points.len()).filter(|&b| !layer.is_abs[b] && region.contains(layer.points[b])).collect();
    if candidates.is_empty() {
        return None;
    }
    let b = candidates[typical_index(ch, candidates.len())];
    let (a, link) = layer.anchor(ch, b as u32)?;
    let radio = &net.radio;
    let s = radio.p_bs * radio.g_max * radio.g_max * ch.fading(LinkKind::Backhaul, a as u64, b as u64) / link.path_loss;
    let i = if *metric == Metric::Sinr && sim.interference {
        backhaul_interference(ch, radio, Nodes { points: &layer.points, is_abs: &layer.is_abs, indoor: &layer.indoor }, a as usize, b)
    } else {
        0.0
    };
    Some(s / (i + radio.noise_power()))
}

fn light_value(
    metric: &Metric,
    kind: LinkKind,
    ch: &Channel,
    net: &NetworkConfig,
    sim: &SimConfig,
    layer: &BsLayer,
    buildings: Option<&BuildingSet>,
) -> Option<f64> {
    let p = outdoor_point(ch, buildings)?;
    let (b, link) = layer.serve(ch, SYNTHETIC_ID, p)?;
    let radio = &net.radio;
    let noise = radio.noise_power();
    let l = link.path_loss;
    let (tx, rx) = match kind {
        LinkKind::Uplink => (SYNTHETIC_ID, b as u64),
        _ => (b as u64, SYNTHETIC_ID),
    };
    let h = ch.fading(kind, tx, rx);
    let interference = || {
        if sim.interference {
            downlink_interference(
                ch,
                radio,
                Nodes { points: &layer.points, is_abs: &layer.is_abs, indoor: &layer.indoor },
                None,
                b as usize,
                SYNTHETIC_ID,
                p,
            )
        } else {
            0.0
        }
    };
    Some(match metric {
        Metric::Snr => radio.tx_power(kind) * radio.g_max * h / (l * noise),
        Metric::FpcSnr(f) => f.p0 * l.powf(f.epsilon) * radio.g_max * h / (l * noise),
        // Only downlink reaches here with interference enabled.
        Metric::Sinr => radio.tx_power(kind) * radio.g_max * h / l / (interference() + noise),
        Metric::Inr => interference() / noise,
        Metric::Rate | Metric::HybridRate(_) => unreachable!("rates need every user"),
    })
}

fn full_value(
    metric: &Metric,
    kind: LinkKind,
    snap: &DeploymentSnapshot,
    net: &NetworkConfig,
    sim: &SimConfig,
    buildings: Option<&BuildingSet>,
) -> Result<Option<f64>> {
    if snap.users.is_empty() || snap.serving.is_empty() {
        return Ok(None);
    }
    let ch = Channel::new(net, sim, buildings, snap.trial)?;
    let u = typical_index(&ch, snap.users.len());
    if let Metric::HybridRate(h) = metric {
        return hybrid_rate(&ch, snap, net, sim, buildings, h, u).map(Some);
    }
    let r = evaluate_snapshot(snap, net, sim, buildings, &[u])?[0];
    Ok(Some(match (metric, kind) {
        (Metric::Snr, LinkKind::Downlink) => r.snr_dl,
        (Metric::Snr, _) => r.snr_ul,
        (Metric::Sinr, LinkKind::Downlink) => r.sinr_dl,
        (Metric::Sinr, _) => r.sinr_ul,
        (Metric::Inr, LinkKind::Downlink) => r.inr_dl,
        (Metric::Inr, _) => r.inr_ul,
        (Metric::Rate, LinkKind::Downlink) => r.rate_dl,
        (Metric::Rate, _) => r.rate_ul,
        (Metric::FpcSnr(f), _) => f.p0 * snap.serving_link[u].path_loss.powf(f.epsilon) * r.snr_ul / net.radio.p_ue,
        (Metric::HybridRate(_), _) => unreachable!(),
    }))
}

/// Value of `metric` for the typical receiver of trial `trial`, or `None`
/// when the trial has no usable receiver.
pub fn typical_value(
    metric: &Metric,
    kind: LinkKind,
    net: &NetworkConfig,
    sim: &SimConfig,
    buildings: Option<&BuildingSet>,
    trial: u64,
) -> Result<Option<f64>> {
    let ch = Channel::new(net, sim, buildings, trial)?;
    let layer = BsLayer::drop(&ch, net, buildings);
    if layer.points.is_empty() {
        return Ok(None);
    }
    if kind == LinkKind::Backhaul {
        return Ok(backhaul_value(metric, &ch, net, sim, &layer));
    }
    if needs_all_users(metric, kind, sim) {
        let snap = snapshot_from_layer(&ch, net, buildings, layer, trial);
        return full_value(metric, kind, &snap, net, sim, buildings);
    }
    Ok(light_value(metric, kind, &ch, net, sim, &layer, buildings))
}

/// Typical-receiver values over `sim.trials` independent trials.
///
/// Metrics that only involve the typical user's own links and the BS layer
/// place the typical user uniformly in the window instead of dropping the
/// whole user population; for a stationary user PPP both give the same law.
pub fn sample_typical(
    metric: &Metric,
    kind: LinkKind,
    net: &NetworkConfig,
    sim: &SimConfig,
    buildings: Option<&BuildingSet>,
) -> Result<Samples> {
    check_inputs(net, sim, buildings)?;
    check_metric(metric, kind)?;
    let per_trial: Vec<Option<f64>> =
        (0..sim.trials).into_par_iter().map(|t| typical_value(metric, kind, net, sim, buildings, t)).collect::<Result<_>>()?;
    let skipped = per_trial.iter().filter(|v| v.is_none()).count() as u64;
    Ok(Samples { values: per_trial.into_iter().flatten().collect(), skipped })
}

/// Empirical CCDF of `metric` on `thresholds` (ascending).
pub fn estimate_ccdf(
    metric: &Metric,
    kind: LinkKind,
    net: &NetworkConfig,
    sim: &SimConfig,
    thresholds: &[f64],
    buildings: Option<&BuildingSet>,
) -> Result<Estimate> {
    let s = sample_typical(metric, kind, net, sim, buildings)?;
    Ok(Estimate { curve: ccdf_from_samples(&s.values, thresholds)?, trials_used: s.values.len() as u64, skipped: s.skipped })
}
