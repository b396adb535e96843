//! PPP deployments and minimum-path-loss association.

use std::cell::Cell;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::channel::{Channel, Link};
use super::config::{BlockageSource, SimConfig};
use super::index::PointIndex;
use super::rng::Purpose;
use crate::config::NetworkConfig;
use crate::error::{invalid, Result};
use crate::geometry::{BoundingBox, BuildingSet, Point};

/// One realization of the network with all associations resolved.
#[derive(Debug, Clone)]
pub struct DeploymentSnapshot {
    pub trial: u64,
    pub bs: Vec<Point>,
    /// Wired-backhaul marks.
    pub is_abs: Vec<bool>,
    /// BSs inside a building (NLOS to everything).
    pub bs_indoor: Vec<bool>,
    pub users: Vec<Point>,
    /// Serving BS of each user; empty if the window holds no BS.
    pub serving: Vec<u32>,
    pub serving_link: Vec<Link>,
    /// A-BS of each BS; `None` for A-BSs (and when no A-BS exists).
    pub anchor: Vec<Option<u32>>,
    pub anchor_link: Vec<Option<Link>>,
    /// Users associated with each BS.
    pub users_per_bs: Vec<u32>,
    /// BSs backhauled by each A-BS (0 for other BSs).
    pub bs_per_abs: Vec<u32>,
}

impl DeploymentSnapshot {
    /// Users of each BS.
    pub fn users_of(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.bs.len()];
        for (u, &b) in self.serving.iter().enumerate() {
            out[b as usize].push(u as u32);
        }
        out
    }
}

/// Uniform points of a PPP of `density` (per m²) in `region`, keeping
/// those accepted by `keep`.
pub(crate) fn drop_ppp<R: Rng>(rng: &mut R, density: f64, region: &BoundingBox, keep: impl Fn(Point) -> bool) -> Vec<Point> {
    let mean = density * region.width() * region.height();
    let n = if mean > 0.0 { Poisson::new(mean).expect("positive mean").sample(rng) as usize } else { 0 };
    (0..n)
        .map(|_| Point::new(region.min.x + rng.gen::<f64>() * region.width(), region.min.y + rng.gen::<f64>() * region.height()))
        .filter(|&p| keep(p))
        .collect()
}

/// Grid cell holding about one point of `density`.
pub(crate) fn cell_size(density: f64) -> f64 {
    (1.0 / density.max(1e-12)).sqrt().clamp(10.0, 1e5)
}

/// Base stations of a trial.
#[derive(Debug, Clone)]
pub(crate) struct BsLayer {
    pub(crate) points: Vec<Point>,
    pub(crate) is_abs: Vec<bool>,
    pub(crate) indoor: Vec<bool>,
    pub(crate) all: PointIndex,
    pub(crate) abs: PointIndex,
}

impl BsLayer {
    pub(crate) fn drop(ch: &Channel, net: &NetworkConfig, buildings: Option<&BuildingSet>) -> Self {
        let region = ch.window.tx_region();
        let points = drop_ppp(&mut ch.streams.rng(Purpose::BsPoints), net.bs_density, &region, |_| true);
        let is_abs: Vec<bool> = (0..points.len()).map(|i| ch.streams.uniform(Purpose::AbsMarks, i as u64, 0) < net.abs_fraction).collect();
        let indoor = points.iter().map(|&p| buildings.is_some_and(|b| b.contains(p))).collect();
        let cell = cell_size(net.bs_density);
        let all = PointIndex::new(points.iter().enumerate().map(|(i, p)| (i as u32, p)), &ch.window, cell);
        let abs = PointIndex::new(
            points.iter().enumerate().filter(|(i, _)| is_abs[*i]).map(|(i, p)| (i as u32, p)),
            &ch.window,
            cell_size(net.bs_density * net.abs_fraction),
        );
        Self { points, is_abs, indoor, all, abs }
    }

    /// Minimum-path-loss BS of a receiver with id `user` at `p`.
    pub(crate) fn serve(&self, ch: &Channel, user: u64, p: Point) -> Option<(u32, Link)> {
        let best = Cell::new((u32::MAX, f64::INFINITY));
        self.all.search(
            p,
            |i| {
                let (pi, ii) = (self.points[i as usize], self.indoor[i as usize]);
                if let Some(ln_l) = ch.access_ln_loss_below(i as u64, pi, ii, user, p, best.get().1) {
                    best.set((i, ln_l));
                }
            },
            |d| ch.access_ln_lower_bound(d) > best.get().1,
        );
        let (i, _) = best.get();
        (i != u32::MAX).then(|| (i, ch.access_link(i as u64, self.points[i as usize], self.indoor[i as usize], user, p)))
    }

    /// Minimum-path-loss A-BS of BS `b`.
    pub(crate) fn anchor(&self, ch: &Channel, b: u32) -> Option<(u32, Link)> {
        let (pb, ib) = (self.points[b as usize], self.indoor[b as usize]);
        let best = Cell::new((u32::MAX, f64::INFINITY));
        self.abs.search(
            pb,
            |a| {
                if a == b {
                    return;
                }
                let (pa, ia) = (self.points[a as usize], self.indoor[a as usize]);
                if let Some(ln_l) = ch.backhaul_ln_loss_below(a as u64, pa, ia, b as u64, pb, ib, best.get().1) {
                    best.set((a, ln_l));
                }
            },
            |d| ch.backhaul_ln_lower_bound(d) > best.get().1,
        );
        let (a, _) = best.get();
        (a != u32::MAX).then(|| (a, ch.backhaul_link(a as u64, self.points[a as usize], self.indoor[a as usize], b as u64, pb, ib)))
    }
}

pub(crate) fn check_inputs(net: &NetworkConfig, sim: &SimConfig, buildings: Option<&BuildingSet>) -> Result<()> {
    sim.validate(net)?;
    if sim.blockage_source == BlockageSource::Polygons && buildings.is_none() {
        return invalid("polygon blockage requires a building set");
    }
    Ok(())
}

/// Draws trial `trial` and resolves every access and backhaul association.
pub fn generate_snapshot(net: &NetworkConfig, sim: &SimConfig, buildings: Option<&BuildingSet>, trial: u64) -> Result<DeploymentSnapshot> {
    check_inputs(net, sim, buildings)?;
    let ch = Channel::new(net, sim, buildings, trial)?;
    let layer = BsLayer::drop(&ch, net, buildings);
    Ok(snapshot_from_layer(&ch, net, buildings, layer, trial))
}

pub(crate) fn snapshot_from_layer(
    ch: &Channel,
    net: &NetworkConfig,
    buildings: Option<&BuildingSet>,
    layer: BsLayer,
    trial: u64,
) -> DeploymentSnapshot {
    let users = drop_ppp(&mut ch.streams.rng(Purpose::UserPoints), net.user_density, &ch.window.rx_region(), |p| {
        !buildings.is_some_and(|b| b.contains(p))
    });
    let nb = layer.points.len();
    let mut users_per_bs = vec![0u32; nb];
    let (mut serving, mut serving_link) = (Vec::new(), Vec::new());
    if !layer.all.is_empty() {
        for (u, &p) in users.iter().enumerate() {
            let (b, l) = layer.serve(ch, u as u64, p).expect("nonempty BS set");
            users_per_bs[b as usize] += 1;
            serving.push(b);
            serving_link.push(l);
        }
    }
    let mut bs_per_abs = vec![0u32; nb];
    let (anchor, anchor_link): (Vec<_>, Vec<_>) = (0..nb as u32)
        .map(|b| {
            if layer.is_abs[b as usize] {
                return (None, None);
            }
            match layer.anchor(ch, b) {
                Some((a, l)) => {
                    bs_per_abs[a as usize] += 1;
                    (Some(a), Some(l))
                }
                None => (None, None),
            }
        })
        .unzip();
    DeploymentSnapshot {
        trial,
        bs: layer.points,
        is_abs: layer.is_abs,
        bs_indoor: layer.indoor,
        users,
        serving,
        serving_link,
        anchor,
        anchor_link,
        users_per_bs,
        bs_per_abs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::channel::Channel;
    use crate::units::per_km2_to_per_m2;

    #[test]
    fn associations_are_minimum_path_loss() {
        let net = NetworkConfig::default();
        let sim = SimConfig { width: 800.0, height: 800.0, ..SimConfig::default() };
        let snap = generate_snapshot(&net, &sim, None, 2).unwrap();
        let ch = Channel::new(&net, &sim, None, 2).unwrap();
        assert_eq!(snap.serving.len(), snap.users.len());
        for (u, &p) in snap.users.iter().enumerate() {
            let brute = (0..snap.bs.len())
                .map(|b| ch.access_link(b as u64, snap.bs[b], false, u as u64, p).path_loss)
                .fold(f64::INFINITY, f64::min);
            assert_eq!(snap.serving_link[u].path_loss, brute);
        }
        for b in 0..snap.bs.len() {
            match snap.anchor[b] {
                Some(a) => {
                    assert!(snap.is_abs[a as usize] && !snap.is_abs[b]);
                    let brute = (0..snap.bs.len())
                        .filter(|&k| snap.is_abs[k])
                        .map(|k| ch.backhaul_link(k as u64, snap.bs[k], false, b as u64, snap.bs[b], false).path_loss)
                        .fold(f64::INFINITY, f64::min);
                    assert_eq!(snap.anchor_link[b].unwrap().path_loss, brute);
                }
                None => assert!(snap.is_abs[b]),
            }
        }
        assert_eq!(snap.users_per_bs.iter().sum::<u32>() as usize, snap.users.len());
        assert_eq!(snap.bs_per_abs.iter().sum::<u32>() as usize, snap.is_abs.iter().filter(|&&a| !a).count());
    }

    #[test]
    fn bs_count_is_poisson_mean() {
        let net = NetworkConfig { user_density: 0.0, ..NetworkConfig::default() };
        let sim = SimConfig::default();
        let n = 2000;
        let counts: Vec<f64> = (0..n).map(|t| generate_snapshot(&net, &sim, None, t).unwrap().bs.len() as f64).collect();
        let mean = counts.iter().sum::<f64>() / n as f64;
        let se = (400.0f64 / n as f64).sqrt();
        assert!((mean - 400.0).abs() < 3.0 * se, "{mean}");
        let snap = generate_snapshot(&net, &sim, None, 0).unwrap();
        assert!(snap.users.is_empty() && snap.serving.is_empty());
    }

    #[test]
    fn stochastic_los_fraction_inside_ball() {
        let net = NetworkConfig::default();
        let ch = Channel::new(&net, &SimConfig::default(), None, 9).unwrap();
        let n = 100_000u64;
        let los = (0..n).filter(|&i| ch.access_link(i, Point::new(0.0, 0.0), false, 0, Point::new(100.0, 0.0)).los).count();
        let p = los as f64 / n as f64;
        let se = (0.11 * 0.89 / n as f64).sqrt();
        assert!((p - 0.11).abs() < 3.0 * se, "{p}");
    }

    #[test]
    fn polygon_mode_requires_buildings() {
        let net = NetworkConfig::default();
        let sim = SimConfig {
            blockage_source: BlockageSource::Polygons,
            edge_mode: crate::simulator::window::EdgeMode::Guard { margin: 300.0 },
            ..SimConfig::default()
        };
        assert!(generate_snapshot(&net, &sim, None, 0).is_err());
        let torus = SimConfig { blockage_source: BlockageSource::Polygons, ..SimConfig::default() };
        assert!(generate_snapshot(&net, &torus, Some(&BuildingSet::empty()), 0).is_err());
        let dense = NetworkConfig { bs_density: per_km2_to_per_m2(100.0), ..net };
        let guard_small = SimConfig { edge_mode: crate::simulator::window::EdgeMode::Guard { margin: 10.0 }, ..SimConfig::default() };
        assert!(generate_snapshot(&dense, &guard_small, None, 0).is_err());
    }
}
