//! Per-link marks: LOS state, shadowing, interferer gains and fading.

use super::config::{BlockageSource, SimConfig};
use super::rng::{Purpose, TrialStreams, NORMAL_BOUND};
use super::window::Window;
use crate::config::NetworkConfig;
use crate::coverage::{Fading, InterfererGainDist, LinkKind};
use crate::geometry::{los_test, BuildingSet, Point};
use crate::propagation::{BlockageParams, LinkClassParams};

/// Realized propagation state of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub los: bool,
    pub distance: f64,
    /// Shadowing deviation `chi` in dB (positive means extra loss).
    pub shadow_db: f64,
    /// Linear path loss including the reference loss and shadowing.
    pub path_loss: f64,
}

#[derive(Debug, Clone, Copy)]
struct ClassLaw {
    alpha: f64,
    ln_median_gain: f64,
    sigma: f64,
}

#[derive(Debug, Clone, Copy)]
struct LinkLaw {
    los: ClassLaw,
    nlos: ClassLaw,
    blockage: BlockageParams,
}

impl LinkLaw {
    fn new(p: &LinkClassParams, blockage: BlockageParams) -> Self {
        let class = |los| {
            let (alpha, s) = p.class(los);
            ClassLaw { alpha, ln_median_gain: s.m(), sigma: s.sigma() }
        };
        Self { los: class(true), nlos: class(false), blockage }
    }

    fn ln_path_loss(&self, los: bool, ln_d: f64, z: f64) -> f64 {
        let c = if los { self.los } else { self.nlos };
        c.alpha * ln_d - c.ln_median_gain - c.sigma * z
    }

    /// Smallest possible `ln L` at distance `d` given the LOS classes that
    /// can occur there.
    fn ln_lower_bound(&self, d: f64, polygons: bool) -> f64 {
        let (p_los, p_nlos) = if polygons {
            (true, true)
        } else {
            let c = self.blockage.los_probability(d);
            (c > 0.0, c < 1.0)
        };
        let ln_d = d.max(f64::MIN_POSITIVE).ln();
        let mut lb = f64::INFINITY;
        if p_los {
            lb = lb.min(self.ln_path_loss(true, ln_d, NORMAL_BOUND));
        }
        if p_nlos {
            lb = lb.min(self.ln_path_loss(false, ln_d, NORMAL_BOUND));
        }
        lb
    }
}

/// Link marks of one trial.
#[derive(Clone, Copy)]
pub(crate) struct Channel<'a> {
    pub(crate) streams: TrialStreams,
    pub(crate) window: Window,
    access: LinkLaw,
    backhaul: LinkLaw,
    buildings: Option<&'a BuildingSet>,
    fading: Fading,
}

/// Id used for a synthetic typical receiver so that its keys never collide
/// with dropped points.
pub(crate) const SYNTHETIC_ID: u64 = u64::MAX;

impl<'a> Channel<'a> {
    pub(crate) fn new(net: &NetworkConfig, sim: &SimConfig, buildings: Option<&'a BuildingSet>, trial: u64) -> crate::Result<Self> {
        Ok(Self {
            streams: TrialStreams::new(sim.seed, trial),
            window: sim.window()?,
            access: LinkLaw::new(&net.access, net.access_blockage),
            backhaul: LinkLaw::new(&net.backhaul, net.backhaul_blockage),
            buildings: match sim.blockage_source {
                BlockageSource::Polygons => buildings,
                BlockageSource::Stochastic => None,
            },
            fading: sim.fading,
        })
    }

    fn polygons(&self) -> bool {
        self.buildings.is_some()
    }

    #[allow(clippy::too_many_arguments)]
    fn link(
        &self,
        law: &LinkLaw,
        los_purpose: Purpose,
        shadow_purpose: Purpose,
        key: (u64, u64),
        a: Point,
        b: Point,
        indoor: bool,
    ) -> Link {
        let distance = self.window.distance(a, b);
        let los = match self.buildings {
            Some(set) => !indoor && los_test(a, b, set),
            None => self.streams.uniform(los_purpose, key.0, key.1) < law.blockage.los_probability(distance),
        };
        let z = self.streams.normal(shadow_purpose, key.0, key.1);
        let ln_l = law.ln_path_loss(los, distance.max(f64::MIN_POSITIVE).ln(), z);
        let c = if los { law.los } else { law.nlos };
        Link { los, distance, shadow_db: -10.0 * c.sigma * z / std::f64::consts::LN_10, path_loss: ln_l.exp() }
    }

    /// `ln L` of the link if it is below `ln_best`, drawing marks only when
    /// the class bounds at the realized distance allow it to win.
    #[allow(clippy::too_many_arguments)]
    fn ln_loss_below(
        &self,
        law: &LinkLaw,
        los_purpose: Purpose,
        shadow_purpose: Purpose,
        key: (u64, u64),
        a: Point,
        b: Point,
        indoor: bool,
        ln_best: f64,
    ) -> Option<f64> {
        let distance = self.window.distance(a, b);
        let ln_d = distance.max(f64::MIN_POSITIVE).ln();
        let c = law.blockage.los_probability(distance);
        let may_win = |los: bool| law.ln_path_loss(los, ln_d, NORMAL_BOUND) < ln_best;
        let (los_possible, nlos_possible) = if self.polygons() { (true, true) } else { (c > 0.0, c < 1.0) };
        if !(los_possible && may_win(true)) && !(nlos_possible && may_win(false)) {
            return None;
        }
        let los = match self.buildings {
            Some(set) => !indoor && los_test(a, b, set),
            None => self.streams.uniform(los_purpose, key.0, key.1) < c,
        };
        if !may_win(los) {
            return None;
        }
        let ln_l = law.ln_path_loss(los, ln_d, self.streams.normal(shadow_purpose, key.0, key.1));
        (ln_l < ln_best).then_some(ln_l)
    }

    /// Access-link `ln L` if below `ln_best`.
    pub(crate) fn access_ln_loss_below(
        &self,
        bs: u64,
        bs_p: Point,
        bs_indoor: bool,
        user: u64,
        user_p: Point,
        ln_best: f64,
    ) -> Option<f64> {
        self.ln_loss_below(&self.access, Purpose::AccessLos, Purpose::AccessShadow, (bs, user), bs_p, user_p, bs_indoor, ln_best)
    }

    /// Backhaul-link `ln L` if below `ln_best`.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn backhaul_ln_loss_below(
        &self,
        a: u64,
        a_p: Point,
        a_indoor: bool,
        b: u64,
        b_p: Point,
        b_indoor: bool,
        ln_best: f64,
    ) -> Option<f64> {
        let key = (a.min(b), a.max(b));
        self.ln_loss_below(&self.backhaul, Purpose::BackhaulLos, Purpose::BackhaulShadow, key, a_p, b_p, a_indoor || b_indoor, ln_best)
    }

    /// BS `bs` to user `user` (same marks in both directions).
    pub(crate) fn access_link(&self, bs: u64, bs_p: Point, bs_indoor: bool, user: u64, user_p: Point) -> Link {
        self.link(&self.access, Purpose::AccessLos, Purpose::AccessShadow, (bs, user), bs_p, user_p, bs_indoor)
    }

    /// Between BSs `a` and `b` (symmetric).
    pub(crate) fn backhaul_link(&self, a: u64, a_p: Point, a_indoor: bool, b: u64, b_p: Point, b_indoor: bool) -> Link {
        let key = (a.min(b), a.max(b));
        self.link(&self.backhaul, Purpose::BackhaulLos, Purpose::BackhaulShadow, key, a_p, b_p, a_indoor || b_indoor)
    }

    pub(crate) fn access_ln_lower_bound(&self, d: f64) -> f64 {
        self.access.ln_lower_bound(d, self.polygons())
    }

    pub(crate) fn backhaul_ln_lower_bound(&self, d: f64) -> f64 {
        self.backhaul.ln_lower_bound(d, self.polygons())
    }

    /// Power fading mark of a link in direction `kind`.
    pub(crate) fn fading(&self, kind: LinkKind, tx: u64, rx: u64) -> f64 {
        match self.fading {
            Fading::None => 1.0,
            Fading::Rayleigh => {
                let p = match kind {
                    LinkKind::Downlink => Purpose::FadingDownlink,
                    LinkKind::Uplink => Purpose::FadingUplink,
                    LinkKind::Backhaul => Purpose::FadingBackhaul,
                };
                self.streams.exponential(p, tx, rx)
            }
        }
    }

    /// Antenna gain of an interfering link in direction `kind`.
    pub(crate) fn interferer_gain(&self, gains: &InterfererGainDist, kind: LinkKind, tx: u64, rx: u64) -> f64 {
        let p = match kind {
            LinkKind::Downlink => Purpose::GainDownlink,
            LinkKind::Uplink => Purpose::GainUplink,
            LinkKind::Backhaul => Purpose::GainBackhaul,
        };
        gains.sample(self.streams.uniform(p, tx, rx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_budget_by_hand() {
        let net = NetworkConfig {
            access: LinkClassParams { alpha_los: 2.0, alpha_nlos: 3.3, xi_los: 0.0, xi_nlos: 0.0, beta: 70.0 },
            access_blockage: BlockageParams::new(1.0, 200.0),
            ..NetworkConfig::default()
        };
        let sim = SimConfig::default();
        let ch = Channel::new(&net, &sim, None, 0).unwrap();
        let l = ch.access_link(0, Point::new(0.0, 0.0), false, 0, Point::new(30.0, 40.0));
        // 70 dB + 20 log10(50 m) = 103.9794 dB.
        assert!(l.los);
        assert!((10.0 * l.path_loss.log10() - 103.979_400_086_720_4).abs() < 1e-9);
        assert_eq!(l.shadow_db, 0.0);
    }

    #[test]
    fn lower_bound_holds_for_every_draw() {
        let net = NetworkConfig::default();
        let ch = Channel::new(&net, &SimConfig::default(), None, 3).unwrap();
        for i in 0..20_000u64 {
            let d = 1.0 + (i % 400) as f64;
            let l = ch.access_link(i, Point::new(0.0, 0.0), false, 1, Point::new(d, 0.0));
            assert!(l.path_loss.ln() >= ch.access_ln_lower_bound(d) - 1e-12);
            let b = ch.backhaul_link(i, Point::new(0.0, 0.0), false, 1_000_000, Point::new(0.0, d), false);
            assert!(b.path_loss.ln() >= ch.backhaul_ln_lower_bound(d) - 1e-12);
        }
    }

    #[test]
    fn backhaul_marks_are_symmetric() {
        let ch = Channel::new(&NetworkConfig::default(), &SimConfig::default(), None, 1).unwrap();
        let (a, b) = (Point::new(10.0, 20.0), Point::new(110.0, 70.0));
        assert_eq!(ch.backhaul_link(3, a, false, 8, b, false), ch.backhaul_link(8, b, false, 3, a, false));
    }
}
