//! Radio parameters, link kinds and interferer antenna-gain mixtures.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::units::{db_to_linear, dbm_to_mw, linear_to_db};

/// Transmit powers (mW), bandwidth (Hz), noise and antenna pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub p_bs: f64,
    pub p_ue: f64,
    pub bandwidth: f64,
    /// Thermal noise density in dBm/Hz.
    pub noise_psd: f64,
    /// Receiver noise figure in dB.
    pub noise_figure: f64,
    pub g_max: f64,
    pub g_min: f64,
    /// Main-lobe beamwidth in radians.
    pub beamwidth: f64,
    pub carrier_hz: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            p_bs: dbm_to_mw(30.0),
            p_ue: dbm_to_mw(20.0),
            bandwidth: 2e9,
            noise_psd: -174.0,
            noise_figure: 10.0,
            g_max: db_to_linear(18.0),
            g_min: db_to_linear(-2.0),
            beamwidth: 10f64.to_radians(),
            carrier_hz: 73e9,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p_bs", self.p_bs), ("p_ue", self.p_ue), ("bandwidth", self.bandwidth), ("carrier_hz", self.carrier_hz)] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.g_min > 0.0 && self.g_max >= self.g_min && self.g_max.is_finite()) {
            return invalid(format!("antenna gains must satisfy g_max >= g_min > 0 (got {}, {})", self.g_max, self.g_min));
        }
        if !(self.beamwidth > 0.0 && self.beamwidth < 2.0 * PI) {
            return invalid(format!("beamwidth must lie in (0, 2 pi), got {}", self.beamwidth));
        }
        if !self.noise_psd.is_finite() || !self.noise_figure.is_finite() {
            return invalid("noise parameters must be finite");
        }
        Ok(())
    }

    /// Noise power in mW over the configured bandwidth.
    pub fn noise_power(&self) -> f64 {
        dbm_to_mw(self.noise_power_dbm())
    }

    pub fn noise_power_dbm(&self) -> f64 {
        self.noise_psd + linear_to_db(self.bandwidth) + self.noise_figure
    }

    /// Fraction of directions covered by the main lobe.
    pub fn mainlobe_fraction(&self) -> f64 {
        self.beamwidth / (2.0 * PI)
    }

    pub fn tx_power(&self, kind: LinkKind) -> f64 {
        match kind {
            LinkKind::Downlink | LinkKind::Backhaul => self.p_bs,
            LinkKind::Uplink => self.p_ue,
        }
    }

    /// Gain of an aligned desired link.
    pub fn desired_gain(&self, kind: LinkKind) -> f64 {
        match kind {
            LinkKind::Downlink | LinkKind::Uplink => self.g_max,
            LinkKind::Backhaul => self.g_max * self.g_max,
        }
    }

    /// Default randomly-oriented interferer gain mixture for `kind`.
    pub fn interferer_gains(&self, kind: LinkKind) -> InterfererGainDist {
        match kind {
            LinkKind::Downlink | LinkKind::Uplink => InterfererGainDist::access(self),
            LinkKind::Backhaul => InterfererGainDist::backhaul(self),
        }
    }
}

/// The three links of a self-backhauled network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkKind {
    Downlink,
    Uplink,
    Backhaul,
}

/// Discrete distribution of the antenna gain on an interfering link.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfererGainDist {
    support: Vec<(f64, f64)>,
}

impl InterfererGainDist {
    /// Builds a mixture from `(gain, probability)` pairs. Zero-probability
    /// atoms are dropped.
    pub fn new(support: Vec<(f64, f64)>) -> Result<Self> {
        if support.is_empty() {
            return invalid("gain distribution needs at least one atom");
        }
        let mut total = 0.0;
        for &(g, p) in &support {
            if !(g >= 0.0 && g.is_finite()) || !(0.0..=1.0).contains(&p) {
                return invalid(format!("invalid gain atom ({g}, {p})"));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("gain probabilities sum to {total}, not 1"));
        }
        Ok(Self { support: support.into_iter().filter(|&(_, p)| p > 0.0).collect() })
    }

    pub fn point(gain: f64) -> Result<Self> {
        Self::new(vec![(gain, 1.0)])
    }

    /// Access interferers: main lobe with probability `beamwidth / 2 pi`.
    pub fn access(radio: &RadioConfig) -> Self {
        let q = radio.mainlobe_fraction();
        Self::new(vec![(radio.g_max, q), (radio.g_min, 1.0 - q)]).expect("valid mixture")
    }

    /// Backhaul interferers: both ends independently in main lobe.
    pub fn backhaul(radio: &RadioConfig) -> Self {
        let q = radio.mainlobe_fraction();
        let (gm, gs) = (radio.g_max, radio.g_min);
        Self::new(vec![(gm * gm, q * q), (gm * gs, 2.0 * q * (1.0 - q)), (gs * gs, (1.0 - q) * (1.0 - q))]).expect("valid mixture")
    }

    /// `(gain, probability)` atoms.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.support
    }

    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.support.iter().map(|&(g, p)| p * f(g)).sum()
    }

    pub fn moment(&self, n: f64) -> f64 {
        self.expect(|g| if g == 0.0 { 0.0 } else { g.powf(n) })
    }

    /// Draws a gain from a uniform variate `u` in `[0, 1)`.
    pub fn sample(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for &(g, p) in &self.support {
            acc += p;
            if u < acc {
                return g;
            }
        }
        self.support.last().map(|a| a.0).unwrap_or(0.0)
    }
}

/// Fractional uplink power control: the user transmits `p0 * L^epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpcParams {
    pub p0: f64,
    pub epsilon: f64,
}

impl FpcParams {
    pub fn new(p0: f64, epsilon: f64) -> Result<Self> {
        if !(p0 > 0.0 && p0.is_finite()) {
            return invalid(format!("open-loop power must be positive, got {p0}"));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return invalid(format!("power-control fraction must lie in [0, 1], got {epsilon}"));
        }
        Ok(Self { p0, epsilon })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_noise_power() {
        let r = RadioConfig::default();
        let expected = -174.0 + 10.0 * 2e9f64.log10() + 10.0;
        assert!((r.noise_power_dbm() - expected).abs() < 1e-12);
        assert!((linear_to_db(r.noise_power()) - expected).abs() < 1e-9);
        r.validate().unwrap();
    }

    #[test]
    fn default_mixtures_are_normalised() {
        let r = RadioConfig::default();
        for d in [InterfererGainDist::access(&r), InterfererGainDist::backhaul(&r)] {
            assert!((d.expect(|_| 1.0) - 1.0).abs() < 1e-12);
        }
        let q = 10.0 / 360.0;
        let a = InterfererGainDist::access(&r);
        assert!((a.atoms()[0].1 - q).abs() < 1e-15);
        assert_eq!(r.desired_gain(LinkKind::Backhaul), r.g_max * r.g_max);
    }

    #[test]
    fn rejects_unnormalised_gains() {
        assert!(InterfererGainDist::new(vec![(1.0, 0.5), (2.0, 0.4)]).is_err());
        assert!(InterfererGainDist::new(vec![]).is_err());
        assert!(InterfererGainDist::new(vec![(-1.0, 1.0)]).is_err());
    }

    #[test]
    fn sampling_follows_cumulative_weights() {
        let d = InterfererGainDist::new(vec![(1.0, 0.25), (2.0, 0.75)]).unwrap();
        assert_eq!(d.sample(0.1), 1.0);
        assert_eq!(d.sample(0.3), 2.0);
        assert_eq!(d.sample(0.999_999), 2.0);
    }
}
