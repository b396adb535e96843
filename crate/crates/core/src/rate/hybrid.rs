//! Rate coverage with offloading of low-SINR users to a UHF macro tier.

use crate::config::HybridConfig;
use crate::coverage::{sinr_coverage, InterfererGainDist, LinkKind, RadioConfig, SinrOptions};
use crate::error::{invalid, Result};
use crate::load::{tagged_pmf, LoadModel, Pmf};
use crate::propagation::PropagationModel;
use crate::rate::coverage::RateAnalysis;
use crate::rate::instant::{spectral_threshold, RateConfig};
use crate::units::{db_to_linear, linear_to_db};

/// UHF SINR coverage tabulated on a uniform dB grid.
#[derive(Debug, Clone, PartialEq)]
pub struct UhfCoverageTable {
    start_db: f64,
    step_db: f64,
    values: Vec<f64>,
}

impl UhfCoverageTable {
    /// Lowest tabulated threshold.
    pub const START_DB: f64 = -40.0;
    /// Highest threshold ever tabulated; coverage is taken as 0 beyond.
    pub const STOP_DB: f64 = 120.0;

    /// Tabulates single-tier Rayleigh-fading SINR coverage with all UHF BSs
    /// active, from [`Self::START_DB`] until coverage drops below `1e-10`.
    pub fn build(hybrid: &HybridConfig, base_radio: &RadioConfig, step_db: f64) -> Result<Self> {
        hybrid.validate()?;
        if !(step_db > 0.0) {
            return invalid(format!("table step must be positive, got {step_db}"));
        }
        let model = hybrid.uhf_model()?;
        let radio = hybrid.uhf_radio(base_radio);
        let gains = InterfererGainDist::point(1.0)?;
        let opts = SinrOptions::default();
        let mut values = Vec::new();
        let mut db = Self::START_DB;
        while db <= Self::STOP_DB {
            let p = sinr_coverage(&model, &radio, LinkKind::Downlink, &gains, db_to_linear(db), &opts)?;
            values.push(p);
            if p < 1e-10 {
                break;
            }
            db += step_db;
        }
        Ok(Self { start_db: Self::START_DB, step_db, values })
    }

    /// Coverage at linear threshold `tau` by linear interpolation in dB.
    pub fn at(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 1.0;
        }
        let x = (linear_to_db(tau) - self.start_db) / self.step_db;
        if x <= 0.0 {
            return self.values[0];
        }
        let last = self.values.len() - 1;
        if x >= last as f64 {
            return if x == last as f64 { self.values[last] } else { 0.0 };
        }
        let i = x.floor() as usize;
        let f = x - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Rate coverage of a hybrid network (all mmWave BSs wired).
pub struct HybridAnalysis<'a> {
    mmwave: Option<RateAnalysis<'a>>,
    offload_prob: f64,
    uhf_users: Pmf,
    uhf: UhfCoverageTable,
    uhf_bandwidth: f64,
}

impl<'a> HybridAnalysis<'a> {
    /// Table step used when none is given.
    pub const DEFAULT_STEP_DB: f64 = 0.5;

    pub fn new(
        access_model: &'a PropagationModel,
        backhaul_model: &'a PropagationModel,
        radio: &RadioConfig,
        loads: &LoadModel,
        cfg: &RateConfig,
        hybrid: &HybridConfig,
    ) -> Result<Self> {
        let table = UhfCoverageTable::build(hybrid, radio, Self::DEFAULT_STEP_DB)?;
        Self::with_table(access_model, backhaul_model, radio, loads, cfg, hybrid, table)
    }

    pub fn with_table(
        access_model: &'a PropagationModel,
        backhaul_model: &'a PropagationModel,
        radio: &RadioConfig,
        loads: &LoadModel,
        cfg: &RateConfig,
        hybrid: &HybridConfig,
        uhf: UhfCoverageTable,
    ) -> Result<Self> {
        if loads.abs_fraction() != 1.0 {
            return invalid("hybrid analysis requires every mmWave BS to have wired backhaul");
        }
        hybrid.validate()?;
        cfg.validate()?;
        let tau_min = hybrid.offload_threshold;
        let kind = cfg.access_link;
        let stay = crate::rate::coverage::LinkCoverage::new(access_model, radio, kind).at(tau_min)?;
        let mm_users = loads.user_density() * stay;
        let mmwave = if mm_users > 0.0 {
            let mm_loads = LoadModel::new(mm_users, loads.bs_density(), 1.0)?;
            let mm_cfg = RateConfig { min_mcs_snr: cfg.min_mcs_snr.max(tau_min), ..*cfg };
            Some(RateAnalysis::new(access_model, backhaul_model, radio, &mm_loads, &mm_cfg)?)
        } else {
            None
        };
        let offloaded = loads.user_density() * (1.0 - stay);
        let uhf_users = Pmf::tabulate(|n| tagged_pmf(offloaded, hybrid.uhf_density, n), 1, cfg.sum_eps / 2.0)?;
        Ok(Self { mmwave, offload_prob: 1.0 - stay, uhf_users, uhf, uhf_bandwidth: hybrid.uhf_bandwidth })
    }

    /// Probability that a user is offloaded to the UHF tier.
    pub fn offload_probability(&self) -> f64 {
        self.offload_prob
    }

    pub fn uhf_table(&self) -> &UhfCoverageTable {
        &self.uhf
    }

    /// Coverage of users kept on mmWave (joint with staying there).
    pub fn mmwave_part(&self, rho: f64) -> Result<f64> {
        match &self.mmwave {
            Some(r) => r.coverage(rho),
            None => Ok(0.0),
        }
    }

    /// Coverage of offloaded users (joint with being offloaded).
    pub fn uhf_part(&self, rho: f64) -> Result<f64> {
        if !(rho >= 0.0) {
            return invalid(format!("rate threshold must be nonnegative, got {rho}"));
        }
        let x = rho / self.uhf_bandwidth;
        let sum: f64 = self.uhf_users.iter().map(|(n, p)| p * self.uhf.at(spectral_threshold(x * n as f64))).sum();
        Ok(self.offload_prob * sum)
    }

    /// `P(Rate > rho)` over all users.
    pub fn coverage(&self, rho: f64) -> Result<f64> {
        Ok((self.mmwave_part(rho)? + self.uhf_part(rho)?).clamp(0.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NetworkConfig;
    use crate::numerics::quadrature::integrate_real;

    fn closed_form_uhf(h: &HybridConfig, radio: &RadioConfig, tau: f64) -> f64 {
        // Uniform alpha = 4 with Rayleigh fading: shadowing rescales the
        // density by E[S^(1/2)], interference enters through
        // rho(tau) = sqrt(tau) (pi/2 - atan(1/sqrt(tau))).
        let lam = h.uhf_density * h.uhf_shadow.moment(0.5);
        let r = tau.sqrt() * (std::f64::consts::FRAC_PI_2 - (1.0 / tau.sqrt()).atan());
        let c = tau * radio.noise_power() / h.uhf_power;
        let a = std::f64::consts::PI * lam;
        let scale = 1.0 / (a * (1.0 + r));
        integrate_real(
            |u| {
                let v = u * scale;
                a * (-a * v * (1.0 + r) - c * v * v).exp() * scale
            },
            0.0,
            60.0,
            &[],
        )
        .unwrap()
    }

    #[test]
    fn uhf_table_matches_closed_form() {
        let h = HybridConfig::default();
        let base = RadioConfig::default();
        let uhf_radio = h.uhf_radio(&base);
        let table = UhfCoverageTable::build(&h, &base, 5.0).unwrap();
        for (i, &v) in table.values().iter().enumerate().step_by(2) {
            let tau = db_to_linear(UhfCoverageTable::START_DB + 5.0 * i as f64);
            let cf = closed_form_uhf(&h, &uhf_radio, tau);
            assert!((v - cf).abs() < 1e-6, "tau={tau}: {v} vs {cf}");
        }
    }

    #[test]
    fn offload_limits() {
        let net = NetworkConfig { abs_fraction: 1.0, ..NetworkConfig::default() };
        let a = net.access_model().unwrap();
        let b = net.backhaul_model().unwrap();
        let l = net.load_model().unwrap();
        let base = HybridConfig::default();
        let table = UhfCoverageTable::build(&base, &net.radio, 1.0).unwrap();
        let rho = 10e6;
        let mm = RateAnalysis::new(&a, &b, &net.radio, &l, &net.rate_config()).unwrap().coverage(rho).unwrap();
        let none = HybridConfig { offload_threshold: 1e-12, ..base };
        let h = HybridAnalysis::with_table(&a, &b, &net.radio, &l, &net.rate_config(), &none, table.clone()).unwrap();
        assert!((h.coverage(rho).unwrap() - mm).abs() < 1e-6);
        let all = HybridConfig { offload_threshold: 1e30, ..base };
        let h = HybridAnalysis::with_table(&a, &b, &net.radio, &l, &net.rate_config(), &all, table.clone()).unwrap();
        assert!(h.offload_probability() > 1.0 - 1e-12);
        let pure: f64 = Pmf::tabulate(|n| tagged_pmf(l.user_density(), base.uhf_density, n), 1, 1e-10)
            .unwrap()
            .iter()
            .map(|(n, p)| p * table.at(spectral_threshold(rho / base.uhf_bandwidth * n as f64)))
            .sum();
        assert!((h.coverage(rho).unwrap() - pure).abs() < 1e-8);
    }

    #[test]
    fn requires_all_wired() {
        let net = NetworkConfig::default();
        let a = net.access_model().unwrap();
        let b = net.backhaul_model().unwrap();
        let l = net.load_model().unwrap();
        let t = UhfCoverageTable { start_db: 0.0, step_db: 1.0, values: vec![1.0] };
        assert!(HybridAnalysis::with_table(&a, &b, &net.radio, &l, &net.rate_config(), &HybridConfig::default(), t).is_err());
    }
}
