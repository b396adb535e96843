//! Rate coverage: exact load sums and the mean-load approximation.

use crate::coverage::{coverage_below_path_loss, LinkKind, RadioConfig};
use crate::error::{invalid, Result};
use crate::load::{load_pmfs, Association, LoadModel, Pmf, TAGGED_MEAN_COEFF};
use crate::propagation::PropagationModel;
use crate::rate::instant::RateConfig;

/// Coverage contributions below this are treated as zero when pruning sums
/// whose remaining terms only get smaller.
const PRUNE: f64 = 1e-18;

/// `(load value, probability)` atoms.
pub type Support = Vec<(f64, f64)>;

fn support(p: &Pmf) -> Support {
    p.iter().map(|(n, w)| (n as f64, w)).collect()
}

/// Load distributions entering the rate sums.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadSupports {
    /// Users on the serving A-BS (typical user included).
    pub abs_users: Support,
    /// BSs backhauled by the serving A-BS.
    pub abs_bs: Support,
    /// Users on the serving backhauled BS (typical user included).
    pub bs_users: Support,
    /// BSs backhauled by the A-BS of the serving BS (serving BS included).
    pub bs_bs: Support,
    /// Users served directly by the A-BS of the serving BS.
    pub bs_abs_users: Support,
}

impl LoadSupports {
    /// Exact load PMFs, each truncated at `eps / 3` residual mass.
    pub fn from_model(loads: &LoadModel, eps: f64) -> Result<Self> {
        let a = load_pmfs(loads, Association::Abs, eps / 3.0)?;
        let b = load_pmfs(loads, Association::Bs, eps / 3.0)?;
        Ok(Self {
            abs_users: support(&a.users_tagged),
            abs_bs: support(&a.bs_per_abs),
            bs_users: support(&b.users_tagged),
            bs_bs: support(&b.bs_per_abs),
            bs_abs_users: support(&b.users_other),
        })
    }

    /// Point masses at the closed-form mean loads.
    pub fn at_means(loads: &LoadModel) -> Self {
        let kappa = loads.kappa();
        let w = loads.abs_fraction();
        let tagged_users = 1.0 + TAGGED_MEAN_COEFF * kappa;
        Self {
            abs_users: vec![(tagged_users, 1.0)],
            abs_bs: vec![((1.0 - w) / w, 1.0)],
            bs_users: vec![(tagged_users, 1.0)],
            bs_bs: vec![(1.0 + TAGGED_MEAN_COEFF * (1.0 - w) / w, 1.0)],
            bs_abs_users: vec![(kappa, 1.0)],
        }
    }
}

/// `tau -> P(SNR > tau)` of one link type, allowing `tau = 0` and `inf`.
#[derive(Debug, Clone, Copy)]
pub struct LinkCoverage<'a> {
    model: &'a PropagationModel,
    signal: f64,
}

impl<'a> LinkCoverage<'a> {
    pub fn new(model: &'a PropagationModel, radio: &RadioConfig, kind: LinkKind) -> Self {
        Self { model, signal: radio.tx_power(kind) * radio.desired_gain(kind) / radio.noise_power() }
    }

    pub fn at(&self, tau: f64) -> Result<f64> {
        coverage_below_path_loss(self.model, self.signal / tau)
    }
}

/// Exact-sum rate coverage for arbitrary load supports.
///
/// `access(tau)` and `backhaul(tau)` are the SNR (or SINR) coverage of the
/// access and backhaul links.
pub fn rate_coverage_with<A, B>(
    supports: &LoadSupports,
    kappa: f64,
    omega: f64,
    mut access: A,
    mut backhaul: B,
    cfg: &RateConfig,
    rho: f64,
) -> Result<f64>
where
    A: FnMut(f64) -> Result<f64>,
    B: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    if !(rho >= 0.0) {
        return invalid(format!("rate threshold must be nonnegative, got {rho}"));
    }
    let rho_hat = rho / cfg.bandwidth;

    let mut abs_term = 0.0;
    if omega > 0.0 {
        for &(n, pn) in &supports.abs_bs {
            for &(m, pm) in &supports.abs_users {
                let s = access(cfg.required_sinr(rho_hat * (kappa * n + m)))?;
                abs_term += pn * pm * s;
                if s < PRUNE {
                    break;
                }
            }
        }
    }

    let mut bs_term = 0.0;
    if omega < 1.0 {
        for &(n, pn) in &supports.bs_bs {
            for &(m, pm) in &supports.bs_abs_users {
                let x = n + m / kappa;
                // A lone backhauled BS with no A-BS users leaves no access share.
                if x <= 1.0 {
                    continue;
                }
                for &(l, pl) in &supports.bs_users {
                    let sb = backhaul(cfg.required_sinr(rho_hat * l * x))?;
                    let s = if sb > 0.0 { sb * access(cfg.required_sinr(rho_hat * l * x / (x - 1.0)))? } else { 0.0 };
                    bs_term += pn * pm * pl * s;
                    if s < PRUNE {
                        break;
                    }
                }
            }
        }
    }
    Ok((omega * abs_term + (1.0 - omega) * bs_term).clamp(0.0, 1.0))
}

/// Precomputed state for evaluating rate coverage on many thresholds.
#[derive(Debug, Clone)]
pub struct RateAnalysis<'a> {
    access: LinkCoverage<'a>,
    backhaul: LinkCoverage<'a>,
    loads: LoadModel,
    supports: LoadSupports,
    cfg: RateConfig,
}

impl<'a> RateAnalysis<'a> {
    /// `access_model` has BS density `lambda`; `backhaul_model` has A-BS
    /// density `lambda * omega` with backhaul propagation parameters.
    pub fn new(
        access_model: &'a PropagationModel,
        backhaul_model: &'a PropagationModel,
        radio: &RadioConfig,
        loads: &LoadModel,
        cfg: &RateConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            access: LinkCoverage::new(access_model, radio, cfg.access_link),
            backhaul: LinkCoverage::new(backhaul_model, radio, LinkKind::Backhaul),
            loads: *loads,
            supports: LoadSupports::from_model(loads, cfg.sum_eps)?,
            cfg: *cfg,
        })
    }

    pub fn loads(&self) -> &LoadModel {
        &self.loads
    }

    pub fn supports(&self) -> &LoadSupports {
        &self.supports
    }

    pub fn config(&self) -> &RateConfig {
        &self.cfg
    }

    pub fn access(&self) -> &LinkCoverage<'a> {
        &self.access
    }

    pub fn backhaul(&self) -> &LinkCoverage<'a> {
        &self.backhaul
    }

    /// `P(Rate > rho)` from the exact load sums.
    pub fn coverage(&self, rho: f64) -> Result<f64> {
        self.coverage_with_supports(&self.supports, rho)
    }

    pub fn coverage_with_supports(&self, supports: &LoadSupports, rho: f64) -> Result<f64> {
        rate_coverage_with(
            supports,
            self.loads.kappa(),
            self.loads.abs_fraction(),
            |t| self.access.at(t),
            |t| self.backhaul.at(t),
            &self.cfg,
            rho,
        )
    }

    /// `P(Rate > rho)` with every load replaced by its mean.
    pub fn coverage_meanload(&self, rho: f64) -> Result<f64> {
        if !(rho >= 0.0) {
            return invalid(format!("rate threshold must be nonnegative, got {rho}"));
        }
        let c = TAGGED_MEAN_COEFF;
        let rho_hat = rho / self.cfg.bandwidth;
        let lu = self.loads.user_density();
        let l = self.loads.bs_density();
        let w = self.loads.abs_fraction();
        let tau = |x: f64| self.cfg.required_sinr(x);
        let users = 1.0 + c * lu / l;
        let first = w * self.access.at(tau(rho_hat * (lu * (1.0 - w) / (l * w) + users)))?;
        let bs = c * (1.0 - w) / w;
        let second = if w < 1.0 {
            (1.0 - w)
                * self.backhaul.at(tau(rho_hat * users * (2.0 + bs)))?
                * self.access.at(tau(rho_hat * users * (2.0 + bs) / (1.0 + bs)))?
        } else {
            0.0
        };
        Ok((first + second).clamp(0.0, 1.0))
    }
}

/// `P(Rate > rho)` from the exact load sums.
pub fn rate_coverage(
    access_model: &PropagationModel,
    backhaul_model: &PropagationModel,
    radio: &RadioConfig,
    loads: &LoadModel,
    cfg: &RateConfig,
    rho: f64,
) -> Result<f64> {
    RateAnalysis::new(access_model, backhaul_model, radio, loads, cfg)?.coverage(rho)
}

/// `P(Rate > rho)` under the mean-load approximation.
pub fn rate_coverage_meanload(
    access_model: &PropagationModel,
    backhaul_model: &PropagationModel,
    radio: &RadioConfig,
    loads: &LoadModel,
    cfg: &RateConfig,
    rho: f64,
) -> Result<f64> {
    RateAnalysis::new(access_model, backhaul_model, radio, loads, cfg)?.coverage_meanload(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NetworkConfig;
    use crate::load::{tagged_pmf, typical_pmf};
    use crate::numerics::series::truncated_sum;
    use crate::units::db_to_linear;

    fn setup(omega: f64) -> (NetworkConfig, PropagationModel, PropagationModel, LoadModel) {
        let net = NetworkConfig { abs_fraction: omega, ..NetworkConfig::default() };
        let a = net.access_model().unwrap();
        let b = net.backhaul_model().unwrap();
        let l = net.load_model().unwrap();
        (net, a, b, l)
    }

    #[test]
    fn zero_rate_coverage_excludes_starved_bs() {
        let (net, a, b, l) = setup(0.5);
        let ra = RateAnalysis::new(&a, &b, &net.radio, &l, &net.rate_config()).unwrap();
        let r = ra.coverage(0.0).unwrap();
        // Only a backhauled BS that is the sole load of an A-BS without
        // direct users gets no access share.
        let s = ra.supports();
        let p1 = s.bs_bs.iter().find(|a| a.0 == 1.0).map_or(0.0, |a| a.1);
        let p0 = s.bs_abs_users.iter().find(|a| a.0 == 0.0).map_or(0.0, |a| a.1);
        let expected = 1.0 - 0.5 * p1 * p0;
        assert!((r - expected).abs() <= 1e-8, "{r} vs {expected}");
        assert!(expected < 1.0);
    }

    #[test]
    fn all_wired_collapses_to_double_sum() {
        let (net, a, b, l) = setup(1.0);
        let ra = RateAnalysis::new(&a, &b, &net.radio, &l, &net.rate_config()).unwrap();
        assert_eq!(ra.supports().abs_bs, vec![(0.0, 1.0)]);
        let rho = 100e6;
        let direct: f64 =
            ra.supports().abs_users.iter().map(|&(m, p)| p * ra.access().at(net.rate_config().required_sinr(rho / 2e9 * m)).unwrap()).sum();
        assert!((ra.coverage(rho).unwrap() - direct).abs() < 1e-15);
        let mean = ra.coverage_meanload(rho).unwrap();
        let expected = ra.access().at((rho / 2e9 * (1.0 + 1.28 * 10.0)).exp2() - 1.0).unwrap();
        assert!((mean - expected).abs() < 1e-15);
    }

    #[test]
    fn mean_injection_reproduces_meanload_form() {
        for omega in [0.2, 0.5, 0.9] {
            let (net, a, b, l) = setup(omega);
            let ra = RateAnalysis::new(&a, &b, &net.radio, &l, &net.rate_config()).unwrap();
            let means = LoadSupports::at_means(&l);
            for rho in [1e6, 30e6, 100e6, 400e6] {
                let x = ra.coverage_with_supports(&means, rho).unwrap();
                let y = ra.coverage_meanload(rho).unwrap();
                assert!((x - y).abs() <= 1e-10 * y.max(1e-300), "omega={omega} rho={rho}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn single_user_cells() {
        let net = NetworkConfig { abs_fraction: 1.0, user_density: 1e-6 * 1e-4, ..NetworkConfig::default() };
        let a = net.access_model().unwrap();
        let b = net.backhaul_model().unwrap();
        let l = net.load_model().unwrap();
        let ra = RateAnalysis::new(&a, &b, &net.radio, &l, &net.rate_config()).unwrap();
        let rho = 500e6;
        let expected = ra.access().at((rho / 2e9f64).exp2() - 1.0).unwrap();
        assert!((ra.coverage_meanload(rho).unwrap() - expected).abs() < 1e-5);
        assert!((ra.coverage(rho).unwrap() - expected).abs() < 1e-5);
    }

    #[test]
    fn monotone_in_rate_and_bounded() {
        let (net, a, b, l) = setup(0.5);
        let ra = RateAnalysis::new(&a, &b, &net.radio, &l, &net.rate_config()).unwrap();
        let mut last = 1.0;
        for i in 0..20 {
            let rho = 10f64.powf(5.0 + 0.2 * i as f64);
            let r = ra.coverage(rho).unwrap();
            assert!((0.0..=1.0).contains(&r));
            assert!(r <= last + 1e-12);
            last = r;
            let m = ra.coverage_meanload(rho).unwrap();
            assert!((r - m).abs() < 0.1, "rho={rho:e}: exact {r} mean-load {m}");
        }
    }

    #[test]
    fn nested_brute_force_sum_agrees() {
        // Long direct summation of the BS-branch triple sum without pruning,
        // truncated only at indices far beyond the tabulated supports.
        let (net, a, b, l) = setup(0.5);
        let cfg = net.rate_config();
        let ra = RateAnalysis::new(&a, &b, &net.radio, &l, &cfg).unwrap();
        let rho = 50e6;
        let (lu, lam, w) = (l.user_density(), l.bs_density(), l.abs_fraction());
        let kappa = lu / lam;
        let rh = rho / cfg.bandwidth;
        let tau = |x: f64| cfg.required_sinr(x);
        let mut bs = 0.0;
        for n in 1..200u64 {
            let pn = tagged_pmf(lam * (1.0 - w), lam * w, n).unwrap();
            for m in 0..200u64 {
                let pm = typical_pmf(lu, lam, m).unwrap();
                let x = n as f64 + m as f64 / kappa;
                if x <= 1.0 {
                    continue;
                }
                let inner = truncated_sum(
                    |i| {
                        let li = (i + 1) as f64;
                        tagged_pmf(lu, lam, i + 1).unwrap()
                            * ra.backhaul().at(tau(rh * li * x)).unwrap()
                            * ra.access().at(tau(rh * li * x / (x - 1.0))).unwrap()
                    },
                    |i| if i < 300 { 1.0 } else { 0.0 },
                    0.5,
                );
                bs += pn * pm * inner;
            }
        }
        let mut abs = 0.0;
        for n in 0..200u64 {
            let pn = typical_pmf(lam * (1.0 - w), lam * w, n).unwrap();
            for m in 1..300u64 {
                abs += pn * tagged_pmf(lu, lam, m).unwrap() * ra.access().at(tau(rh * (kappa * n as f64 + m as f64))).unwrap();
            }
        }
        let brute = w * abs + (1.0 - w) * bs;
        let fast = ra.coverage(rho).unwrap();
        assert!((brute - fast).abs() <= cfg.sum_eps, "{brute} vs {fast}");
    }

    #[test]
    fn min_mcs_caps_coverage_at_small_rate() {
        let (mut net, _, _, _) = setup(1.0);
        net.min_mcs_snr = db_to_linear(5.0);
        let a = net.access_model().unwrap();
        let b = net.backhaul_model().unwrap();
        let l = net.load_model().unwrap();
        let ra = RateAnalysis::new(&a, &b, &net.radio, &l, &net.rate_config()).unwrap();
        let r = ra.coverage(1.0).unwrap();
        let s = ra.access().at(db_to_linear(5.0)).unwrap();
        assert!((r - s).abs() < 1e-8 && s < 1.0);
    }
}
