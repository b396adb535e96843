//! Per-user rate under proportional access/backhaul resource sharing.

use crate::coverage::LinkKind;
use crate::error::{domain, invalid, Result};

/// Rate-analysis settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateConfig {
    /// System bandwidth in Hz.
    pub bandwidth: f64,
    /// Minimum decodable SINR (linear); `0` disables the constraint.
    pub min_mcs_snr: f64,
    /// Total probability mass that may be dropped when truncating load sums.
    pub sum_eps: f64,
    /// Access direction whose coverage enters the rate (downlink or uplink).
    pub access_link: LinkKind,
}

impl RateConfig {
    pub fn new(bandwidth: f64) -> Self {
        Self { bandwidth, min_mcs_snr: 0.0, sum_eps: 1e-9, access_link: LinkKind::Downlink }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return invalid(format!("bandwidth must be positive, got {}", self.bandwidth));
        }
        if !(self.min_mcs_snr >= 0.0 && self.min_mcs_snr.is_finite()) {
            return invalid(format!("minimum MCS SNR must be nonnegative, got {}", self.min_mcs_snr));
        }
        if !(self.sum_eps > 0.0 && self.sum_eps < 1.0) {
            return invalid(format!("sum_eps must lie in (0, 1), got {}", self.sum_eps));
        }
        if self.access_link == LinkKind::Backhaul {
            return invalid("access link must be downlink or uplink");
        }
        Ok(())
    }

    /// SINR needed for spectral efficiency `x` bits/s/Hz, raised to the
    /// minimum decodable SINR.
    pub fn required_sinr(&self, x: f64) -> f64 {
        spectral_threshold(x).max(self.min_mcs_snr)
    }
}

/// `2^x - 1`: SINR needed for `x` bits/s/Hz.
pub fn spectral_threshold(x: f64) -> f64 {
    x.exp2() - 1.0
}

/// Loads seen by a user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Loads {
    /// Users on the serving BS, the user included.
    pub users: u64,
    /// Users served directly by the serving (or backhauling) A-BS.
    pub abs_users: u64,
    /// BSs backhauled by that A-BS.
    pub backhauled_bs: u64,
}

/// Rate in bits/s of a user with the given loads and link SINRs.
///
/// Users on an A-BS share the access fraction `N_uw / (N_uw + kappa N_b)`;
/// users on a backhauled BS get the minimum of their access and backhaul
/// shares. A link below the minimum decodable SINR yields rate 0.
pub fn instantaneous_rate(
    loads: Loads,
    kappa: f64,
    sinr_access: f64,
    sinr_backhaul: f64,
    associated_to_abs: bool,
    cfg: &RateConfig,
) -> Result<f64> {
    if !(sinr_access > 0.0) || (!associated_to_abs && !(sinr_backhaul > 0.0)) {
        return domain("SINR values must be positive");
    }
    if !(kappa > 0.0) {
        return domain(format!("mean users per BS must be positive, got {kappa}"));
    }
    let b = cfg.bandwidth;
    let n_uw = loads.abs_users as f64;
    let n_b = loads.backhauled_bs as f64;
    if associated_to_abs {
        if loads.abs_users == 0 {
            return domain("a user on an A-BS counts towards its load");
        }
        if sinr_access < cfg.min_mcs_snr {
            return Ok(0.0);
        }
        return Ok(b / (n_uw + kappa * n_b) * sinr_access.ln_1p() / std::f64::consts::LN_2);
    }
    if loads.users == 0 || loads.backhauled_bs == 0 {
        return domain("a backhauled user needs a loaded BS and a backhauling A-BS");
    }
    if sinr_access < cfg.min_mcs_snr || sinr_backhaul < cfg.min_mcs_snr {
        return Ok(0.0);
    }
    let share = kappa / (kappa * n_b + n_uw);
    let access = (1.0 - share) * sinr_access.ln_1p() / std::f64::consts::LN_2;
    let backhaul = share * sinr_backhaul.ln_1p() / std::f64::consts::LN_2;
    Ok(b / loads.users as f64 * access.min(backhaul).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::db_to_linear;

    #[test]
    fn sole_user_on_abs_gets_full_band() {
        let cfg = RateConfig::new(2e9);
        let loads = Loads { users: 1, abs_users: 1, backhauled_bs: 0 };
        let r = instantaneous_rate(loads, 10.0, 3.0, 0.0, true, &cfg).unwrap();
        assert!((r - 2e9 * 2.0).abs() < 1e-3);
    }

    #[test]
    fn lone_backhauled_bs_without_abs_users_has_no_access_share() {
        let cfg = RateConfig::new(2e9);
        let loads = Loads { users: 1, abs_users: 0, backhauled_bs: 1 };
        assert_eq!(instantaneous_rate(loads, 10.0, 100.0, 100.0, false, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn hand_computed_backhauled_user() {
        // kappa=10, N_b=2, N_uw=10, N_u=5, both SINRs 15 dB, B = 2 GHz:
        // share = 10/30; log2(1 + 31.6227766) = 5.02781, access = 2/3 of it,
        // backhaul = 1/3 of it, rate = 2e9/5 * 1.67594 = 670.374 Mbps.
        let cfg = RateConfig::new(2e9);
        let s = db_to_linear(15.0);
        let se = (1.0 + s).log2();
        let expected = 2e9 / 5.0 * se / 3.0;
        assert!((expected - 670.374_356e6).abs() < 1e3);
        let loads = Loads { users: 5, abs_users: 10, backhauled_bs: 2 };
        let r = instantaneous_rate(loads, 10.0, s, s, false, &cfg).unwrap();
        assert!((r - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn min_mcs_zeroes_rate() {
        let cfg = RateConfig { min_mcs_snr: db_to_linear(0.0), ..RateConfig::new(1e9) };
        let loads = Loads { users: 2, abs_users: 3, backhauled_bs: 1 };
        assert_eq!(instantaneous_rate(loads, 5.0, 0.5, 10.0, false, &cfg).unwrap(), 0.0);
        assert_eq!(instantaneous_rate(loads, 5.0, 10.0, 0.5, false, &cfg).unwrap(), 0.0);
        assert!(instantaneous_rate(loads, 5.0, 10.0, 10.0, false, &cfg).unwrap() > 0.0);
        assert!(cfg.required_sinr(0.1) == 1.0);
    }

    #[test]
    fn precondition_violations() {
        let cfg = RateConfig::new(1e9);
        let bad = Loads { users: 0, abs_users: 1, backhauled_bs: 1 };
        assert!(instantaneous_rate(bad, 5.0, 1.0, 1.0, false, &cfg).is_err());
        let bad = Loads { users: 1, abs_users: 0, backhauled_bs: 0 };
        assert!(instantaneous_rate(bad, 5.0, 1.0, 1.0, true, &cfg).is_err());
        let ok = Loads { users: 1, abs_users: 1, backhauled_bs: 0 };
        assert!(instantaneous_rate(ok, 5.0, 0.0, 1.0, true, &cfg).is_err());
    }
}
