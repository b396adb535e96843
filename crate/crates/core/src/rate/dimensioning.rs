//! Network dimensioning: rate percentiles, saturation density and the
//! density/backhaul trade-off for a target median rate.

use serde::{Deserialize, Serialize};

use crate::config::NetworkConfig;
use crate::error::{invalid, Error, Result};
use crate::load::TAGGED_MEAN_COEFF;
use crate::rate::coverage::{LinkCoverage, RateAnalysis};
use crate::rate::instant::spectral_threshold;
use crate::units::per_km2_to_per_m2;

/// Rate `rho` with `R(rho) = 1 - p`, the `p`-quantile of the rate.
///
/// Bisects in `ln rho` over `[1 bps, 1 Tbps]` to relative width `rel_tol`.
/// Returns 0 when even a vanishing rate is exceeded with probability below
/// `1 - p`.
pub fn rate_percentile<F>(mut coverage: F, p: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(p > 0.0 && p < 1.0) {
        return invalid(format!("percentile must be in (0, 1), got {p}"));
    }
    let target = 1.0 - p;
    let (mut lo, mut hi) = (0.0_f64, 12.0 * std::f64::consts::LN_10);
    if coverage(lo.exp())? < target {
        return Ok(0.0);
    }
    if coverage(hi.exp())? >= target {
        return Err(Error::NoSolution(format!("rate percentile {p} exceeds 1 Tbps")));
    }
    while hi - lo > rel_tol {
        let mid = 0.5 * (lo + hi);
        if coverage(mid.exp())? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Inputs of the saturation-density search. Densities are per m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationQuery {
    /// Density of BSs with wired backhaul, held fixed.
    pub abs_density: f64,
    /// Allowed rate-coverage gain beyond saturation.
    pub delta: f64,
    /// Rate threshold in bits/s.
    pub rate: f64,
    /// Largest BS density searched.
    pub max_density: f64,
    /// Bisection resolution.
    pub density_tol: f64,
}

impl SaturationQuery {
    pub fn new(abs_density: f64, delta: f64, rate: f64) -> Self {
        Self { abs_density, delta, rate, max_density: per_km2_to_per_m2(1e5), density_tol: per_km2_to_per_m2(0.5) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_density > 0.0 && self.abs_density.is_finite()) {
            return invalid(format!("A-BS density must be positive, got {}", self.abs_density));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return invalid(format!("margin must be in (0, 1), got {}", self.delta));
        }
        if !(self.rate > 0.0) {
            return invalid(format!("rate threshold must be positive, got {}", self.rate));
        }
        if !(self.max_density > self.abs_density && self.density_tol > 0.0) {
            return invalid("search bracket must extend above the A-BS density");
        }
        Ok(())
    }
}

/// Whether BS density `bs_density` meets the saturation condition:
/// `1 - S_d(tau{r 1.28 lu / lam}) <= delta / S_b(tau{r 1.28^2 lu / gamma})`.
pub fn saturation_condition(net: &NetworkConfig, q: &SaturationQuery, bs_density: f64) -> Result<bool> {
    let cfg = net.rate_config();
    let r = q.rate / cfg.bandwidth;
    let k = TAGGED_MEAN_COEFF;
    let backhaul = NetworkConfig { bs_density: q.abs_density, abs_fraction: 1.0, ..*net }.backhaul_model()?;
    let sb = LinkCoverage::new(&backhaul, &net.radio, crate::coverage::LinkKind::Backhaul)
        .at(spectral_threshold(r * k * k * net.user_density / q.abs_density))?;
    let access = NetworkConfig { bs_density, ..*net }.access_model()?;
    let sd = LinkCoverage::new(&access, &net.radio, cfg.access_link).at(spectral_threshold(r * k * net.user_density / bs_density))?;
    Ok((1.0 - sd).abs() * sb <= q.delta)
}

/// Smallest BS density meeting the saturation condition, by bisection.
pub fn saturation_density(net: &NetworkConfig, q: &SaturationQuery) -> Result<f64> {
    q.validate()?;
    let (mut lo, mut hi) = (q.abs_density, q.max_density);
    if saturation_condition(net, q, lo)? {
        return Ok(lo);
    }
    if !saturation_condition(net, q, hi)? {
        return Err(Error::NoSolution(format!("saturation condition not met below {} BS/km²", crate::units::per_m2_to_per_km2(hi))));
    }
    while hi - lo > q.density_tol {
        let mid = 0.5 * (lo + hi);
        if saturation_condition(net, q, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One point on the median-rate contour. Densities are per m².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    pub bs_density: f64,
    /// Smallest wired fraction reaching the target; `None` if even a fully
    /// wired network misses it.
    pub abs_fraction: Option<f64>,
}

/// Smallest bisected A-BS fraction; also the bisection resolution.
pub const CONTOUR_OMEGA_TOL: f64 = 0.005;

/// Exact-sum rate coverage of `net` at `rho`.
pub fn network_rate_coverage(net: &NetworkConfig, rho: f64) -> Result<f64> {
    let a = net.access_model()?;
    let b = net.backhaul_model()?;
    RateAnalysis::new(&a, &b, &net.radio, &net.load_model()?, &net.rate_config())?.coverage(rho)
}

/// For each BS density, the smallest wired fraction whose median rate is at
/// least `target_median`.
pub fn median_rate_contour(net: &NetworkConfig, target_median: f64, bs_densities: &[f64]) -> Result<Vec<ContourPoint>> {
    use rayon::prelude::*;
    if !(target_median > 0.0) {
        return invalid(format!("target rate must be positive, got {target_median}"));
    }
    bs_densities
        .par_iter()
        .map(|&lam| {
            let at = |omega: f64| network_rate_coverage(&NetworkConfig { bs_density: lam, abs_fraction: omega, ..*net }, target_median);
            let abs_fraction = if at(1.0)? < 0.5 {
                None
            } else if at(CONTOUR_OMEGA_TOL)? >= 0.5 {
                Some(CONTOUR_OMEGA_TOL)
            } else {
                let (mut lo, mut hi) = (CONTOUR_OMEGA_TOL, 1.0);
                while hi - lo > CONTOUR_OMEGA_TOL {
                    let mid = 0.5 * (lo + hi);
                    if at(mid)? >= 0.5 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Some(hi)
            };
            Ok(ContourPoint { bs_density: lam, abs_fraction })
        })
        .collect()
}
