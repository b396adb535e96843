//! SINR coverage with and without Rayleigh fading.

use num_complex::Complex64;

use crate::coverage::radio::{InterfererGainDist, LinkKind, RadioConfig};
use crate::coverage::shot_noise::{Kernel, ShotNoise};
use crate::error::{domain, invalid, Error, Result};
use crate::load::typical_pmf;
use crate::numerics::laplace::{invert_laplace_ccdf, InversionConfig};
use crate::numerics::quadrature::{integrate, QuadConfig};
use crate::propagation::PropagationModel;

/// Small-scale fading applied to every link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fading {
    None,
    Rayleigh,
}

/// Options for [`sinr_coverage`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrOptions {
    pub fading: Fading,
    /// User density (per m²) used to thin interferers to BSs that have at
    /// least one user; `None` keeps every BS active.
    pub thinning_user_density: Option<f64>,
    pub inversion: InversionConfig,
}

impl Default for SinrOptions {
    fn default() -> Self {
        Self {
            fading: Fading::Rayleigh,
            thinning_user_density: None,
            inversion: InversionConfig { terms: 400, rel_tol: 1e-6, ..InversionConfig::default() },
        }
    }
}

/// Serving path-loss range outside which the tagged-link density has mass
/// below this tolerance.
const SERVING_TAIL: f64 = 1e-13;

/// Density of active interferers after optional user-activity thinning.
pub fn active_density(model: &PropagationModel, thinning_user_density: Option<f64>) -> Result<f64> {
    match thinning_user_density {
        None => Ok(model.density()),
        Some(lu) => {
            if !(lu > 0.0) {
                return invalid(format!("user density for thinning must be positive, got {lu}"));
            }
            Ok(model.density() * (1.0 - typical_pmf(lu, model.density(), 0)?))
        }
    }
}

/// `P(SINR > tau)` for the typical link of the given kind.
///
/// The serving transmitter is the one with the smallest path loss; every
/// other transmitter of `model` interferes with a gain drawn from `gains`
/// (relative to the desired-link gain).
pub fn sinr_coverage(
    model: &PropagationModel,
    radio: &RadioConfig,
    kind: LinkKind,
    gains: &InterfererGainDist,
    tau: f64,
    opts: &SinrOptions,
) -> Result<f64> {
    if !(tau > 0.0) || tau.is_infinite() {
        return domain(format!("SINR threshold must be positive and finite, got {tau}"));
    }
    let g = radio.desired_gain(kind);
    let noise_scale = radio.noise_power() / (radio.tx_power(kind) * g);
    let interferer_density = active_density(model, opts.thinning_user_density)?;
    let marks: Vec<(f64, f64)> = gains.atoms().iter().map(|&(psi, p)| (psi / g, p)).collect();

    let lo = model.measure_quantile(SERVING_TAIL)?;
    let mut hi = model.measure_quantile(-SERVING_TAIL.ln())?;
    // Past the noise-only edge the coverage conditional on l is zero
    // (no fading) or negligible (fading).
    let snr_edge = 1.0 / (tau * noise_scale);
    hi = match opts.fading {
        Fading::None => hi.min(snr_edge),
        Fading::Rayleigh => hi.min(-SERVING_TAIL.ln() * snr_edge),
    };
    if hi <= lo {
        return Ok(0.0);
    }
    let hints: Vec<f64> = model.kink_hints().iter().map(|h| h.ln()).collect();
    let outer_quad = match opts.fading {
        Fading::Rayleigh => QuadConfig { abs_tol: 1e-10, rel_tol: 1e-7, max_subdivisions: 1000 },
        // Each integrand value is itself a numerical inversion.
        Fading::None => QuadConfig { abs_tol: 1e-7, rel_tol: 1e-6, max_subdivisions: 1000 },
    };

    let value = match opts.fading {
        Fading::Rayleigh => {
            let sn = ShotNoise::new(model, marks, interferer_density, Kernel::Rayleigh)?;
            outer(model, lo, hi, &hints, &outer_quad, |l| {
                let lf = sn.log_functional(Complex64::new(tau * l, 0.0), l)?.re;
                Ok((-tau * noise_scale * l - interferer_density * lf).exp())
            })?
        }
        Fading::None => {
            let sn = ShotNoise::new(model, marks, interferer_density, Kernel::Deterministic)?;
            let inv = opts.inversion;
            outer(model, lo, hi, &hints, &outer_quad, |l| {
                let y = 1.0 / tau - noise_scale * l;
                if y <= 0.0 {
                    return Ok(0.0);
                }
                // J = l * sum psi/(G L): its transform at z is the shot-noise
                // transform at z*l restricted to path loss above l.
                let ccdf = invert_laplace_ccdf(|z| Ok(sn.ccdf_transform(z * l, l)? * l), y, &inv)?;
                Ok(1.0 - ccdf)
            })?
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

/// `int cond(l) f_L(l) dl` over the serving path loss, in log scale.
fn outer<F>(model: &PropagationModel, lo: f64, hi: f64, hints: &[f64], quad: &QuadConfig, mut cond: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut failure: Option<Error> = None;
    let res = integrate(
        |s: f64| {
            if failure.is_some() {
                return 0.0;
            }
            let l = s.exp();
            match (cond(l), model.path_loss_pdf(l)) {
                (Ok(c), Ok(pdf)) => c * pdf * l,
                (Err(e), _) | (_, Err(e)) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        lo.ln(),
        hi.ln(),
        hints,
        quad,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(res.value),
    }
}
