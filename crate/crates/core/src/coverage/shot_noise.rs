//! Laplace functionals of the interference shot noise and the INR bound.

use num_complex::Complex64;

use crate::coverage::radio::{InterfererGainDist, LinkKind, RadioConfig};
use crate::error::{domain, invalid, Result};
use crate::numerics::laplace::{invert_laplace_ccdf, InversionConfig};
use crate::numerics::quadrature::{integrate, QuadConfig};
use crate::numerics::special::{gamma, one_minus_exp_neg, LognormalParams};
use crate::propagation::PropagationModel;

/// Per-interferer kernel `phi(w)` in `E[exp(-z I)] = exp(-lambda E int phi(z K / u) M'(u) du)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// No small-scale fading: `1 - exp(-w)`.
    Deterministic,
    /// Unit-mean exponential power fading: `w / (1 + w)`.
    Rayleigh,
}

impl Kernel {
    fn eval(self, w: Complex64) -> Complex64 {
        match self {
            Kernel::Deterministic => one_minus_exp_neg(w),
            Kernel::Rayleigh => w / (1.0 + w),
        }
    }
}

/// Residual mass below which the integration range is cut.
const RANGE_TOL: f64 = 1e-15;

/// Shot noise `sum_Y K_Y / Y` over the path-loss process of `model`, with
/// i.i.d. marks, thinned to `density` (at most the model's density).
#[derive(Debug, Clone)]
pub struct ShotNoise<'a> {
    model: &'a PropagationModel,
    marks: Vec<(f64, f64)>,
    density: f64,
    kernel: Kernel,
    quad: QuadConfig,
    small_loss: f64,
}

impl<'a> ShotNoise<'a> {
    /// `marks` holds `(K, probability)` atoms.
    pub fn new(model: &'a PropagationModel, marks: Vec<(f64, f64)>, density: f64, kernel: Kernel) -> Result<Self> {
        if !(density >= 0.0 && density.is_finite()) {
            return invalid(format!("interferer density must be nonnegative, got {density}"));
        }
        let marks: Vec<(f64, f64)> = marks.into_iter().filter(|&(k, p)| k > 0.0 && p > 0.0).collect();
        let quad = QuadConfig { abs_tol: 1e-14 / density.max(1e-300), rel_tol: 1e-10, max_subdivisions: 4000 };
        // Path loss below which the process has (almost) no points; the
        // kernel is bounded by 1 there, so the neglected part is tiny.
        let small_loss = model.measure_quantile(RANGE_TOL * model.density() / density.max(1e-300))?;
        Ok(Self { model, marks, density, kernel, quad, small_loss })
    }

    /// Marks `tx_power * gain / noise` so the shot noise is in INR units.
    pub fn inr(model: &'a PropagationModel, radio: &RadioConfig, kind: LinkKind, gains: &InterfererGainDist, density: f64) -> Result<Self> {
        let scale = radio.tx_power(kind) / radio.noise_power();
        let marks = gains.atoms().iter().map(|&(g, p)| (scale * g, p)).collect();
        Self::new(model, marks, density, Kernel::Deterministic)
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    /// `E_K int_{u > lower} phi(z K / u) M'(u) du` (per unit density).
    pub fn log_functional(&self, z: Complex64, lower: f64) -> Result<Complex64> {
        if self.marks.is_empty() || self.density == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let k_max = self.marks.iter().map(|m| m.0).fold(0.0, f64::max);
        let zk = z.norm() * k_max;
        let s_lo = lower.max(self.small_loss).ln();
        // The kernel decays like |w| for large u; walk up until the
        // remaining tail, bounded by |z| K M(u) / u times a constant, is
        // negligible.
        let mut s_hi = s_lo.max(zk.ln()) + 2.0;
        let mut steps = 0;
        loop {
            let u = s_hi.exp();
            let tail = 10.0 * self.density * zk * self.model.normalized_measure(u)? / u;
            if tail < RANGE_TOL {
                break;
            }
            s_hi += 2.0;
            steps += 1;
            if steps > 400 || !s_hi.is_finite() {
                return domain("interference diverges: far-field path-loss exponent must exceed 2");
            }
        }
        let mut hints: Vec<f64> = self.model.kink_hints().iter().map(|h| h.ln()).collect();
        hints.extend(self.marks.iter().map(|m| (z.norm() * m.0).ln()));
        let model = self.model;
        let marks = &self.marks;
        let kernel = self.kernel;
        let mut failure = None;
        let res = integrate(
            |s: f64| {
                let u = s.exp();
                let dm = match model.normalized_density(u) {
                    Ok(v) => v,
                    Err(e) => {
                        failure = Some(e);
                        return Complex64::new(0.0, 0.0);
                    }
                };
                let inv_u = 1.0 / u;
                let sum: Complex64 = marks.iter().map(|&(k, p)| kernel.eval(z * (k * inv_u)) * p).sum();
                sum * (dm * u)
            },
            s_lo,
            s_hi,
            &hints,
            &self.quad,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(res.value)
    }

    /// `E[exp(-z I)]` with interferers restricted to path loss above `lower`.
    pub fn laplace(&self, z: Complex64, lower: f64) -> Result<Complex64> {
        Ok((-self.density * self.log_functional(z, lower)?).exp())
    }

    /// Transform of the CCDF of `I`: `(1 - E[exp(-z I)]) / z`.
    pub fn ccdf_transform(&self, z: Complex64, lower: f64) -> Result<Complex64> {
        Ok(one_minus_exp_neg(self.density * self.log_functional(z, lower)?) / z)
    }
}

/// Upper bound on `P(INR > y)` from the total received power of all
/// transmitters of `model` (the serving one included).
pub fn inr_bound_ccdf(
    model: &PropagationModel,
    radio: &RadioConfig,
    kind: LinkKind,
    gains: &InterfererGainDist,
    y: f64,
    cfg: &InversionConfig,
) -> Result<f64> {
    if !(y > 0.0) {
        return domain(format!("INR threshold must be positive, got {y}"));
    }
    let sn = ShotNoise::inr(model, radio, kind, gains, model.density())?;
    invert_laplace_ccdf(|z| sn.ccdf_transform(z, 0.0), y, cfg)
}

/// Closed-form Laplace transform of the INR shot noise when LOS and NLOS
/// share exponent `alpha` and shadowing, valid for `alpha > 2`.
pub fn inr_uniform_closed_form(
    alpha: f64,
    shadow: LognormalParams,
    radio: &RadioConfig,
    tx_power: f64,
    gains: &InterfererGainDist,
    density: f64,
) -> Result<impl Fn(Complex64) -> Complex64> {
    if !(alpha > 2.0) {
        return domain(format!("closed-form interference transform needs alpha > 2, got {alpha}"));
    }
    let delta = 2.0 / alpha;
    let coeff = 2.0 * std::f64::consts::PI * density / alpha
        * (tx_power / radio.noise_power()).powf(delta)
        * shadow.moment(delta)
        * gains.moment(delta)
        * gamma(-delta);
    Ok(move |z: Complex64| (coeff * z.powf(delta)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::{BlockageParams, LinkClassParams};

    fn manhattan(density: f64) -> PropagationModel {
        let link = LinkClassParams { alpha_los: 2.0, alpha_nlos: 3.3, xi_los: 5.2, xi_nlos: 7.6, beta: 70.0 };
        PropagationModel::new(link, BlockageParams::new(0.11, 200.0), density).unwrap()
    }

    #[test]
    fn closed_form_gamma_factor_alpha_four() {
        let r = RadioConfig::default();
        let s = LognormalParams::from_db(0.0, 0.0).unwrap();
        let g = InterfererGainDist::point(1.0).unwrap();
        let density = 1e-4;
        let f = inr_uniform_closed_form(4.0, s, &r, r.noise_power(), &g, density).unwrap();
        let v = f(Complex64::new(1.0, 0.0)).ln().re;
        let expected = 2.0 * std::f64::consts::PI * density / 4.0 * (-2.0 * std::f64::consts::PI.sqrt());
        assert!((v - expected).abs() <= 1e-12 * expected.abs());
        assert!(inr_uniform_closed_form(2.0, s, &r, 1.0, &g, density).is_err());
    }

    #[test]
    fn closed_form_density_bandwidth_equivalence() {
        let alpha = 3.3;
        let s = LognormalParams::from_db(70.0, 7.6).unwrap();
        let r = RadioConfig::default();
        let g = InterfererGainDist::access(&r);
        let base = inr_uniform_closed_form(alpha, s, &r, r.p_bs, &g, 1e-4).unwrap();
        for c in [2.0f64, 10.0] {
            let scaled_radio = RadioConfig { bandwidth: r.bandwidth * c.powf(alpha / 2.0), ..r };
            let f = inr_uniform_closed_form(alpha, s, &scaled_radio, r.p_bs, &g, c * 1e-4).unwrap();
            for z in [0.1, 1.0, 10.0] {
                let z = Complex64::new(z, 0.3 * z);
                let (a, b) = (base(z), f(z));
                assert!((a - b).norm() <= 1e-9 * a.norm(), "c={c}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn general_path_matches_closed_form() {
        let link = LinkClassParams { alpha_los: 3.3, alpha_nlos: 3.3, xi_los: 7.6, xi_nlos: 7.6, beta: 70.0 };
        let model = PropagationModel::new(link, BlockageParams::new(0.11, 200.0), 1e-4).unwrap();
        let r = RadioConfig::default();
        let g = InterfererGainDist::access(&r);
        let sn = ShotNoise::inr(&model, &r, LinkKind::Downlink, &g, 1e-4).unwrap();
        let (alpha, s) = link.class(true);
        let cf = inr_uniform_closed_form(alpha, s, &r, r.p_bs, &g, 1e-4).unwrap();
        for z in [0.1, 1.0, 10.0] {
            let z = Complex64::new(z, 0.0);
            let a = sn.laplace(z, 0.0).unwrap();
            let b = cf(z);
            assert!((a - b).norm() <= 1e-6 * b.norm(), "z={z}: {a} vs {b}");
        }
        let z = Complex64::new(0.5, 7.0);
        let (a, b) = (sn.laplace(z, 0.0).unwrap(), cf(z));
        assert!((a - b).norm() <= 1e-6 * b.norm().max(1e-3));
    }

    #[test]
    fn inr_bound_basics() {
        let r = RadioConfig::default();
        let g = InterfererGainDist::access(&r);
        let cfg = InversionConfig::default();
        let m = manhattan(1e-4);
        let near_zero = inr_bound_ccdf(&m, &r, LinkKind::Downlink, &g, 1e-6, &cfg).unwrap();
        assert!(near_zero > 0.999, "{near_zero}");
        let m2 = manhattan(2e-4);
        for y in [0.1, 1.0, 10.0] {
            let a = inr_bound_ccdf(&m, &r, LinkKind::Downlink, &g, y, &cfg).unwrap();
            let b = inr_bound_ccdf(&m2, &r, LinkKind::Downlink, &g, y, &cfg).unwrap();
            assert!(b >= a - 1e-9, "y={y}: {a} {b}");
        }
        assert!(inr_bound_ccdf(&m, &r, LinkKind::Downlink, &g, 0.0, &cfg).is_err());
    }
}
