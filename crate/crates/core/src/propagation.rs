//! The path-loss point process seen from a typical receiver.
//!
//! Transmitters form a PPP of the given density. A link of length `r` is LOS
//! with probability `c_inside` when `r <= d_ball` and `c_beyond` otherwise;
//! its path loss is `r^alpha / S` with `S` lognormal. The resulting path-loss
//! values form a PPP on the positive half line whose intensity measure is
//! computed here in closed form.

use std::f64::consts::PI;

use crate::error::{domain, invalid, Result};
use crate::numerics::special::{scaled_q, LognormalParams};

/// Path-loss exponents, shadowing spreads (dB) and reference loss (dB) of one
/// link class (access or backhaul).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkClassParams {
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub xi_los: f64,
    pub xi_nlos: f64,
    pub beta: f64,
}

impl LinkClassParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha_los", self.alpha_los), ("alpha_nlos", self.alpha_nlos)] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be positive, got {v}"));
            }
        }
        for (name, v) in [("xi_los", self.xi_los), ("xi_nlos", self.xi_nlos)] {
            if !(v >= 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be nonnegative, got {v}"));
            }
        }
        if !self.beta.is_finite() {
            return invalid("beta must be finite");
        }
        Ok(())
    }

    /// Exponent and shadowing of the LOS (`true`) or NLOS class.
    pub fn class(&self, los: bool) -> (f64, LognormalParams) {
        let (alpha, xi) = if los { (self.alpha_los, self.xi_los) } else { (self.alpha_nlos, self.xi_nlos) };
        // Validated on construction of the model.
        (alpha, LognormalParams::from_db(self.beta, xi).expect("validated link parameters"))
    }
}

/// LOS-ball blockage: LOS probability `c_inside` up to `d_ball` meters,
/// `c_beyond` further out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockageParams {
    pub c_inside: f64,
    pub d_ball: f64,
    pub c_beyond: f64,
}

impl BlockageParams {
    pub fn new(c_inside: f64, d_ball: f64) -> Self {
        Self { c_inside, d_ball, c_beyond: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.c_beyond) || !(0.0..=1.0).contains(&self.c_inside) || self.c_beyond > self.c_inside {
            return invalid(format!(
                "LOS probabilities must satisfy 0 <= c_beyond <= c_inside <= 1 (got {}, {})",
                self.c_beyond, self.c_inside
            ));
        }
        if !(self.d_ball > 0.0 && self.d_ball.is_finite()) {
            return invalid(format!("LOS ball radius must be positive, got {}", self.d_ball));
        }
        Ok(())
    }

    /// LOS probability of a link of length `r` meters.
    pub fn los_probability(&self, r: f64) -> f64 {
        if r <= self.d_ball {
            self.c_inside
        } else {
            self.c_beyond
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ClassTerm {
    alpha: f64,
    shadow: LognormalParams,
    p_inside: f64,
    p_beyond: f64,
}

/// Transmitter PPP with its propagation parameters. Densities are per m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationModel {
    link: LinkClassParams,
    blockage: BlockageParams,
    density: f64,
    classes: [ClassTerm; 2],
}

impl PropagationModel {
    pub fn new(link: LinkClassParams, blockage: BlockageParams, density: f64) -> Result<Self> {
        link.validate()?;
        blockage.validate()?;
        if !(density > 0.0 && density.is_finite()) {
            return invalid(format!("transmitter density must be positive, got {density}"));
        }
        let (al, sl) = link.class(true);
        let (an, sn) = link.class(false);
        let classes = [
            ClassTerm { alpha: al, shadow: sl, p_inside: blockage.c_inside, p_beyond: blockage.c_beyond },
            ClassTerm { alpha: an, shadow: sn, p_inside: 1.0 - blockage.c_inside, p_beyond: 1.0 - blockage.c_beyond },
        ];
        Ok(Self { link, blockage, density, classes })
    }

    /// Same propagation with another transmitter density.
    pub fn with_density(&self, density: f64) -> Result<Self> {
        Self::new(self.link, self.blockage, density)
    }

    pub fn link(&self) -> &LinkClassParams {
        &self.link
    }

    pub fn blockage(&self) -> &BlockageParams {
        &self.blockage
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    /// `Lambda((0, t])`: mean number of transmitters with path loss below `t`.
    pub fn intensity_measure(&self, t: f64) -> Result<f64> {
        Ok(self.density * self.normalized_measure(t)?)
    }

    /// `M(t) = Lambda((0, t]) / density`, in m².
    pub fn normalized_measure(&self, t: f64) -> Result<f64> {
        check_threshold(t)?;
        let d = self.blockage.d_ball;
        let ln_t = t.ln();
        let total: f64 = self
            .classes
            .iter()
            .map(|c| {
                let delta = 2.0 / c.alpha;
                let (m, s) = (c.shadow.m(), c.shadow.sigma());
                // ln x with x = D^alpha / t
                let ln_x = c.alpha * d.ln() - ln_t;
                let ccdf = scaled_q(ln_x - m, s);
                let arg = s * s * delta - ln_x + m;
                let full = c.shadow.moment(delta);
                let lower = full * scaled_q(arg, s);
                let upper = full * scaled_q(-arg, s);
                (c.p_inside - c.p_beyond) * d * d * ccdf + (delta * ln_t).exp() * (c.p_inside * lower + c.p_beyond * upper)
            })
            .sum();
        Ok(PI * total.max(0.0))
    }

    /// `density * M'(t)`, the density of the path-loss intensity measure.
    pub fn intensity_density(&self, t: f64) -> Result<f64> {
        Ok(self.density * self.normalized_density(t)?)
    }

    /// `M'(t)`. The shadowing-CCDF terms of the derivative cancel against the
    /// boundary terms of the truncated moments, leaving only the moments.
    pub fn normalized_density(&self, t: f64) -> Result<f64> {
        check_threshold(t)?;
        let d = self.blockage.d_ball;
        let ln_t = t.ln();
        let total: f64 = self
            .classes
            .iter()
            .map(|c| {
                let delta = 2.0 / c.alpha;
                let (m, s) = (c.shadow.m(), c.shadow.sigma());
                let ln_x = c.alpha * d.ln() - ln_t;
                let arg = s * s * delta - ln_x + m;
                let full = c.shadow.moment(delta);
                let weight = c.p_inside * scaled_q(arg, s) + c.p_beyond * scaled_q(-arg, s);
                delta * ((delta - 1.0) * ln_t).exp() * full * weight
            })
            .sum();
        Ok(PI * total.max(0.0))
    }

    /// Path-loss values where `M'` changes regime (sharply when shadowing is
    /// weak): the LOS-ball edge seen through each class's median shadowing.
    pub fn kink_hints(&self) -> [f64; 2] {
        let d = self.blockage.d_ball;
        self.classes.map(|c| (c.alpha * d.ln() - c.shadow.m()).exp())
    }

    /// `P(L(X*) > t) = exp(-Lambda((0, t]))` for the smallest path loss `L(X*)`.
    pub fn path_loss_ccdf(&self, t: f64) -> Result<f64> {
        Ok((-self.intensity_measure(t)?).exp())
    }

    /// Density of the smallest path loss at `l`.
    pub fn path_loss_pdf(&self, l: f64) -> Result<f64> {
        let lam = self.intensity_measure(l)?;
        Ok(self.intensity_density(l)? * (-lam).exp())
    }

    /// Path loss `t` at which `Lambda((0, t])` reaches `target` (bisection in
    /// `ln t`). Useful for choosing integration ranges.
    pub fn measure_quantile(&self, target: f64) -> Result<f64> {
        if !(target > 0.0 && target.is_finite()) {
            return invalid(format!("measure target must be positive, got {target}"));
        }
        let (mut lo, mut hi) = (-50.0f64, 50.0f64);
        while self.intensity_measure(lo.exp())? > target {
            lo -= 50.0;
            if lo < -700.0 {
                return domain("intensity measure does not vanish at small path loss");
            }
        }
        while self.intensity_measure(hi.exp())? < target {
            hi += 50.0;
            if hi > 700.0 {
                return domain("intensity measure stays bounded");
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.intensity_measure(mid.exp())? < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        Ok((0.5 * (lo + hi)).exp())
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t > 0.0 && !t.is_nan() {
        Ok(())
    } else {
        domain(format!("path-loss threshold must be positive, got {t}"))
    }
}
