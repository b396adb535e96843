//! Gaussian special functions and lognormal moments.

use std::f64::consts::{LN_10, SQRT_2};

use num_complex::Complex64;

use crate::error::{domain, invalid, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard Gaussian CCDF, `P(Z > x)`.
///
/// Evaluated through `erfc` so that the upper tail keeps full relative
/// precision; saturates to exactly 0 or 1 far in the tails.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Standard Gaussian density.
pub fn gaussian_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `Q(num / sigma)` including the point-mass limit `sigma = 0`.
pub(crate) fn scaled_q(num: f64, sigma: f64) -> f64 {
    if sigma > 0.0 {
        q_function(num / sigma)
    } else if num > 0.0 {
        0.0
    } else if num < 0.0 {
        1.0
    } else {
        0.5
    }
}

/// `Gamma(x)` for real `x` (negative non-integers included).
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `ln |Gamma(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `1 - exp(-w)` for complex `w`, accurate when `|w|` is small.
pub fn one_minus_exp_neg(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        // Taylor series to fourth order: the truncation error is below 1e-20.
        w * (1.0 - w * (0.5 - w * (1.0 / 6.0 - w / 24.0)))
    } else {
        1.0 - (-w).exp()
    }
}

/// Which tail of the distribution a truncated moment integrates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `int_0^x s^n f(s) ds`
    Lower,
    /// `int_x^inf s^n f(s) ds`
    Upper,
}

/// Parameters of a lognormal variable `S = exp(N(m, sigma^2))`.
///
/// `sigma = 0` is accepted and denotes the point mass at `exp(m)`; every
/// routine in this crate treats it as the corresponding limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalParams {
    m: f64,
    sigma: f64,
}

impl LognormalParams {
    pub fn new(m: f64, sigma: f64) -> Result<Self> {
        if !m.is_finite() || !sigma.is_finite() || sigma < 0.0 {
            return invalid(format!("lognormal parameters must be finite with sigma >= 0 (m={m}, sigma={sigma})"));
        }
        Ok(Self { m, sigma })
    }

    /// Builds the shadowed gain `S = 10^{-(chi + beta)/10}` with
    /// `chi ~ N(0, xi^2)` in dB.
    pub fn from_db(beta_db: f64, xi_db: f64) -> Result<Self> {
        Self::new(-0.1 * beta_db * LN_10, 0.1 * xi_db * LN_10)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Reference loss `beta` in dB.
    pub fn beta_db(&self) -> f64 {
        -10.0 * self.m / LN_10
    }

    /// Shadowing standard deviation `xi` in dB.
    pub fn xi_db(&self) -> f64 {
        10.0 * self.sigma / LN_10
    }

    /// Untruncated moment `E[S^n]`.
    pub fn moment(&self, n: f64) -> f64 {
        (0.5 * self.sigma * self.sigma * n * n + self.m * n).exp()
    }

    /// CCDF `P(S > x)`.
    pub fn ccdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        scaled_q(x.ln() - self.m, self.sigma)
    }

    /// Density of `S` at `x` (zero for the degenerate case).
    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 || self.sigma == 0.0 {
            return 0.0;
        }
        gaussian_pdf((x.ln() - self.m) / self.sigma) / (self.sigma * x)
    }
}

/// Truncated `n`-th moment of a lognormal variable.
///
/// The lower side is `exp(sigma^2 n^2/2 + m n) Q((sigma^2 n - ln x + m)/sigma)`;
/// the upper side uses the reflected argument, so the two always add up to
/// the full moment.
pub fn truncated_lognormal_moment(p: &LognormalParams, n: f64, x: f64, side: Side) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("truncation point must be positive, got {x}"));
    }
    let arg = p.sigma * p.sigma * n - x.ln() + p.m;
    let tail = match side {
        Side::Lower => scaled_q(arg, p.sigma),
        Side::Upper => scaled_q(-arg, p.sigma),
    };
    Ok(p.moment(n) * tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_function_reference_points() {
        assert_eq!(q_function(0.0), 0.5);
        assert!(q_function(40.0) < 1e-300);
        assert!(q_function(40.0) >= 0.0);
        assert_eq!(q_function(-40.0), 1.0);
        // Reference from a 20-digit evaluation.
        assert!((q_function(1.2816) - 0.099_991_500_098).abs() < 1e-12);
    }

    #[test]
    fn q_function_symmetry() {
        for i in -400..=400 {
            let x = i as f64 * 0.05;
            assert!((q_function(x) + q_function(-x) - 1.0).abs() <= 1e-15, "x={x}");
        }
    }

    #[test]
    fn db_round_trip() {
        let p = LognormalParams::from_db(70.0, 7.6).unwrap();
        assert!((p.beta_db() - 70.0).abs() < 1e-12);
        assert!((p.xi_db() - 7.6).abs() < 1e-14);
    }

    #[test]
    fn truncated_moment_examples() {
        let p = LognormalParams::new(0.0, 1.0).unwrap();
        let full = truncated_lognormal_moment(&p, 1.0, 1e12, Side::Lower).unwrap();
        assert!((full - 0.5f64.exp()).abs() < 1e-9);
        let empty = truncated_lognormal_moment(&p, 1.0, 1e-12, Side::Lower).unwrap();
        assert!(empty.abs() < 1e-9);
        // 20-digit quadrature of s f_S(s) over (0, 1).
        let mid = truncated_lognormal_moment(&p, 1.0, 1.0, Side::Lower).unwrap();
        assert!((mid - 0.261_578_291_865).abs() < 1e-11, "{mid}");
    }

    #[test]
    fn truncated_moment_rejects_nonpositive_x() {
        let p = LognormalParams::new(0.0, 1.0).unwrap();
        assert!(truncated_lognormal_moment(&p, 1.0, 0.0, Side::Lower).is_err());
        assert!(truncated_lognormal_moment(&p, 1.0, -2.0, Side::Upper).is_err());
    }

    #[test]
    fn degenerate_lognormal_is_a_point_mass() {
        let p = LognormalParams::new(0.5, 0.0).unwrap();
        let at = 0.5f64.exp();
        assert_eq!(truncated_lognormal_moment(&p, 2.0, at * 1.01, Side::Lower).unwrap(), p.moment(2.0));
        assert_eq!(truncated_lognormal_moment(&p, 2.0, at * 0.99, Side::Lower).unwrap(), 0.0);
        assert!(LognormalParams::new(0.0, -1.0).is_err());
    }

    #[test]
    fn one_minus_exp_neg_small_and_large() {
        let w = Complex64::new(1e-9, 2e-9);
        let got = one_minus_exp_neg(w);
        assert!((got - w).norm() <= 1e-17);
        let w = Complex64::new(0.7, -3.0);
        assert!((one_minus_exp_neg(w) - (1.0 - (-w).exp())).norm() < 1e-15);
        let w = Complex64::new(9e-5, 0.0);
        assert!((one_minus_exp_neg(w).re - (-(-9e-5f64).exp_m1())).abs() < 1e-19);
    }

    #[test]
    fn gamma_reflection_value() {
        let expected = -2.0 * std::f64::consts::PI.sqrt();
        assert!((gamma(-0.5) - expected).abs() <= 1e-12 * expected.abs());
    }
}
