//! Numerical inversion of Laplace transforms of CCDFs.
//!
//! The Bromwich integral along `Re(s) = a/(2y)` is discretised with the
//! trapezoidal rule at step `pi/y`, which turns it into an alternating series
//! of half-period contributions. The series is accelerated with binomial
//! (Euler) averaging of consecutive partial sums.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Order of the binomial average applied to the partial sums.
const EULER_ORDER: usize = 11;

/// Accelerants are compared with tolerance `rel_tol * (|value| + ABS_FLOOR)`,
/// so values far below the floor only need absolute accuracy.
const ABS_FLOOR: f64 = 1e-2;

/// Abscissa at which the initial-value limit `s L(s)` is read off for `y = 0`.
const INITIAL_VALUE_ABSCISSA: [f64; 2] = [1e10, 1e12];

/// Parameters of the Euler-accelerated Fourier-series inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionConfig {
    /// Dimensionless contour shift; the abscissa is `a / (2y)` and the
    /// discretisation error is about `exp(-a)`.
    pub a: f64,
    /// Maximum number of series terms before giving up.
    pub terms: usize,
    /// Number of terms summed directly before Euler averaging starts.
    pub truncation: usize,
    /// Agreement required between successive accelerated estimates,
    /// relative to `max(|value|, 0.01)`.
    pub rel_tol: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self { a: 18.4, terms: 50, truncation: 15, rel_tol: 1e-8 }
    }
}

impl InversionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return invalid(format!("inversion abscissa must be positive, got {}", self.a));
        }
        if self.terms < 10 {
            return invalid(format!("inversion needs at least 10 terms, got {}", self.terms));
        }
        if self.truncation + EULER_ORDER + 1 > self.terms {
            return invalid(format!("inversion truncation {} leaves no room for averaging within {} terms", self.truncation, self.terms));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return invalid(format!("inversion rel_tol must lie in (0, 1), got {}", self.rel_tol));
        }
        Ok(())
    }
}

fn binomial_weights(m: usize) -> Vec<f64> {
    let scale = 0.5f64.powi(m as i32);
    let mut w = Vec::with_capacity(m + 1);
    let mut c = 1.0;
    for k in 0..=m {
        w.push(c * scale);
        c = c * (m - k) as f64 / (k + 1) as f64;
    }
    w
}

/// Inverts a Laplace transform `fhat` at `t > 0` without clamping.
pub fn invert_laplace<F>(mut fhat: F, t: f64, cfg: &InversionConfig) -> Result<f64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    cfg.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return invalid(format!("inversion point must be positive and finite, got {t}"));
    }
    let scale = (0.5 * cfg.a).exp() / t;
    let re = |fhat: &mut F, k: usize| -> Result<f64> {
        let s = Complex64::new(cfg.a, 2.0 * std::f64::consts::PI * k as f64) / (2.0 * t);
        let v = fhat(s)?;
        if !(v.re.is_finite()) {
            return Err(Error::Domain(format!("transform is not finite at s = {s}")));
        }
        Ok(v.re)
    };

    let mut partial = Vec::with_capacity(cfg.terms + 1);
    let mut sum = 0.5 * re(&mut fhat, 0)?;
    partial.push(sum);
    for k in 1..=cfg.truncation + EULER_ORDER {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * re(&mut fhat, k)?;
        partial.push(sum);
    }
    let weights = binomial_weights(EULER_ORDER);
    let accelerate = |partial: &[f64], n: usize| -> f64 { weights.iter().enumerate().map(|(k, w)| w * partial[n + k]).sum::<f64>() };

    let mut n = cfg.truncation;
    let mut prev = accelerate(&partial, n);
    while n + EULER_ORDER < cfg.terms {
        let k = n + EULER_ORDER + 1;
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        sum += sign * re(&mut fhat, k)?;
        partial.push(sum);
        n += 1;
        let next = accelerate(&partial, n);
        if (next - prev).abs() * scale <= cfg.rel_tol * ((next * scale).abs() + ABS_FLOOR) {
            return Ok(next * scale);
        }
        prev = next;
    }
    Err(Error::Convergence(format!("Euler-accelerated inversion at t = {t} did not settle within {} terms", cfg.terms)))
}

/// Recovers `P(X > y)` from the transform `L(z) = int_0^inf e^{-zy} P(X > y) dy`
/// of a nonnegative variable `X`.
///
/// `y = 0` is answered by the initial-value limit `s L(s)` at large real `s`.
/// The result is clamped to `[0, 1]`.
pub fn invert_laplace_ccdf<F>(mut transform: F, y: f64, cfg: &InversionConfig) -> Result<f64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    if !(y >= 0.0) || !y.is_finite() {
        return invalid(format!("CCDF argument must be a finite nonnegative number, got {y}"));
    }
    let raw = if y == 0.0 {
        cfg.validate()?;
        let mut best = 0.0;
        for s in INITIAL_VALUE_ABSCISSA {
            best = s * transform(Complex64::new(s, 0.0))?.re;
        }
        best
    } else {
        invert_laplace(transform, y, cfg)?
    };
    Ok(raw.clamp(0.0, 1.0))
}
