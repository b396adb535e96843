//! Sampled complementary CDFs, the common output of every engine.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Slack allowed when checking that probabilities do not increase.
pub const MONOTONE_SLACK: f64 = 1e-9;

/// `P(X > threshold)` sampled on an ascending grid, with optional
/// confidence bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve {
    pub thresholds: Vec<f64>,
    pub probabilities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci_low: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci_high: Option<Vec<f64>>,
}

impl CcdfCurve {
    pub fn new(thresholds: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        let c = Self { thresholds, probabilities, ci_low: None, ci_high: None };
        c.validate()?;
        Ok(c)
    }

    pub fn with_ci(mut self, low: Vec<f64>, high: Vec<f64>) -> Result<Self> {
        self.ci_low = Some(low);
        self.ci_high = Some(high);
        self.validate()?;
        Ok(self)
    }

    /// Checks lengths, ordering and range. Monotonicity is only enforced
    /// for curves without confidence bounds (analytical curves); empirical
    /// curves are monotone by construction.
    pub fn validate(&self) -> Result<()> {
        let n = self.thresholds.len();
        if self.probabilities.len() != n {
            return invalid("threshold and probability lengths differ");
        }
        for ci in [&self.ci_low, &self.ci_high].into_iter().flatten() {
            if ci.len() != n {
                return invalid("confidence bound length differs from thresholds");
            }
        }
        if self.thresholds.windows(2).any(|w| !(w[0] < w[1])) {
            return invalid("thresholds must be strictly ascending");
        }
        if self.probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return invalid("probabilities must lie in [0, 1]");
        }
        if self.probabilities.windows(2).any(|w| w[1] > w[0] + MONOTONE_SLACK) {
            return invalid("probabilities must be nonincreasing");
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// Linear interpolation of the probability at `x`, clamped to the ends.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        let t = &self.thresholds;
        let p = &self.probabilities;
        if t.is_empty() {
            return None;
        }
        if x <= t[0] {
            return Some(p[0]);
        }
        if x >= t[t.len() - 1] {
            return Some(p[p.len() - 1]);
        }
        let i = t.partition_point(|&v| v <= x);
        let (x0, x1, p0, p1) = (t[i - 1], t[i], p[i - 1], p[i]);
        Some(p0 + (p1 - p0) * (x - x0) / (x1 - x0))
    }

    /// Threshold at which the curve first drops to `level`, by linear
    /// interpolation between samples.
    pub fn threshold_at(&self, level: f64) -> Option<f64> {
        let t = &self.thresholds;
        let p = &self.probabilities;
        (1..t.len()).find_map(|i| {
            if p[i - 1] >= level && p[i] <= level {
                if p[i - 1] == p[i] {
                    Some(t[i - 1])
                } else {
                    Some(t[i - 1] + (t[i] - t[i - 1]) * (p[i - 1] - level) / (p[i - 1] - p[i]))
                }
            } else {
                None
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(CcdfCurve::new(vec![0.0, 1.0], vec![0.9, 0.2]).is_ok());
        assert!(CcdfCurve::new(vec![0.0, 1.0], vec![0.2, 0.9]).is_err());
        assert!(CcdfCurve::new(vec![1.0, 0.0], vec![0.9, 0.2]).is_err());
        assert!(CcdfCurve::new(vec![0.0], vec![1.5]).is_err());
        assert!(CcdfCurve::new(vec![0.0, 1.0], vec![0.9]).is_err());
        let c = CcdfCurve::new(vec![0.0, 1.0], vec![0.9, 0.2]).unwrap();
        assert!(c.clone().with_ci(vec![0.8], vec![1.0]).is_err());
    }

    #[test]
    fn interpolation_and_inverse() {
        let c = CcdfCurve::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.6, 0.2]).unwrap();
        assert_eq!(c.interpolate(0.5), Some(0.8));
        assert_eq!(c.interpolate(-1.0), Some(1.0));
        assert!((c.threshold_at(0.4).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(c.threshold_at(0.1), None);
    }
}
