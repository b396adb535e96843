//! Threshold grids.

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// Evenly spaced values.
    Linear,
    /// Geometrically spaced values.
    Log,
    /// Evenly spaced dB values, converted to linear for evaluation.
    Db,
}

/// Either explicit values or `points` values from `min` to `max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub min: f64,
    #[serde(default)]
    pub max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    pub scale: Scale,
}

fn default_points() -> usize {
    21
}

impl GridSpec {
    pub fn range(min: f64, max: f64, points: usize, scale: Scale) -> Self {
        Self { values: None, min, max, points, scale }
    }

    /// Grid values as written in the output's threshold column.
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let v = match &self.values {
            Some(v) => v.clone(),
            None => {
                if self.points == 0 {
                    return Err(CliError::Config("grid needs at least one point".into()));
                }
                if self.scale == Scale::Log && !(self.min > 0.0) {
                    return Err(CliError::Config("log-spaced grids need a positive minimum".into()));
                }
                let n = self.points;
                (0..n)
                    .map(|i| {
                        if i == 0 {
                            return self.min;
                        }
                        if i == n - 1 {
                            return self.max;
                        }
                        let f = i as f64 / (n - 1) as f64;
                        match self.scale {
                            Scale::Log => (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp(),
                            _ => self.min + f * (self.max - self.min),
                        }
                    })
                    .collect()
            }
        };
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(CliError::Config("grid must be nonempty, finite and strictly ascending".into()));
        }
        Ok(v)
    }

    /// Value used in computation for a grid entry.
    pub fn to_linear(&self, x: f64) -> f64 {
        match self.scale {
            Scale::Db => 10f64.powf(x / 10.0),
            _ => x,
        }
    }
}
