//! Simulation window with toroidal wrap or a guard margin.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{BoundingBox, Point};

/// Edge handling of the simulation window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeMode {
    /// Opposite edges identified; distances use the nearest image.
    Torus,
    /// Transmitters also dropped in a margin around the window; receivers
    /// only inside it.
    Guard { margin: f64 },
}

/// Rectangle `[0, width] x [0, height]` in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub width: f64,
    pub height: f64,
    pub edge: EdgeMode,
}

impl Window {
    pub fn new(width: f64, height: f64, edge: EdgeMode) -> Result<Self> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return invalid(format!("window must have positive finite sides, got {width} x {height}"));
        }
        if let EdgeMode::Guard { margin } = edge {
            if !(margin >= 0.0 && margin.is_finite()) {
                return invalid(format!("guard margin must be nonnegative, got {margin}"));
            }
        }
        Ok(Self { width, height, edge })
    }

    /// Region where receivers (users, typical BSs) are dropped.
    pub fn rx_region(&self) -> BoundingBox {
        BoundingBox { min: Point::new(0.0, 0.0), max: Point::new(self.width, self.height) }
    }

    /// Region where transmitters are dropped.
    pub fn tx_region(&self) -> BoundingBox {
        match self.edge {
            EdgeMode::Torus => self.rx_region(),
            EdgeMode::Guard { margin } => {
                BoundingBox { min: Point::new(-margin, -margin), max: Point::new(self.width + margin, self.height + margin) }
            }
        }
    }

    pub fn wraps(&self) -> bool {
        matches!(self.edge, EdgeMode::Torus)
    }

    pub fn distance(&self, a: Point, b: Point) -> f64 {
        let (mut dx, mut dy) = ((a.x - b.x).abs(), (a.y - b.y).abs());
        if self.wraps() {
            dx = dx.min(self.width - dx);
            dy = dy.min(self.height - dy);
        }
        dx.hypot(dy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_uses_nearest_image() {
        let w = Window::new(100.0, 50.0, EdgeMode::Torus).unwrap();
        assert_eq!(w.distance(Point::new(1.0, 1.0), Point::new(99.0, 49.0)), (4.0f64 + 4.0).sqrt());
        let g = Window::new(100.0, 50.0, EdgeMode::Guard { margin: 10.0 }).unwrap();
        assert!((g.distance(Point::new(1.0, 1.0), Point::new(99.0, 49.0)) - 98.0f64.hypot(48.0)).abs() < 1e-12);
        assert_eq!(g.tx_region().min, Point::new(-10.0, -10.0));
        assert!(Window::new(0.0, 1.0, EdgeMode::Torus).is_err());
        assert!(Window::new(1.0, 1.0, EdgeMode::Guard { margin: -1.0 }).is_err());
    }
}
