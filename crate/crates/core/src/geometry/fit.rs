//! LOS-area fraction around outdoor points, the estimator of the blockage
//! ball parameter `C`.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::buildings::{BuildingSet, Point};
use super::los::blocking_distance;
use crate::error::{invalid, Error, Result};

/// Polar sampling layout of one disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarSampling {
    pub rays: usize,
    pub strata: usize,
}

impl Default for PolarSampling {
    fn default() -> Self {
        Self { rays: 256, strata: 16 }
    }
}

/// Estimated LOS fraction for one ball radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockageFit {
    pub d_ball: f64,
    pub c_estimate: f64,
    /// Standard error across sample points.
    pub std_error: f64,
}

/// LOS fractions of disks of each radius in `d_balls` around `origin`,
/// sampled uniformly in area with jittered angular and radial strata.
pub fn los_area_fraction<R: Rng>(origin: Point, d_balls: &[f64], sampling: PolarSampling, set: &BuildingSet, rng: &mut R) -> Vec<f64> {
    let d_max = d_balls.iter().cloned().fold(0.0, f64::max);
    if set.contains(origin) {
        return vec![0.0; d_balls.len()];
    }
    let mut hits = vec![0usize; d_balls.len()];
    for k in 0..sampling.rays {
        let theta = std::f64::consts::TAU * (k as f64 + rng.gen::<f64>()) / sampling.rays as f64;
        let dir = (theta.cos(), theta.sin());
        let block = blocking_distance(origin, dir, d_max, set);
        for s in 0..sampling.strata {
            let u = ((s as f64 + rng.gen::<f64>()) / sampling.strata as f64).sqrt();
            for (h, &d) in hits.iter_mut().zip(d_balls) {
                *h += usize::from(u * d < block);
            }
        }
    }
    let n = (sampling.rays * sampling.strata) as f64;
    hits.into_iter().map(|h| h as f64 / n).collect()
}

/// Average LOS-area fraction over `samples` outdoor points dropped
/// uniformly in the footprint bounding box, for every radius in `d_balls`
/// (shared points and directions across radii).
pub fn fit_blockage(set: &BuildingSet, d_balls: &[f64], samples: usize, seed: u64, sampling: PolarSampling) -> Result<Vec<BlockageFit>> {
    if d_balls.is_empty() || d_balls.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
        return invalid("ball radii must be positive and finite");
    }
    if samples == 0 || sampling.rays == 0 || sampling.strata == 0 {
        return invalid("sample, ray and stratum counts must be at least 1");
    }
    let Some(bbox) = set.bbox().copied() else {
        return Ok(d_balls.iter().map(|&d| BlockageFit { d_ball: d, c_estimate: 1.0, std_error: 0.0 }).collect());
    };
    let per_point: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let origin = (0..10_000)
                .map(|_| Point::new(rng.gen_range(bbox.min.x..=bbox.max.x), rng.gen_range(bbox.min.y..=bbox.max.y)))
                .find(|p| !set.contains(*p))
                .ok_or_else(|| Error::Geometry("no outdoor area inside the footprint bounding box".into()))?;
            Ok(los_area_fraction(origin, d_balls, sampling, set, &mut rng))
        })
        .collect::<Result<_>>()?;
    let n = samples as f64;
    Ok(d_balls
        .iter()
        .enumerate()
        .map(|(j, &d)| {
            let mean = per_point.iter().map(|v| v[j]).sum::<f64>() / n;
            let var = if samples > 1 { per_point.iter().map(|v| (v[j] - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
            BlockageFit { d_ball: d, c_estimate: mean, std_error: (var / n).sqrt() }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::buildings::Polygon;
    use crate::numerics::quadrature::integrate_real;

    #[test]
    fn empty_set_is_all_los() {
        let f = fit_blockage(&BuildingSet::empty(), &[100.0, 200.0], 5, 1, PolarSampling::default()).unwrap();
        assert!(f.iter().all(|b| b.c_estimate == 1.0));
    }

    #[test]
    fn circular_shadow_matches_geometry() {
        // Disk obstacle of radius a at distance s from the origin; along
        // angle t within asin(a/s) the view is blocked beyond
        // r1(t) = s cos t - sqrt(a^2 - s^2 sin^2 t).
        let (a, s, d) = (20.0, 60.0, 150.0);
        let set = BuildingSet::new(vec![Polygon::regular(Point::new(s, 0.0), a, 2000).unwrap()]);
        let phi = (a / s).asin();
        let blocked = integrate_real(
            |t: f64| {
                let r1 = s * t.cos() - (a * a - s * s * t.sin().powi(2)).max(0.0).sqrt();
                0.5 * (d * d - r1 * r1).max(0.0)
            },
            -phi,
            phi,
            &[0.0],
        )
        .unwrap();
        let exact = 1.0 - blocked / (std::f64::consts::PI * d * d);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        let sampling = PolarSampling { rays: 4096, strata: 16 };
        let reps: Vec<f64> = (0..20).map(|_| los_area_fraction(Point::new(0.0, 0.0), &[d], sampling, &set, &mut rng)[0]).collect();
        let mean = reps.iter().sum::<f64>() / 20.0;
        let se = (reps.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 19.0 / 20.0).sqrt();
        assert!((mean - exact).abs() <= 2.0 * se.max(1e-5), "{mean} vs {exact} (se {se})");
    }

    #[test]
    fn nested_radii_and_bounds() {
        let polys = (0..8)
            .flat_map(|i| (0..8).map(move |j| (i, j)))
            .map(|(i, j)| {
                Polygon::rectangle(Point::new(80.0 * i as f64, 80.0 * j as f64), Point::new(80.0 * i as f64 + 50.0, 80.0 * j as f64 + 50.0))
                    .unwrap()
            })
            .collect();
        let set = BuildingSet::new(polys);
        let fits = fit_blockage(&set, &[25.0, 50.0, 100.0, 200.0], 64, 9, PolarSampling { rays: 64, strata: 8 }).unwrap();
        assert!(fits.windows(2).all(|w| w[1].c_estimate <= w[0].c_estimate));
        assert!(fits.iter().all(|f| (0.0..=1.0).contains(&f.c_estimate)));
        assert!(fit_blockage(&set, &[], 4, 1, PolarSampling::default()).is_err());
        assert!(fit_blockage(&set, &[10.0], 0, 1, PolarSampling::default()).is_err());
    }

    #[test]
    fn fully_built_box_is_degenerate() {
        let set = BuildingSet::new(vec![Polygon::rectangle(Point::new(0.0, 0.0), Point::new(10.0, 10.0)).unwrap()]);
        assert!(matches!(fit_blockage(&set, &[5.0], 3, 1, PolarSampling::default()), Err(Error::Geometry(_))));
    }
}
