//! Decibel and density conversions used at configuration boundaries.

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// dBm to milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

pub fn per_km2_to_per_m2(d: f64) -> f64 {
    d * 1e-6
}

pub fn per_m2_to_per_km2(d: f64) -> f64 {
    d * 1e6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for v in [-174.0, -2.0, 0.0, 18.0, 46.0] {
            assert!((linear_to_db(db_to_linear(v)) - v).abs() < 1e-12);
        }
        assert!((per_km2_to_per_m2(100.0) - 1e-4).abs() < 1e-18);
        assert!((per_m2_to_per_km2(1e-4) - 100.0).abs() < 1e-12);
        assert!((dbm_to_mw(30.0) - 1000.0).abs() < 1e-9);
    }
}
