//! Noise-limited coverage in closed form.

use crate::coverage::radio::{FpcParams, LinkKind, RadioConfig};
use crate::error::{domain, Result};
use crate::propagation::PropagationModel;

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && !tau.is_nan() {
        Ok(())
    } else {
        domain(format!("SNR threshold must be positive, got {tau}"))
    }
}

/// `P(min path loss < t) = 1 - exp(-Lambda((0, t]))`, with the limits at
/// `t = 0` and `t = inf` handled explicitly.
pub fn coverage_below_path_loss(model: &PropagationModel, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    if t.is_infinite() {
        return Ok(1.0);
    }
    Ok((-(-model.intensity_measure(t)?).exp_m1()).clamp(0.0, 1.0))
}

/// `P(SNR > tau)` for the typical link of the given kind.
///
/// `model` must carry the transmitter density of that link: BSs for the
/// access links, A-BSs (density `lambda * omega`) with backhaul propagation
/// parameters for the backhaul link.
pub fn snr_coverage(model: &PropagationModel, radio: &RadioConfig, kind: LinkKind, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let t = radio.tx_power(kind) * radio.desired_gain(kind) / (tau * radio.noise_power());
    coverage_below_path_loss(model, t)
}

/// Uplink `P(SNR > tau)` when the user transmits `p0 * L^epsilon`.
///
/// `epsilon = 1` is the full-inversion limit: every user receives
/// `p0 * G_max` and coverage is a step in `tau`.
pub fn uplink_fpc_coverage(model: &PropagationModel, radio: &RadioConfig, fpc: &FpcParams, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let ratio = fpc.p0 * radio.g_max / (tau * radio.noise_power());
    if fpc.epsilon >= 1.0 {
        return Ok(if ratio > 1.0 { 1.0 } else { 0.0 });
    }
    let t = ratio.powf(1.0 / (1.0 - fpc.epsilon));
    coverage_below_path_loss(model, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::{BlockageParams, LinkClassParams};
    use crate::units::db_to_linear;

    fn model() -> PropagationModel {
        let link = LinkClassParams { alpha_los: 2.0, alpha_nlos: 3.3, xi_los: 5.2, xi_nlos: 7.6, beta: 70.0 };
        PropagationModel::new(link, BlockageParams::new(0.11, 200.0), 1e-4).unwrap()
    }

    #[test]
    fn small_threshold_is_full_coverage() {
        let r = RadioConfig::default();
        assert!(snr_coverage(&model(), &r, LinkKind::Downlink, 1e-12).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn nonincreasing_in_threshold() {
        let r = RadioConfig::default();
        let mut last = 1.0;
        for i in 0..50 {
            let tau = db_to_linear(-20.0 + i as f64);
            let s = snr_coverage(&model(), &r, LinkKind::Downlink, tau).unwrap();
            assert!(s < last, "tau={tau}");
            last = s;
        }
    }

    #[test]
    fn fpc_without_control_is_plain_uplink() {
        let r = RadioConfig::default();
        let fpc = FpcParams::new(r.p_ue, 0.0).unwrap();
        for tau_db in [-10.0, 0.0, 10.0, 20.0] {
            let tau = db_to_linear(tau_db);
            let a = uplink_fpc_coverage(&model(), &r, &fpc, tau).unwrap();
            let b = snr_coverage(&model(), &r, LinkKind::Uplink, tau).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn fpc_near_full_inversion_is_a_step() {
        let r = RadioConfig::default();
        let p0 = r.p_ue;
        let edge = p0 * r.g_max / r.noise_power();
        let fpc = FpcParams::new(p0, 0.999).unwrap();
        assert!(uplink_fpc_coverage(&model(), &r, &fpc, edge * 0.5).unwrap() > 1.0 - 1e-9);
        assert!(uplink_fpc_coverage(&model(), &r, &fpc, edge * 2.0).unwrap() < 1e-9);
        let full = FpcParams::new(p0, 1.0).unwrap();
        assert_eq!(uplink_fpc_coverage(&model(), &r, &full, edge * 0.5).unwrap(), 1.0);
    }

    #[test]
    fn rejects_nonpositive_threshold() {
        let r = RadioConfig::default();
        assert!(snr_coverage(&model(), &r, LinkKind::Uplink, 0.0).is_err());
        assert!(snr_coverage(&model(), &r, LinkKind::Uplink, -1.0).is_err());
    }
}
