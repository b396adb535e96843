//! Counter-based random streams keyed by (seed, trial, purpose, ids).
//!
//! Every draw is a pure function of its key, so enabling one feature (say
//! fading) never shifts the draws of another (say point locations), and a
//! link's marks are identical wherever they are evaluated.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

/// SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// What a draw is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    BsPoints = 1,
    AbsMarks,
    UserPoints,
    UhfPoints,
    Typical,
    AccessLos,
    AccessShadow,
    BackhaulLos,
    BackhaulShadow,
    UhfShadow,
    GainDownlink,
    GainUplink,
    GainBackhaul,
    FadingDownlink,
    FadingUplink,
    FadingBackhaul,
    FadingUhf,
    UplinkPick,
}

/// Random streams of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialStreams {
    key: u64,
}

impl TrialStreams {
    pub fn new(seed: u64, trial: u64) -> Self {
        Self { key: splitmix64(seed ^ splitmix64(trial.wrapping_mul(GOLDEN))) }
    }

    /// Sequential generator for bulk draws such as point locations.
    pub fn rng(&self, purpose: Purpose) -> Xoshiro256PlusPlus {
        Xoshiro256PlusPlus::seed_from_u64(splitmix64(self.key ^ (purpose as u64).wrapping_mul(GOLDEN)))
    }

    pub fn bits(&self, purpose: Purpose, a: u64, b: u64) -> u64 {
        let h = splitmix64(self.key ^ (purpose as u64).wrapping_mul(GOLDEN));
        let h = splitmix64(h ^ a);
        splitmix64(h ^ b.rotate_left(32))
    }

    /// Uniform in the open interval `(0, 1)`.
    pub fn uniform(&self, purpose: Purpose, a: u64, b: u64) -> f64 {
        to_open_unit(self.bits(purpose, a, b))
    }

    /// Standard normal truncated to `[-NORMAL_BOUND, NORMAL_BOUND]`.
    pub fn normal(&self, purpose: Purpose, a: u64, b: u64) -> f64 {
        let h = self.bits(purpose, a, b);
        let u1 = to_open_unit(h);
        let u2 = to_open_unit(splitmix64(h));
        let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        z.clamp(-NORMAL_BOUND, NORMAL_BOUND)
    }

    /// Unit-mean exponential.
    pub fn exponential(&self, purpose: Purpose, a: u64, b: u64) -> f64 {
        -self.uniform(purpose, a, b).ln()
    }
}

/// Shadowing draws are clipped at this many standard deviations, which
/// makes the path-loss lower bound used by association searches exact.
pub const NORMAL_BOUND: f64 = 5.0;

fn to_open_unit(bits: u64) -> f64 {
    ((bits >> 11) as f64 + 0.5) * TWO_POW_M53
}
