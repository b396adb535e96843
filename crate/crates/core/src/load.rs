//! Cell-load distributions based on the gamma fit of Poisson-Voronoi cell
//! areas.

use crate::error::{domain, invalid, Result};
use crate::numerics::special::ln_gamma;

/// Shape of the gamma law fitted to normalised Poisson-Voronoi cell areas.
pub const PV_SHAPE: f64 = 3.5;

/// Mean-load slope used by the closed-form mean-load rate expressions. The
/// PMF [`tagged_pmf`] itself has mean `1 + (PV_SHAPE + 1)/PV_SHAPE * c/d`.
pub const TAGGED_MEAN_COEFF: f64 = 1.28;

fn check_densities(c: f64, d: f64) -> Result<()> {
    if !(c >= 0.0 && c.is_finite()) || !(d > 0.0 && d.is_finite()) {
        return domain(format!("load densities must satisfy c >= 0, d > 0 (got c={c}, d={d})"));
    }
    Ok(())
}

/// `K(c, d, n)`: probability that a typical cell of a PPP of density `d`
/// holds `n` points of an independent PPP of density `c`.
///
/// `c = 0` is the point mass at zero.
pub fn typical_pmf(c: f64, d: f64, n: u64) -> Result<f64> {
    check_densities(c, d)?;
    let r = c / d;
    if r == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let nf = n as f64;
    let ln = PV_SHAPE * PV_SHAPE.ln() + ln_gamma(nf + PV_SHAPE) - ln_gamma(nf + 1.0) - ln_gamma(PV_SHAPE) + nf * r.ln()
        - (nf + PV_SHAPE) * (PV_SHAPE + r).ln();
    Ok(ln.exp())
}

/// `K_t(c, d, n)`: load of the cell containing a typical point of the
/// density-`c` process, that point included. Zero for `n = 0`.
pub fn tagged_pmf(c: f64, d: f64, n: u64) -> Result<f64> {
    check_densities(c, d)?;
    if n == 0 {
        return Ok(0.0);
    }
    let r = c / d;
    if r == 0.0 {
        return Ok(if n == 1 { 1.0 } else { 0.0 });
    }
    let nf = n as f64;
    let ln = PV_SHAPE * PV_SHAPE.ln() + ln_gamma(nf + PV_SHAPE) - ln_gamma(nf) - ln_gamma(PV_SHAPE) + (nf - 1.0) * r.ln()
        - (nf + PV_SHAPE) * (PV_SHAPE + r).ln();
    Ok(ln.exp())
}

/// Closed-form mean of [`typical_pmf`].
pub fn typical_mean(c: f64, d: f64) -> f64 {
    c / d
}

/// Closed-form mean of [`tagged_pmf`].
pub fn tagged_mean(c: f64, d: f64) -> f64 {
    1.0 + (PV_SHAPE + 1.0) / PV_SHAPE * c / d
}

/// A PMF on consecutive integers, truncated once the residual mass is
/// below a tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    offset: u64,
    probs: Vec<f64>,
}

impl Pmf {
    /// Tabulates `pmf(n)` from `start` until the remaining mass drops below
    /// `eps`.
    pub fn tabulate<F: FnMut(u64) -> Result<f64>>(mut pmf: F, start: u64, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return invalid(format!("truncation eps must lie in (0, 1), got {eps}"));
        }
        const MAX_SUPPORT: usize = 10_000_000;
        let mut probs = Vec::new();
        let mut mass = 0.0;
        while 1.0 - mass >= eps {
            if probs.len() >= MAX_SUPPORT {
                return domain("PMF tail does not fall below the truncation tolerance");
            }
            let p = pmf(start + probs.len() as u64)?;
            mass += p;
            probs.push(p);
        }
        Ok(Self { offset: start, probs })
    }

    pub fn point_mass(n: u64) -> Self {
        Self { offset: n, probs: vec![1.0] }
    }

    /// Smallest value in the stored support.
    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, n: u64) -> f64 {
        n.checked_sub(self.offset).and_then(|i| self.probs.get(i as usize)).copied().unwrap_or(0.0)
    }

    /// `(n, P(N = n))` over the stored support.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.offset + i as u64, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(n, p)| n as f64 * p).sum()
    }
}

/// Densities that determine the loads. All densities per m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadModel {
    user_density: f64,
    bs_density: f64,
    abs_fraction: f64,
}

impl LoadModel {
    pub fn new(user_density: f64, bs_density: f64, abs_fraction: f64) -> Result<Self> {
        if !(user_density > 0.0 && user_density.is_finite()) || !(bs_density > 0.0 && bs_density.is_finite()) {
            return invalid(format!("user and BS densities must be positive (got {user_density}, {bs_density})"));
        }
        if !(abs_fraction > 0.0 && abs_fraction <= 1.0) {
            return invalid(format!("A-BS fraction must lie in (0, 1], got {abs_fraction}"));
        }
        Ok(Self { user_density, bs_density, abs_fraction })
    }

    pub fn user_density(&self) -> f64 {
        self.user_density
    }

    pub fn bs_density(&self) -> f64 {
        self.bs_density
    }

    pub fn abs_fraction(&self) -> f64 {
        self.abs_fraction
    }

    /// Mean number of users per BS.
    pub fn kappa(&self) -> f64 {
        self.user_density / self.bs_density
    }

    /// Probability that a BS has no user to serve.
    pub fn idle_probability(&self) -> f64 {
        typical_pmf(self.user_density, self.bs_density, 0).expect("validated densities")
    }
}

/// Whether the typical user is served by an A-BS or by a backhauled BS.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Association {
    Abs,
    Bs,
}

/// Load distributions seen by the typical user.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadPmfs {
    /// Users on the tagged BS, the typical user included.
    pub users_tagged: Pmf,
    /// Users on another BS backhauled by the same A-BS (equal to
    /// `users_tagged` when the user is on an A-BS itself).
    pub users_other: Pmf,
    /// BSs backhauled by the tagged A-BS.
    pub bs_per_abs: Pmf,
}

/// Loads for the given association branch, truncated at residual mass `eps`.
pub fn load_pmfs(model: &LoadModel, association: Association, eps: f64) -> Result<LoadPmfs> {
    let (lu, l, w) = (model.user_density, model.bs_density, model.abs_fraction);
    let users_tagged = Pmf::tabulate(|n| tagged_pmf(lu, l, n), 1, eps)?;
    let c = l * (1.0 - w);
    let d = l * w;
    Ok(match association {
        Association::Abs => {
            LoadPmfs { users_other: users_tagged.clone(), users_tagged, bs_per_abs: Pmf::tabulate(|n| typical_pmf(c, d, n), 0, eps)? }
        }
        Association::Bs => LoadPmfs {
            users_tagged,
            users_other: Pmf::tabulate(|n| typical_pmf(lu, l, n), 0, eps)?,
            bs_per_abs: Pmf::tabulate(|n| tagged_pmf(c, d, n), 1, eps)?,
        },
    })
}
