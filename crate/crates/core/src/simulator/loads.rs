//! Empirical user-load distributions of simulated cells.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::deployment::{generate_snapshot, DeploymentSnapshot};
use super::rng::{Purpose, TrialStreams};
use crate::config::NetworkConfig;
use crate::error::Result;
use crate::geometry::BuildingSet;

/// Histograms of users per cell: `counts[n]` trials saw load `n`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadHistogram {
    pub counts: Vec<u64>,
}

impl LoadHistogram {
    fn add(&mut self, n: usize) {
        if self.counts.len() <= n {
            self.counts.resize(n + 1, 0);
        }
        self.counts[n] += 1;
    }

    fn merge(mut self, other: Self) -> Self {
        for (n, &c) in other.counts.iter().enumerate() {
            for _ in 0..c {
                self.add(n);
            }
        }
        self
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Relative frequency of load `n`.
    pub fn frequency(&self, n: u64) -> f64 {
        let t = self.total();
        if t == 0 {
            return 0.0;
        }
        self.counts.get(n as usize).map_or(0.0, |&c| c as f64 / t as f64)
    }

    pub fn mean(&self) -> f64 {
        let t = self.total() as f64;
        self.counts.iter().enumerate().map(|(n, &c)| n as f64 * c as f64).sum::<f64>() / t
    }

    /// Total variation distance to the distribution `pmf` on `0..`.
    pub fn total_variation(&self, pmf: impl Fn(u64) -> f64, max_n: u64) -> f64 {
        let n_max = max_n.max(self.counts.len() as u64);
        let covered: f64 = (0..=n_max).map(&pmf).sum();
        let diff: f64 = (0..=n_max).map(|n| (self.frequency(n) - pmf(n)).abs()).sum();
        0.5 * (diff + (1.0 - covered).max(0.0))
    }
}

/// Load of the cell of a uniformly chosen user and of a uniformly chosen BS,
/// one of each per trial, restricted to cells centred in the receive region.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CellLoads {
    /// Users in the cell of a uniformly chosen user (that user included).
    pub tagged: LoadHistogram,
    /// Users in the cell of a uniformly chosen BS.
    pub typical: LoadHistogram,
}

fn trial_loads(snap: &DeploymentSnapshot, streams: &TrialStreams, region_bs: &[usize]) -> CellLoads {
    let mut out = CellLoads::default();
    if !snap.users.is_empty() {
        let u = ((streams.uniform(Purpose::Typical, 1, 0) * snap.users.len() as f64) as usize).min(snap.users.len() - 1);
        out.tagged.add(snap.users_per_bs[snap.serving[u] as usize] as usize);
    }
    if !region_bs.is_empty() {
        let b = region_bs[((streams.uniform(Purpose::Typical, 2, 0) * region_bs.len() as f64) as usize).min(region_bs.len() - 1)];
        out.typical.add(snap.users_per_bs[b] as usize);
    }
    out
}

/// Collects cell-load histograms over `sim.trials` snapshots.
pub fn cell_loads(net: &NetworkConfig, sim: &SimConfig, buildings: Option<&BuildingSet>) -> Result<CellLoads> {
    let region = sim.window()?.rx_region();
    (0..sim.trials)
        .into_par_iter()
        .map(|t| {
            let snap = generate_snapshot(net, sim, buildings, t)?;
            let inside: Vec<usize> = (0..snap.bs.len()).filter(|&b| region.contains(snap.bs[b])).collect();
            Ok(trial_loads(&snap, &TrialStreams::new(sim.seed, t), &inside))
        })
        .try_reduce(CellLoads::default, |a, b| Ok(CellLoads { tagged: a.tagged.merge(b.tagged), typical: a.typical.merge(b.typical) }))
}
