//! Reproduction of the comparison studies as CSV tables.
//!
//! Every run is a pure function of its [`ExperimentConfig`]: replicate `k`
//! of grid cell `c` draws from `replicate_seed(seed, c, k)`, work is spread
//! over threads with rayon, and results are reduced in grid order, so output
//! is identical for any thread count.

mod correlated;
mod dp_insufficiency;
mod noise_comparison;
mod reconstruction;
mod table;

pub use correlated::{run_correlated_check, CorrelatedCheckRow, CORRELATED_COLUMNS};
pub use dp_insufficiency::{
    run_dp_insufficiency, DpInsufficiency, DpInsufficiencyRow, CHARGED_COLUMNS, SUCCESS_COLUMNS,
};
pub use noise_comparison::{run_noise_privacy_comparison, NOISE_COLUMNS};
pub use reconstruction::{
    read_lstm_accuracy, run_reconstruction_vs_bound, DataSource, Reconstruction, ReconstructionRow, LSTM_COLUMNS,
    RECONSTRUCTION_COLUMNS,
};
pub use table::ResultTable;

use crate::calculus::{log_lr_bound, PrivacyBudget};
use crate::chain::BinaryMarkovChain;
use crate::error::{Error, Result};
use crate::rng::RandomSeed;
use crate::sanitizer::NoiseParams;

pub const REGION_COLUMNS: [&str; 3] = ["rho0", "rho1", "feasible"];

/// Default data-chain grid for the DP-insufficiency study.
pub const DEFAULT_THETAS: [f64; 6] = [0.0, 0.09, 0.185, 0.285, 0.385, 0.475];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Symmetric data-chain parameters.
    pub thetas: Vec<f64>,
    pub eps: Vec<f64>,
    /// Series length.
    pub n: usize,
    /// Independently sampled databases per grid cell.
    pub databases: usize,
    /// Sanitizations per database.
    pub sanitizations: usize,
    pub seed: RandomSeed,
}

impl ExperimentConfig {
    /// 100 databases of length 30, 1000 sanitizations each, at `eps = 0.5`.
    pub fn dp_insufficiency() -> Self {
        ExperimentConfig {
            thetas: DEFAULT_THETAS.to_vec(),
            eps: vec![0.5],
            n: 30,
            databases: 100,
            sanitizations: 1000,
            seed: RandomSeed(0),
        }
    }

    /// `theta = 0.35`, `n = 30`, `eps` from 1 to 4 in steps of 0.25.
    pub fn noise_comparison() -> Self {
        ExperimentConfig {
            thetas: vec![0.35],
            eps: eps_grid(1.0, 4.0, 0.25),
            n: 30,
            databases: 1,
            sanitizations: 1,
            seed: RandomSeed(0),
        }
    }

    /// `eps` from 1 to 4 in steps of 0.25, one series, ten sanitizations per
    /// budget. `n` is taken from the data source.
    pub fn reconstruction() -> Self {
        ExperimentConfig {
            thetas: Vec::new(),
            eps: eps_grid(1.0, 4.0, 0.25),
            n: 0,
            databases: 1,
            sanitizations: 10,
            seed: RandomSeed(0),
        }
    }

    pub(crate) fn check_eps(&self) -> Result<()> {
        if self.eps.is_empty() {
            return Err(Error::Config("epsilon grid is empty".into()));
        }
        for &e in &self.eps {
            PrivacyBudget::new(e)?;
        }
        Ok(())
    }

    pub(crate) fn check_thetas(&self) -> Result<()> {
        if self.thetas.is_empty() {
            return Err(Error::Config("theta grid is empty".into()));
        }
        for &t in &self.thetas {
            if !(0.0..0.5).contains(&t) {
                return Err(Error::domain("theta", t, "[0, 0.5)"));
            }
        }
        Ok(())
    }

    pub(crate) fn check_replicates(&self) -> Result<()> {
        if self.databases == 0 || self.sanitizations == 0 {
            return Err(Error::Config("replicate counts must be at least 1".into()));
        }
        Ok(())
    }
}

/// `lo, lo + step, ..., hi` computed as `lo + k step` (no accumulated drift).
pub fn eps_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=count).map(|k| lo + k as f64 * step).collect()
}

/// Budget implied by an attacker's success rate: `ln(p/(1-p))`.
pub fn charged_epsilon(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("p_s", p, "(0, 1)"));
    }
    Ok((p / (1.0 - p)).ln())
}

/// Grid point of [`feasible_region`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    pub rho0: f64,
    pub rho1: f64,
    pub feasible: bool,
}

/// Evaluates both likelihood-ratio bounds on a `resolution x resolution`
/// grid of cell centres `(k - 1/2) / (2 resolution)` in `(0, 1/2)^2`.
pub fn feasible_region(
    chain: &BinaryMarkovChain<f64>,
    eps: PrivacyBudget<f64>,
    resolution: usize,
) -> Result<Vec<RegionPoint>> {
    if resolution == 0 {
        return Err(Error::Config("grid resolution must be at least 1".into()));
    }
    let axis: Vec<f64> = (1..=resolution)
        .map(|k| 0.5 * (k as f64 - 0.5) / resolution as f64)
        .collect();
    let mut out = Vec::with_capacity(resolution * resolution);
    for &rho0 in &axis {
        for &rho1 in &axis {
            let (b0, b1) = log_lr_bound(chain, &NoiseParams::new(rho0, rho1)?)?;
            out.push(RegionPoint {
                rho0,
                rho1,
                feasible: b0 <= eps.epsilon() && b1 <= eps.epsilon(),
            });
        }
    }
    Ok(out)
}

pub fn region_table(points: &[RegionPoint]) -> ResultTable {
    let mut t = ResultTable::new(&REGION_COLUMNS);
    for p in points {
        t.push(vec![
            Some(p.rho0),
            Some(p.rho1),
            Some(if p.feasible { 1.0 } else { 0.0 }),
        ])
        .expect("three columns");
    }
    t
}
