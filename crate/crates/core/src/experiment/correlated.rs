use crate::calculus::{calibrate_symmetric_exact, exhaustive_lr, optimal_correlated_noise, PrivacyBudget};
use crate::chain::BinaryMarkovChain;
use crate::error::{Error, Result};
use crate::sanitizer::NoiseParams;

use super::{ExperimentConfig, ResultTable};

pub const CORRELATED_COLUMNS: [&str; 5] = ["eps", "rho_independent", "rho_correlated", "rho0", "rho1"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedCheckRow {
    pub eps: f64,
    /// Calibrated independent flip probability.
    pub rho_independent: f64,
    /// Exhaustive loss of the independent mechanism at length `n`.
    pub target_log_loss: f64,
    /// Smallest per-bit flip probability of a correlated noise chain with
    /// loss at most the target.
    pub rho_correlated: f64,
    pub rho0: f64,
    pub rho1: f64,
    pub correlated_log_loss: f64,
}

impl CorrelatedCheckRow {
    pub fn gap(&self) -> f64 {
        (self.rho_correlated - self.rho_independent).abs()
    }
}

/// Whether Markov-correlated noise can reach the loss of the calibrated
/// independent mechanism with less flipping, on a short symmetric chain.
pub fn run_correlated_check(config: &ExperimentConfig) -> Result<(Vec<CorrelatedCheckRow>, ResultTable)> {
    config.check_thetas()?;
    config.check_eps()?;
    if config.thetas.len() != 1 {
        return Err(Error::Config(format!(
            "the correlated-noise check takes a single theta, got {}",
            config.thetas.len()
        )));
    }
    let theta = config.thetas[0];
    let chain = BinaryMarkovChain::symmetric(theta)?;
    let mut rows = Vec::new();
    let mut table = ResultTable::new(&CORRELATED_COLUMNS);
    for &e in &config.eps {
        let rho = calibrate_symmetric_exact(theta, PrivacyBudget::new(e)?)?;
        let ex = exhaustive_lr(&chain, &NoiseParams::symmetric(rho)?, config.n)?;
        let target = ex.max_log_lr.max(-ex.min_log_lr);
        let found = optimal_correlated_noise(theta, target, config.n)?;
        let row = CorrelatedCheckRow {
            eps: e,
            rho_independent: rho,
            target_log_loss: target,
            rho_correlated: found.flip,
            rho0: found.noise.rho0(),
            rho1: found.noise.rho1(),
            correlated_log_loss: found.log_loss,
        };
        table.push(vec![
            Some(e),
            Some(row.rho_independent),
            Some(row.rho_correlated),
            Some(row.rho0),
            Some(row.rho1),
        ])?;
        rows.push(row);
    }
    Ok((rows, table))
}
