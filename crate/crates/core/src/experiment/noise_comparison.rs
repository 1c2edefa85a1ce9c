use crate::calculus::{calibrate_symmetric_exact, rho_sufficient_symmetric, zhao_eps6_noise, PrivacyBudget};
use crate::error::{Error, Result};

use super::{ExperimentConfig, ResultTable};

pub const NOISE_COLUMNS: [&str; 4] = ["eps", "rho_zhao", "rho_closed_form", "rho_exact"];

/// Symmetric noise required by each calibration route at every budget.
/// Budgets the comparison mechanism cannot reach leave `rho_zhao` empty.
pub fn run_noise_privacy_comparison(config: &ExperimentConfig) -> Result<ResultTable> {
    config.check_thetas()?;
    config.check_eps()?;
    if config.thetas.len() != 1 {
        return Err(Error::Config(format!(
            "the noise comparison takes a single theta, got {}",
            config.thetas.len()
        )));
    }
    let theta = config.thetas[0];
    let mut table = ResultTable::new(&NOISE_COLUMNS);
    for &e in &config.eps {
        let eps = PrivacyBudget::new(e)?;
        table.push(vec![
            Some(e),
            zhao_eps6_noise(theta, eps, config.n)?.rho(),
            Some(rho_sufficient_symmetric(theta, eps)?),
            Some(calibrate_symmetric_exact(theta, eps)?),
        ])?;
    }
    Ok(table)
}
