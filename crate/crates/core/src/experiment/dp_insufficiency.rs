use rayon::prelude::*;

use crate::attack::std_error;
use crate::calculus::{dp_noise, PrivacyBudget};
use crate::chain::{sample, sample_from, BinaryMarkovChain};
use crate::error::{Error, Result};
use crate::hmm::LikelihoodTables;
use crate::rng::replicate_seed;
use crate::sanitizer::{sanitize_independent, NoiseParams};

use super::{charged_epsilon, ExperimentConfig, ResultTable};

pub const SUCCESS_COLUMNS: [&str; 3] = ["theta", "suc_DP", "suc_BDP"];
pub const CHARGED_COLUMNS: [&str; 3] = ["theta", "eps_DP", "eps_BDP"];

/// Degenerate chains are inferred with `theta` moved this far inside `(0, 1/2)`.
const INFERENCE_CLAMP: f64 = 1e-6;

/// One data-chain setting. "DP" is the single-bit attacker that only reads
/// the published bit; "BDP" is the correlation-aware attacker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpInsufficiencyRow {
    pub theta: f64,
    pub trials: usize,
    pub sb_success: f64,
    pub sb_std_error: f64,
    pub ca_success: f64,
    pub ca_std_error: f64,
    /// `None` when the success rate is 0 or 1.
    pub sb_charged: Option<f64>,
    pub ca_charged: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpInsufficiency {
    pub eps: f64,
    pub rho: f64,
    /// 1-based target position.
    pub target: usize,
    pub rows: Vec<DpInsufficiencyRow>,
}

impl DpInsufficiency {
    pub fn success_table(&self) -> ResultTable {
        let mut t = ResultTable::new(&SUCCESS_COLUMNS);
        for r in &self.rows {
            t.push(vec![Some(r.theta), Some(r.sb_success), Some(r.ca_success)])
                .expect("three columns");
        }
        t
    }

    pub fn charged_table(&self) -> ResultTable {
        let mut t = ResultTable::new(&CHARGED_COLUMNS);
        for r in &self.rows {
            t.push(vec![Some(r.theta), r.sb_charged, r.ca_charged])
                .expect("three columns");
        }
        t
    }
}

/// Attack success against the middle tuple of symmetric chains when the
/// noise only provides per-bit `eps`-DP (`rho = 1/(1 + e^eps)`).
///
/// For each `theta`, `databases` series of length `n` are drawn and each is
/// sanitized `sanitizations` times. `theta = 0` samples a constant series
/// with a fair first bit.
pub fn run_dp_insufficiency(config: &ExperimentConfig) -> Result<DpInsufficiency> {
    config.check_thetas()?;
    config.check_eps()?;
    config.check_replicates()?;
    if config.eps.len() != 1 {
        return Err(Error::Config(format!(
            "the DP-insufficiency study takes a single epsilon, got {}",
            config.eps.len()
        )));
    }
    if config.n == 0 {
        return Err(Error::EmptySeries);
    }
    let eps = config.eps[0];
    let rho = dp_noise(PrivacyBudget::new(eps)?);
    let noise = NoiseParams::symmetric(rho)?;
    let target = (config.n / 2).max(1);

    let rows = config
        .thetas
        .iter()
        .enumerate()
        .map(|(cell, &theta)| {
            let data_chain = BinaryMarkovChain::symmetric(theta)?;
            let model = BinaryMarkovChain::symmetric(theta.clamp(INFERENCE_CLAMP, 0.5 - INFERENCE_CLAMP))?;
            let hits = (0..config.databases)
                .into_par_iter()
                .map(|d| {
                    let db_seed = replicate_seed(config.seed, cell as u64, d as u64);
                    let x = if theta == 0.0 {
                        sample_from(&data_chain, 0.5, config.n, db_seed)?
                    } else {
                        sample(&data_chain, config.n, db_seed)?
                    };
                    let truth = x.at(target)?;
                    let (mut sb, mut ca) = (0usize, 0usize);
                    for s in 0..config.sanitizations {
                        let z = sanitize_independent(&x, &noise, replicate_seed(db_seed, 0, s as u64));
                        sb += usize::from(z.at(target)? == truth);
                        let p = LikelihoodTables::new(&model, &noise, &z)?.posterior(target)?;
                        ca += usize::from(u8::from(p[1] > p[0]) == truth);
                    }
                    Ok((sb, ca))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold((0, 0), |acc, h| (acc.0 + h.0, acc.1 + h.1));
            let trials = config.databases * config.sanitizations;
            let sb = hits.0 as f64 / trials as f64;
            let ca = hits.1 as f64 / trials as f64;
            Ok(DpInsufficiencyRow {
                theta,
                trials,
                sb_success: sb,
                sb_std_error: std_error(sb, trials),
                ca_success: ca,
                ca_std_error: std_error(ca, trials),
                sb_charged: charged_epsilon(sb).ok(),
                ca_charged: charged_epsilon(ca).ok(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DpInsufficiency { eps, rho, target, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSeed;

    fn small(seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            thetas: vec![0.0, 0.05, 0.45],
            eps: vec![0.5],
            n: 30,
            databases: 8,
            sanitizations: 50,
            seed: RandomSeed(seed),
        }
    }

    #[test]
    fn deterministic_and_well_formed() {
        let a = run_dp_insufficiency(&small(3)).unwrap();
        let b = run_dp_insufficiency(&small(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.target, 15);
        assert_eq!(a.success_table().rows().len(), 3);
        assert_eq!(a.charged_table().columns(), CHARGED_COLUMNS);
        assert_ne!(run_dp_insufficiency(&small(4)).unwrap(), a);
    }

    #[test]
    fn strong_correlation_helps_the_aware_attacker() {
        let r = run_dp_insufficiency(&small(5)).unwrap();
        assert!(r.rows[0].ca_success > r.rows[0].sb_success + 0.2);
        assert!(r.rows[1].ca_success > r.rows[1].sb_success);
    }

    #[test]
    fn rejects_bad_config() {
        let mut c = small(1);
        c.eps = vec![0.5, 1.0];
        assert!(run_dp_insufficiency(&c).is_err());
        let mut c = small(1);
        c.databases = 0;
        assert!(run_dp_insufficiency(&c).is_err());
        let mut c = small(1);
        c.thetas = vec![0.5];
        assert!(run_dp_insufficiency(&c).is_err());
    }
}
