use std::path::Path;

use rayon::prelude::*;

use crate::attack::std_error;
use crate::calculus::{calibrate_asymmetric, success_bound_bdp, PrivacyBudget};
use crate::chain::{estimate, sample, BinaryMarkovChain, BitSeries, Estimate};
use crate::error::{Error, Result};
use crate::hmm::viterbi;
use crate::rng::replicate_seed;
use crate::sanitizer::{sanitize_independent_par, NoiseParams};

use super::{ExperimentConfig, ResultTable};

pub const RECONSTRUCTION_COLUMNS: [&str; 4] = ["eps", "viterbi_accuracy", "lstm_accuracy", "bdp_bound"];
pub const LSTM_COLUMNS: [&str; 2] = ["eps", "lstm_accuracy"];

/// LSTM rows are matched to budgets within this distance.
const EPS_MATCH: f64 = 1e-9;

/// Where the hidden series comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// `databases` series of length `n` drawn from `chain`.
    Synthetic { chain: BinaryMarkovChain<f64>, n: usize },
    /// A binarized observed series; the chain is estimated from it.
    Observed(BitSeries),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionRow {
    pub eps: f64,
    pub noise: NoiseParams<f64>,
    pub expected_noise: f64,
    pub viterbi_accuracy: f64,
    pub std_error: f64,
    pub lstm_accuracy: Option<f64>,
    pub bdp_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    /// The chain used for calibration and inference.
    pub chain: BinaryMarkovChain<f64>,
    /// Present for observed data.
    pub estimate: Option<Estimate<f64>>,
    pub n: usize,
    pub rows: Vec<ReconstructionRow>,
}

impl Reconstruction {
    pub fn table(&self) -> ResultTable {
        let mut t = ResultTable::new(&RECONSTRUCTION_COLUMNS);
        for r in &self.rows {
            t.push(vec![
                Some(r.eps),
                Some(r.viterbi_accuracy),
                r.lstm_accuracy,
                Some(r.bdp_bound),
            ])
            .expect("four columns");
        }
        t
    }
}

/// Reads an `eps,lstm_accuracy` file.
pub fn read_lstm_accuracy(path: &Path) -> Result<ResultTable> {
    let t = ResultTable::read(path)?;
    t.check_schema(&LSTM_COLUMNS)?;
    Ok(t)
}

fn lstm_lookup(lstm: Option<&ResultTable>, eps: f64) -> Option<f64> {
    lstm?
        .rows()
        .iter()
        .find(|r| r[0].is_some_and(|e| (e - eps).abs() <= EPS_MATCH))
        .and_then(|r| r[1])
}

/// Viterbi reconstruction accuracy under asymmetrically calibrated noise,
/// next to the BDP success bound, for every budget in the config.
///
/// Each budget sanitizes every series `sanitizations` times; the accuracy
/// is the fraction of correctly recovered bits over all of them.
pub fn run_reconstruction_vs_bound(
    config: &ExperimentConfig,
    data: &DataSource,
    lstm: Option<&ResultTable>,
) -> Result<Reconstruction> {
    config.check_eps()?;
    config.check_replicates()?;
    if let Some(t) = lstm {
        t.check_schema(&LSTM_COLUMNS)?;
    }
    let (chain, est, xs) = match data {
        DataSource::Synthetic { chain, n } => {
            let xs = (0..config.databases)
                .map(|d| sample(chain, *n, replicate_seed(config.seed, u64::MAX, d as u64)))
                .collect::<Result<Vec<_>>>()?;
            (*chain, None, xs)
        }
        DataSource::Observed(bits) => {
            if config.databases != 1 {
                return Err(Error::Config("an observed series is a single database".into()));
            }
            let e = estimate::<f64>(bits)?;
            (e.chain, Some(e), vec![bits.clone()])
        }
    };
    let n = xs[0].len();
    let rows = config
        .eps
        .par_iter()
        .enumerate()
        .map(|(cell, &e)| {
            let eps = PrivacyBudget::new(e)?;
            let cal = calibrate_asymmetric(&chain, eps)?;
            let mut hits = 0usize;
            for (d, x) in xs.iter().enumerate() {
                let db_seed = replicate_seed(config.seed, cell as u64, d as u64);
                for s in 0..config.sanitizations {
                    let z = sanitize_independent_par(x, &cal.noise, replicate_seed(db_seed, 0, s as u64));
                    let guess = viterbi(&chain, &cal.noise, &z)?;
                    hits += x.iter().zip(guess.iter()).filter(|(a, b)| a == b).count();
                }
            }
            let trials = n * xs.len() * config.sanitizations;
            let acc = hits as f64 / trials as f64;
            Ok(ReconstructionRow {
                eps: e,
                noise: cal.noise,
                expected_noise: cal.expected_noise,
                viterbi_accuracy: acc,
                std_error: std_error(acc, trials),
                lstm_accuracy: lstm_lookup(lstm, e),
                bdp_bound: success_bound_bdp(&chain, eps)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Reconstruction {
        chain,
        estimate: est,
        n,
        rows,
    })
}
