//! Reconstruction attackers over sanitized series.
//!
//! Attackers are told the true chain and noise parameters; only the hidden
//! bits are secret.

use std::fmt;
use std::str::FromStr;

use crate::chain::{check_position, BinaryMarkovChain, BitSeries};
use crate::error::{Error, Result};
use crate::hmm::{viterbi, LikelihoodTables};
use crate::sanitizer::NoiseParams;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attacker {
    /// Reports the published bit.
    SingleBit,
    /// Per-position posterior mode from forward-backward.
    CorrelationAware,
    /// Jointly most probable hidden sequence.
    Viterbi,
}

impl Attacker {
    pub fn name(&self) -> &'static str {
        match self {
            Attacker::SingleBit => "sb",
            Attacker::CorrelationAware => "ca",
            Attacker::Viterbi => "viterbi",
        }
    }

    /// Guesses for every position of `z`.
    pub fn reconstruct<T: Scalar>(
        &self,
        chain: &BinaryMarkovChain<T>,
        noise: &NoiseParams<T>,
        z: &BitSeries,
    ) -> Result<BitSeries> {
        match self {
            Attacker::SingleBit => Ok(z.clone()),
            Attacker::CorrelationAware => attack_correlation_aware_all(chain, noise, z),
            Attacker::Viterbi => viterbi(chain, noise, z),
        }
    }
}

impl fmt::Display for Attacker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Attacker {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sb" | "single-bit" => Ok(Attacker::SingleBit),
            "ca" | "correlation-aware" => Ok(Attacker::CorrelationAware),
            "viterbi" => Ok(Attacker::Viterbi),
            other => Err(Error::Config(format!(
                "unknown attacker {other:?} (expected sb, ca or viterbi)"
            ))),
        }
    }
}

pub fn attack_single_bit(z: &BitSeries, i: usize) -> Result<u8> {
    z.at(i)
}

fn posterior_mode<T: Scalar>(p: [T; 2]) -> u8 {
    u8::from(p[1] > p[0])
}

/// Posterior mode of `X_i`; ties go to 0.
pub fn attack_correlation_aware<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    z: &BitSeries,
    i: usize,
) -> Result<u8> {
    check_position(i, z.len())?;
    Ok(posterior_mode(LikelihoodTables::new(chain, noise, z)?.posterior(i)?))
}

/// Posterior mode at every position, from a single pair of tables.
pub fn attack_correlation_aware_all<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    z: &BitSeries,
) -> Result<BitSeries> {
    let t = LikelihoodTables::new(chain, noise, z)?;
    let bits = (1..=z.len())
        .map(|i| t.posterior(i).map(posterior_mode))
        .collect::<Result<Vec<u8>>>()?;
    BitSeries::new(bits)
}

pub fn attack_viterbi<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    z: &BitSeries,
) -> Result<BitSeries> {
    viterbi(chain, noise, z)
}

/// Success accounting for an attacker.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport {
    pub attacker: String,
    pub hits: Vec<bool>,
    pub accuracy: f64,
    /// `sqrt(p (1 - p) / trials)`.
    pub std_error: f64,
}

impl AttackReport {
    pub fn from_hits(attacker: impl Into<String>, hits: Vec<bool>) -> Result<Self> {
        if hits.is_empty() {
            return Err(Error::EmptySeries);
        }
        let trials = hits.len() as f64;
        let p = hits.iter().filter(|&&h| h).count() as f64 / trials;
        Ok(AttackReport {
            attacker: attacker.into(),
            hits,
            accuracy: p,
            std_error: (p * (1.0 - p) / trials).sqrt(),
        })
    }

    pub fn trials(&self) -> usize {
        self.hits.len()
    }
}

/// Standard error of a success frequency `p` over `trials` trials.
pub fn std_error(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Compares guesses against the truth position by position.
pub fn evaluate(attacker: impl Into<String>, truth: &BitSeries, guesses: &BitSeries) -> Result<AttackReport> {
    if truth.len() != guesses.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: guesses.len(),
        });
    }
    AttackReport::from_hits(
        attacker,
        truth.iter().zip(guesses.iter()).map(|(a, b)| a == b).collect(),
    )
}
