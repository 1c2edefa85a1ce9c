//! Bayesian differential privacy for binary Markov-chain time series.
//!
//! Data are modelled as a lazy two-state Markov chain and published through
//! per-bit randomized response ([`sanitizer::sanitize_independent`]) or by
//! XOR with a correlated noise chain. [`hmm`] computes exact conditional
//! likelihoods of a sanitized series, [`calculus`] turns them into privacy
//! bounds and noise calibrations, [`attack`] implements the reconstruction
//! adversaries, and [`experiment`] reproduces the comparison studies.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64`, which is what the sampling and experiment code uses.

pub mod attack;
pub mod calculus;
pub mod chain;
pub mod error;
pub mod experiment;
pub mod hmm;
pub mod io;
pub mod rng;
pub mod sanitizer;
pub mod scalar;

pub use chain::{binarize, estimate, sample, sample_from, BitSeries, Estimate};
pub use error::{Error, Result};
pub use rng::RandomSeed;
pub use scalar::Scalar;

pub type Chain = chain::BinaryMarkovChain<f64>;
pub type Noise = sanitizer::NoiseParams<f64>;
pub type CorrelatedNoise = sanitizer::CorrelatedNoiseChain<f64>;
