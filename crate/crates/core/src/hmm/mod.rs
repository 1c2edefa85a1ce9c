//! Exact inference over the sanitization HMM.
//!
//! `alpha_t(x) = Pr[Z_1..Z_t = z_1..z_t | X_t = x]` and
//! `beta_t(x) = Pr[Z_{t+1}..Z_n = z_{t+1}..z_n | X_t = x]`, both held as
//! natural logs. The forward step conditions backward in time
//! (`Pr[X_t = x' | X_{t+1} = x]`), which for a stationary two-state chain
//! equals `P[x][x']` by detailed balance; [`forward`] checks that before
//! relying on it.
//!
//! Positions are 1-based throughout, matching `BitSeries::at`.

mod correlated;
pub mod oracle;
mod viterbi;

pub use correlated::{correlated_likelihood, CorrelatedTables};
pub use viterbi::{path_log_prob, viterbi};

use crate::chain::{check_position, BinaryMarkovChain, BitSeries};
use crate::error::{Error, Result};
use crate::sanitizer::NoiseParams;
use crate::scalar::{ln, log_add_exp, Scalar};

/// Log transition and emission matrices.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogModel<T> {
    pub p: [[T; 2]; 2],
    pub b: [[T; 2]; 2],
}

impl<T: Scalar> LogModel<T> {
    pub fn new(chain: &BinaryMarkovChain<T>, noise: &NoiseParams<T>) -> Self {
        let mut p = [[T::zero(); 2]; 2];
        let mut b = [[T::zero(); 2]; 2];
        for x in 0..2u8 {
            for y in 0..2u8 {
                p[x as usize][y as usize] = ln(chain.transition(x, y));
                b[x as usize][y as usize] = ln(noise.emission(x, y));
            }
        }
        LogModel { p, b }
    }
}

fn check_model<T: Scalar>(chain: &BinaryMarkovChain<T>) -> Result<()> {
    chain.require_interior()?;
    let residual = chain.detailed_balance_residual()?.as_f64();
    if residual > 1e-12 {
        return Err(Error::NotReversible(residual));
    }
    Ok(())
}

fn forward_log<T: Scalar>(m: &LogModel<T>, z: &[u8]) -> Vec<[T; 2]> {
    let mut alpha = Vec::with_capacity(z.len() + 1);
    alpha.push([T::zero(); 2]);
    for &zt in z {
        let prev = *alpha.last().unwrap();
        let mut next = [T::zero(); 2];
        for x in 0..2 {
            next[x] = m.b[x][zt as usize] + log_add_exp(prev[0] + m.p[x][0], prev[1] + m.p[x][1]);
        }
        alpha.push(next);
    }
    alpha
}

fn backward_log<T: Scalar>(m: &LogModel<T>, z: &[u8]) -> Vec<[T; 2]> {
    let n = z.len();
    let mut beta = vec![[T::zero(); 2]; n + 1];
    for t in (0..n).rev() {
        let zn = z[t] as usize;
        let next = beta[t + 1];
        for x in 0..2 {
            beta[t][x] = log_add_exp(next[0] + m.b[0][zn] + m.p[x][0], next[1] + m.b[1][zn] + m.p[x][1]);
        }
    }
    beta
}

/// Log forward table; entry `t` (0..=n) holds `[ln alpha_t(0), ln alpha_t(1)]`.
pub fn forward<T: Scalar>(chain: &BinaryMarkovChain<T>, noise: &NoiseParams<T>, z: &BitSeries) -> Result<Vec<[T; 2]>> {
    check_model(chain)?;
    Ok(forward_log(&LogModel::new(chain, noise), z.as_slice()))
}

/// Log backward table; entry `t` (1..=n) holds `[ln beta_t(0), ln beta_t(1)]`.
/// Entry 0 continues the recurrence to a virtual stationary `X_0`.
pub fn backward<T: Scalar>(chain: &BinaryMarkovChain<T>, noise: &NoiseParams<T>, z: &BitSeries) -> Result<Vec<[T; 2]>> {
    check_model(chain)?;
    Ok(backward_log(&LogModel::new(chain, noise), z.as_slice()))
}

/// Forward and backward tables for one observation.
#[derive(Debug, Clone)]
pub struct LikelihoodTables<T> {
    alpha: Vec<[T; 2]>,
    beta: Vec<[T; 2]>,
    log_pi: [T; 2],
}

impl<T: Scalar> LikelihoodTables<T> {
    pub fn new(chain: &BinaryMarkovChain<T>, noise: &NoiseParams<T>, z: &BitSeries) -> Result<Self> {
        check_model(chain)?;
        let m = LogModel::new(chain, noise);
        let pi = chain.stationary()?;
        Ok(LikelihoodTables {
            alpha: forward_log(&m, z.as_slice()),
            beta: backward_log(&m, z.as_slice()),
            log_pi: [ln(pi[0]), ln(pi[1])],
        })
    }

    pub fn len(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `ln alpha_t(x)` for `t` in `0..=n`.
    pub fn alpha(&self, t: usize, x: u8) -> T {
        self.alpha[t][x as usize]
    }

    /// `ln beta_t(x)` for `t` in `1..=n`.
    pub fn beta(&self, t: usize, x: u8) -> T {
        self.beta[t][x as usize]
    }

    /// `ln Pr[Z = z | X_i = x]`.
    pub fn log_likelihood(&self, i: usize, x: u8) -> Result<T> {
        check_position(i, self.len())?;
        Ok(self.alpha[i][x as usize] + self.beta[i][x as usize])
    }

    /// `ln(Pr[Z = z | X_i = 0] / Pr[Z = z | X_i = 1])`.
    pub fn log_lr(&self, i: usize) -> Result<T> {
        Ok(self.log_likelihood(i, 0)? - self.log_likelihood(i, 1)?)
    }

    /// `ln Pr[Z = z]`.
    pub fn log_evidence(&self) -> T {
        let n = self.len();
        log_add_exp(self.log_pi[0] + self.alpha[n][0], self.log_pi[1] + self.alpha[n][1])
    }

    /// `[Pr[X_i = 0 | z], Pr[X_i = 1 | z]]`.
    pub fn posterior(&self, i: usize) -> Result<[T; 2]> {
        let l0 = self.log_pi[0] + self.log_likelihood(i, 0)?;
        let l1 = self.log_pi[1] + self.log_likelihood(i, 1)?;
        let norm = log_add_exp(l0, l1);
        let p1 = (l1 - norm).exp();
        Ok([T::one() - p1, p1].map(|v| v.max(T::zero())))
    }
}

/// `ln Pr[Z = z | X_i = x]` by forward-backward.
pub fn likelihood_given_state<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    z: &BitSeries,
    i: usize,
    x: u8,
) -> Result<T> {
    check_position(i, z.len())?;
    LikelihoodTables::new(chain, noise, z)?.log_likelihood(i, x)
}

/// `Pr[X_i = x | Z = z]` for `x = 0, 1`.
pub fn posterior<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    z: &BitSeries,
    i: usize,
) -> Result<[T; 2]> {
    check_position(i, z.len())?;
    LikelihoodTables::new(chain, noise, z)?.posterior(i)
}
