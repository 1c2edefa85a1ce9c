//! Inference for the XOR mechanism over the product chain `(X_t, Y_t)`.
//!
//! State `s = 2x + y`. Transitions factor as `P[x][x'] * Q[y][y']`, the
//! start distribution as `pi(x) * pi_B(y)`, and the emission is the
//! indicator `z_t = x_t XOR y_t`. Tables hold joint forward probabilities
//! `Pr[z_1..z_t, S_t = s]` and backward probabilities
//! `Pr[z_{t+1}..z_n | S_t = s]`, in logs.

use crate::chain::{check_position, BinaryMarkovChain, BitSeries};
use crate::error::Result;
use crate::sanitizer::CorrelatedNoiseChain;
use crate::scalar::{ln, log_add_exp, Scalar};

fn lse<T: Scalar>(vals: impl IntoIterator<Item = T>) -> T {
    vals.into_iter().fold(T::neg_infinity(), log_add_exp)
}

fn emits(s: usize, z: u8) -> bool {
    ((s >> 1) ^ (s & 1)) as u8 == z
}

#[derive(Debug, Clone)]
pub struct CorrelatedTables<T> {
    fwd: Vec<[T; 4]>,
    bwd: Vec<[T; 4]>,
    log_pi_x: [T; 2],
}

impl<T: Scalar> CorrelatedTables<T> {
    pub fn new(chain: &BinaryMarkovChain<T>, noise: &CorrelatedNoiseChain<T>, z: &BitSeries) -> Result<Self> {
        let pi = chain.stationary()?;
        let pb = noise.stationary();
        let mut trans = [[T::neg_infinity(); 4]; 4];
        for (s, row) in trans.iter_mut().enumerate() {
            for (s2, cell) in row.iter_mut().enumerate() {
                let (x, y, x2, y2) = ((s >> 1) as u8, (s & 1) as u8, (s2 >> 1) as u8, (s2 & 1) as u8);
                *cell = ln(chain.transition(x, x2)) + ln(noise.transition(y, y2));
            }
        }
        let zs = z.as_slice();
        let n = zs.len();
        let ninf = T::neg_infinity();

        let mut fwd = Vec::with_capacity(n);
        let mut first = [ninf; 4];
        for (s, v) in first.iter_mut().enumerate() {
            if emits(s, zs[0]) {
                *v = ln(pi[s >> 1]) + ln(pb[s & 1]);
            }
        }
        fwd.push(first);
        for &zt in &zs[1..] {
            let prev = *fwd.last().unwrap();
            let mut next = [ninf; 4];
            for (s2, v) in next.iter_mut().enumerate() {
                if emits(s2, zt) {
                    *v = lse((0..4).map(|s| prev[s] + trans[s][s2]));
                }
            }
            fwd.push(next);
        }

        let mut bwd = vec![[T::zero(); 4]; n];
        for t in (0..n - 1).rev() {
            let next = bwd[t + 1];
            let zn = zs[t + 1];
            for s in 0..4 {
                bwd[t][s] = lse((0..4).filter(|&s2| emits(s2, zn)).map(|s2| trans[s][s2] + next[s2]));
            }
        }
        Ok(CorrelatedTables {
            fwd,
            bwd,
            log_pi_x: [ln(pi[0]), ln(pi[1])],
        })
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    /// `ln Pr[Z = z | X_i = x]`.
    pub fn log_likelihood(&self, i: usize, x: u8) -> Result<T> {
        check_position(i, self.len())?;
        let (f, b) = (self.fwd[i - 1], self.bwd[i - 1]);
        let base = 2 * x as usize;
        let joint = log_add_exp(f[base] + b[base], f[base + 1] + b[base + 1]);
        Ok(joint - self.log_pi_x[x as usize])
    }

    pub fn log_lr(&self, i: usize) -> Result<T> {
        Ok(self.log_likelihood(i, 0)? - self.log_likelihood(i, 1)?)
    }
}

/// `ln Pr[Z = z | X_i = x]` under the XOR mechanism.
pub fn correlated_likelihood<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &CorrelatedNoiseChain<T>,
    z: &BitSeries,
    i: usize,
    x: u8,
) -> Result<T> {
    check_position(i, z.len())?;
    CorrelatedTables::new(chain, noise, z)?.log_likelihood(i, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hmm::likelihood_given_state;
    use crate::sanitizer::NoiseParams;

    #[test]
    fn complementary_noise_reduces_to_independent() {
        let c = BinaryMarkovChain::<f64>::symmetric(0.2).unwrap();
        let rho = 0.3;
        let cn = CorrelatedNoiseChain::new(rho, 1.0 - rho).unwrap();
        let ind = NoiseParams::symmetric(rho).unwrap();
        for zs in ["0", "0110", "1111100000", "0101101"] {
            let z: BitSeries = zs.parse().unwrap();
            for i in 1..=z.len() {
                for x in 0..2 {
                    let a = correlated_likelihood(&c, &cn, &z, i, x).unwrap();
                    let b = likelihood_given_state(&c, &ind, &z, i, x).unwrap();
                    assert!((a - b).abs() <= 1e-10 * b.abs(), "{zs} {i} {x}");
                }
            }
        }
    }

    #[test]
    fn frozen_data_chain_sees_pure_noise() {
        // With X frozen at 0, Z is the noise chain itself.
        let c = BinaryMarkovChain::<f64>::new(1e-12, 0.3).unwrap();
        let cn = CorrelatedNoiseChain::new(0.2, 0.5).unwrap();
        let z: BitSeries = "0011".parse().unwrap();
        let want = (5.0f64 / 7.0) * 0.8 * 0.2 * 0.5;
        let got = correlated_likelihood(&c, &cn, &z, 1, 0).unwrap().exp();
        assert!((got - want).abs() < 1e-9);
    }
}
