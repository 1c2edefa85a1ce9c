//! Exhaustive-enumeration oracles. These share no code with the recurrences
//! they check: each one sums explicit joint probabilities
//! `pi(x_1) prod P prod B` over every hidden sequence.

use crate::chain::{check_position, BinaryMarkovChain, BitSeries};
use crate::error::{Error, Result};
use crate::sanitizer::{CorrelatedNoiseChain, NoiseParams};
use crate::scalar::{ln, Scalar};

pub const MAX_INDEPENDENT: usize = 20;
pub const MAX_CORRELATED: usize = 10;

fn guard(n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(Error::SizeLimit { n, max })
    } else {
        Ok(())
    }
}

/// Bit `t` (0-based) of the `v`-th sequence in lexicographic order.
#[inline]
fn bit(v: u64, t: usize, n: usize) -> u8 {
    ((v >> (n - 1 - t)) & 1) as u8
}

/// `pi(x_1) prod P(x_t, x_{t+1})` for the `v`-th sequence.
fn chain_prob<T: Scalar>(chain: &BinaryMarkovChain<T>, pi: [T; 2], v: u64, n: usize) -> T {
    let mut p = pi[bit(v, 0, n) as usize];
    for t in 1..n {
        p = p * chain.transition(bit(v, t - 1, n), bit(v, t, n));
    }
    p
}

/// `Pr[Z = z | X = x]` for the independent mechanism.
pub fn independent_mechanism_prob<T: Scalar>(noise: &NoiseParams<T>, x: &[u8], z: &[u8]) -> T {
    x.iter()
        .zip(z)
        .fold(T::one(), |acc, (&xt, &zt)| acc * noise.emission(xt, zt))
}

/// `Pr[Z = z | X = x]` for the XOR mechanism, i.e. the probability that the
/// noise chain produces `x XOR z`.
pub fn correlated_mechanism_prob<T: Scalar>(noise: &CorrelatedNoiseChain<T>, x: &[u8], z: &[u8]) -> T {
    let y: Vec<u8> = x.iter().zip(z).map(|(a, b)| a ^ b).collect();
    let mut p = noise.stationary()[y[0] as usize];
    for w in y.windows(2) {
        p = p * noise.transition(w[0], w[1]);
    }
    p
}

fn sum_conditional<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    z: &BitSeries,
    i: usize,
    x: u8,
    emission: impl Fn(&[u8]) -> T,
) -> Result<T> {
    let n = z.len();
    check_position(i, n)?;
    let pi = chain.stationary()?;
    let mut total = T::zero();
    let mut seq = vec![0u8; n];
    for v in 0..(1u64 << n) {
        if bit(v, i - 1, n) != x {
            continue;
        }
        for (t, s) in seq.iter_mut().enumerate() {
            *s = bit(v, t, n);
        }
        total = total + chain_prob(chain, pi, v, n) * emission(&seq);
    }
    Ok(ln(total / pi[x as usize]))
}

/// `ln Pr[Z = z | X_i = x]` by summing over all `2^(n-1)` completions.
pub fn brute_force_likelihood<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    z: &BitSeries,
    i: usize,
    x: u8,
) -> Result<T> {
    guard(z.len(), MAX_INDEPENDENT)?;
    sum_conditional(chain, z, i, x, |seq| {
        independent_mechanism_prob(noise, seq, z.as_slice())
    })
}

/// `ln Pr[Z = z | X_i = x]` under the XOR mechanism. Every `(x, y)` pair
/// with `x XOR y != z` has probability zero, so enumerating `x` and setting
/// `y = x XOR z` covers all nonzero terms.
pub fn brute_force_correlated<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &CorrelatedNoiseChain<T>,
    z: &BitSeries,
    i: usize,
    x: u8,
) -> Result<T> {
    guard(z.len(), MAX_CORRELATED)?;
    sum_conditional(chain, z, i, x, |seq| {
        correlated_mechanism_prob(noise, seq, z.as_slice())
    })
}

/// `Pr[X_i = x | Z = z]` by Bayes' rule over the enumerated joint.
pub fn brute_force_posterior<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    z: &BitSeries,
    i: usize,
) -> Result<[T; 2]> {
    let n = z.len();
    guard(n, MAX_INDEPENDENT)?;
    check_position(i, n)?;
    let pi = chain.stationary()?;
    let mut mass = [T::zero(); 2];
    let mut seq = vec![0u8; n];
    for v in 0..(1u64 << n) {
        for (t, s) in seq.iter_mut().enumerate() {
            *s = bit(v, t, n);
        }
        let joint = chain_prob(chain, pi, v, n) * independent_mechanism_prob(noise, &seq, z.as_slice());
        mass[seq[i - 1] as usize] = mass[seq[i - 1] as usize] + joint;
    }
    let total = mass[0] + mass[1];
    Ok([mass[0] / total, mass[1] / total])
}

/// Lexicographically smallest sequence maximizing the joint probability.
pub fn brute_force_map_path<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    z: &BitSeries,
) -> Result<BitSeries> {
    let n = z.len();
    guard(n, MAX_INDEPENDENT)?;
    let pi = chain.stationary()?;
    let mut best = (T::neg_infinity(), 0u64);
    let mut seq = vec![0u8; n];
    for v in 0..(1u64 << n) {
        for (t, s) in seq.iter_mut().enumerate() {
            *s = bit(v, t, n);
        }
        let lp = ln(chain_prob(chain, pi, v, n)) + ln(independent_mechanism_prob(noise, &seq, z.as_slice()));
        let scale = lp.abs().max(best.0.abs()).max(T::one());
        if best.0 == T::neg_infinity() && lp > best.0 || lp - best.0 > T::lit(1e-12) * scale {
            best = (lp, v);
        }
    }
    BitSeries::new((0..n).map(|t| bit(best.1, t, n)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bit() {
        let c = BinaryMarkovChain::new(0.2, 0.3).unwrap();
        let b = NoiseParams::new(0.1, 0.25).unwrap();
        let z: BitSeries = "1".parse().unwrap();
        let l: f64 = brute_force_likelihood(&c, &b, &z, 1, 0).unwrap();
        assert!((l.exp() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn uninformative() {
        let c = BinaryMarkovChain::new(0.2, 0.3).unwrap();
        let b = NoiseParams::new(0.5, 0.5).unwrap();
        let z: BitSeries = "10110".parse().unwrap();
        let l: f64 = brute_force_likelihood(&c, &b, &z, 3, 1).unwrap();
        assert!((l - 5.0 * 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn size_guards() {
        let c = BinaryMarkovChain::new(0.2, 0.3).unwrap();
        let b = NoiseParams::new(0.1, 0.1).unwrap();
        let z = BitSeries::zeros(21).unwrap();
        assert!(matches!(
            brute_force_likelihood(&c, &b, &z, 1, 0),
            Err(Error::SizeLimit { n: 21, max: 20 })
        ));
        let cn = CorrelatedNoiseChain::new(0.2, 0.5).unwrap();
        let z = BitSeries::zeros(11).unwrap();
        assert!(brute_force_correlated(&c, &cn, &z, 1, 0).is_err());
    }

    #[test]
    fn map_path_prefers_zero_on_ties() {
        let c = BinaryMarkovChain::new(0.3, 0.3).unwrap();
        let b = NoiseParams::new(0.5, 0.5).unwrap();
        let z: BitSeries = "111".parse().unwrap();
        assert_eq!(brute_force_map_path(&c, &b, &z).unwrap().to_string(), "000");
    }
}
