//! Two-state Markov chains and bit series.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng, tag, RandomSeed};
use crate::scalar::Scalar;

/// Clamp range applied by [`estimate`].
pub const ESTIMATE_MIN: f64 = 1e-6;
pub const ESTIMATE_MAX: f64 = 0.5 - 1e-6;

/// A finite, nonempty sequence over {0, 1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSeries(Vec<u8>);

impl BitSeries {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidBit {
                position: pos + 1,
                value: char::from(b'0'.wrapping_add(bits[pos])),
            });
        }
        Ok(BitSeries(bits))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0; n])
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    /// Bits of `value`, least significant bit first, as a series of length `n`.
    pub fn from_index(value: u64, n: usize) -> Result<Self> {
        Self::new((0..n).map(|t| ((value >> t) & 1) as u8).collect())
    }

    pub(crate) fn from_vec_unchecked(bits: Vec<u8>) -> Self {
        debug_assert!(!bits.is_empty() && bits.iter().all(|&b| b <= 1));
        BitSeries(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always `false`; series are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }

    /// Bit at 1-based position `pos`.
    pub fn at(&self, pos: usize) -> Result<u8> {
        check_position(pos, self.len())?;
        Ok(self.0[pos - 1])
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    pub fn fraction_ones(&self) -> f64 {
        self.0.iter().map(|&b| b as f64).sum::<f64>() / self.len() as f64
    }

    /// Elementwise XOR.
    pub fn xor(&self, other: &BitSeries) -> Result<BitSeries> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(BitSeries(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect()))
    }
}

impl fmt::Display for BitSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl FromStr for BitSeries {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidBit {
                    position: i + 1,
                    value: other,
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        BitSeries::new(bits)
    }
}

pub(crate) fn check_position(pos: usize, len: usize) -> Result<()> {
    if pos == 0 || pos > len {
        Err(Error::IndexOutOfRange { position: pos, len })
    } else {
        Ok(())
    }
}

/// Lazy two-state chain with `P = [[1-q, q], [r, 1-r]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryMarkovChain<T> {
    q: T,
    r: T,
}

impl<T: Scalar> BinaryMarkovChain<T> {
    /// Requires `0 <= q, r < 0.5`.
    pub fn new(q: T, r: T) -> Result<Self> {
        let half = T::lit(0.5);
        for (name, v) in [("q", q), ("r", r)] {
            if !(v >= T::zero() && v < half) {
                return Err(Error::domain(name, v.as_f64(), "[0, 0.5)"));
            }
        }
        Ok(BinaryMarkovChain { q, r })
    }

    pub fn symmetric(theta: T) -> Result<Self> {
        Self::new(theta, theta)
    }

    /// Probability of a 0 -> 1 transition.
    pub fn q(&self) -> T {
        self.q
    }

    /// Probability of a 1 -> 0 transition.
    pub fn r(&self) -> T {
        self.r
    }

    pub fn is_symmetric(&self) -> bool {
        self.q == self.r
    }

    /// The chain with the roles of the two states exchanged.
    pub fn swapped(&self) -> Self {
        BinaryMarkovChain { q: self.r, r: self.q }
    }

    /// `P[from][to]`.
    pub fn transition(&self, from: u8, to: u8) -> T {
        match (from, to) {
            (0, 0) => T::one() - self.q,
            (0, _) => self.q,
            (_, 0) => self.r,
            _ => T::one() - self.r,
        }
    }

    pub fn matrix(&self) -> [[T; 2]; 2] {
        [
            [self.transition(0, 0), self.transition(0, 1)],
            [self.transition(1, 0), self.transition(1, 1)],
        ]
    }

    /// Stationary distribution `(r/(q+r), q/(q+r))`.
    pub fn stationary(&self) -> Result<[T; 2]> {
        let total = self.q + self.r;
        if total <= T::zero() {
            return Err(Error::DegenerateChain);
        }
        Ok([self.r / total, self.q / total])
    }

    /// Largest violation of `pi(x) P(x, x') = pi(x') P(x', x)`.
    pub fn detailed_balance_residual(&self) -> Result<T> {
        let pi = self.stationary()?;
        Ok((pi[0] * self.transition(0, 1) - pi[1] * self.transition(1, 0)).abs())
    }

    /// Requires `0 < q, r < 0.5`, the domain of the privacy bounds and the
    /// forward recurrence.
    pub fn require_interior(&self) -> Result<()> {
        for (name, v) in [("q", self.q), ("r", self.r)] {
            if !(v > T::zero()) {
                return Err(Error::domain(name, v.as_f64(), "(0, 0.5)"));
            }
        }
        Ok(())
    }
}

/// Draws a two-state chain path. `p01`/`p10` are the 0->1 and 1->0
/// transition probabilities and `p1_init` the probability that the first
/// state is 1.
pub(crate) fn sample_two_state(p01: f64, p10: f64, p1_init: f64, n: usize, rng: &mut ChaCha20Rng) -> Vec<u8> {
    let mut out = Vec::with_capacity(n);
    let mut state = u8::from(rng.gen::<f64>() < p1_init);
    out.push(state);
    for _ in 1..n {
        let u = rng.gen::<f64>();
        state = match state {
            0 => u8::from(u < p01),
            _ => u8::from(u >= p10),
        };
        out.push(state);
    }
    out
}

/// Samples `n` states starting from the stationary distribution.
pub fn sample<T: Scalar>(chain: &BinaryMarkovChain<T>, n: usize, seed: RandomSeed) -> Result<BitSeries> {
    let pi = chain.stationary()?;
    sample_from(chain, pi[1], n, seed)
}

/// Samples `n` states with `Pr[X_1 = 1] = p1_init`. This is the path used
/// for degenerate chains such as `q = r = 0`.
pub fn sample_from<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    p1_init: T,
    n: usize,
    seed: RandomSeed,
) -> Result<BitSeries> {
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if !(p1_init >= T::zero() && p1_init <= T::one()) {
        return Err(Error::domain("p1_init", p1_init.as_f64(), "[0, 1]"));
    }
    let mut rng = stream_rng(derive_seed(seed.0, tag::DATA_CHAIN), 0);
    let bits = sample_two_state(chain.q().as_f64(), chain.r().as_f64(), p1_init.as_f64(), n, &mut rng);
    Ok(BitSeries::from_vec_unchecked(bits))
}

/// Output of [`estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub chain: BinaryMarkovChain<T>,
    /// Unclamped transition frequencies.
    pub raw_q: T,
    pub raw_r: T,
    /// Set when either frequency was moved into the clamp range.
    pub clamped: bool,
}

/// Empirical transition frequencies, clamped into
/// `[ESTIMATE_MIN, ESTIMATE_MAX]`.
pub fn estimate<T: Scalar>(bits: &BitSeries) -> Result<Estimate<T>> {
    let mut counts = [[0u64; 2]; 2];
    for w in bits.as_slice().windows(2) {
        counts[w[0] as usize][w[1] as usize] += 1;
    }
    let from0 = counts[0][0] + counts[0][1];
    let from1 = counts[1][0] + counts[1][1];
    if from0 == 0 {
        return Err(Error::InsufficientData("no transition starts in state 0"));
    }
    if from1 == 0 {
        return Err(Error::InsufficientData("no transition starts in state 1"));
    }
    let raw_q = T::lit(counts[0][1] as f64) / T::lit(from0 as f64);
    let raw_r = T::lit(counts[1][0] as f64) / T::lit(from1 as f64);
    let (lo, hi) = (T::lit(ESTIMATE_MIN), T::lit(ESTIMATE_MAX));
    let q = raw_q.max(lo).min(hi);
    let r = raw_r.max(lo).min(hi);
    Ok(Estimate {
        chain: BinaryMarkovChain::new(q, r)?,
        raw_q,
        raw_r,
        clamped: q != raw_q || r != raw_r,
    })
}

/// Thresholds a real series at its arithmetic mean: values strictly above
/// the mean map to 1, everything else (ties included) to 0.
pub fn binarize<T: Scalar>(series: &[T]) -> Result<BitSeries> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(pos) = series.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { position: pos + 1 });
    }
    // Accumulate in f64 so f32 inputs do not drift on long series.
    let mean = T::lit(series.iter().map(|v| v.as_f64()).sum::<f64>() / series.len() as f64);
    Ok(BitSeries::from_vec_unchecked(
        series.iter().map(|&v| u8::from(v > mean)).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitSeries {
        s.parse().unwrap()
    }

    #[test]
    fn stationary_examples() {
        let pi = BinaryMarkovChain::<f64>::new(0.2, 0.35).unwrap().stationary().unwrap();
        assert!((pi[0] - 0.35 / 0.55).abs() < 1e-15);
        assert!((pi[1] - 0.2 / 0.55).abs() < 1e-15);
        assert_eq!(
            BinaryMarkovChain::symmetric(0.3).unwrap().stationary().unwrap(),
            [0.5, 0.5]
        );
        // 0.1092 / 0.1985 and 0.0893 / 0.1985
        let pi = BinaryMarkovChain::<f64>::new(0.0893, 0.1092)
            .unwrap()
            .stationary()
            .unwrap();
        assert!((pi[0] - 0.550_125_944_584_382_9).abs() < 1e-12);
        assert!((pi[1] - 0.449_874_055_415_617_1).abs() < 1e-12);
    }

    #[test]
    fn degenerate_chain_is_rejected() {
        let c = BinaryMarkovChain::new(0.0, 0.0).unwrap();
        assert!(matches!(c.stationary(), Err(Error::DegenerateChain)));
        assert!(matches!(sample(&c, 5, RandomSeed(1)), Err(Error::DegenerateChain)));
    }

    #[test]
    fn parameter_domain() {
        assert!(BinaryMarkovChain::new(0.5, 0.1).is_err());
        assert!(BinaryMarkovChain::new(0.1, -0.01).is_err());
        assert!(BinaryMarkovChain::new(f64::NAN, 0.1).is_err());
        assert!(BinaryMarkovChain::new(0.0, 0.2).is_ok());
        assert!(BinaryMarkovChain::new(0.0, 0.2).unwrap().require_interior().is_err());
    }

    #[test]
    fn absorbing_zero_state() {
        let c = BinaryMarkovChain::new(0.0, 0.2).unwrap();
        // pi = (1, 0), so X1 = 0 and the chain never leaves 0.
        for seed in 0..20 {
            let s = sample(&c, 5, RandomSeed(seed)).unwrap();
            assert_eq!(s.to_string(), "00000");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let c = BinaryMarkovChain::new(0.2, 0.35).unwrap();
        let a = sample(&c, 1000, RandomSeed(42)).unwrap();
        let b = sample(&c, 1000, RandomSeed(42)).unwrap();
        let d = sample(&c, 1000, RandomSeed(43)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, d);
    }

    #[test]
    fn stationary_marginal_monte_carlo() {
        let c = BinaryMarkovChain::symmetric(0.3).unwrap();
        let s = sample(&c, 1_000_000, RandomSeed(5)).unwrap();
        assert!((s.fraction_ones() - 0.5).abs() < 0.01);
    }

    #[test]
    fn estimate_exact_counts() {
        let e = estimate::<f64>(&bits("00011110")).unwrap();
        assert_eq!(e.raw_q, 1.0 / 3.0);
        assert_eq!(e.raw_r, 1.0 / 4.0);
        assert!(!e.clamped);
        assert_eq!(e.chain.q(), 1.0 / 3.0);
    }

    #[test]
    fn estimate_clamps_and_reports() {
        let e = estimate::<f64>(&bits("010101")).unwrap();
        assert_eq!(e.raw_q, 1.0);
        assert_eq!(e.chain.q(), ESTIMATE_MAX);
        assert!(e.clamped);
    }

    #[test]
    fn estimate_needs_both_states() {
        assert!(matches!(
            estimate::<f64>(&bits("1111")),
            Err(Error::InsufficientData(_))
        ));
        // The final 0 has no successor, so no transition starts in state 0.
        assert!(matches!(
            estimate::<f64>(&bits("1110")),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn estimate_recovers_parameters() {
        let c = BinaryMarkovChain::new(0.0893, 0.1092).unwrap();
        let s = sample(&c, 26923, RandomSeed(11)).unwrap();
        let e = estimate::<f64>(&s).unwrap();
        assert!((e.chain.q() - 0.0893).abs() < 0.01);
        assert!((e.chain.r() - 0.1092).abs() < 0.01);
    }

    #[test]
    fn binarize_examples() {
        assert_eq!(binarize(&[1.0, 1.0, 1.0]).unwrap().to_string(), "000");
        assert_eq!(binarize(&[60.0, 80.0, 60.0, 90.0]).unwrap().to_string(), "0101");
        assert!(matches!(binarize::<f64>(&[]), Err(Error::EmptySeries)));
        assert!(matches!(
            binarize(&[1.0, f64::INFINITY]),
            Err(Error::NonFinite { position: 2 })
        ));
    }

    #[test]
    fn bit_series_parsing() {
        assert!("0120".parse::<BitSeries>().is_err());
        assert!("".parse::<BitSeries>().is_err());
        let s = bits("0110");
        assert_eq!(s.at(2).unwrap(), 1);
        assert!(s.at(0).is_err());
        assert!(s.at(5).is_err());
        assert_eq!(BitSeries::from_index(0b0110, 4).unwrap(), s);
    }

    #[test]
    fn generic_over_f32() {
        let c = BinaryMarkovChain::<f32>::new(0.2, 0.35).unwrap();
        let pi = c.stationary().unwrap();
        assert!((pi[0] - 0.636_363_6).abs() < 1e-6);
    }
}
