//! Sanitization mechanisms: independent per-bit randomized response and
//! XOR with a correlated noise chain.
//!
//! Independent noise is a per-index function: bit `t` (1-based) consumes the
//! first draw of ChaCha stream `t` keyed by
//! `derive_seed(seed, tag::INDEPENDENT_NOISE)`. A tuple owner holding only
//! `(x_t, t, seed)` therefore reproduces exactly the bit the central
//! sanitizer would publish, and the parallel path equals the sequential one.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::chain::{sample_two_state, BitSeries};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng, tag, RandomSeed};
use crate::scalar::Scalar;

/// Flip probabilities of the independent mechanism: `rho0` for a 0 becoming
/// 1, `rho1` for a 1 becoming 0. Emission matrix
/// `B = [[1-rho0, rho0], [rho1, 1-rho1]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams<T> {
    rho0: T,
    rho1: T,
}

impl<T: Scalar> NoiseParams<T> {
    /// Requires `0 <= rho0, rho1 <= 0.5`. The closed upper end admits the
    /// uninformative mechanism; the privacy bounds require the open interval.
    pub fn new(rho0: T, rho1: T) -> Result<Self> {
        let half = T::lit(0.5);
        for (name, v) in [("rho0", rho0), ("rho1", rho1)] {
            if !(v >= T::zero() && v <= half) {
                return Err(Error::domain(name, v.as_f64(), "[0, 0.5]"));
            }
        }
        Ok(NoiseParams { rho0, rho1 })
    }

    pub fn symmetric(rho: T) -> Result<Self> {
        Self::new(rho, rho)
    }

    pub fn rho0(&self) -> T {
        self.rho0
    }

    pub fn rho1(&self) -> T {
        self.rho1
    }

    pub fn swapped(&self) -> Self {
        NoiseParams {
            rho0: self.rho1,
            rho1: self.rho0,
        }
    }

    /// `B[x][z] = Pr[Z = z | X = x]`.
    pub fn emission(&self, x: u8, z: u8) -> T {
        let flip = if x == 0 { self.rho0 } else { self.rho1 };
        if x == z {
            T::one() - flip
        } else {
            flip
        }
    }

    /// Expected fraction of flipped bits under the data marginal `pi`.
    pub fn expected_noise(&self, pi: [T; 2]) -> T {
        pi[0] * self.rho0 + pi[1] * self.rho1
    }

    /// Requires `0 < rho0, rho1 < 0.5`.
    pub fn require_interior(&self) -> Result<()> {
        let half = T::lit(0.5);
        for (name, v) in [("rho0", self.rho0), ("rho1", self.rho1)] {
            if !(v > T::zero() && v < half) {
                return Err(Error::domain(name, v.as_f64(), "(0, 0.5)"));
            }
        }
        Ok(())
    }
}

/// Noise chain for the correlated mechanism: 0 -> 1 with probability `rho0`,
/// 1 -> 0 with probability `rho1`, started from
/// `pi_B = (rho1/(rho0+rho1), rho0/(rho0+rho1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedNoiseChain<T> {
    rho0: T,
    rho1: T,
}

impl<T: Scalar> CorrelatedNoiseChain<T> {
    /// Requires `0 < rho0 < rho1 < 1` and `rho0 + rho1 <= 1`.
    pub fn new(rho0: T, rho1: T) -> Result<Self> {
        for (name, v) in [("rho0", rho0), ("rho1", rho1)] {
            if !(v > T::zero() && v < T::one()) {
                return Err(Error::domain(name, v.as_f64(), "(0, 1)"));
            }
        }
        if rho0 >= rho1 {
            return Err(Error::domain("rho0", rho0.as_f64(), "(0, rho1)"));
        }
        if rho0 + rho1 > T::one() {
            return Err(Error::domain("rho0 + rho1", (rho0 + rho1).as_f64(), "(0, 1]"));
        }
        Ok(CorrelatedNoiseChain { rho0, rho1 })
    }

    pub fn rho0(&self) -> T {
        self.rho0
    }

    pub fn rho1(&self) -> T {
        self.rho1
    }

    pub fn stationary(&self) -> [T; 2] {
        let s = self.rho0 + self.rho1;
        [self.rho1 / s, self.rho0 / s]
    }

    /// Per-bit flip probability `rho0/(rho0+rho1)`.
    pub fn marginal_flip(&self) -> T {
        self.stationary()[1]
    }

    /// `Pr[Y_{t+1} = to | Y_t = from]`.
    pub fn transition(&self, from: u8, to: u8) -> T {
        match (from, to) {
            (0, 0) => T::one() - self.rho0,
            (0, _) => self.rho0,
            (_, 0) => self.rho1,
            _ => T::one() - self.rho1,
        }
    }
}

fn noise_key(seed: RandomSeed) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(derive_seed(seed.0, tag::INDEPENDENT_NOISE))
}

#[inline]
fn flip_at(base: &ChaCha20Rng, index: usize, x: u8, rho0: f64, rho1: f64) -> u8 {
    let mut rng = base.clone();
    rng.set_stream(index as u64);
    let u: f64 = rng.gen();
    let rho = if x == 0 { rho0 } else { rho1 };
    x ^ u8::from(u < rho)
}

/// Sanitizes a single tuple at 1-based position `index`. Produces the same
/// bit as position `index` of [`sanitize_independent`].
pub fn sanitize_bit<T: Scalar>(x: u8, index: usize, noise: &NoiseParams<T>, seed: RandomSeed) -> u8 {
    flip_at(
        &noise_key(seed),
        index,
        x & 1,
        noise.rho0().as_f64(),
        noise.rho1().as_f64(),
    )
}

/// Flips each bit independently with probability `rho_x`.
pub fn sanitize_independent<T: Scalar>(bits: &BitSeries, noise: &NoiseParams<T>, seed: RandomSeed) -> BitSeries {
    let base = noise_key(seed);
    let (r0, r1) = (noise.rho0().as_f64(), noise.rho1().as_f64());
    let out = bits
        .iter()
        .enumerate()
        .map(|(t, x)| flip_at(&base, t + 1, x, r0, r1))
        .collect();
    BitSeries::from_vec_unchecked(out)
}

/// Parallel form of [`sanitize_independent`]; output is identical.
pub fn sanitize_independent_par<T: Scalar>(bits: &BitSeries, noise: &NoiseParams<T>, seed: RandomSeed) -> BitSeries {
    let base = noise_key(seed);
    let (r0, r1) = (noise.rho0().as_f64(), noise.rho1().as_f64());
    let out = bits
        .as_slice()
        .par_iter()
        .enumerate()
        .map(|(t, &x)| flip_at(&base, t + 1, x, r0, r1))
        .collect();
    BitSeries::from_vec_unchecked(out)
}

/// Draws a stationary noise path of length `n`.
pub fn sample_noise_chain<T: Scalar>(noise: &CorrelatedNoiseChain<T>, n: usize, seed: RandomSeed) -> Result<BitSeries> {
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    let mut rng = stream_rng(derive_seed(seed.0, tag::CORRELATED_NOISE), 0);
    let y = sample_two_state(
        noise.rho0().as_f64(),
        noise.rho1().as_f64(),
        noise.marginal_flip().as_f64(),
        n,
        &mut rng,
    );
    Ok(BitSeries::from_vec_unchecked(y))
}

/// XORs the data with a stationary noise-chain path.
pub fn sanitize_correlated<T: Scalar>(
    bits: &BitSeries,
    noise: &CorrelatedNoiseChain<T>,
    seed: RandomSeed,
) -> BitSeries {
    let y = sample_noise_chain(noise, bits.len(), seed).expect("series is nonempty");
    bits.xor(&y).expect("equal lengths")
}
