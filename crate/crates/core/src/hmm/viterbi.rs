use crate::chain::{BinaryMarkovChain, BitSeries};
use crate::error::{Error, Result};
use crate::sanitizer::NoiseParams;
use crate::scalar::{ln, Scalar};

use super::LogModel;

/// Relative tolerance under which two path scores count as tied.
const TIE_REL: f64 = 1e-12;

fn prefer_zero<T: Scalar>(v0: T, v1: T) -> bool {
    if v0 >= v1 {
        return true;
    }
    if v0 == T::neg_infinity() {
        return false;
    }
    let scale = v0.abs().max(v1.abs()).max(T::one());
    v1 - v0 <= T::lit(TIE_REL) * scale
}

/// `ln(pi(x_1) * prod P(x_t, x_{t+1}) * prod B(x_t, z_t))`.
pub fn path_log_prob<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    x: &BitSeries,
    z: &BitSeries,
) -> Result<T> {
    if x.len() != z.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: z.len(),
        });
    }
    let pi = chain.stationary()?;
    let m = LogModel::new(chain, noise);
    let (xs, zs) = (x.as_slice(), z.as_slice());
    let mut lp = ln(pi[xs[0] as usize]);
    for t in 0..xs.len() {
        lp = lp + m.b[xs[t] as usize][zs[t] as usize];
        if t > 0 {
            lp = lp + m.p[xs[t - 1] as usize][xs[t] as usize];
        }
    }
    Ok(lp)
}

/// Most probable hidden sequence given `z`.
///
/// Among optimal paths the lexicographically smallest is returned (prefer 0
/// at the earliest position where optimal paths differ). Scores within a
/// relative `1e-12` of each other are treated as tied. Chains with one of
/// `q`, `r` equal to zero are accepted.
pub fn viterbi<T: Scalar>(chain: &BinaryMarkovChain<T>, noise: &NoiseParams<T>, z: &BitSeries) -> Result<BitSeries> {
    let pi = chain.stationary()?;
    let m = LogModel::new(chain, noise);
    let zs = z.as_slice();
    let n = zs.len();

    // best[t][x]: best log score of emissions t.. and transitions after t,
    // given X_t = x (0-based t).
    let mut best = vec![[T::zero(); 2]; n];
    for x in 0..2 {
        best[n - 1][x] = m.b[x][zs[n - 1] as usize];
    }
    for t in (0..n - 1).rev() {
        for x in 0..2 {
            let via0 = m.p[x][0] + best[t + 1][0];
            let via1 = m.p[x][1] + best[t + 1][1];
            best[t][x] = m.b[x][zs[t] as usize] + via0.max(via1);
        }
    }

    let mut path = Vec::with_capacity(n);
    let mut state = u8::from(!prefer_zero(ln(pi[0]) + best[0][0], ln(pi[1]) + best[0][1]));
    path.push(state);
    for t in 1..n {
        let s = state as usize;
        state = u8::from(!prefer_zero(m.p[s][0] + best[t][0], m.p[s][1] + best[t][1]));
        path.push(state);
    }
    Ok(BitSeries::from_vec_unchecked(path))
}
