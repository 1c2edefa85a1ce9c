//! Exhaustive audits over every observation of a short series.

use rayon::prelude::*;

use crate::chain::{BinaryMarkovChain, BitSeries};
use crate::error::{Error, Result};
use crate::hmm::LikelihoodTables;
use crate::sanitizer::{CorrelatedNoiseChain, NoiseParams};
use crate::scalar::Scalar;

pub const MAX_AUDIT: usize = 20;
pub const MAX_CORRELATED_AUDIT: usize = 12;

/// Extremes of `ln(Pr[z | X_i = 0] / Pr[z | X_i = 1])` over all `z` and `i`.
/// Ties keep the first `z` in index order (bit `t` of the index is position
/// `t + 1`), then the smallest `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveLr<T> {
    pub max_log_lr: T,
    pub argmax_z: BitSeries,
    pub argmax_i: usize,
    pub min_log_lr: T,
    pub argmin_z: BitSeries,
    pub argmin_i: usize,
}

pub fn exhaustive_lr<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    n: usize,
) -> Result<ExhaustiveLr<T>> {
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if n > MAX_AUDIT {
        return Err(Error::SizeLimit { n, max: MAX_AUDIT });
    }
    let mut hi = (T::neg_infinity(), 0u64, 1usize);
    let mut lo = (T::infinity(), 0u64, 1usize);
    for v in 0..(1u64 << n) {
        let z = BitSeries::from_index(v, n)?;
        let t = LikelihoodTables::new(chain, noise, &z)?;
        for i in 1..=n {
            let r = t.log_lr(i)?;
            if r > hi.0 {
                hi = (r, v, i);
            }
            if r < lo.0 {
                lo = (r, v, i);
            }
        }
    }
    Ok(ExhaustiveLr {
        max_log_lr: hi.0,
        argmax_z: BitSeries::from_index(hi.1, n)?,
        argmax_i: hi.2,
        min_log_lr: lo.0,
        argmin_z: BitSeries::from_index(lo.1, n)?,
        argmin_i: lo.2,
    })
}

/// Largest `|ln LR|` at one observation under the XOR mechanism, in linear
/// space (safe for the short series audited here).
fn correlated_observation_max(
    trans: &[[f64; 4]; 4],
    start: &[f64; 4],
    pi: [f64; 2],
    z: u64,
    n: usize,
    fwd: &mut [[f64; 4]],
    bwd: &mut [[f64; 4]],
) -> f64 {
    let zt = |t: usize| ((z >> t) & 1) as usize;
    let emits = |s: usize, b: usize| ((s >> 1) ^ (s & 1)) == b;
    for s in 0..4 {
        fwd[0][s] = if emits(s, zt(0)) { start[s] } else { 0.0 };
    }
    for t in 1..n {
        for s2 in 0..4 {
            fwd[t][s2] = if emits(s2, zt(t)) {
                (0..4).map(|s| fwd[t - 1][s] * trans[s][s2]).sum()
            } else {
                0.0
            };
        }
    }
    bwd[n - 1] = [1.0; 4];
    for t in (0..n - 1).rev() {
        for s in 0..4 {
            bwd[t][s] = (0..4)
                .filter(|&s2| emits(s2, zt(t + 1)))
                .map(|s2| trans[s][s2] * bwd[t + 1][s2])
                .sum();
        }
    }
    let mut best = 0.0f64;
    for t in 0..n {
        let l0 = (fwd[t][0] * bwd[t][0] + fwd[t][1] * bwd[t][1]) / pi[0];
        let l1 = (fwd[t][2] * bwd[t][2] + fwd[t][3] * bwd[t][3]) / pi[1];
        let r = (l0 / l1).ln().abs();
        if r.is_finite() {
            best = best.max(r);
        } else if !r.is_nan() {
            return f64::INFINITY;
        }
    }
    best
}

/// Largest `|ln LR|` over all observations and positions under the XOR
/// mechanism: the loss of an adversary with no tuple knowledge.
pub fn correlated_max_log_lr(
    chain: &BinaryMarkovChain<f64>,
    noise: &CorrelatedNoiseChain<f64>,
    n: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if n > MAX_CORRELATED_AUDIT {
        return Err(Error::SizeLimit {
            n,
            max: MAX_CORRELATED_AUDIT,
        });
    }
    let pi = chain.stationary()?;
    let pb = noise.stationary();
    let mut trans = [[0.0; 4]; 4];
    let mut start = [0.0; 4];
    for s in 0..4 {
        let (x, y) = ((s >> 1) as u8, (s & 1) as u8);
        start[s] = pi[x as usize] * pb[y as usize];
        for s2 in 0..4 {
            let (x2, y2) = ((s2 >> 1) as u8, (s2 & 1) as u8);
            trans[s][s2] = chain.transition(x, x2) * noise.transition(y, y2);
        }
    }
    let best = (0..(1u64 << n))
        .into_par_iter()
        .map_init(
            || (vec![[0.0; 4]; n], vec![[0.0; 4]; n]),
            |(fwd, bwd), z| correlated_observation_max(&trans, &start, pi, z, n, fwd, bwd),
        )
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Result of [`optimal_correlated_noise`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedSearch {
    pub noise: CorrelatedNoiseChain<f64>,
    /// Per-bit flip probability `rho0/(rho0+rho1)`.
    pub flip: f64,
    pub log_loss: f64,
}

/// Searches the correlated noise chains satisfying `theta < rho0 < rho1`,
/// `rho0 + rho1 <= 1` for the smallest per-bit flip probability whose
/// exhaustive loss at length `n` is at most `target_log_loss`.
///
/// The chain is parameterized by `s = rho0 + rho1` (scanned over
/// `(2 theta, 1]`) and the flip `f = rho0/s`; for each `s` the smallest
/// feasible `f` is bracketed by a scan from `f = 1/2` downward and refined by
/// bisection.
pub fn optimal_correlated_noise(theta: f64, target_log_loss: f64, n: usize) -> Result<CorrelatedSearch> {
    const S_POINTS: usize = 24;
    const F_POINTS: usize = 32;
    let chain = BinaryMarkovChain::symmetric(theta)?;
    chain.require_interior()?;
    let loss = |f: f64, s: f64| -> Option<f64> {
        let noise = CorrelatedNoiseChain::new(f * s, (1.0 - f) * s).ok()?;
        if noise.rho0() <= theta {
            return None;
        }
        correlated_max_log_lr(&chain, &noise, n).ok()
    };
    let ok = |f: f64, s: f64| loss(f, s).is_some_and(|l| l <= target_log_loss);

    let mut best: Option<(f64, f64)> = None;
    for j in 1..=S_POINTS {
        let s = 2.0 * theta + (1.0 - 2.0 * theta) * j as f64 / S_POINTS as f64;
        let f_min = theta / s;
        let f_max = 0.5 - 1e-9;
        if f_min >= f_max || !ok(f_max, s) {
            continue;
        }
        // Scan downward until the first infeasible point.
        let mut hi = f_max;
        let mut lo = f_min;
        for k in 1..=F_POINTS {
            let f = f_max - (f_max - f_min) * k as f64 / F_POINTS as f64;
            if f > f_min && ok(f, s) {
                hi = f;
            } else {
                lo = f;
                break;
            }
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if ok(mid, s) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if best.is_none_or(|(bf, _)| hi < bf) {
            best = Some((hi, s));
        }
    }
    let (f, s) = best.ok_or_else(|| Error::Config("no correlated noise chain meets the target".into()))?;
    let noise = CorrelatedNoiseChain::new(f * s, (1.0 - f) * s)?;
    Ok(CorrelatedSearch {
        noise,
        flip: f,
        log_loss: correlated_max_log_lr(&chain, &noise, n)?,
    })
}
