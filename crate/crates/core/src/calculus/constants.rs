//! Closed forms for the all-zero observation.
//!
//! With `z = 0` the forward recurrence is linear with matrix
//! `M = diag(1-rho0, rho1) P`. Its eigenvalues are `lambda1 > lambda2 > 0`
//! and the eigenvectors give the constants `a, b, c, d` below; the ratios
//! `alpha_i(0)/alpha_i(1)` and `beta_i(0)/beta_i(1)` are then explicit
//! functions of `sigma^i` and `sigma^(n-i)`.

use crate::chain::{check_position, BinaryMarkovChain};
use crate::error::Result;
use crate::sanitizer::NoiseParams;
use crate::scalar::Scalar;

use super::require_open;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormConstants<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub lambda1: T,
    pub lambda2: T,
    /// `lambda2 / lambda1`.
    pub sigma: T,
    /// `(a-d)(c-b) / ((a-c)(d-b))`.
    pub gamma: T,
}

impl<T: Scalar> ClosedFormConstants<T> {
    /// Requires `0 < q, r, rho0, rho1 < 0.5`.
    pub fn new(chain: &BinaryMarkovChain<T>, noise: &NoiseParams<T>) -> Result<Self> {
        let (q, r) = (chain.q(), chain.r());
        let (r0, r1) = (noise.rho0(), noise.rho1());
        require_open("q", q)?;
        require_open("r", r)?;
        require_open("rho0", r0)?;
        require_open("rho1", r1)?;
        Ok(Self::raw(q, r, r0, r1))
    }

    /// No validation; callers guarantee the parameters are in range.
    pub(crate) fn raw(q: T, r: T, r0: T, r1: T) -> Self {
        let one = T::one();
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let x = (one - r0) * (one - q);
        let y = r1 * (one - r);
        let k = q * r * (one - r0) * r1;
        let root = ((x - y) * (x - y) + four * k).sqrt();
        let a = x - y + root;
        // x - y - root, rewritten to avoid cancellation.
        let b = -four * k / a;
        let c = two * r * r1;
        let d = two * r * (one - r0);
        let lambda1 = (x + y + root) / two;
        let det = (one - r0) * r1 * (one - q - r);
        let lambda2 = det / lambda1;
        let sigma = lambda2 / lambda1;
        let gamma = (a - d) * (c - b) / ((a - c) * (d - b));
        ClosedFormConstants {
            a,
            b,
            c,
            d,
            lambda1,
            lambda2,
            sigma,
            gamma,
        }
    }

    /// `ln(a^2 / (c d))`, the supremum of the log likelihood ratio.
    pub fn log_limit(&self) -> T {
        T::lit(2.0) * self.a.ln() - self.c.ln() - self.d.ln()
    }

    /// `alpha_i(0)/alpha_i(1)` at `z = 0`.
    pub fn alpha_ratio(&self, i: usize) -> T {
        let s = self.sigma.powi(i as i32);
        let (a, b, c) = (self.a, self.b, self.c);
        (a * (c - b) + b * (a - c) * s) / (c * (c - b) + c * (a - c) * s)
    }

    /// `beta_i(0)/beta_i(1)` at `z = 0`, for a series of length `n`.
    pub fn beta_ratio(&self, i: usize, n: usize) -> T {
        let s = self.sigma.powi((n - i) as i32);
        let (a, b, d) = (self.a, self.b, self.d);
        (a * (d - b) + b * (a - d) * s) / (d * (d - b) + d * (a - d) * s)
    }
}

/// `(alpha_i(0)/alpha_i(1), beta_i(0)/beta_i(1))` at `z = 0`.
pub fn closed_form_ratios<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    i: usize,
    n: usize,
) -> Result<(T, T)> {
    check_position(i, n)?;
    let k = ClosedFormConstants::new(chain, noise)?;
    Ok((k.alpha_ratio(i), k.beta_ratio(i, n)))
}

/// Rounds the continuous maximizer `n/2 + ln(gamma)/(2 ln(sigma))`; exact
/// halves go toward `n/2` (down when the half sits on `n/2` itself), and the
/// result is clamped to `1..=n`.
pub(crate) fn round_argmax(center: f64, n: usize) -> usize {
    let half_n = n as f64 / 2.0;
    let fl = center.floor();
    let frac = center - fl;
    let rounded = if (frac - 0.5).abs() < 1e-9 {
        if fl + 0.5 >= half_n {
            fl
        } else {
            fl + 1.0
        }
    } else {
        center.round()
    };
    rounded.clamp(1.0, n as f64) as usize
}

/// Position maximizing the likelihood ratio at `z = 0` and the ratio there.
pub fn argmax_index<T: Scalar>(chain: &BinaryMarkovChain<T>, noise: &NoiseParams<T>, n: usize) -> Result<(usize, T)> {
    check_position(1, n)?;
    let k = ClosedFormConstants::new(chain, noise)?;
    let center = n as f64 / 2.0 + k.gamma.as_f64().ln() / (2.0 * k.sigma.as_f64().ln());
    let i = round_argmax(center, n);
    Ok((i, k.alpha_ratio(i) * k.beta_ratio(i, n)))
}
