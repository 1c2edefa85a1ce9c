use crate::chain::BinaryMarkovChain;
use crate::error::Result;
use crate::sanitizer::NoiseParams;
use crate::scalar::Scalar;

use super::constants::ClosedFormConstants;
use super::{require_open, PrivacyBudget};

/// Unvalidated `(ln bound0, ln bound1)`.
pub(crate) fn log_bounds_raw<T: Scalar>(q: T, r: T, r0: T, r1: T) -> (T, T) {
    (
        ClosedFormConstants::raw(q, r, r0, r1).log_limit(),
        ClosedFormConstants::raw(r, q, r1, r0).log_limit(),
    )
}

/// Logs of the two likelihood-ratio suprema: `ln(a^2/(cd))` for
/// `Pr[z | X_i = 0] / Pr[z | X_i = 1]`, and the same expression with
/// `q <-> r`, `rho0 <-> rho1` for the reciprocal ratio.
pub fn log_lr_bound<T: Scalar>(chain: &BinaryMarkovChain<T>, noise: &NoiseParams<T>) -> Result<(T, T)> {
    ClosedFormConstants::new(chain, noise)?;
    Ok(log_bounds_raw(chain.q(), chain.r(), noise.rho0(), noise.rho1()))
}

pub fn lr_bound<T: Scalar>(chain: &BinaryMarkovChain<T>, noise: &NoiseParams<T>) -> Result<(T, T)> {
    let (b0, b1) = log_lr_bound(chain, noise)?;
    Ok((b0.exp(), b1.exp()))
}

pub(crate) fn log_symmetric_raw<T: Scalar>(theta: T, rho: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let s = one - two * rho;
    let a = (theta * theta + (one - two * theta) * s * s).sqrt() + (one - theta) * s;
    let c = two * theta * (one - rho);
    ((one - rho) / rho).ln() + two * (a.ln() - c.ln())
}

/// `ln(((1-rho)/rho) (a/c)^2)` for the symmetric chain `q = r = theta` with
/// symmetric noise `rho`.
pub fn log_lr_bound_symmetric<T: Scalar>(theta: T, rho: T) -> Result<T> {
    require_open("theta", theta)?;
    require_open("rho", rho)?;
    Ok(log_symmetric_raw(theta, rho))
}

pub fn lr_bound_symmetric<T: Scalar>(theta: T, rho: T) -> Result<T> {
    Ok(log_lr_bound_symmetric(theta, rho)?.exp())
}

/// Closed-form symmetric noise level that is sufficient for `eps`-BDP.
///
/// The printed expression is evaluated after rationalizing the numerator
/// and dividing through by `theta e^eps`, which keeps it accurate when
/// `e^eps` is large.
pub fn rho_sufficient_symmetric<T: Scalar>(theta: T, eps: PrivacyBudget<T>) -> Result<T> {
    require_open("theta", theta)?;
    let lit = T::lit;
    // w = 1 / (theta e^eps)
    let w = (-eps.epsilon()).exp() / theta;
    let two_minus = lit(2.0) - theta;
    let num = w * (lit(4.0) * two_minus * two_minus * w + lit(4.0) * theta);
    let root = (theta * theta + theta * (lit(4.0) - lit(4.0) * theta) * w).sqrt();
    let den = (theta + lit(2.0) * two_minus * w + root) * (lit(2.0) * theta + lit(2.0) * two_minus * two_minus * w);
    Ok(num / den)
}
