//! Privacy-loss formulas, noise calibration and exhaustive audits.
//!
//! All budgets are in nats. Bounds are evaluated as logs so that large
//! budgets never materialize `e^eps`.

mod adversary;
mod audit;
mod bounds;
mod calibration;
mod constants;
mod zhao;

pub use adversary::{adjacent_to_target_run, bdpl_adversary, bdpl_aligned, h_profile, Adversary, Bdpl, HProfile};
pub use audit::{correlated_max_log_lr, exhaustive_lr, optimal_correlated_noise, CorrelatedSearch, ExhaustiveLr};
pub use bounds::{log_lr_bound, log_lr_bound_symmetric, lr_bound, lr_bound_symmetric, rho_sufficient_symmetric};
pub use calibration::{calibrate_asymmetric, calibrate_symmetric_exact, feasible, Calibration};
pub use constants::{argmax_index, closed_form_ratios, ClosedFormConstants};
pub use zhao::{zhao_eps3_noise, zhao_eps3_noise_unscaled, zhao_eps6_noise, ZhaoNoise};

use crate::chain::BinaryMarkovChain;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A privacy budget `eps > 0`, in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PrivacyBudget<T>(T);

impl<T: Scalar> PrivacyBudget<T> {
    pub fn new(eps: T) -> Result<Self> {
        if !(eps > T::zero() && eps.is_finite()) {
            return Err(Error::domain("eps", eps.as_f64(), "(0, inf)"));
        }
        Ok(PrivacyBudget(eps))
    }

    pub fn epsilon(&self) -> T {
        self.0
    }
}

/// Requires `0 < v < 0.5`.
pub(crate) fn require_open<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v < T::lit(0.5) {
        Ok(())
    } else {
        Err(Error::domain(name, v.as_f64(), "(0, 0.5)"))
    }
}

/// Symmetric flip probability giving `eps`-DP per bit: `1/(e^eps + 1)`.
pub fn dp_noise<T: Scalar>(eps: PrivacyBudget<T>) -> T {
    let e = (-eps.epsilon()).exp();
    e / (T::one() + e)
}

/// Success bound for guessing one bit under `eps`-DP: `e^eps/(1 + e^eps)`.
pub fn success_bound_dp<T: Scalar>(eps: PrivacyBudget<T>) -> T {
    T::one() / (T::one() + (-eps.epsilon()).exp())
}

/// Success bound under `eps`-BDP with a stationary prior:
/// `e^eps / (max(q/r, r/q) + e^eps)`.
pub fn success_bound_bdp<T: Scalar>(chain: &BinaryMarkovChain<T>, eps: PrivacyBudget<T>) -> Result<T> {
    chain.require_interior()?;
    let skew = (chain.q() / chain.r()).max(chain.r() / chain.q());
    Ok(T::one() / (T::one() + skew * (-eps.epsilon()).exp()))
}
