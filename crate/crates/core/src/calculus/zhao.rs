//! Noise levels obtained by converting a BDP budget into a plain DP budget
//! through group-privacy style reductions for correlated records.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{dp_noise, require_open, PrivacyBudget};

/// Outcome of a budget reduction: either an effective DP budget with its
/// noise level, or a regime where the reduction leaves no positive budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZhaoNoise<T> {
    Noise { effective_eps: T, rho: T },
    Undefined { effective_eps: T },
}

impl<T: Scalar> ZhaoNoise<T> {
    pub fn rho(&self) -> Option<T> {
        match *self {
            ZhaoNoise::Noise { rho, .. } => Some(rho),
            ZhaoNoise::Undefined { .. } => None,
        }
    }

    pub fn effective_eps(&self) -> T {
        match *self {
            ZhaoNoise::Noise { effective_eps, .. } | ZhaoNoise::Undefined { effective_eps } => effective_eps,
        }
    }
}

fn eps3<T: Scalar>(theta: T, eps: PrivacyBudget<T>) -> Result<T> {
    require_open("theta", theta)?;
    Ok(eps.epsilon() - T::lit(6.0) * ((T::one() - theta) / theta).ln())
}

/// `rho = 2 (1-theta)^6 / (theta^6 e^eps + (1-theta)^6)`, i.e.
/// `2 / (e^eps3 + 1)` with `eps3 = eps - 6 ln((1-theta)/theta)`, as printed.
/// Undefined when `eps3 <= 0`.
pub fn zhao_eps3_noise<T: Scalar>(theta: T, eps: PrivacyBudget<T>) -> Result<ZhaoNoise<T>> {
    let e3 = eps3(theta, eps)?;
    if e3 <= T::zero() {
        return Ok(ZhaoNoise::Undefined { effective_eps: e3 });
    }
    Ok(ZhaoNoise::Noise {
        effective_eps: e3,
        rho: T::lit(2.0) * dp_noise(PrivacyBudget(e3)),
    })
}

/// The same reduction substituted directly into `1/(e^eps3 + 1)`, without
/// the leading factor of 2.
pub fn zhao_eps3_noise_unscaled<T: Scalar>(theta: T, eps: PrivacyBudget<T>) -> Result<ZhaoNoise<T>> {
    let e3 = eps3(theta, eps)?;
    if e3 <= T::zero() {
        return Ok(ZhaoNoise::Undefined { effective_eps: e3 });
    }
    Ok(ZhaoNoise::Noise {
        effective_eps: e3,
        rho: dp_noise(PrivacyBudget(e3)),
    })
}

/// `eps6 = max_{1 <= t <= n/2} (eps - 6 ln((1+s^t)/(1-s^t))) / (2t - 1)` with
/// `s = 1 - 2 theta`, and `rho = 1/(e^eps6 + 1)`.
pub fn zhao_eps6_noise<T: Scalar>(theta: T, eps: PrivacyBudget<T>, n: usize) -> Result<ZhaoNoise<T>> {
    require_open("theta", theta)?;
    if n < 2 {
        return Err(Error::domain("n", n as f64, "[2, inf)"));
    }
    let s = T::one() - T::lit(2.0) * theta;
    let six = T::lit(6.0);
    let best = (1..=n / 2)
        .map(|t| {
            let st = s.powi(t as i32);
            let penalty = six * ((T::one() + st) / (T::one() - st)).ln();
            (eps.epsilon() - penalty) / T::lit((2 * t - 1) as f64)
        })
        .fold(T::neg_infinity(), T::max);
    if best <= T::zero() {
        return Ok(ZhaoNoise::Undefined { effective_eps: best });
    }
    Ok(ZhaoNoise::Noise {
        effective_eps: best,
        rho: dp_noise(PrivacyBudget(best)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(v: f64) -> PrivacyBudget<f64> {
        PrivacyBudget::new(v).unwrap()
    }

    #[test]
    fn eps3_printed_value() {
        let theta: f64 = 0.35;
        let z = zhao_eps3_noise(theta, eps(8.0)).unwrap();
        let e3 = 8.0 - 6.0 * (13.0f64 / 7.0).ln();
        assert!((z.effective_eps() - e3).abs() < 1e-14);
        let printed = 2.0 * (1.0 - theta).powi(6) / (theta.powi(6) * 8f64.exp() + (1.0 - theta).powi(6));
        assert!((z.rho().unwrap() - printed).abs() < 1e-14);
        let plain = zhao_eps3_noise_unscaled(theta, eps(8.0)).unwrap().rho().unwrap();
        assert!((2.0 * plain - printed).abs() < 1e-14);
    }

    #[test]
    fn eps3_undefined_regime() {
        assert!(matches!(
            zhao_eps3_noise(0.35, eps(1.0)).unwrap(),
            ZhaoNoise::Undefined { .. }
        ));
    }

    #[test]
    fn eps3_near_independent_limit() {
        let z = zhao_eps3_noise(0.5 - 1e-9, eps(2.0)).unwrap();
        assert!((z.effective_eps() - 2.0).abs() < 1e-7);
        assert!((z.rho().unwrap() - 2.0 / (2f64.exp() + 1.0)).abs() < 1e-7);
    }

    #[test]
    fn eps6_single_term_for_n_two() {
        let theta: f64 = 0.35;
        let z = zhao_eps6_noise(theta, eps(4.0), 2).unwrap();
        let want = 4.0 - 6.0 * (1.3f64 / 0.7).ln();
        assert!((z.effective_eps() - want).abs() < 1e-14);
        assert!(zhao_eps6_noise(theta, eps(4.0), 1).is_err());
    }

    #[test]
    fn eps6_never_exceeds_eps() {
        for &theta in &[0.05, 0.2, 0.35, 0.45] {
            for &e in &[0.5, 1.0, 4.0, 10.0] {
                let z = zhao_eps6_noise(theta, eps(e), 30).unwrap();
                assert!(z.effective_eps() <= e);
            }
        }
    }

    #[test]
    fn eps6_infeasible_signal() {
        let z = zhao_eps6_noise(0.05, eps(0.1), 30).unwrap();
        assert!(z.rho().is_none());
    }
}
