//! Noise calibration.
//!
//! Both likelihood-ratio bounds decrease as either flip probability grows
//! toward 1/2, so for a fixed `rho0` the feasible `rho1` form an interval
//! `[rho1_min(rho0), 1/2]` that bisection finds. The asymmetric problem
//! minimizes the expected noise along that boundary curve: a uniform scan
//! over `rho0` locates the basin and golden-section search refines it.

use crate::chain::BinaryMarkovChain;
use crate::error::{Error, Result};
use crate::sanitizer::NoiseParams;
use crate::scalar::Scalar;

use super::bounds::{log_bounds_raw, log_lr_bound, log_symmetric_raw};
use super::{require_open, PrivacyBudget};

const SCAN_POINTS: usize = 400;

/// Smallest `x` in `(lo, hi]` with `ok(x)`, assuming `ok` is monotone and
/// `ok(hi)` holds. Runs to floating-point resolution.
fn bisect_min_feasible(mut lo: f64, mut hi: f64, ok: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Smallest symmetric `rho` with `lr_bound_symmetric(theta, rho) <= e^eps`.
pub fn calibrate_symmetric_exact<T: Scalar>(theta: T, eps: PrivacyBudget<T>) -> Result<T> {
    require_open("theta", theta)?;
    let e = eps.epsilon();
    // Bisect in the scalar type itself so the f32 result is feasible in f32.
    let (mut lo, mut hi) = (T::zero(), T::lit(0.5));
    let two = T::lit(2.0);
    for _ in 0..200 {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if log_symmetric_raw(theta, mid) <= e {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// A calibrated noise setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration<T> {
    pub noise: NoiseParams<T>,
    /// `pi0 rho0 + pi1 rho1`.
    pub expected_noise: T,
    pub log_bounds: (T, T),
}

/// `true` when both likelihood-ratio bounds are at most `e^eps`.
pub fn feasible<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    eps: PrivacyBudget<T>,
) -> Result<bool> {
    let (b0, b1) = log_lr_bound(chain, noise)?;
    Ok(b0 <= eps.epsilon() && b1 <= eps.epsilon())
}

/// Minimizes the expected noise `pi0 rho0 + pi1 rho1` subject to both
/// likelihood-ratio bounds being at most `e^eps`.
pub fn calibrate_asymmetric<T: Scalar>(chain: &BinaryMarkovChain<T>, eps: PrivacyBudget<T>) -> Result<Calibration<T>> {
    require_open("q", chain.q())?;
    require_open("r", chain.r())?;
    let (q, r, e) = (chain.q().as_f64(), chain.r().as_f64(), eps.epsilon().as_f64());
    let pi = chain.stationary()?;
    let (pi0, pi1) = (pi[0].as_f64(), pi[1].as_f64());

    let ok = |r0: f64, r1: f64| {
        let (b0, b1) = log_bounds_raw(q, r, r0, r1);
        b0 <= e && b1 <= e
    };
    let rho1_min = |r0: f64| -> Option<f64> {
        if !ok(r0, 0.5) {
            return None;
        }
        Some(bisect_min_feasible(0.0, 0.5, |r1| ok(r0, r1)))
    };
    let objective = |r0: f64| rho1_min(r0).map(|r1| pi0 * r0 + pi1 * r1);

    let grid: Vec<f64> = (1..=SCAN_POINTS).map(|j| 0.5 * j as f64 / SCAN_POINTS as f64).collect();
    let (best_j, _) = grid
        .iter()
        .enumerate()
        .filter_map(|(j, &r0)| objective(r0).map(|v| (j, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Config("no feasible noise level found".into()))?;

    // Golden-section refinement on the bracket around the best scan point;
    // infeasible points count as +inf.
    let f = |r0: f64| objective(r0).unwrap_or(f64::INFINITY);
    let mut lo = if best_j == 0 { 0.0 } else { grid[best_j - 1] };
    let mut hi = grid[(best_j + 1).min(SCAN_POINTS - 1)];
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let mut candidates = vec![grid[best_j], x1, x2];
    candidates.retain(|&r0| r0 > 0.0 && r0 <= 0.5);
    let r0 = candidates
        .into_iter()
        .filter(|&r0| f(r0).is_finite())
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .expect("scan point is feasible");
    let r1 = rho1_min(r0).expect("feasible");

    let noise = NoiseParams::new(T::lit(r0), T::lit(r1))?;
    let (b0, b1) = log_bounds_raw(chain.q(), chain.r(), noise.rho0(), noise.rho1());
    Ok(Calibration {
        noise,
        expected_noise: noise.expected_noise(pi),
        log_bounds: (b0, b1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{lr_bound, lr_bound_symmetric, rho_sufficient_symmetric};

    fn eps(v: f64) -> PrivacyBudget<f64> {
        PrivacyBudget::new(v).unwrap()
    }

    #[test]
    fn symmetric_round_trip() {
        for &theta in &[0.05, 0.2, 0.35, 0.45] {
            for &e in &[0.25, 1.0, 2.5, 4.0] {
                let rho = calibrate_symmetric_exact(theta, eps(e)).unwrap();
                let b = lr_bound_symmetric(theta, rho).unwrap();
                assert!(b <= e.exp());
                assert!((b - e.exp()).abs() / e.exp() <= 1e-6);
            }
        }
    }

    #[test]
    fn large_budget_needs_little_noise() {
        assert!(calibrate_symmetric_exact(0.3, eps(20.0)).unwrap() < 0.01);
    }

    #[test]
    fn exact_below_closed_form() {
        for &theta in &[0.05, 0.25, 0.45] {
            for &e in &[0.25, 1.0, 4.0] {
                let x = calibrate_symmetric_exact(theta, eps(e)).unwrap();
                let s = rho_sufficient_symmetric(theta, eps(e)).unwrap();
                assert!(x <= s, "{theta} {e}: {x} > {s}");
            }
        }
    }

    #[test]
    fn asymmetric_reduces_to_symmetric() {
        let c = BinaryMarkovChain::symmetric(0.3).unwrap();
        let cal = calibrate_asymmetric(&c, eps(1.0)).unwrap();
        let rho = calibrate_symmetric_exact(0.3, eps(1.0)).unwrap();
        assert!((cal.noise.rho0() - rho).abs() < 1e-5);
        assert!((cal.noise.rho1() - rho).abs() < 1e-5);
    }

    #[test]
    fn asymmetric_is_feasible_and_on_boundary() {
        let c = BinaryMarkovChain::new(0.2, 0.35).unwrap();
        for &e in &[0.5, 2.0] {
            let cal = calibrate_asymmetric(&c, eps(e)).unwrap();
            let (b0, b1) = lr_bound(&c, &cal.noise).unwrap();
            assert!(b0 <= e.exp() + 1e-9 && b1 <= e.exp() + 1e-9);
            assert!(feasible(&c, &cal.noise, eps(e)).unwrap());
            // Shrinking rho1 slightly leaves the feasible set.
            let tighter = NoiseParams::new(cal.noise.rho0(), cal.noise.rho1() - 1e-6).unwrap();
            assert!(!feasible(&c, &tighter, eps(e)).unwrap());
        }
    }

    #[test]
    fn f32_calibration_is_feasible_in_f32() {
        let rho = calibrate_symmetric_exact(0.3f32, PrivacyBudget::new(1.0f32).unwrap()).unwrap();
        assert!(crate::calculus::log_lr_bound_symmetric(0.3f32, rho).unwrap() <= 1.0);
    }
}
