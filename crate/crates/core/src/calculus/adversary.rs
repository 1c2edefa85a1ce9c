//! Adversaries with partial knowledge of the database.
//!
//! An adversary targets position `i` and knows the exact values at the
//! positions in `K`. Its loss is the largest ratio
//! `Pr[Z = z | X_i = x, X_K = x_K] / Pr[Z = z | X_i = x', X_K = x_K]`
//! over `x != x'`, `x_K` and `z`.

use std::collections::BTreeSet;

use crate::chain::{BinaryMarkovChain, BitSeries};
use crate::error::{Error, Result};
use crate::sanitizer::NoiseParams;
use crate::scalar::{ln, Scalar};

use super::require_open;

pub const MAX_EXHAUSTIVE: usize = 12;

/// Target position `i` and known positions `K` (1-based) in a series of
/// length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Adversary {
    n: usize,
    target: usize,
    known: BTreeSet<usize>,
}

impl Adversary {
    pub fn new(n: usize, target: usize, known: impl IntoIterator<Item = usize>) -> Result<Self> {
        if target == 0 || target > n {
            return Err(Error::IndexOutOfRange {
                position: target,
                len: n,
            });
        }
        let known: BTreeSet<usize> = known.into_iter().collect();
        if let Some(&j) = known.iter().find(|&&j| j == 0 || j > n) {
            return Err(Error::IndexOutOfRange { position: j, len: n });
        }
        if known.contains(&target) {
            return Err(Error::Adversary(format!("target {target} is also a known position")));
        }
        Ok(Adversary { n, target, known })
    }

    /// The adversary that knows every other position.
    pub fn informed(n: usize, target: usize) -> Result<Self> {
        Self::new(n, target, (1..=n).filter(|&j| j != target))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn known(&self) -> &BTreeSet<usize> {
        &self.known
    }

    /// The same adversary without knowledge of position `j`.
    pub fn forget(&self, j: usize) -> Self {
        let mut known = self.known.clone();
        known.remove(&j);
        Adversary {
            n: self.n,
            target: self.target,
            known,
        }
    }

    /// The maximal run of unknown positions containing the target.
    pub fn target_run(&self) -> (usize, usize) {
        let mut lo = self.target;
        while lo > 1 && !self.known.contains(&(lo - 1)) {
            lo -= 1;
        }
        let mut hi = self.target;
        while hi < self.n && !self.known.contains(&(hi + 1)) {
            hi += 1;
        }
        (lo, hi)
    }
}

/// `true` when known position `j` borders the unknown run containing the
/// target, i.e. forgetting `j` lengthens that run.
pub fn adjacent_to_target_run(adversary: &Adversary, j: usize) -> bool {
    let (lo, hi) = adversary.target_run();
    j + 1 == lo || j == hi + 1
}

/// Exhaustive loss of one adversary together with an assignment attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Bdpl<T> {
    pub log_value: T,
    /// Target value in the numerator of the maximizing ratio.
    pub target_value: u8,
    /// Known values in ascending position order.
    pub known_values: Vec<u8>,
    pub z: BitSeries,
}

fn chain_weight<T: Scalar>(chain: &BinaryMarkovChain<T>, pi: [T; 2], x: &[u8]) -> T {
    x.windows(2)
        .fold(pi[x[0] as usize], |w, p| w * chain.transition(p[0], p[1]))
}

/// Writes `e[z] = prod_t B(x_t, z_t)` for every `z`, with bit `t` of the
/// index holding position `t + 1`.
fn emission_vector<T: Scalar>(noise: &NoiseParams<T>, x: &[u8], e: &mut [T]) {
    e[0] = T::one();
    let mut len = 1;
    for &xt in x {
        let (b0, b1) = (noise.emission(xt, 0), noise.emission(xt, 1));
        for j in 0..len {
            e[j + len] = e[j] * b1;
            e[j] = e[j] * b0;
        }
        len *= 2;
    }
}

/// Scatters the bits of `pattern` over `positions` (0-based) of `x`.
fn assign(x: &mut [u8], positions: &[usize], pattern: u64) {
    for (k, &p) in positions.iter().enumerate() {
        x[p] = ((pattern >> k) & 1) as u8;
    }
}

/// The exact loss of `adversary` by enumeration over all hidden sequences
/// and observations. Requires `n <= 12`.
pub fn bdpl_adversary<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    adversary: &Adversary,
) -> Result<Bdpl<T>> {
    let n = adversary.len();
    if n > MAX_EXHAUSTIVE {
        return Err(Error::SizeLimit { n, max: MAX_EXHAUSTIVE });
    }
    let pi = chain.stationary()?;
    let target = adversary.target() - 1;
    let known: Vec<usize> = adversary.known().iter().map(|&j| j - 1).collect();
    let free: Vec<usize> = (0..n)
        .filter(|&t| t != target && !adversary.known().contains(&(t + 1)))
        .collect();
    let nz = 1usize << n;

    let mut best: Option<(T, u8, u64, usize)> = None;
    let mut lik = [vec![T::zero(); nz], vec![T::zero(); nz]];
    let mut e = vec![T::zero(); nz];
    let mut x = vec![0u8; n];
    let tol = T::lit(1e-12);

    for kp in 0..(1u64 << known.len()) {
        assign(&mut x, &known, kp);
        let mut mass = [T::zero(); 2];
        for l in lik.iter_mut() {
            l.iter_mut().for_each(|v| *v = T::zero());
        }
        for xi in 0..2u8 {
            x[target] = xi;
            for up in 0..(1u64 << free.len()) {
                assign(&mut x, &free, up);
                let w = chain_weight(chain, pi, &x);
                if w == T::zero() {
                    continue;
                }
                mass[xi as usize] = mass[xi as usize] + w;
                emission_vector(noise, &x, &mut e);
                for (l, &ej) in lik[xi as usize].iter_mut().zip(&e) {
                    *l = *l + w * ej;
                }
            }
        }
        if mass[0] == T::zero() || mass[1] == T::zero() {
            continue;
        }
        let offset = mass[1].ln() - mass[0].ln();
        for zi in 0..nz {
            let r = ln(lik[0][zi]) - ln(lik[1][zi]) + offset;
            if r.is_nan() {
                continue;
            }
            let (v, xi) = if r >= T::zero() { (r, 0) } else { (-r, 1) };
            let better = match best {
                None => true,
                Some((b, ..)) => v - b > tol * b.abs().max(T::one()),
            };
            if better {
                best = Some((v, xi, kp, zi));
            }
        }
    }
    let (log_value, target_value, kp, zi) =
        best.ok_or_else(|| Error::Adversary("no assignment has positive probability".into()))?;
    Ok(Bdpl {
        log_value,
        target_value,
        known_values: (0..known.len()).map(|k| ((kp >> k) & 1) as u8).collect(),
        z: BitSeries::from_index(zi as u64, n)?,
    })
}

/// The loss restricted to aligned assignments: `z`, the known values and the
/// numerator target value all equal to a common bit `v`, maximized over `v`.
/// This is the quantity whose monotonicity in `K` the proof establishes.
pub fn bdpl_aligned<T: Scalar>(
    chain: &BinaryMarkovChain<T>,
    noise: &NoiseParams<T>,
    adversary: &Adversary,
) -> Result<T> {
    let n = adversary.len();
    if n > 24 {
        return Err(Error::SizeLimit { n, max: 24 });
    }
    let pi = chain.stationary()?;
    let target = adversary.target() - 1;
    let known: Vec<usize> = adversary.known().iter().map(|&j| j - 1).collect();
    let free: Vec<usize> = (0..n)
        .filter(|&t| t != target && !adversary.known().contains(&(t + 1)))
        .collect();
    let mut x = vec![0u8; n];
    let mut best = T::neg_infinity();
    for v in 0..2u8 {
        for &k in &known {
            x[k] = v;
        }
        let mut cond = [T::zero(); 2];
        let mut mass = [T::zero(); 2];
        for xi in 0..2u8 {
            x[target] = xi;
            for up in 0..(1u64 << free.len()) {
                assign(&mut x, &free, up);
                let w = chain_weight(chain, pi, &x);
                let em = x.iter().fold(T::one(), |acc, &xt| acc * noise.emission(xt, v));
                mass[xi as usize] = mass[xi as usize] + w;
                cond[xi as usize] = cond[xi as usize] + w * em;
            }
        }
        let (num, den) = (v as usize, 1 - v as usize);
        let r = ln(cond[num]) - ln(mass[num]) - ln(cond[den]) + ln(mass[den]);
        best = best.max(r);
    }
    Ok(best)
}

/// Tabulated `f(k)`, `g(k)` and `h(k) = f(k) g(k)` for `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct HProfile<T> {
    pub f: Vec<T>,
    pub g: Vec<T>,
    pub h: Vec<T>,
}

/// The profile that governs how the loss grows with the number `k` of
/// unknown tuples next to the target (symmetric chain and noise).
///
/// `a, b, c` are the eigenvector entries of the recurrence
/// `gamma_k = [[(1-theta)(1-rho), theta rho], [theta(1-rho), (1-theta) rho]] gamma_{k-1}`
/// and `l = lambda2/lambda1` its eigenvalue ratio. The eigenvalues use the
/// discriminant `theta^2 + (1-2theta)(1-2rho)^2` of that matrix.
pub fn h_profile<T: Scalar>(theta: T, rho: T, k_max: usize) -> Result<HProfile<T>> {
    require_open("theta", theta)?;
    require_open("rho", rho)?;
    if k_max < 1 {
        return Err(Error::domain("k_max", k_max as f64, "[1, inf)"));
    }
    let (one, two) = (T::one(), T::lit(2.0));
    let s = one - two * rho;
    let disc = (theta * theta + (one - two * theta) * s * s).sqrt();
    let a = disc + (one - theta) * s;
    let b = -T::lit(4.0) * theta * theta * rho * (one - rho) / a;
    let c = two * theta * (one - rho);
    let lambda1 = (one - theta + disc) / two;
    let lambda2 = rho * (one - rho) * (one - two * theta) / lambda1;
    let l = lambda2 / lambda1;
    let decay = one - two * theta;

    let mut out = HProfile {
        f: Vec::with_capacity(k_max + 1),
        g: Vec::with_capacity(k_max + 1),
        h: Vec::with_capacity(k_max + 1),
    };
    for k in 0..=k_max {
        let dk = decay.powi(k as i32 + 1);
        let f = (one - dk) / (one + dk);
        let lk = l.powi(k as i32);
        let g = (a * (c * (one - theta) - b * theta) + b * lk * (a * theta - c * (one - theta)))
            / (a * (c * theta - b * (one - theta)) + b * lk * (a * (one - theta) - c * theta));
        out.f.push(f);
        out.g.push(g);
        out.h.push(f * g);
    }
    Ok(out)
}
