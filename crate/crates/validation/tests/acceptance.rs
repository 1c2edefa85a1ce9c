//! Acceptance suite: one verdict line per criterion, with the measured
//! numbers behind it. Exits non-zero if any criterion fails.
//!
//! Lines tagged `info` are supplementary measurements and never affect the
//! exit status.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use bdp_markov::calculus::{
    adjacent_to_target_run, argmax_index, bdpl_adversary, bdpl_aligned, calibrate_asymmetric,
    calibrate_symmetric_exact, exhaustive_lr, h_profile, log_lr_bound, lr_bound, lr_bound_symmetric, Adversary,
    PrivacyBudget,
};
use bdp_markov::chain::BinaryMarkovChain;
use bdp_markov::experiment::{
    eps_grid, run_correlated_check, run_dp_insufficiency, run_noise_privacy_comparison, run_reconstruction_vs_bound,
    DataSource, ExperimentConfig,
};
use bdp_markov::hmm::oracle::brute_force_likelihood;
use bdp_markov::hmm::LikelihoodTables;
use bdp_markov::sanitizer::NoiseParams;
use bdp_markov::{BitSeries, RandomSeed};

type Model = (BinaryMarkovChain<f64>, NoiseParams<f64>);

fn eps(v: f64) -> PrivacyBudget<f64> {
    PrivacyBudget::new(v).unwrap()
}

/// Parameters drawn uniformly from (0.01, 0.49).
fn draw(rng: &mut ChaCha20Rng) -> Model {
    let mut p = || rng.gen_range(0.01..0.49);
    let (q, r, r0, r1) = (p(), p(), p(), p());
    (BinaryMarkovChain::new(q, r).unwrap(), NoiseParams::new(r0, r1).unwrap())
}

#[derive(Default)]
struct Verdicts {
    failed: Vec<&'static str>,
    total: usize,
}

impl Verdicts {
    fn record(&mut self, name: &'static str, pass: bool, elapsed: Duration, budget: Option<Duration>, detail: String) {
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let ok = pass && in_time;
        let timing = match budget {
            Some(b) => format!("{:.1}s / {}s", elapsed.as_secs_f64(), b.as_secs()),
            None => format!("{:.1}s", elapsed.as_secs_f64()),
        };
        println!("{} {name}: {detail} [{timing}]", if ok { "PASS" } else { "FAIL" });
        self.total += 1;
        if !ok {
            self.failed.push(name);
        }
    }
}

fn info(name: &str, detail: String) {
    println!("info {name}: {detail}");
}

fn oracle_equivalence(v: &mut Verdicts) {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(0x0a11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (c, b) = draw(&mut rng);
        let n = rng.gen_range(1..=12);
        let z = BitSeries::new((0..n).map(|_| rng.gen_range(0..2u8)).collect()).unwrap();
        let t = LikelihoodTables::new(&c, &b, &z).unwrap();
        for i in 1..=n {
            for x in 0..2 {
                let fb = t.log_likelihood(i, x).unwrap().exp();
                let bf = brute_force_likelihood(&c, &b, &z, i, x).unwrap().exp();
                worst = worst.max((fb - bf).abs() / bf);
            }
        }
    }
    v.record(
        "oracle-equivalence",
        worst <= 1e-10,
        start.elapsed(),
        Some(Duration::from_secs(10)),
        format!("100 instances, n <= 12, max relative error {worst:.2e} (tol 1e-10)"),
    );
}

fn lr_bound_tightness(v: &mut Verdicts) {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(0x7e01);
    let (mut sound, mut zeros, mut index, mut tight) = (0, 0, 0, 0);
    let mut worst_gap = 0.0f64;
    let mut worst_index = 0i64;
    for _ in 0..50 {
        let (c, b) = draw(&mut rng);
        let (b0, b1) = log_lr_bound(&c, &b).unwrap();
        let ex = exhaustive_lr(&c, &b, 12).unwrap();
        if ex.max_log_lr <= b0 + 1e-12 && -ex.min_log_lr <= b1 + 1e-12 {
            sound += 1;
        }
        if ex.argmax_z == BitSeries::zeros(12).unwrap() && ex.argmin_z == BitSeries::ones(12).unwrap() {
            zeros += 1;
        }
        let (i_star, _) = argmax_index(&c, &b, 12).unwrap();
        let off = (ex.argmax_i as i64 - i_star as i64).abs();
        worst_index = worst_index.max(off);
        if off <= 1 {
            index += 1;
        }

        let (i30, _) = argmax_index(&c, &b, 30).unwrap();
        let t = LikelihoodTables::new(&c, &b, &BitSeries::zeros(30).unwrap()).unwrap();
        let lr = t.log_lr(i30).unwrap().exp();
        let bound = b0.exp();
        let gap = 1.0 - lr / bound;
        worst_gap = worst_gap.max(gap);
        if lr >= bound * (1.0 - 1e-6) {
            tight += 1;
        }
    }
    v.record(
        "likelihood-ratio-bound",
        sound == 50 && zeros == 50 && index == 50 && tight == 50,
        start.elapsed(),
        Some(Duration::from_secs(120)),
        format!(
            "50 draws: n=12 sup LR <= bound {sound}/50, argmax z = 0 {zeros}/50, \
             argmax i within 1 {index}/50 (worst offset {worst_index}); \
             n=30 LR(0, i*) >= bound(1 - 1e-6) {tight}/50 (worst relative gap {worst_gap:.2e})"
        ),
    );
}

/// Monotonicity checks for one loss function over every adversary at `n`.
struct Monotonicity {
    not_max_at_empty: usize,
    adjacent_not_increasing: usize,
    distant_changed: usize,
    removals: usize,
}

fn monotonicity(models: &[Model], n: usize, loss: impl Fn(&Model, &Adversary) -> f64) -> Monotonicity {
    let mut m = Monotonicity {
        not_max_at_empty: 0,
        adjacent_not_increasing: 0,
        distant_changed: 0,
        removals: 0,
    };
    for model in models {
        for target in 1..=n {
            let others: Vec<usize> = (1..=n).filter(|&j| j != target).collect();
            let mut values: HashMap<u32, f64> = HashMap::new();
            let adversary = |mask: u32| {
                let known = others
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &j)| j);
                Adversary::new(n, target, known).unwrap()
            };
            for mask in 0..(1u32 << others.len()) {
                values.insert(mask, loss(model, &adversary(mask)));
            }
            let empty = values[&0];
            for (&mask, &val) in &values {
                if val > empty + 1e-10 * empty.abs().max(1.0) {
                    m.not_max_at_empty += 1;
                }
                let a = adversary(mask);
                for (k, &j) in others.iter().enumerate() {
                    if mask >> k & 1 == 0 {
                        continue;
                    }
                    m.removals += 1;
                    let diff = values[&(mask & !(1 << k))] - val;
                    if adjacent_to_target_run(&a, j) {
                        if diff <= 1e-10 {
                            m.adjacent_not_increasing += 1;
                        }
                    } else if diff.abs() > 1e-10 {
                        m.distant_changed += 1;
                    }
                }
            }
        }
    }
    m
}

fn adversary_monotonicity(v: &mut Verdicts) {
    let start = Instant::now();
    let n = 8;
    let models: Vec<Model> = [
        (0.1, 0.1, 0.2, 0.2),
        (0.25, 0.25, 0.15, 0.15),
        (0.4, 0.4, 0.3, 0.3),
        (0.2, 0.35, 0.15, 0.3),
    ]
    .iter()
    .map(|&(q, r, r0, r1)| (BinaryMarkovChain::new(q, r).unwrap(), NoiseParams::new(r0, r1).unwrap()))
    .collect();

    let grid: Vec<f64> = (1..=9).map(|k| 0.05 * k as f64).collect();
    let mut h_violations = 0;
    for &theta in &grid {
        for &rho in &grid {
            let p = h_profile(theta, rho, 100).unwrap();
            h_violations += p.h.windows(2).filter(|w| w[1] < w[0] * (1.0 - 1e-12)).count();
        }
    }

    let literal = monotonicity(&models, n, |(c, b), a| bdpl_adversary(c, b, a).unwrap().log_value);
    let literal_time = start.elapsed();
    let aligned = monotonicity(&models, n, |(c, b), a| bdpl_aligned(c, b, a).unwrap());
    let summary = |m: &Monotonicity| {
        format!(
            "{} removals: K=∅ not maximal {}, adjacent removal not increasing {}, \
             distant removal changed {}",
            m.removals, m.not_max_at_empty, m.adjacent_not_increasing, m.distant_changed
        )
    };
    let clean = |m: &Monotonicity| m.not_max_at_empty + m.adjacent_not_increasing + m.distant_changed == 0;
    v.record(
        "adversary-monotonicity",
        clean(&literal) && h_violations == 0,
        literal_time,
        Some(Duration::from_secs(300)),
        format!(
            "n=8, 4 models, sup over (x_i, x_K, z): {}; h(k) decreases on 9x9 grid, k <= 100: {h_violations}",
            summary(&literal)
        ),
    );
    info(
        "adversary-monotonicity-aligned",
        format!(
            "{} with z, x_K, x_i aligned: {} ({:.1}s)",
            if clean(&aligned) { "holds" } else { "violated" },
            summary(&aligned),
            (start.elapsed() - literal_time).as_secs_f64()
        ),
    );
}

fn dp_insufficiency(v: &mut Verdicts) {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        thetas: vec![0.0, 0.05, 0.09, 0.185, 0.285, 0.385, 0.475],
        eps: vec![0.5],
        n: 30,
        databases: 100,
        sanitizations: 1000,
        seed: RandomSeed(20_190_101),
    };
    let res = run_dp_insufficiency(&cfg).unwrap();
    let sb_ok = res.rows.iter().all(|r| r.sb_success <= 0.622 + 3.0 * r.sb_std_error);
    let worst_sb = res
        .rows
        .iter()
        .map(|r| (r.sb_success - 0.622) / r.sb_std_error)
        .fold(f64::NEG_INFINITY, f64::max);
    let row = |theta: f64| res.rows.iter().find(|r| r.theta == theta).unwrap();
    let ca05 = row(0.05).ca_charged.unwrap_or(f64::INFINITY);
    let near = row(0.475);
    let near_gap = (near.ca_success - near.sb_success).abs();
    v.record(
        "dp-insufficiency",
        sb_ok && ca05 > 1.0 && near_gap <= 3.0 * near.sb_std_error,
        start.elapsed(),
        Some(Duration::from_secs(300)),
        format!(
            "rho={:.6}, 100x1000: SB <= 0.622 + 3SE at all 7 thetas: {sb_ok} (max {worst_sb:+.2} SE); \
             CA charged eps at theta=0.05: {ca05:.4} (> 1.0); theta=0.475 |CA-SB| = {near_gap:.5} \
             (3SE = {:.5})",
            res.rho,
            3.0 * near.sb_std_error
        ),
    );
    let exceed: Vec<String> = res
        .rows
        .iter()
        .filter(|r| r.theta <= 0.1)
        .map(|r| format!("theta={} {:+.1} SE", r.theta, (r.ca_success - 0.622) / r.ca_std_error))
        .collect();
    info("dp-insufficiency-ca-excess", exceed.join(", "));
}

fn noise_comparison(v: &mut Verdicts) {
    let start = Instant::now();
    let table = run_noise_privacy_comparison(&ExperimentConfig::noise_comparison()).unwrap();
    let mut ordered = 0;
    for row in table.rows() {
        if let (Some(z), Some(cf), Some(ex)) = (row[1], row[2], row[3]) {
            if ex < cf && cf < z {
                ordered += 1;
            }
        }
    }
    let rows = table.rows().len();
    v.record(
        "noise-comparison",
        ordered == rows && rows == 13,
        start.elapsed(),
        Some(Duration::from_secs(60)),
        format!("theta=0.35, n=30, eps in [1,4] step 0.25: exact < closed form < eps6 at {ordered}/{rows} rows"),
    );
}

fn calibration(v: &mut Verdicts) {
    let start = Instant::now();
    let thetas: Vec<f64> = (1..=9).map(|k| 0.05 * k as f64).collect();
    let budgets = eps_grid(0.25, 4.0, 0.25);
    let mut worst_round_trip = 0.0f64;
    for &t in &thetas {
        for &e in &budgets {
            let rho = calibrate_symmetric_exact(t, eps(e)).unwrap();
            let bound = lr_bound_symmetric(t, rho).unwrap();
            worst_round_trip = worst_round_trip.max((bound - e.exp()).abs() / e.exp());
        }
    }

    let c = BinaryMarkovChain::new(0.2, 0.35).unwrap();
    let mut in_region = true;
    let mut points = Vec::new();
    for e in [0.5, 2.0] {
        let cal = calibrate_asymmetric(&c, eps(e)).unwrap();
        let (b0, b1) = lr_bound(&c, &cal.noise).unwrap();
        in_region &= b0 <= e.exp() + 1e-9 && b1 <= e.exp() + 1e-9;
        points.push(format!("eps={e}: ({:.5}, {:.5})", cal.noise.rho0(), cal.noise.rho1()));
    }

    let mut worst_sym = 0.0f64;
    for &t in &[0.1, 0.2, 0.3, 0.4] {
        for &e in &[0.5, 1.0, 2.0, 4.0] {
            let exact = calibrate_symmetric_exact(t, eps(e)).unwrap();
            let cal = calibrate_asymmetric(&BinaryMarkovChain::symmetric(t).unwrap(), eps(e)).unwrap();
            worst_sym = worst_sym
                .max((cal.noise.rho0() - exact).abs())
                .max((cal.noise.rho1() - exact).abs());
        }
    }
    v.record(
        "calibration",
        worst_round_trip <= 1e-6 && in_region && worst_sym <= 1e-5,
        start.elapsed(),
        None,
        format!(
            "round trip on 9x16 grid max rel err {worst_round_trip:.2e} (tol 1e-6); \
             q=0.2 r=0.35 feasible: {in_region} [{}]; q=r vs symmetric path max diff {worst_sym:.2e} (tol 1e-5)",
            points.join(", ")
        ),
    );
}

fn reconstruction(v: &mut Verdicts) {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        seed: RandomSeed(4),
        ..ExperimentConfig::reconstruction()
    };
    let mut all_ok = true;
    let mut parts = Vec::new();
    let mut accuracies = Vec::new();
    for &(q, r, n) in &[(0.0893, 0.1092, 26923), (0.2384, 0.3831, 16859)] {
        let source = DataSource::Synthetic {
            chain: BinaryMarkovChain::new(q, r).unwrap(),
            n,
        };
        let res = run_reconstruction_vs_bound(&cfg, &source, None).unwrap();
        let ok = res
            .rows
            .iter()
            .filter(|row| row.viterbi_accuracy <= row.bdp_bound + 3.0 * row.std_error)
            .count();
        let margin = res
            .rows
            .iter()
            .map(|row| row.bdp_bound - row.viterbi_accuracy)
            .fold(f64::INFINITY, f64::min);
        all_ok &= ok == res.rows.len();
        parts.push(format!(
            "(q={q}, r={r}, n={n}) {ok}/{} eps below bound + 3SE (min margin {margin:.4})",
            res.rows.len()
        ));
        accuracies.push(res.rows.iter().map(|row| row.viterbi_accuracy).collect::<Vec<_>>());
    }
    v.record(
        "reconstruction-vs-bound",
        all_ok,
        start.elapsed(),
        Some(Duration::from_secs(300)),
        parts.join("; "),
    );
    let lower = accuracies[0].iter().zip(&accuracies[1]).filter(|(a, b)| a < b).count();
    info(
        "reconstruction-correlation-order",
        format!(
            "more correlated chain has lower accuracy at {lower}/{} budgets",
            accuracies[0].len()
        ),
    );
}

fn correlated_noise(v: &mut Verdicts) {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        thetas: vec![0.3],
        eps: vec![0.5, 1.0],
        n: 10,
        ..ExperimentConfig::noise_comparison()
    };
    let (rows, _) = run_correlated_check(&cfg).unwrap();
    let detail: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "eps={}: independent {:.5}, correlated {:.5} (rho0={:.4}, rho1={:.4}), gap {:.2e}",
                r.eps,
                r.rho_independent,
                r.rho_correlated,
                r.rho0,
                r.rho1,
                r.gap()
            )
        })
        .collect();
    v.record(
        "correlated-noise",
        rows.iter().all(|r| r.gap() <= 1e-2),
        start.elapsed(),
        None,
        format!("theta=0.3, n=10: {}", detail.join("; ")),
    );
}

fn main() -> ExitCode {
    let mut v = Verdicts::default();
    oracle_equivalence(&mut v);
    lr_bound_tightness(&mut v);
    adversary_monotonicity(&mut v);
    dp_insufficiency(&mut v);
    noise_comparison(&mut v);
    calibration(&mut v);
    reconstruction(&mut v);
    correlated_noise(&mut v);
    println!(
        "acceptance: {}/{} criteria pass{}",
        v.total - v.failed.len(),
        v.total,
        if v.failed.is_empty() {
            String::new()
        } else {
            format!("; failing: {}", v.failed.join(", "))
        }
    );
    if v.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
