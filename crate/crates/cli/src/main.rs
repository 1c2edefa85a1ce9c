//! `bdp-markov`: calibrate, sanitize, audit and attack binary time series,
//! and regenerate the experiment tables.
//!
//! Exit status is 0 on success, 2 when an argument or input value is
//! invalid, and 1 for any other failure (typically I/O).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use bdp_markov::attack::Attacker;
use bdp_markov::calculus::{
    calibrate_asymmetric, calibrate_symmetric_exact, dp_noise, exhaustive_lr, log_lr_bound, rho_sufficient_symmetric,
    PrivacyBudget,
};
use bdp_markov::experiment::{
    self, eps_grid, feasible_region, read_lstm_accuracy, region_table, DataSource, ExperimentConfig,
};
use bdp_markov::io::{read_bits, read_real_series, write_bits};
use bdp_markov::sanitizer::sanitize_independent;
use bdp_markov::{binarize, estimate, Chain, Noise, RandomSeed};

/// Raised for inconsistent flag combinations; maps to exit status 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Usage(msg.into()).into())
}

#[derive(Parser, Debug)]
#[command(
    name = "bdp-markov",
    version,
    about = "Bayesian differential privacy for binary Markov chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the flip probability (or pair) meeting a budget.
    Calibrate(CalibrateArgs),
    /// Sanitize a bit series with independent per-bit flips.
    Sanitize(SanitizeArgs),
    /// Print both likelihood-ratio bounds for a chain and noise setting.
    Audit(AuditArgs),
    /// Reconstruct hidden bits from a sanitized series.
    Attack(AttackArgs),
    /// Write the (rho0, rho1) feasibility grid for a budget.
    Region(RegionArgs),
    /// Regenerate an experiment table.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Args, Debug, Clone)]
struct ChainArgs {
    /// Transition probability 0 -> 1.
    #[arg(long)]
    q: Option<f64>,
    /// Transition probability 1 -> 0.
    #[arg(long)]
    r: Option<f64>,
    /// Symmetric chain, q = r = theta.
    #[arg(long)]
    theta: Option<f64>,
}

impl ChainArgs {
    fn resolve(&self) -> Result<Option<Chain>> {
        match (self.theta, self.q, self.r) {
            (None, None, None) => Ok(None),
            (Some(t), None, None) => Ok(Some(Chain::symmetric(t)?)),
            (None, Some(q), Some(r)) => Ok(Some(Chain::new(q, r)?)),
            (Some(_), _, _) => usage("--theta cannot be combined with --q/--r"),
            _ => usage("--q and --r must be given together"),
        }
    }

    fn require(&self) -> Result<Chain> {
        match self.resolve()? {
            Some(c) => Ok(c),
            None => usage("a chain is required: give --theta or --q and --r"),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct NoiseArgs {
    /// Privacy budget in nats; the noise is calibrated to it.
    #[arg(long)]
    eps: Option<f64>,
    /// Flip probability of 0 bits.
    #[arg(long)]
    rho0: Option<f64>,
    /// Flip probability of 1 bits.
    #[arg(long)]
    rho1: Option<f64>,
}

impl NoiseArgs {
    /// Explicit flips, or a calibration to `--eps` for `chain`.
    fn resolve(&self, chain: Option<&Chain>) -> Result<Noise> {
        match (self.eps, self.rho0, self.rho1) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => usage("give either --eps or --rho0/--rho1, not both"),
            (None, Some(r0), Some(r1)) => Ok(Noise::new(r0, r1)?),
            (None, Some(_), None) | (None, None, Some(_)) => usage("--rho0 and --rho1 must be given together"),
            (Some(e), None, None) => {
                let Some(chain) = chain else {
                    return usage("calibrating to --eps needs a chain");
                };
                calibrate(chain, e)
            }
            (None, None, None) => usage("noise is required: give --eps or --rho0 and --rho1"),
        }
    }
}

fn calibrate(chain: &Chain, eps: f64) -> Result<Noise> {
    let eps = PrivacyBudget::new(eps)?;
    if chain.is_symmetric() {
        Ok(Noise::symmetric(calibrate_symmetric_exact(chain.q(), eps)?)?)
    } else {
        Ok(calibrate_asymmetric(chain, eps)?.noise)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum CalibrationMode {
    /// Smallest symmetric rho by bisection on the exact bound.
    Exact,
    /// Closed-form sufficient symmetric rho.
    ClosedForm,
    /// Minimum expected noise (rho0, rho1) for an asymmetric chain.
    Asymmetric,
    /// Plain per-bit DP noise, ignoring correlation.
    Dp,
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(long)]
    eps: f64,
    #[arg(long, value_enum, default_value = "exact")]
    mode: CalibrationMode,
}

#[derive(Args, Debug)]
struct SanitizeArgs {
    /// Bit series to sanitize.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Chain for calibration; estimated from the input when omitted.
    #[command(flatten)]
    chain: ChainArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[command(flatten)]
    chain: ChainArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Also enumerate every observation of this length (at most 20).
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct AttackArgs {
    /// Sanitized bit series.
    #[arg(long = "in")]
    input: PathBuf,
    /// Where to write the reconstructed bits.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    chain: ChainArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Attacker: sb, ca or viterbi.
    #[arg(long, default_value = "viterbi")]
    mode: Attacker,
}

#[derive(Args, Debug)]
struct RegionArgs {
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(long)]
    eps: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum ExperimentCommand {
    /// Feasible noise regions at q = 0.2, r = 0.35.
    Fig1(Fig1Args),
    /// Attack success under plain DP noise across chain correlations.
    Fig2(Fig2Args),
    /// Symmetric noise required by three calibration routes.
    Fig3(Fig3Args),
    /// Viterbi reconstruction accuracy against the BDP success bound.
    Fig4(Fig4Args),
    /// Correlated versus independent noise on a short chain.
    Correlated(CorrelatedArgs),
}

#[derive(Args, Debug)]
struct OutDir {
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct Fig1Args {
    #[arg(long, default_value_t = 0.2)]
    q: f64,
    #[arg(long, default_value_t = 0.35)]
    r: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 2.0])]
    eps: Vec<f64>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
struct Fig2Args {
    #[arg(long, value_delimiter = ',', default_values_t = experiment::DEFAULT_THETAS)]
    theta: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 30)]
    n: usize,
    /// Databases x sanitizations per database.
    #[arg(long, default_value = "100x1000")]
    replicates: Replicates,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
struct Fig3Args {
    #[arg(long, default_value_t = 0.35)]
    theta: f64,
    #[arg(long, default_value_t = 30)]
    n: usize,
    /// Budgets; defaults to 1 to 4 in steps of 0.25.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
struct Fig4Args {
    /// Real-valued series, binarized at its mean. Without it a synthetic
    /// series is drawn from --q/--r.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    /// Synthetic series length.
    #[arg(long, default_value_t = 26923)]
    n: usize,
    /// Budgets; defaults to 1 to 4 in steps of 0.25.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Databases x sanitizations per database.
    #[arg(long, default_value = "1x10")]
    replicates: Replicates,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
struct CorrelatedArgs {
    #[arg(long, default_value_t = 0.3)]
    theta: f64,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0])]
    eps: Vec<f64>,
    #[command(flatten)]
    out: OutDir,
}

/// `AxB`: databases x sanitizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Replicates {
    databases: usize,
    sanitizations: usize,
}

impl std::str::FromStr for Replicates {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected DATABASESxSANITIZATIONS, got {s:?}"))?;
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
        Ok(Replicates {
            databases: parse(a)?,
            sanitizations: parse(b)?,
        })
    }
}

fn fmt_chain(c: Option<&Chain>) -> String {
    match c {
        Some(c) => format!("q={} r={}", c.q(), c.r()),
        None => "chain=none".into(),
    }
}

fn fmt_noise(b: &Noise) -> String {
    format!("rho0={} rho1={}", b.rho0(), b.rho1())
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn write_table(dir: &Path, name: &str, table: &experiment::ResultTable) -> Result<()> {
    let path = dir.join(name);
    table.write(&path)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn run_calibrate(a: &CalibrateArgs) -> Result<()> {
    let eps = PrivacyBudget::new(a.eps)?;
    let chain = a.chain.resolve()?;
    eprintln!(
        "calibrate: mode={:?} eps={} {}",
        a.mode,
        a.eps,
        fmt_chain(chain.as_ref())
    );
    let theta = || -> Result<f64> {
        match chain {
            Some(c) if c.is_symmetric() => Ok(c.q()),
            Some(_) => usage("this mode needs a symmetric chain (--theta)"),
            None => usage("this mode needs --theta"),
        }
    };
    match a.mode {
        CalibrationMode::Exact => println!("{}", calibrate_symmetric_exact(theta()?, eps)?),
        CalibrationMode::ClosedForm => println!("{}", rho_sufficient_symmetric(theta()?, eps)?),
        CalibrationMode::Dp => println!("{}", dp_noise(eps)),
        CalibrationMode::Asymmetric => {
            let Some(c) = chain else {
                return usage("asymmetric calibration needs --q and --r (or --theta)");
            };
            let cal = calibrate_asymmetric(&c, eps)?;
            println!("{} {}", cal.noise.rho0(), cal.noise.rho1());
        }
    }
    Ok(())
}

fn run_sanitize(a: &SanitizeArgs) -> Result<()> {
    let x = read_bits(&a.input)?;
    let chain = match a.chain.resolve()? {
        Some(c) => Some(c),
        None if a.noise.eps.is_some() => Some(estimate::<f64>(&x)?.chain),
        None => None,
    };
    let noise = a.noise.resolve(chain.as_ref())?;
    eprintln!(
        "sanitize: in={} out={} n={} {} eps={} {} seed={}",
        a.input.display(),
        a.out.display(),
        x.len(),
        fmt_chain(chain.as_ref()),
        a.noise.eps.map_or("none".into(), |e| e.to_string()),
        fmt_noise(&noise),
        a.seed
    );
    write_bits(&a.out, &sanitize_independent(&x, &noise, RandomSeed(a.seed)))?;
    Ok(())
}

fn run_audit(a: &AuditArgs) -> Result<()> {
    let chain = a.chain.require()?;
    let noise = a.noise.resolve(Some(&chain))?;
    eprintln!(
        "audit: {} {} eps={} n={}",
        fmt_chain(Some(&chain)),
        fmt_noise(&noise),
        a.noise.eps.map_or("none".into(), |e| e.to_string()),
        a.n.map_or("none".into(), |n| n.to_string())
    );
    let (b0, b1) = log_lr_bound(&chain, &noise)?;
    println!("rho0 {}", noise.rho0());
    println!("rho1 {}", noise.rho1());
    println!("bound0 {}", b0.exp());
    println!("bound1 {}", b1.exp());
    println!("eps_bound {}", b0.max(b1));
    if let Some(n) = a.n {
        let ex = exhaustive_lr(&chain, &noise, n)?;
        println!("eps_exhaustive {}", ex.max_log_lr.max(-ex.min_log_lr));
    }
    Ok(())
}

fn run_attack(a: &AttackArgs) -> Result<()> {
    let z = read_bits(&a.input)?;
    let chain = a.chain.require()?;
    let noise = a.noise.resolve(Some(&chain))?;
    eprintln!(
        "attack: in={} out={} mode={} {} {}",
        a.input.display(),
        a.out.display(),
        a.mode,
        fmt_chain(Some(&chain)),
        fmt_noise(&noise)
    );
    write_bits(&a.out, &a.mode.reconstruct(&chain, &noise, &z)?)?;
    Ok(())
}

fn run_region(a: &RegionArgs) -> Result<()> {
    let chain = a.chain.require()?;
    eprintln!(
        "region: {} eps={} n={} out={}",
        fmt_chain(Some(&chain)),
        a.eps,
        a.n,
        a.out.display()
    );
    let points = feasible_region(&chain, PrivacyBudget::new(a.eps)?, a.n)?;
    region_table(&points).write(&a.out)?;
    Ok(())
}

fn default_eps(eps: &[f64]) -> Vec<f64> {
    if eps.is_empty() {
        eps_grid(1.0, 4.0, 0.25)
    } else {
        eps.to_vec()
    }
}

fn run_experiment(cmd: &ExperimentCommand) -> Result<()> {
    match cmd {
        ExperimentCommand::Fig1(a) => {
            let chain = Chain::new(a.q, a.r)?;
            eprintln!(
                "experiment fig1: q={} r={} eps={} n={} out-dir={}",
                a.q,
                a.r,
                fmt_list(&a.eps),
                a.n,
                a.out.out_dir.display()
            );
            let budgets = a
                .eps
                .iter()
                .map(|&e| PrivacyBudget::new(e))
                .collect::<Result<Vec<_>, _>>()?;
            prepare_dir(&a.out.out_dir)?;
            for eps in budgets {
                let points = feasible_region(&chain, eps, a.n)?;
                write_table(
                    &a.out.out_dir,
                    &format!("fig1_eps{}.csv", eps.epsilon()),
                    &region_table(&points),
                )?;
            }
        }
        ExperimentCommand::Fig2(a) => {
            let cfg = ExperimentConfig {
                thetas: a.theta.clone(),
                eps: vec![a.eps],
                n: a.n,
                databases: a.replicates.databases,
                sanitizations: a.replicates.sanitizations,
                seed: RandomSeed(a.seed),
            };
            eprintln!(
                "experiment fig2: theta={} eps={} n={} replicates={}x{} seed={} out-dir={}",
                fmt_list(&cfg.thetas),
                a.eps,
                cfg.n,
                cfg.databases,
                cfg.sanitizations,
                a.seed,
                a.out.out_dir.display()
            );
            let result = experiment::run_dp_insufficiency(&cfg)?;
            prepare_dir(&a.out.out_dir)?;
            write_table(&a.out.out_dir, "fig2_success.csv", &result.success_table())?;
            write_table(&a.out.out_dir, "fig2_charged.csv", &result.charged_table())?;
        }
        ExperimentCommand::Fig3(a) => {
            let cfg = ExperimentConfig {
                thetas: vec![a.theta],
                eps: default_eps(&a.eps),
                n: a.n,
                ..ExperimentConfig::noise_comparison()
            };
            eprintln!(
                "experiment fig3: theta={} n={} eps={} out-dir={}",
                a.theta,
                a.n,
                fmt_list(&cfg.eps),
                a.out.out_dir.display()
            );
            let table = experiment::run_noise_privacy_comparison(&cfg)?;
            prepare_dir(&a.out.out_dir)?;
            write_table(&a.out.out_dir, "fig3_noise.csv", &table)?;
        }
        ExperimentCommand::Fig4(a) => {
            let source = match (&a.input, a.q, a.r) {
                (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                    return usage("--in replaces the synthetic chain; drop --q/--r");
                }
                (Some(path), None, None) => DataSource::Observed(binarize(&read_real_series(path)?)?),
                (None, q, r) => DataSource::Synthetic {
                    chain: Chain::new(q.unwrap_or(0.0893), r.unwrap_or(0.1092))?,
                    n: a.n,
                },
            };
            let cfg = ExperimentConfig {
                eps: default_eps(&a.eps),
                databases: a.replicates.databases,
                sanitizations: a.replicates.sanitizations,
                seed: RandomSeed(a.seed),
                ..ExperimentConfig::reconstruction()
            };
            let lstm_path = a.out.out_dir.join("lstm_accuracy.csv");
            let lstm = if lstm_path.exists() {
                Some(read_lstm_accuracy(&lstm_path)?)
            } else {
                None
            };
            let source_desc = match &source {
                DataSource::Synthetic { chain, n } => format!("synthetic q={} r={} n={}", chain.q(), chain.r(), n),
                DataSource::Observed(bits) => format!(
                    "observed in={} n={}",
                    a.input.as_deref().unwrap_or(Path::new("")).display(),
                    bits.len()
                ),
            };
            eprintln!(
                "experiment fig4: {} eps={} replicates={}x{} seed={} lstm={} out-dir={}",
                source_desc,
                fmt_list(&cfg.eps),
                cfg.databases,
                cfg.sanitizations,
                a.seed,
                if lstm.is_some() {
                    lstm_path.display().to_string()
                } else {
                    "none".into()
                },
                a.out.out_dir.display()
            );
            let result = experiment::run_reconstruction_vs_bound(&cfg, &source, lstm.as_ref())?;
            if let Some(e) = &result.estimate {
                eprintln!("estimated chain: q={} r={}", e.chain.q(), e.chain.r());
            }
            prepare_dir(&a.out.out_dir)?;
            write_table(&a.out.out_dir, "fig4_reconstruction.csv", &result.table())?;
        }
        ExperimentCommand::Correlated(a) => {
            let cfg = ExperimentConfig {
                thetas: vec![a.theta],
                eps: a.eps.clone(),
                n: a.n,
                ..ExperimentConfig::noise_comparison()
            };
            eprintln!(
                "experiment correlated: theta={} n={} eps={} out-dir={}",
                a.theta,
                a.n,
                fmt_list(&cfg.eps),
                a.out.out_dir.display()
            );
            let (_, table) = experiment::run_correlated_check(&cfg)?;
            prepare_dir(&a.out.out_dir)?;
            write_table(&a.out.out_dir, "correlated_noise.csv", &table)?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Calibrate(a) => run_calibrate(a),
        Command::Sanitize(a) => run_sanitize(a),
        Command::Audit(a) => run_audit(a),
        Command::Attack(a) => run_attack(a),
        Command::Region(a) => run_region(a),
        Command::Experiment(c) => run_experiment(c),
    }
}

fn is_validation(err: &anyhow::Error) -> bool {
    err.downcast_ref::<Usage>().is_some()
        || err
            .downcast_ref::<bdp_markov::Error>()
            .is_some_and(bdp_markov::Error::is_validation)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(if is_validation(&err) { 2 } else { 1 })
        }
    }
}
