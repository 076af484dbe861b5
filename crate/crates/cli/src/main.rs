//! `abm` command line tool.
//!
//! Exit codes: 0 on success, 2 for bad input (unreadable or malformed CSV,
//! invalid flags or grids, I/O failures), 3 when the computation itself fails
//! (solver or invariant errors). Summaries go to stdout, diagnostics to
//! stderr.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abm_core::experiments::{
    bound_experiment, retrieval_experiment, write_beta_csv, write_bound_csv, write_retrieval_csv, write_trial_log,
    BoundSettings, RetrievalSettings,
};
use abm_core::{
    abm, perturb_and_recenter, preprocess, sample, scale, write_json, AbmConfig, AbmError, NoiseConvention, NoiseSpec,
    NormalizationMode, PointSet, TermOrder, Variety, ZConvention,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "abm", version, about = "Approximate border bases with gradient-weighted normalization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an approximate border basis of a CSV point set and write it as JSON.
    Basis(BasisArgs),
    /// Sample points from one of the benchmark varieties.
    Sample(SampleArgs),
    /// Configuration retrieval under noise and scaling.
    ExperimentRetrieval(RetrievalArgs),
    /// Check the lower bound on usable scales for coefficient normalization.
    ExperimentBound(BoundArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Coeff,
    Gradw,
}

impl From<ModeArg> for NormalizationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Coeff => NormalizationMode::Coefficient,
            ModeArg::Gradw => NormalizationMode::GradientWeighted,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Degrevlex,
    Grlex,
}

#[derive(Clone, Copy, ValueEnum)]
enum ZArg {
    Deg,
    One,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    /// `nu` is the per-coordinate standard deviation.
    Std,
    /// `nu` is the per-coordinate variance.
    Var,
}

impl From<NoiseArg> for NoiseConvention {
    fn from(n: NoiseArg) -> Self {
        match n {
            NoiseArg::Std => NoiseConvention::StdDev,
            NoiseArg::Var => NoiseConvention::Variance,
        }
    }
}

#[derive(Args)]
struct BasisArgs {
    /// CSV file, one point per row.
    #[arg(long)]
    points: PathBuf,
    /// Skip the first row of the CSV file.
    #[arg(long)]
    skip_header: bool,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "gradw")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "degrevlex")]
    order: OrderArg,
    #[arg(long, value_enum, default_value = "deg")]
    z: ZArg,
    /// Output JSON path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    variety: Variety,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip centering and normalization.
    #[arg(long)]
    raw: bool,
    /// Gaussian noise level; 0 leaves the points unperturbed.
    #[arg(long, default_value_t = 0.0)]
    nu: f64,
    #[arg(long, value_enum, default_value = "std")]
    noise_convention: NoiseArg,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RetrievalArgs {
    #[arg(long, value_delimiter = ',', default_value = "v1,v2,v3")]
    datasets: Vec<Variety>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "coeff,gradw")]
    modes: Vec<ModeArg>,
    #[arg(long, alias = "alpha", value_delimiter = ',', default_value = "0.01,0.1,1,10,100")]
    alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    nu: Vec<f64>,
    #[arg(long, value_enum, default_value = "std")]
    noise_convention: NoiseArg,
    /// Trials per cell [default: 10, or 20 with --full-scale].
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Points per trial.
    #[arg(long, default_value_t = 50)]
    points: usize,
    /// Use the full trial count.
    #[arg(long)]
    full_scale: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, default_value = "v2")]
    dataset: Variety,
    #[arg(long, alias = "alpha", value_delimiter = ',', default_value = "1,5,10")]
    alphas: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    nu: f64,
    #[arg(long, value_enum, default_value = "std")]
    noise_convention: NoiseArg,
    /// Trials per scale [default: 5, or 20 with --full-scale].
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long)]
    full_scale: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn exit_code(e: &AbmError) -> u8 {
    match e {
        AbmError::DegenerateProblem
        | AbmError::Invariant(_)
        | AbmError::DegreeGuard { .. }
        | AbmError::NotOrderIdeal { .. }
        | AbmError::WeightTableMismatch => 3,
        _ => 2,
    }
}

fn finite(name: &str, xs: &[f64]) -> Result<(), AbmError> {
    match xs.iter().find(|x| !x.is_finite()) {
        Some(x) => Err(AbmError::InvalidInput(format!("--{name} must be finite, got {x}"))),
        None => Ok(()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, AbmError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| AbmError::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

fn sig3(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.2e}")).unwrap_or_else(|| "--".into())
}

fn run_basis(a: BasisArgs) -> Result<(), AbmError> {
    finite("epsilon", &[a.epsilon])?;
    let x = PointSet::load_csv(&a.points, a.skip_header).map_err(|e| match e {
        AbmError::Io(io) => AbmError::InvalidInput(format!("cannot read {}: {io}", a.points.display())),
        other => other,
    })?;
    let order = match a.order {
        OrderArg::Degrevlex => TermOrder::DegRevLex,
        OrderArg::Grlex => TermOrder::GrLex,
    };
    let z = match a.z {
        ZArg::Deg => ZConvention::DegreeWeighted,
        ZArg::One => ZConvention::Unit,
    };
    let cfg = AbmConfig::new(a.epsilon, a.mode.into()).with_order(order).with_z(z);
    let r = abm(&x, &cfg)?;
    write_json(create(&a.out)?, &r)?;
    println!("|O| = {}, |G| = {}, max degree = {}", r.order_ideal.len(), r.basis.len(), r.max_degree());
    Ok(())
}

fn run_sample(a: SampleArgs) -> Result<(), AbmError> {
    finite("nu", &[a.nu])?;
    finite("alpha", &[a.alpha])?;
    let mut x = sample(&a.variety.spec(), a.count, a.seed)?;
    if !a.raw {
        x = preprocess(&x)?;
    }
    if a.nu > 0.0 {
        let noise = NoiseSpec {
            nu: a.nu,
            seed: a.seed ^ 0x9E37_79B9_7F4A_7C15,
            convention: a.noise_convention.into(),
        };
        x = perturb_and_recenter(&x, &noise)?;
    }
    if a.alpha != 1.0 {
        x = scale(&x, a.alpha)?;
    }
    x.write_csv(create(&a.out)?)?;
    println!("wrote {} points of {} to {}", x.len(), a.variety, a.out.display());
    Ok(())
}

fn run_retrieval(a: RetrievalArgs) -> Result<(), AbmError> {
    finite("alphas", &a.alphas)?;
    finite("nu", &a.nu)?;
    if a.nu.iter().any(|n| *n < 0.0) {
        return Err(AbmError::InvalidInput("--nu must be non-negative".into()));
    }
    let settings = RetrievalSettings {
        varieties: a.datasets,
        alphas: a.alphas,
        nus: a.nu,
        modes: a.modes.into_iter().map(Into::into).collect(),
        trials: a.trials.unwrap_or(if a.full_scale { 20 } else { 10 }),
        seed: a.seed,
        points: a.points,
        noise_convention: a.noise_convention.into(),
    };
    let reports = retrieval_experiment(&settings)?;
    fs::create_dir_all(&a.out)?;
    write_retrieval_csv(create(&a.out.join("retrieval.csv"))?, &reports)?;
    write_trial_log(create(&a.out.join("retrieval_trials.json"))?, &reports)?;

    println!(
        "{:<7} {:<6} {:>8} {:>6} {:>21} {:>10} {:>10} {:>7}",
        "dataset", "norm", "alpha", "nu", "range", "coeff.d", "e.v.", "success"
    );
    for r in &reports {
        let range = r
            .range
            .map(|(lo, hi)| format!("[{lo:.2e}, {hi:.2e}]"))
            .unwrap_or_else(|| "--".into());
        println!(
            "{:<7} {:<6} {:>8} {:>6} {:>21} {:>10} {:>10} {:>7}",
            r.dataset.name(),
            r.normalization.short_name(),
            r.alpha,
            r.nu,
            range,
            sig3(r.coeff_dist),
            sig3(r.extent_vanishing),
            format!("{}/{}", r.successes, r.trials)
        );
    }
    Ok(())
}

fn run_bound(a: BoundArgs) -> Result<(), AbmError> {
    finite("alphas", &a.alphas)?;
    finite("nu", &[a.nu])?;
    let settings = BoundSettings {
        variety: a.dataset,
        alphas: a.alphas,
        nu: a.nu,
        trials: a.trials.unwrap_or(if a.full_scale { 20 } else { 5 }),
        seed: a.seed,
        points: a.points,
        noise_convention: a.noise_convention.into(),
    };
    let reports = bound_experiment(&settings)?;
    fs::create_dir_all(&a.out)?;
    write_bound_csv(create(&a.out.join("bound.csv"))?, &reports)?;
    for r in &reports {
        write_beta_csv(create(&a.out.join(format!("beta_alpha{}_trial{}.csv", r.alpha, r.trial)))?, r)?;
    }
    println!("{:>6} {:>5} {:>10} {:>10} {:>8} {:>5}", "alpha", "trial", "eps_ref", "xi", "min_beta", "holds");
    for r in &reports {
        println!(
            "{:>6} {:>5} {:>10} {:>10} {:>8} {:>5}",
            r.alpha,
            r.trial,
            sig3(r.epsilon_ref),
            sig3(r.xi.xi()),
            r.min_success_beta().map(|b| b.to_string()).unwrap_or_else(|| "--".into()),
            r.holds()
        );
    }
    let violated = reports.iter().filter(|r| !r.holds()).count();
    if violated > 0 {
        eprintln!("bound violated in {violated} of {} runs", reports.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Basis(a) => run_basis(a),
        Command::Sample(a) => run_sample(a),
        Command::ExperimentRetrieval(a) => run_retrieval(a),
        Command::ExperimentBound(a) => run_bound(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
