use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mfr_core::bench::{
    convergence_study, gamma_sweep, run_experiment, summarize, table_sweep, write_records_csv, write_summary_csv,
    BenchEnsemble, ExperimentSpec, DEFAULT_BENCH_GAMMA,
};
use mfr_core::io::{read_dense_csv, read_matrix_csv, sparse_to_csv};
use mfr_core::reconstruct::{Algorithm, SolveReport, SolverConfig, StepLength, DEFAULT_MAX_ITER, DEFAULT_TOL};
use mfr_core::rip::{l0_oracle, rip_constant_exact, rip_constant_sampled, RipEstimate, DEFAULT_SUBSET_BUDGET};
use mfr_core::Error;

#[derive(Parser, Debug)]
#[command(name = "mfr", version, about = "Sparse recovery with modified frame reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recover a sparse vector from a matrix and an observation.
    Solve(SolveArgs),
    /// Run a Monte-Carlo sweep and write one CSV row per trial.
    Bench(BenchArgs),
    /// Restricted isometry constants of a matrix.
    Rip(RipArgs),
    /// Sparsest exact solution by exhaustive search (small problems only).
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(long, default_value = "mfr")]
    algo: Algorithm,
    /// Sparsity estimate; not used by `frame`.
    #[arg(long)]
    s_hat: Option<usize>,
    /// A positive number, or `adaptive`.
    #[arg(long, default_value_t = StepLength::Fixed(DEFAULT_BENCH_GAMMA))]
    gamma: StepLength,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Where to write the JSON report; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    /// 50x400 sweep over true and estimated sparsity with mfr_ls.
    Table,
    /// Iteration counts of the four fixed-step variants.
    Convergence,
    /// Plain MFR over step-lengths 0.05..0.70.
    GammaSweep,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Ensemble {
    Gaussian,
    Unit,
    Identity,
}

impl From<Ensemble> for BenchEnsemble {
    fn from(e: Ensemble) -> Self {
        match e {
            Ensemble::Gaussian => BenchEnsemble::Gaussian,
            Ensemble::Unit => BenchEnsemble::UnitSphereColumns,
            Ensemble::Identity => BenchEnsemble::Identity,
        }
    }
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Start from a standard sweep; other flags override its fields.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// True sparsities, comma separated.
    #[arg(long, value_delimiter = ',')]
    s: Vec<usize>,
    /// Sparsity estimates, comma separated. Defaults to the true sparsities.
    #[arg(long, value_delimiter = ',')]
    s_hat: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    algo: Vec<Algorithm>,
    /// Step-lengths, comma separated; `adaptive` with `mfr` runs mfr_adaptive.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<StepLength>,
    #[arg(long, value_enum)]
    ensemble: Option<Ensemble>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Standard deviation of additive Gaussian noise.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Lay the summary out as s_hat rows by s columns.
    #[arg(long, requires = "summary")]
    pivot: bool,
}

#[derive(Args, Debug)]
struct RipArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Orders to report, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    order: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET, conflicts_with = "sampled")]
    exact_budget: u128,
    /// Lower bound from this many random supports instead of enumeration.
    #[arg(long)]
    sampled: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(long)]
    s_max: usize,
    /// Residual tolerance relative to the norm of y.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET)]
    budget: u128,
    /// Where to write the solution as sparse CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io { path: p.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solve(args: SolveArgs) -> Result<(), Error> {
    let phi = read_matrix_csv(&args.matrix)?;
    let y = read_dense_csv(&args.y)?;
    let s_hat = match (args.s_hat, args.algo) {
        (Some(k), _) => k,
        (None, Algorithm::Frame) => phi.cols(),
        (None, algo) => return Err(Error::InvalidArgument(format!("--s-hat is required for {algo}"))),
    };
    let mut algo = args.algo;
    if args.gamma == StepLength::Adaptive {
        match algo {
            Algorithm::Mfr | Algorithm::MfrAdaptive => algo = Algorithm::MfrAdaptive,
            other => return Err(Error::InvalidArgument(format!("{other} does not support an adaptive step-length"))),
        }
    }
    let cfg = SolverConfig::new(s_hat, args.gamma).with_tol(args.tol).with_max_iter(args.max_iter);
    let result = algo.solve(&phi, &y, &cfg, None)?;
    log::info!("{algo}: {} iterations, stop reason {:?}", result.iterations, result.stop_reason);
    let mut json = SolveReport::new(algo, &cfg, &result).to_json()?;
    json.push('\n');
    write_output(args.out.as_deref(), &json)
}

fn bench_spec(args: &BenchArgs) -> Result<ExperimentSpec, Error> {
    let trials = args.trials.unwrap_or(100);
    let seed = args.seed.unwrap_or(0);
    let mut spec = match args.preset {
        Some(Preset::Table) => table_sweep(trials, seed),
        Some(Preset::Convergence) => convergence_study(400, 200, 10, trials, seed),
        Some(Preset::GammaSweep) => gamma_sweep(400, 200, 10, trials, seed),
        None => {
            let (Some(n), Some(m)) = (args.n, args.m) else {
                return Err(Error::InvalidArgument("--n and --m are required without --preset".into()));
            };
            let mut spec = ExperimentSpec::gaussian(n, m, trials, seed);
            spec.algorithms = vec![Algorithm::Mfr];
            spec.gamma_values = vec![StepLength::Fixed(DEFAULT_BENCH_GAMMA)];
            spec
        }
    };
    if let Some(n) = args.n {
        spec.n = n;
    }
    if let Some(m) = args.m {
        spec.m = m;
    }
    if !args.s.is_empty() {
        spec.s_values = args.s.clone();
        if args.s_hat.is_empty() && args.preset.is_none() {
            spec.s_hat_values = args.s.clone();
        }
    }
    if !args.s_hat.is_empty() {
        spec.s_hat_values = args.s_hat.clone();
    }
    if !args.algo.is_empty() {
        spec.algorithms = args.algo.clone();
    }
    if !args.gamma.is_empty() {
        spec.gamma_values = args.gamma.clone();
    }
    if let Some(e) = args.ensemble {
        spec.ensemble = e.into();
    }
    if let Some(tol) = args.tol {
        spec.tol = tol;
    }
    if let Some(max_iter) = args.max_iter {
        spec.max_iter = max_iter;
    }
    spec.noise_sigma = args.noise;
    spec.validate()?;
    Ok(spec)
}

fn bench(args: BenchArgs) -> Result<(), Error> {
    let spec = bench_spec(&args)?;
    log::info!("running {} cells x {} trials", spec.cells()?.len(), spec.trials);
    let records = run_experiment(&spec)?;
    write_records_csv(&records, &args.out)?;
    if let Some(path) = &args.summary {
        write_summary_csv(&summarize(&records)?, path, args.pivot)?;
    }
    let successes = records.iter().filter(|r| r.success).count();
    eprintln!("{} trials, {} successful, records in {}", records.len(), successes, args.out.display());
    Ok(())
}

fn rip(args: RipArgs) -> Result<(), Error> {
    let phi = read_matrix_csv(&args.matrix)?;
    let estimates: Vec<RipEstimate> = args
        .order
        .iter()
        .map(|&s| match args.sampled {
            Some(trials) => rip_constant_sampled(&phi, s, trials, args.seed),
            None => rip_constant_exact(&phi, s, args.exact_budget),
        })
        .collect::<Result<_, _>>()?;
    println!("{:>5}  {:>22}  {:>5}  {:>16}", "order", "delta", "exact", "subsets");
    for e in estimates {
        println!("{:>5}  {:>22.16e}  {:>5}  {:>16}", e.order, e.delta, e.exact, e.subsets_examined);
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<(), Error> {
    let phi = read_matrix_csv(&args.matrix)?;
    let y = read_dense_csv(&args.y)?;
    let outcome = l0_oracle(&phi, &y, args.s_max, Some(args.tol * y.norm()), args.budget)?;
    if outcome.rank_deficient_skipped > 0 {
        log::warn!("skipped {} rank-deficient supports", outcome.rank_deficient_skipped);
    }
    match outcome.solution {
        Some(x) => write_output(args.out.as_deref(), &sparse_to_csv(&x)),
        None => {
            eprintln!(
                "no solution with at most {} nonzeros ({} supports examined)",
                args.s_max, outcome.supports_examined
            );
            Ok(())
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::BudgetExceeded { .. } => 3,
        Error::InvalidArgument(_) | Error::Parse { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Rip(a) => rip(a),
        Command::Oracle(a) => oracle(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
