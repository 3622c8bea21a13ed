use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bb84sc::rates::{critical_qber, keyrate_at_qber};
use bb84sc::sweep::{sort_rows, to_csv, visibility_grid};
use bb84sc::{Error, FailureAccounting, RateConvention, RateOptions, Strategy, SweepRow};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Core(Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Infeasible(_) => 4,
            CliError::Core(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange { .. } | Error::UnknownStrategy(_) | Error::UnknownLabel(_) => {
                CliError::Usage(e.to_string())
            }
            Error::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bb84sc",
    version,
    about = "Critical QBER of BB84 under side-channel attacks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Critical QBER over a visibility grid, written as CSV
    /// (strategy,V,delta,critical_qber,opt_p_filter,opt_attack_param).
    Sweep(SweepArgs),
    /// Critical QBER at one visibility; prints `strategy,V,critical_qber`.
    Critical(CriticalArgs),
    /// Key rate at one observed QBER with Eve's parameters optimized;
    /// prints `strategy,V,qber,R,chi,I_AE`.
    Keyrate(KeyrateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    /// h2 of the observed QBER, Eve's information at the per-attack error
    PaperLiteral,
    /// both terms at the per-attack error
    Weighted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AccountingArg {
    /// only all-success filter paths count as attacked
    Postselect,
    /// failed filter paths are forwarded and counted
    Forward,
}

#[derive(Debug, Args)]
struct RateArgs {
    /// Which QBER enters h2 for partially attacked traffic
    #[arg(long, value_enum, default_value = "paper-literal")]
    rate_convention: ConventionArg,
    /// Treatment of failed filter branches in the filtering attack
    #[arg(long, value_enum, default_value = "postselect")]
    accounting: AccountingArg,
}

impl RateArgs {
    fn options(&self) -> RateOptions {
        RateOptions {
            convention: match self.rate_convention {
                ConventionArg::PaperLiteral => RateConvention::PaperLiteral,
                ConventionArg::Weighted => RateConvention::Weighted,
            },
            accounting: match self.accounting {
                AccountingArg::Postselect => FailureAccounting::Postselect,
                AccountingArg::Forward => FailureAccounting::Forward,
            },
        }
    }
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Attack to sweep (me-pc, me-filter-tsc, usd-pc); repeatable, all if omitted
    #[arg(long = "strategy", value_parser = parse_strategy)]
    strategies: Vec<Strategy>,
    /// Lower end of the visibility grid
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    v_min: f64,
    /// Upper end of the visibility grid
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    v_max: f64,
    /// Number of grid points, endpoints included
    #[arg(long, default_value_t = 51)]
    steps: usize,
    /// Bisection tolerance on the critical QBER
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[command(flatten)]
    rate: RateArgs,
    /// Output CSV path; standard output if omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores)
    #[arg(long, env = "BB84SC_JOBS")]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct CriticalArgs {
    /// Attack (me-pc, me-filter-tsc, usd-pc)
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    /// HOM visibility
    #[arg(long = "visibility", short = 'V', allow_negative_numbers = true)]
    visibility: f64,
    /// Bisection tolerance on the critical QBER
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[command(flatten)]
    rate: RateArgs,
}

#[derive(Debug, Args)]
struct KeyrateArgs {
    /// Attack (me-pc, me-filter-tsc, usd-pc)
    #[arg(long, value_parser = parse_strategy)]
    strategy: Strategy,
    /// HOM visibility
    #[arg(long = "visibility", short = 'V', allow_negative_numbers = true)]
    visibility: f64,
    /// Observed QBER
    #[arg(long, allow_negative_numbers = true)]
    qber: f64,
    #[command(flatten)]
    rate: RateArgs,
}

fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let grid = visibility_grid(args.v_min, args.v_max, args.steps)?;
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            args.tol
        )));
    }
    let strategies = if args.strategies.is_empty() {
        Strategy::ALL.to_vec()
    } else {
        let mut s = args.strategies.clone();
        s.sort();
        s.dedup();
        s
    };
    let options = args.rate.options();
    let points: Vec<(Strategy, f64)> = strategies
        .iter()
        .flat_map(|&s| grid.iter().map(move |&v| (s, v)))
        .collect();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let mut rows = pool.install(|| {
        points
            .par_iter()
            .map(|&(s, v)| SweepRow::compute(s, v, args.tol, options))
            .collect::<Result<Vec<_>, _>>()
    })?;
    sort_rows(&mut rows);
    let text = to_csv(&rows);

    match &args.out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn run_critical(args: &CriticalArgs) -> Result<(), CliError> {
    let c = critical_qber(
        args.strategy,
        args.visibility,
        args.tol,
        args.rate.options(),
    )?;
    println!("{},{:.6},{:.6}", c.strategy, c.visibility, c.critical_qber);
    Ok(())
}

fn run_keyrate(args: &KeyrateArgs) -> Result<(), CliError> {
    let r = keyrate_at_qber(
        args.strategy,
        args.visibility,
        args.qber,
        args.rate.options(),
    )?;
    println!(
        "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
        r.strategy, r.visibility, r.qber, r.rate, r.chi, r.i_ae
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(a) => run_sweep(a),
        Command::Critical(a) => run_critical(a),
        Command::Keyrate(a) => run_keyrate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bb84sc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
