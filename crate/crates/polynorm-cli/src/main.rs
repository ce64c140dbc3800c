//! The `polynorm` binary runs reproducible experiments on polynomial norm equivalence
//! constants: norms of a given polynomial, witness construction, certified
//! and empirical constant estimation, sweeps over the variable count,
//! log-log exponent fits, region classification grids, von Neumann ratio
//! probes, and the torus coefficient inequality check.
//!
//! Every command is deterministic given its full configuration (seed
//! included): reruns produce byte-identical data files. Timestamps only go
//! to the `.meta` sidecar written next to `--out` files.

mod cmds;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_ext_real, Config};

fn parse_ext(s: &str) -> Result<f64, String> {
    parse_ext_real(s)
}

#[derive(Parser)]
#[command(
    name = "polynorm",
    version,
    about = "Norm experiments for homogeneous polynomials",
    after_help = "Exit codes: 0 success, 1 gated experiment failure, 2 config/parse error.\n\
                  POLYNORM_CAP overrides the default monomial capacity cap."
)]
struct Cli {
    /// Cap on worker threads (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Sectioned key = value config file; flags override config values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report coefficient norms and a sup-norm interval for a polynomial file
    Norms(NormsArgs),
    /// Build a witness polynomial or partial Steiner system and write it out
    Construct(ConstructArgs),
    /// One constant estimate: kind A, B (CSV row) or chi (JSON line)
    Estimate(EstimateArgs),
    /// Estimates across an n-list: CSV for A/B, JSON lines for chi
    Sweep(SweepArgs),
    /// Fit a log-log slope to sweep output and compare to a prediction
    Fit(FitArgs),
    /// Emit the region classification grid as CSV plot data
    Regions(RegionsArgs),
    /// Von Neumann ratio experiments on commuting operator tuples
    Vn(VnArgs),
    /// Monte Carlo check of the torus L1 coefficient inequality
    Bayart(BayartArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Output file (stdout when absent); a `.meta` sidecar records run metadata
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for every random choice in the command
    #[arg(long)]
    seed: Option<u64>,
    /// Monomial capacity cap (flag > config > POLYNORM_CAP > default)
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Args)]
struct AscentArgs {
    /// Multi-start count for the sup-norm ascent
    #[arg(long)]
    starts: Option<u32>,
    /// Iteration cap per ascent start
    #[arg(long)]
    max_iters: Option<u32>,
}

#[derive(Args)]
struct NormsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Polynomial file (header "m n", then "α_1 … α_n re im" lines)
    #[arg(long)]
    poly: Option<PathBuf>,
    /// Ball exponent p in [1, inf]
    #[arg(long, value_parser = parse_ext)]
    p: Option<f64>,
    /// Coefficient norm exponent r in [1, inf]
    #[arg(long, value_parser = parse_ext)]
    r: Option<f64>,
    /// Emit the sup-norm estimate as a JSON line instead of the text report
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    ascent: AscentArgs,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// spread | ones | unimodular | steiner | steiner-system
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    /// Ball exponent used to score sign choices (steiner, default 2)
    #[arg(long, value_parser = parse_ext)]
    p: Option<f64>,
    /// Best-of rounds for sign/draw selection
    #[arg(long)]
    rounds: Option<u32>,
    #[command(flatten)]
    ascent: AscentArgs,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// A | B | chi
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = parse_ext)]
    p: Option<f64>,
    /// Coefficient exponent (kinds A and B)
    #[arg(long, value_parser = parse_ext)]
    r: Option<f64>,
    /// Target ball exponent (kind chi)
    #[arg(long, value_parser = parse_ext)]
    q: Option<f64>,
    /// spread | ones | unimodular | steiner | all (default: region-aware)
    #[arg(long)]
    family: Option<String>,
    /// Best-of rounds for unimodular/steiner witnesses
    #[arg(long)]
    rounds: Option<u32>,
    /// Random sign flips tried per chi witness
    #[arg(long)]
    trials: Option<u32>,
    #[command(flatten)]
    ascent: AscentArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// A | B | chi
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, value_parser = parse_ext)]
    p: Option<f64>,
    #[arg(long, value_parser = parse_ext)]
    r: Option<f64>,
    #[arg(long, value_parser = parse_ext)]
    q: Option<f64>,
    /// Strictly increasing sizes, e.g. 4,8,16,32
    #[arg(long = "n-list")]
    n_list: Option<String>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    rounds: Option<u32>,
    #[arg(long)]
    trials: Option<u32>,
    #[command(flatten)]
    ascent: AscentArgs,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Sweep output to fit (CSV from A/B sweeps or JSON lines from chi)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Value column: empirical | certified (CSV) or chi_empirical | chi_lower (JSONL)
    #[arg(long)]
    value: Option<String>,
    /// Predicted exponent to compare against
    #[arg(long)]
    predicted: Option<f64>,
    /// Pass tolerance on |fitted − predicted|
    #[arg(long)]
    tol: Option<f64>,
    /// Exit with status 1 when the fit misses the prediction
    #[arg(long)]
    gate: bool,
}

#[derive(Args)]
struct RegionsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// A (constant regions) | chi (mixed unconditionality regions)
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    m: Option<u32>,
    /// Grid points per axis over [0,1]
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args)]
struct VnArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// nilpotent | diagonal | shiftpoly
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    /// Sweep sizes (overrides --n)
    #[arg(long = "n-list")]
    n_list: Option<String>,
    /// Operator space dimension (default m+1)
    #[arg(long)]
    d: Option<usize>,
    /// Normalization exponent for (Ip)/(IIp)
    #[arg(long, value_parser = parse_ext)]
    p: Option<f64>,
    /// Ball exponent for the polynomial sup-norm side
    #[arg(long, value_parser = parse_ext)]
    q: Option<f64>,
    /// c (condition Ip) | d (condition IIp)
    #[arg(long)]
    mode: Option<String>,
    /// Point count for diagonal tuples
    #[arg(long)]
    points: Option<usize>,
    /// Polynomial family: gaussian | unimodular | ones | spread
    #[arg(long = "poly-family")]
    poly_family: Option<String>,
    #[command(flatten)]
    ascent: AscentArgs,
}

#[derive(Args)]
struct BayartArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Check a specific polynomial file instead of random draws
    #[arg(long)]
    poly: Option<PathBuf>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    /// Coefficients for random draws: gaussian | unimodular
    #[arg(long)]
    coeffs: Option<String>,
    /// Torus samples per polynomial (≥ 1000)
    #[arg(long)]
    samples: Option<u64>,
    /// Number of random polynomials to check
    #[arg(long)]
    count: Option<u32>,
    /// Exit with status 1 when any check fails
    #[arg(long)]
    gate: bool,
}

/// Experiment-level failure (only with --gate) vs configuration errors.
pub enum CliError {
    Gate(String),
    Config(String),
}

impl From<polynorm::Error> for CliError {
    fn from(e: polynorm::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io: {e}"))
    }
}

impl From<String> for CliError {
    fn from(e: String) -> Self {
        CliError::Config(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let config = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => Config::default(),
    };

    let threads = cli.threads.or_else(|| {
        config
            .get("", "threads")
            .and_then(|v| v.parse::<usize>().ok())
    });
    if let Some(t) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }

    let result = match &cli.command {
        Command::Norms(args) => cmds::norms(args, &config),
        Command::Construct(args) => cmds::construct(args, &config),
        Command::Estimate(args) => cmds::estimate(args, &config),
        Command::Sweep(args) => cmds::sweep(args, &config),
        Command::Fit(args) => cmds::fit(args, &config),
        Command::Regions(args) => cmds::regions(args, &config),
        Command::Vn(args) => cmds::vn(args, &config),
        Command::Bayart(args) => cmds::bayart(args, &config),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Gate(msg)) => {
            eprintln!("FAIL: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
