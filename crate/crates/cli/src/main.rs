//! `primedir`: batch driver for direction-set construction, multiplier
//! error profiles, incidence scans and operator experiments.

mod commands;
mod report;
mod selftest;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit statuses.
pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "primedir", version, about = "Prime directional maximal averages at desk scale")]
struct Cli {
    /// Worker threads for the data-parallel regions.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Sieve cache directory (defaults to $PD_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a direction set, validate it and write it to a file.
    Construct(ConstructArgs),
    /// Re-validate a direction-set file.
    Validate {
        file: PathBuf,
    },
    /// Tabulate sup |m_k - L_k| over a frequency grid as CSV.
    MultError(MultErrorArgs),
    /// Maximal tube overlap of a direction set.
    Incidence(IncidenceArgs),
    /// Apply the maximal operator to a grid function.
    Apply(ApplyArgs),
    /// Empirical operator norms over nested direction sets.
    NormSweep(NormSweepArgs),
    /// Run the built-in oracle checks.
    Selftest,
    /// Build and cache a prime table.
    Sieve {
        #[arg(long)]
        limit: u64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Toy,
    Strict,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    /// Number of directions.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "toy")]
    pub mode: ModeArg,
    /// Exponent M of the strict-mode scale.
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Take A = N^c0 instead of the base multiple.
    #[arg(long)]
    pub c0: Option<u32>,
    #[arg(long)]
    pub window_base: Option<u64>,
    #[arg(long)]
    pub window_size: Option<usize>,
    #[arg(long)]
    pub kappa: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MultErrorArgs {
    /// Scales, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "14,16,18,20")]
    pub k: Vec<u32>,
    /// Major-arc exponent D; the analysis needs D > 16.
    #[arg(long, default_value_t = 17.0)]
    pub arc_d: f64,
    /// Uniform grid size.
    #[arg(long, default_value_t = 4096)]
    pub grid: u64,
    /// Farey level of the rational points added to the grid.
    #[arg(long, default_value_t = 6)]
    pub fraction_level: u32,
    /// Output CSV (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    K,
    Ktilde,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BaselineArg {
    Parallel,
}

#[derive(Args, Debug)]
pub struct SourceArgs {
    /// Direction-set file.
    #[arg(long, conflicts_with = "profile")]
    pub directions: Option<PathBuf>,
    /// Named preset: desk-small or desk-full.
    #[arg(long)]
    pub profile: Option<String>,
}

#[derive(Args, Debug)]
pub struct IncidenceArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 1)]
    pub s: u32,
    /// Thickness exponent (default 3 ceil(log2 A)).
    #[arg(long)]
    pub c1: Option<u32>,
    #[arg(long, value_enum, default_value = "k")]
    pub variant: VariantArg,
    /// Also scan an adversarial baseline.
    #[arg(long, value_enum)]
    pub baseline: Option<BaselineArg>,
    /// Number of random r assignments to sweep (0 means all r = 2^s).
    #[arg(long, default_value_t = 0)]
    pub random_r: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Re-verify the witness by direct membership tests.
    #[arg(long)]
    pub replay: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SourceKind {
    Primitive,
    Rescaled,
}

#[derive(Args, Debug)]
pub struct OperatorArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub k_min: Option<u32>,
    #[arg(long)]
    pub k_max: Option<u32>,
    /// Grid side (power of two).
    #[arg(long)]
    pub side: Option<usize>,
    #[arg(long, value_enum, default_value = "primitive")]
    pub vectors: SourceKind,
}

#[derive(Args, Debug)]
pub struct ApplyArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    /// Input grid file.
    #[arg(long, conflicts_with = "delta")]
    pub input: Option<PathBuf>,
    /// Use the point mass at the origin as input.
    #[arg(long)]
    pub delta: bool,
    /// Evaluate the averages through the Fourier multipliers.
    #[arg(long)]
    pub spectral: bool,
    /// Output grid file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output values as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct NormSweepArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    /// Prefix sizes of the direction set.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    pub n_list: Vec<usize>,
    /// Test families: delta, gaussian, rademacher, boxes.
    #[arg(long, value_delimiter = ',', default_value = "delta,gaussian,rademacher,boxes")]
    pub families: Vec<String>,
    #[arg(long, default_value_t = 4)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    }
    let cache = cli
        .cache_dir
        .clone()
        .unwrap_or_else(primedir::arith::sieve::default_cache_dir);
    let result = match cli.command {
        Command::Construct(a) => commands::construct(&a),
        Command::Validate { file } => commands::validate(&file),
        Command::MultError(a) => commands::mult_error(&a, &cache),
        Command::Incidence(a) => commands::incidence(&a),
        Command::Apply(a) => commands::apply(&a, &cache),
        Command::NormSweep(a) => commands::norm_sweep(&a, &cache),
        Command::Selftest => selftest::run(),
        Command::Sieve { limit } => commands::sieve(limit, &cache),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
