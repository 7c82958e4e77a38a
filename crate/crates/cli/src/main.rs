//! `circle`: command-line front end for the circle-core library.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use circle_core::Error;

#[derive(Parser, Debug)]
#[command(name = "circle", version, about = "Circle-method quantities for integer polynomial systems")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Cap on point evaluations for any enumeration.
    #[arg(long, global = true, default_value = "4294967296", value_parser = parse_count)]
    pub budget: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimensions, heights and Jacobian minors of a system.
    Inspect(SystemArg),
    /// Complete sums `S_{a,q}(ν)` or box sums `S(α, ν)`.
    Expsum(ExpsumArgs),
    /// Major-arc decomposition at parameter θ.
    Arcs(ArcsArgs),
    /// Local density at a prime.
    Density(DensityArgs),
    /// Truncated singular series.
    Series(SeriesArgs),
    /// Oscillatory and singular integrals.
    Integral(IntegralArgs),
    /// Exact number of solutions in a dilated box.
    Count(CountArgs),
    /// Smallest zero by sup-norm shells.
    Search(SearchArgs),
    /// Counts against the asymptotic main term.
    Asym(AsymArgs),
    /// Nullstellensatz certificate search.
    Nss(NssArgs),
    /// Birch parameters and smallest-zero bounds.
    Bound(BoundArgs),
}

#[derive(Args, Debug)]
pub struct SystemArg {
    /// Polynomial system in JSON.
    #[arg(long)]
    pub system: std::path::PathBuf,
}

#[derive(Args, Debug)]
pub struct ExpsumArgs {
    #[command(flatten)]
    pub sys: SystemArg,
    /// Modulus of a complete sum.
    #[arg(long, conflicts_with = "alpha")]
    pub q: Option<u64>,
    /// Numerators `a_1,…,a_R` of a complete sum.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<i64>,
    /// Frequencies of a box sum.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Vec<f64>,
    #[arg(long = "P")]
    pub p: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub nu: Vec<i64>,
    /// Exact arithmetic in the cyclotomic field.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug)]
pub struct ArcsArgs {
    #[arg(long)]
    pub system: Option<std::path::PathBuf>,
    #[arg(long)]
    pub theta: f64,
    #[arg(long = "P")]
    pub p: f64,
    #[arg(long = "R")]
    pub r: Option<usize>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub ctilde: Option<f64>,
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub max_arcs: u64,
    /// Omit the list of arcs.
    #[arg(long)]
    pub summary: bool,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[command(flatten)]
    pub sys: SystemArg,
    #[arg(long)]
    pub p: u64,
    #[arg(long = "N", default_value_t = 4)]
    pub n: u32,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub nu: Vec<i64>,
    #[arg(long, default_value_t = 12)]
    pub depth_cap: u32,
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub sys: SystemArg,
    #[arg(long = "Qmax", default_value_t = 100)]
    pub q_max: u64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub nu: Vec<i64>,
    /// Δ used for the tail shape; estimated when absent.
    #[arg(long)]
    pub delta: Option<u32>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegralChoice {
    Osc,
    JTruncated,
    Schmidt,
}

#[derive(Args, Debug)]
pub struct IntegralArgs {
    #[command(flatten)]
    pub sys: SystemArg,
    #[arg(long, value_enum, default_value = "schmidt")]
    pub kind: IntegralChoice,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gamma: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu: Vec<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub phi: f64,
    #[arg(long, default_value_t = 1e3)]
    pub t: f64,
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub samples: u64,
    /// Use tensor quadrature instead of Monte Carlo where possible.
    #[arg(long)]
    pub quadrature: bool,
    /// Box as `lo:hi,lo:hi,…`; defaults to `[−1,1]^n`.
    #[arg(long = "box", allow_hyphen_values = true)]
    pub bbox: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodChoice {
    FullEnum,
    LastVarSolve,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[command(flatten)]
    pub sys: SystemArg,
    #[arg(long = "P")]
    pub p: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub nu: Vec<i64>,
    /// Congruence `m1,…,mn;M1,…,Mn`.
    #[arg(long = "mod", allow_hyphen_values = true)]
    pub modulus: Option<String>,
    #[arg(long, value_enum)]
    pub method: Option<MethodChoice>,
    #[arg(long)]
    pub shards: Option<usize>,
    #[arg(long = "box", allow_hyphen_values = true)]
    pub bbox: Option<String>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[command(flatten)]
    pub sys: SystemArg,
    #[arg(long = "Pmax")]
    pub p_max: u64,
    /// Exclude the origin.
    #[arg(long)]
    pub homogeneous: bool,
    #[arg(long = "mod", allow_hyphen_values = true)]
    pub modulus: Option<String>,
}

#[derive(Args, Debug)]
pub struct AsymArgs {
    #[command(flatten)]
    pub sys: SystemArg,
    #[arg(long = "Plist", value_delimiter = ',', default_value = "20,40,80")]
    pub p_list: Vec<f64>,
    #[arg(long = "Qmax", default_value_t = 200)]
    pub q_max: u64,
    #[arg(long, default_value_t = 1e4)]
    pub t: f64,
    #[arg(long, default_value = "10000000", value_parser = parse_count)]
    pub samples: u64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub nu: Vec<i64>,
}

#[derive(Args, Debug)]
pub struct NssArgs {
    #[command(flatten)]
    pub sys: SystemArg,
    /// Patch index `j` (1-based) for the homogeneous variant.
    #[arg(long)]
    pub patch: Option<usize>,
    /// Cofactor degree cap; the schedule `D, 2D, 4D` is used when absent.
    #[arg(long)]
    pub cap: Option<u32>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremChoice {
    Main1,
    Main2,
    Cormain,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub sys: SystemArg,
    /// Δ supplied by the user instead of being estimated.
    #[arg(long)]
    pub delta: Option<u32>,
    #[arg(long, value_enum)]
    pub theorem: Option<TheoremChoice>,
    /// Moduli `M1,…,Mn` for the congruence bound.
    #[arg(long = "moduli", value_delimiter = ',')]
    pub moduli: Vec<u64>,
}

/// Accepts `10000000` as well as `1e7`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("not a count: {s}"))?;
    if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 {
        Ok(f as u64)
    } else {
        Err(format!("not a count: {s}"))
    }
}

pub enum Failure {
    Core(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Core(Error::HypothesisRefused(_)) => 2,
        Failure::Core(Error::BudgetExceeded { .. }) => 3,
        Failure::Core(
            Error::Parse(_)
            | Error::MixedDegrees { .. }
            | Error::ZeroPolynomial(_)
            | Error::DegreeTooLow(_)
            | Error::DegenerateTopPart(_)
            | Error::DimensionMismatch { .. }
            | Error::GcdViolation(_)
            | Error::InvalidArgument(_)
            | Error::InvalidWitness(_)
            | Error::InvalidCertificate(_),
        )
        | Failure::Input(_) => 4,
        Failure::Core(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    }
    match commands::run(&cli.global, cli.command) {
        Ok(out) => {
            use std::io::Write;
            let _ = writeln!(std::io::stdout(), "{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Input(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
