//! `dbar`: make test fields, solve, verify and export.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage, and 10..=32 for the library
//! error classes (see `dbar_core::Error::exit_code`).

mod cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "dbar", version, about = "Compactly supported solutions of the dbar-equation on the polydisc")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a canonical test field as CFLD1.
    Make(MakeArgs),
    /// Solve dbar(beta) = omega for a CFLD1 form.
    Solve(SolveArgs),
    /// Run a named property suite, or `all`.
    Verify(VerifyArgs),
    /// Dump one coefficient of a CFLD1 form as CSV or JSON.
    Export(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Case {
    Bump,
    ExactForm,
    AnnulusMomentFree,
    MassBump,
    #[value(name = "off-Z", alias = "off-z")]
    OffZ,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Complex dimension.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Samples per real axis.
    #[arg(long, default_value_t = 64)]
    res: usize,
    /// Margin outside [-1, 1] on every real axis.
    #[arg(long, default_value_t = 0.05)]
    pad: f64,
}

#[derive(Args, Debug)]
struct MakeArgs {
    case: Case,
    #[command(flatten)]
    grid: GridArgs,
    /// Form degree; defaults to n.
    #[arg(long)]
    q: Option<usize>,
    /// Polynomial JSON defining Z (off-Z only).
    #[arg(long)]
    poly: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol_support: f64,
    #[arg(short, long)]
    out: PathBuf,
    /// Where exact-form writes T; defaults to <out>.T.cfld.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    input: PathBuf,
    /// Expected form degree; rejected if the file disagrees.
    #[arg(long)]
    q: Option<usize>,
    /// L^r exponent of the reported norms.
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value_t = 8)]
    lmax: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol_moment: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_support: f64,
    /// Polynomial JSON; with --vanish-order the solution vanishes on Z.
    #[arg(long)]
    poly: Option<PathBuf>,
    #[arg(long = "vanish-order")]
    vanish_order: Option<u32>,
    /// Solution file; defaults to <input>.solution.cfld.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Report file; defaults to stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name or `all`.
    suite: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Recorded in the summary; every suite runs at the resolutions its criterion pins.
    #[arg(long)]
    res: Option<usize>,
    /// Summary file; defaults to stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct ExportArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// 1-based multi-index of the coefficient, e.g. `1,2`; defaults to the first stored one.
    #[arg(long)]
    coeff: Option<String>,
    /// Pin a real axis (0-based) to a sample index: `AXIS=INDEX`. Repeatable.
    #[arg(long)]
    fix: Vec<String>,
    /// Pin complex variable k (1-based) to the nearest sample of a value: `k=RE[,IM]`. Repeatable.
    #[arg(long)]
    at: Vec<String>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Make(a) => cmd::make(&a),
        Command::Solve(a) => cmd::solve(&a),
        Command::Verify(a) => cmd::verify(&a),
        Command::Export(a) => cmd::export(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
