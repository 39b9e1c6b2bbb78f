//! Command-line front end for exact Chvátal-Gomory closure computation.
//!
//! The binary dispatches to the `cg-closure` library:
//!
//! * `cgc closure compute` — certified closure or bounded brute-force oracle;
//! * `cgc closure verify` — independent re-derivation of a result file's claims;
//! * `cgc kronecker approx` — simultaneous Diophantine approximation with an
//!   exact residual certificate;
//! * `cgc homogeneity lift` — cut-family synthesis for a face inequality;
//! * `cgc plot` — deterministic SVG rendering of a planar body, its cuts,
//!   and its closure;
//! * `cgc corpus run` — regression runs over a directory of instances.
//!
//! Exit codes: `0` success, `1` domain error (the error name is printed),
//! `2` usage error.  All persisted values are exact (`"p/q"` strings and
//! field-element pairs); output bytes depend only on inputs and flags.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod exec;
mod io;
mod resultio;
pub mod svg;

/// Terminal failure of a subcommand.
#[derive(Debug)]
pub(crate) enum Failure {
    /// Bad invocation: unparsable flag values, unreadable files, malformed
    /// schemas.  Exits with code 2.
    Usage(String),
    /// The underlying computation refused the input.  Exits with code 1.
    Domain {
        /// Library module that produced the error.
        module: &'static str,
        /// Error name followed by its message.
        message: String,
    },
}

/// Wraps a library error, keeping its variant name visible in the output.
pub(crate) fn domain<E: std::fmt::Debug + std::fmt::Display>(
    module: &'static str,
    err: E,
) -> Failure {
    let debug = format!("{err:?}");
    let name: String = debug
        .chars()
        .take_while(|c| c.is_alphanumeric() || *c == '_')
        .collect();
    Failure::Domain { module, message: format!("{name}: {err}") }
}

#[derive(Parser)]
#[command(
    name = "cgc",
    version,
    about = "Exact Chvátal-Gomory closures of compact convex bodies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute or verify closures.
    #[command(subcommand)]
    Closure(ClosureCmd),
    /// Simultaneous Diophantine approximation with exact certificates.
    #[command(subcommand)]
    Kronecker(KroneckerCmd),
    /// Cut-family synthesis lifting a face inequality into a cut.
    #[command(subcommand)]
    Homogeneity(HomogeneityCmd),
    /// Render a planar body, its cuts, and its closure as SVG.
    Plot(PlotArgs),
    /// Batch runs over a corpus directory.
    #[command(subcommand)]
    Corpus(CorpusCmd),
}

#[derive(Subcommand)]
enum ClosureCmd {
    /// Compute the closure of a body.
    Compute(ComputeArgs),
    /// Re-derive the claims of a computed result file.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum KroneckerCmd {
    /// Find (a, N) with N > n0 and |a - N*pi| < eps, certified exactly.
    Approx(ApproxArgs),
}

#[derive(Subcommand)]
enum HomogeneityCmd {
    /// Lift a base cut from a face of the body into a certified cut family.
    Lift(LiftArgs),
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Run every instance under DIR/instances and check expected results.
    Run(CorpusArgs),
}

/// How a closure is obtained.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Mode {
    /// Certified exact closure (polytope bodies only).
    Exact,
    /// Brute-force truncation: every cut with max-norm at most the bound.
    Oracle,
}

#[derive(Args)]
struct ComputeArgs {
    /// Body description file (JSON).
    #[arg(long)]
    body: PathBuf,
    /// Computation mode.
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Enumeration bound for oracle mode (ignored in exact mode).
    #[arg(long, default_value_t = 3)]
    bound: u32,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Result file produced by `closure compute --mode exact`.
    #[arg(long)]
    result: PathBuf,
    /// Body description file the result claims to describe.
    #[arg(long)]
    body: PathBuf,
    /// Enumeration bound for the independent oracle comparison.
    #[arg(long, default_value_t = 6)]
    bound: u32,
}

#[derive(Args)]
struct ApproxArgs {
    /// Target vector as a JSON array; entries are rationals ("1/2", 3) or
    /// field-element pairs [rational, coefficient of sqrt(m)].  A bare pair
    /// of scalars with nonzero second entry is one irrational coordinate,
    /// so --pi "[0,1]" with --field 2 is the one-dimensional target sqrt(2).
    #[arg(long)]
    pi: String,
    /// Square-free field index m of Q(sqrt(m)).
    #[arg(long, default_value_t = 2)]
    field: u64,
    /// Approximation tolerance, an exact positive rational such as 1/100.
    #[arg(long)]
    eps: String,
    /// The returned multiplier N must exceed this floor.
    #[arg(long, default_value_t = 0)]
    n0: i64,
}

#[derive(Args)]
struct LiftArgs {
    /// Body description file (JSON); must be a polytope.
    #[arg(long)]
    body: PathBuf,
    /// Outward direction selecting the face to lift from (JSON array, same
    /// entry grammar as --pi).
    #[arg(long)]
    face_normal: String,
    /// Integer base-cut normal c (JSON array of integers).
    #[arg(long)]
    cut: String,
    /// Base-cut right-hand side; defaults to the exact support of the face
    /// in direction c.
    #[arg(long)]
    delta: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Body description file (JSON); must be 2-dimensional.
    #[arg(long)]
    body: PathBuf,
    /// Which cuts and closure to draw.
    #[arg(long, value_enum, default_value = "oracle")]
    mode: Mode,
    /// Max-norm bound of the drawn cuts in oracle mode.
    #[arg(long, default_value_t = 1)]
    bound: u32,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus directory containing instances/*.json and optionally
    /// expected/*.json.
    #[arg(long)]
    dir: PathBuf,
    /// Directory for per-instance result files; skipped when omitted.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Runs the tool on the given argument vector and returns the process exit
/// code: 0 success, 1 domain error, 2 usage error.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    let outcome = match &cli.command {
        Command::Closure(ClosureCmd::Compute(a)) => exec::compute(a),
        Command::Closure(ClosureCmd::Verify(a)) => exec::verify(a),
        Command::Kronecker(KroneckerCmd::Approx(a)) => exec::kronecker_approx(a),
        Command::Homogeneity(HomogeneityCmd::Lift(a)) => exec::homogeneity_lift(a),
        Command::Plot(a) => exec::plot(a),
        Command::Corpus(CorpusCmd::Run(a)) => exec::corpus_run(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(Failure::Domain { module, message }) => {
            eprintln!("error[{module}]: {message}");
            1
        }
    }
}
