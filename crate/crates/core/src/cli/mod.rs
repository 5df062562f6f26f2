//! Command-line frontend. The binary is a thin wrapper over [`run_cli`].
//!
//! Exit codes: 0 success, 2 usage, 3 a requested check failed, 4 input or
//! output problem (missing or malformed files).

mod analyze;
mod farey_cmd;
mod format;
mod plot;
mod replicate;
mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use analyze::{analyze_trace, Analysis, CheckKind, CheckOutcome, CheckStatus};
pub use format::{format_f64, format_scalar};
pub use replicate::SummaryRow;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECK: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    CheckFailed(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::CheckFailed(_) => EXIT_CHECK,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "boostcycle",
    version,
    about = "Optimal AdaBoost as a dynamical system: runs, cycle analysis and Farey orbits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run boosting on a pool file or a CSV dataset and write a trace.
    Run(RunArgs),
    /// Detect cycles in a trace and run structural checks.
    Analyze(AnalyzeArgs),
    /// Periodic orbits of the Farey map.
    #[command(subcommand)]
    Farey(FareyCommand),
    /// Dataset experiments: one run per seed, figures and a summary table.
    Replicate(ReplicateArgs),
    /// Plot the edge series of a trace as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct DatasetArgs {
    /// CSV file with a header row.
    #[arg(long, conflicts_with = "pool")]
    dataset: Option<PathBuf>,
    /// Name of the label column.
    #[arg(long, requires = "dataset")]
    label: Option<String>,
    /// Label value treated as the positive class; all others are negative.
    #[arg(long, requires = "dataset")]
    positive: Option<String>,
    /// Subsample this many rows before boosting.
    #[arg(long, requires = "dataset")]
    sample: Option<usize>,
    /// Maximum tree depth.
    #[arg(long, default_value_t = 3, requires = "dataset")]
    depth: usize,
    /// Maximum number of tree leaves.
    #[arg(long, default_value_t = 4, requires = "dataset")]
    leaves: usize,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Pool file: one `+`/`-` dichotomy per line.
    #[arg(long)]
    pool: Option<PathBuf>,
    #[command(flatten)]
    data: DatasetArgs,
    /// Sampling seed; recorded in the trace.
    #[arg(long)]
    seed: Option<u64>,
    /// optimal, first-above:THETA or fixed:I,J,...
    #[arg(long, default_value = "optimal")]
    rule: String,
    /// Number of iterations.
    #[arg(long)]
    iters: usize,
    /// exact (rational) or float arithmetic.
    #[arg(long, default_value = "float")]
    mode: String,
    /// Trace output path; the trace goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    trace: PathBuf,
    /// Comparison tolerance for float traces.
    #[arg(long, default_value_t = crate::cycle::DEFAULT_TOLERANCE)]
    tol: f64,
    /// Comma-separated checks: 3wgt, wvals, gencyc, farey, nabla, or all.
    #[arg(long, value_delimiter = ',')]
    check: Vec<String>,
    /// Positions skipped before cycle search; half the trace by default.
    #[arg(long)]
    burn_in: Option<usize>,
    /// Number of consecutive periods required for a cycle.
    #[arg(long, default_value_t = crate::cycle::DEFAULT_MIN_REPEATS)]
    min_repeats: usize,
    /// Print a JSON report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum FareyCommand {
    /// All rotation classes of words of length K.
    Enumerate {
        #[arg(long)]
        k: usize,
        /// Also print 50-digit decimal expansions.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        json: bool,
    },
    /// The periodic orbit of one word.
    Orbit {
        #[arg(long)]
        word: String,
        #[arg(long)]
        json: bool,
    },
    /// Checks that primitive orbit values are pairwise distinct up to length K.
    Uniqueness {
        #[arg(long, default_value_t = 12)]
        max_k: usize,
    },
}

#[derive(Debug, Args)]
struct ReplicateArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    label: String,
    #[arg(long)]
    positive: String,
    #[arg(long)]
    sample: Option<usize>,
    /// Seeds for sampling, one run each (comma-separated).
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 4)]
    leaves: usize,
    #[arg(long, default_value_t = 20000)]
    iters: usize,
    #[arg(long, default_value = "float")]
    mode: String,
    /// Directory for figures, traces and summary.csv.
    #[arg(long)]
    out_dir: PathBuf,
    /// Also write one trace file per run (large for long runs).
    #[arg(long)]
    traces: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    trace: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Reference line: golden, sqrt2, or VALUE[:LABEL]. Repeatable.
    #[arg(long)]
    reference: Vec<String>,
    #[arg(long)]
    title: Option<String>,
    /// Plot from this iteration on.
    #[arg(long)]
    from: Option<usize>,
    #[arg(long, default_value_t = 800)]
    width: u32,
    #[arg(long, default_value_t = 400)]
    height: u32,
}

/// Parses `args` (including the program name) and executes the command,
/// returning the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => run::cmd_run(a, out, err),
        Command::Analyze(a) => analyze::cmd_analyze(a, out),
        Command::Farey(c) => farey_cmd::cmd_farey(c, out, err),
        Command::Replicate(a) => replicate::cmd_replicate(a, out, err),
        Command::Plot(a) => plot::cmd_plot(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
