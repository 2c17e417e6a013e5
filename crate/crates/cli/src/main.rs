//! `areahol`: lattice Yang-Mills flows, area-holonomy checks, sphere
//! classification and path-group words from the command line.
//!
//! Exit codes: 0 success, 1 I/O, 2 no convergence, 3 verification failure,
//! 64 usage.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "areahol",
    version,
    about = "Yang-Mills connections on surfaces and the holonomy of area-preserving loops"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub struct Global {
    /// Seed for every random choice; recorded in the outputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance: gradient norm for `solve` (default 1e-9), residual for `verify` (default 1e-6).
    #[arg(long, global = true, value_parser = positive_f64)]
    pub tol: Option<f64>,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Record the full step history in flow reports.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Output file (field snapshot for `solve`, results for the other commands).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Flow a random field in a chosen flux sector to a Yang-Mills critical point.
    Solve(SolveArgs),
    /// Check that holonomy around homotopic loops depends only on enclosed area.
    Verify(VerifyArgs),
    /// List the Yang-Mills classes on the sphere up to a weight bound.
    Classify(ClassifyArgs),
    /// Normalize and multiply elements of the extended surface group.
    #[command(allow_negative_numbers = true)]
    Word(WordArgs),
    /// Turn a flow report or shrinking-loop table into CSV.
    PlotData(PlotArgs),
}

#[derive(Args)]
pub struct SolveArgs {
    /// `torus:N` or `sphere:S`.
    #[arg(long)]
    pub mesh: String,
    /// Matrix dimension of the structure group U(n).
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Topological sector: starting curvature 2πi·diag(k, 0, …).
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub flux: i64,
    /// Size of the random perturbation applied to the starting field.
    #[arg(long, default_value_t = 0.3)]
    pub perturb: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    /// Initial line-search step (default: smallest face area / 16).
    #[arg(long, value_parser = positive_f64)]
    pub step: Option<f64>,
    /// Report path (default: the field path with extension `report.json`).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Field snapshot written by `solve`.
    #[arg(long)]
    pub field: PathBuf,
    /// JSON list of `{"loop1": loop, "loop2": loop}` pairs.
    #[arg(long, conflicts_with = "random")]
    pub pairs: Option<PathBuf>,
    /// Number of random homotopic pairs when no pair file is given.
    #[arg(long, default_value_t = 50)]
    pub random: usize,
    /// Random-walk length used to build random pairs.
    #[arg(long, default_value_t = 16)]
    pub loop_len: usize,
    /// Face whose curvature, moved to the basepoint, serves as Λ.
    #[arg(long, default_value_t = 0)]
    pub lambda_from_face: usize,
    /// Perturb the field by exp(εX) per edge before checking.
    #[arg(long)]
    pub perturb: Option<f64>,
    /// Also tabulate shrinking corner loops with these block sizes, e.g. `8,4,2,1`.
    #[arg(long, value_delimiter = ',')]
    pub shrink: Option<Vec<usize>>,
}

#[derive(Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub kmax: u32,
}

#[derive(Args)]
pub struct WordArgs {
    #[arg(long)]
    pub genus: usize,
    /// Central coordinate of each element, in order (missing values are 0).
    #[arg(long, num_args = 1)]
    pub t: Vec<f64>,
    /// Check that the relator normalizes to (empty, 1).
    #[arg(long)]
    pub check_relator: bool,
    /// Words such as "a1 b1 a1^-1 b1^-1"; missing words are empty.
    pub words: Vec<String>,
}

#[derive(Args)]
pub struct PlotArgs {
    /// Flow report (with step history) or `verify` output holding a shrinking-loop table.
    #[arg(long)]
    pub input: PathBuf,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

pub enum Failure {
    Usage(anyhow::Error),
    Io(anyhow::Error),
    NotConverged(String),
    Verification(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (code, msg) = match self {
            Failure::Usage(e) => (64, format!("{e:#}")),
            Failure::Io(e) => (1, format!("{e:#}")),
            Failure::NotConverged(m) => (2, m),
            Failure::Verification(m) => (3, m),
        };
        eprintln!("areahol: {msg}");
        ExitCode::from(code)
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("AH_NUM_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .map_err(|_| Failure::Usage(anyhow::anyhow!("AH_NUM_THREADS={value} is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.into()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(64),
            };
        }
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Solve(args) => commands::solve(&cli.global, args),
        Command::Verify(args) => commands::verify(&cli.global, args),
        Command::Classify(args) => commands::classify(&cli.global, args),
        Command::Word(args) => commands::word(&cli.global, args),
        Command::PlotData(args) => commands::plot_data(&cli.global, args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
