mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use config::{Config, Format};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "llterm", version, about = "Termination of integer linear loops `while Bx >= c do x := Ax + a`")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide termination over all integer initial states.
    Analyze(AnalyzeArgs),
    /// Run the loop concretely from given initial states.
    Simulate(SimulateArgs),
    /// Eigenvalues, indices and modulus classes of the update matrix.
    Spectrum(OptMatrixInput),
    /// Multiplicative relations and torus structure.
    Relations(RelationsArgs),
    /// Structured description of the witness set.
    Witness(FileArg),
    /// Compare verdicts with simulation over a box, for every loop in a directory.
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct FileArg {
    /// Loop file (`.loop` text or JSON).
    file: PathBuf,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    file: PathBuf,
    /// Comma-separated increasing search radii, e.g. `2,8,32`.
    #[arg(long, value_delimiter = ',')]
    radius_schedule: Option<Vec<u64>>,
    #[arg(long)]
    m_max: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SimFormat {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
pub struct SimulateArgs {
    file: PathBuf,
    /// Initial state, e.g. `3,-1`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "region", required_unless_present = "region")]
    init: Option<String>,
    /// Inclusive box, e.g. `-5:5,0:3`.
    #[arg(long = "box", allow_hyphen_values = true)]
    region: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    max_steps: u64,
    /// Report periodic orbits as cycles.
    #[arg(long)]
    detect_cycles: bool,
    /// Include every visited state (single initial state only).
    #[arg(long)]
    trace: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: SimFormat,
}

#[derive(Args)]
pub struct RelationsArgs {
    #[command(flatten)]
    input: OptMatrixInput,
    /// Algebraic tuple: `;`-separated entries `c0,c1,..,cd@k`, the k-th root
    /// (ordered by real then imaginary part) of `c0 + c1 x + ... + cd x^d`.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["file", "matrix"])]
    tuple: Option<String>,
    /// Enumeration radius; defaults to the explicit bound.
    #[arg(long)]
    bound: Option<u64>,
}

#[derive(Args)]
pub struct OptMatrixInput {
    /// Loop file whose update matrix is used.
    file: Option<PathBuf>,
    /// Integer matrix given by rows, e.g. `0,-1;1,0`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "file")]
    matrix: Option<String>,
}

#[derive(Args)]
pub struct CorpusArgs {
    /// Directory of `.loop` files.
    dir: PathBuf,
    /// Half-width of the box of initial states.
    #[arg(long, default_value_t = 20)]
    radius: i64,
    /// Largest number of box points per loop; the box shrinks to fit.
    #[arg(long, default_value_t = 20_000)]
    max_points: u64,
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    };
    let result = cfg.and_then(|cfg| {
        let threads = cfg.thread_count()?;
        if threads > 0 {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())?;
        }
        match cli.cmd {
            Command::Analyze(a) => commands::analyze(&cfg, a),
            Command::Simulate(a) => commands::simulate(a),
            Command::Spectrum(a) => commands::spectrum(a),
            Command::Relations(a) => commands::relations(&cfg, a),
            Command::Witness(a) => commands::witness(&cfg, &a.file),
            Command::Corpus(a) => commands::corpus(&cfg, a),
        }
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
