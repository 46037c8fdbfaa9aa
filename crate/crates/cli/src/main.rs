//! `svdlab`: decompose, benchmark and generate symmetric matrices, train and
//! apply eigenface models, and score PERCLOS from eye-state labels.
//!
//! Exit codes: 0 success, 2 input error, 3 convergence failure, 4 residual
//! validation failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use svdlab_core::bench::MatrixKind;
use svdlab_core::{Algorithm, SolverScheme};

#[derive(Parser)]
#[command(name = "svdlab", version, about = "Symmetric SVD backends, benchmarks and eigenfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a symmetric matrix and write U, S and V.
    Decompose(DecomposeArgs),
    /// Time backends on generated matrices.
    Bench(BenchArgs),
    /// Write a generated symmetric matrix.
    Generate(GenerateArgs),
    /// Train, apply or demo eigenface models.
    #[command(subcommand)]
    Eigenfaces(EigenfacesCommand),
    /// PERCLOS per time window from a label CSV.
    Perclos(PerclosArgs),
}

#[derive(Args)]
struct DecomposeArgs {
    /// jacobi, hestenes, gk, qr or dc.
    #[arg(long)]
    alg: Algorithm,
    #[arg(long)]
    input: PathBuf,
    /// Writes PREFIX.U.txt, PREFIX.S.txt and PREFIX.V.txt.
    #[arg(long)]
    out: PathBuf,
    /// Convergence threshold; each backend has its own default.
    #[arg(long)]
    tol: Option<f64>,
    /// Divide-and-conquer leaf size.
    #[arg(long, default_value_t = 25)]
    cutoff: usize,
    /// Secular scheme for dc: left, right, middle, fixed or hybrid.
    #[arg(long, default_value = "hybrid")]
    scheme: SolverScheme,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Table,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "dc,qr")]
    algs: Vec<Algorithm>,
    #[arg(long, value_delimiter = ',', default_value = "50,100,200,500,1000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// random-symmetric, random-spd, graded or identity.
    #[arg(long, default_value = "random-symmetric")]
    kind: MatrixKind,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "random-symmetric")]
    kind: MatrixKind,
    /// Standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EigenfacesCommand {
    /// Train from DIR/<class>/*.pgm.
    Train {
        #[arg(long)]
        dir: PathBuf,
        /// Number of eigenfaces; by default the fewest that keep 95% of the energy.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "dc")]
        alg: Algorithm,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify one PGM image against a trained model.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Write the bundled synthetic open/closed eye set as a training directory.
    Demo {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct PerclosArgs {
    /// CSV with columns timestamp_s and label (open or closed).
    #[arg(long)]
    labels: PathBuf,
    /// Window length in seconds.
    #[arg(long, default_value_t = 180.0)]
    window: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Decompose(a) => commands::decompose(a),
        Command::Bench(a) => commands::bench(a),
        Command::Generate(a) => commands::generate(a),
        Command::Eigenfaces(c) => commands::eigenfaces(c),
        Command::Perclos(a) => commands::perclos(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
