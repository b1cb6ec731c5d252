#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod analyze;
mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "spect-mb", version, about = "Attenuated Radon transform experiments and joint (a, f) reconstruction")]
struct Cli {
    /// Worker threads for the compute kernels (default: all cores).
    #[arg(long, global = true, env = "SPECT_MB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a layered phantom and its rasterised a and f images.
    Phantom(PhantomArgs),
    /// Simulate a parallel-beam sinogram.
    Project(ProjectArgs),
    /// Singularity analysis of phantom data.
    #[command(subcommand)]
    Analyze(analyze::AnalyzeCommand),
    /// Joint reconstruction of attenuation and source from a sinogram.
    Reconstruct(ReconstructArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    /// Concentric disks: inner radius 0.5, outer radius 0.8.
    Radial,
    /// Nested squares.
    Square,
}

#[derive(Args)]
pub struct PhantomArgs {
    #[arg(value_enum)]
    pub family: FamilyArg,
    /// Attenuation value inside the inner region.
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub f1: f64,
    #[arg(long)]
    pub f2: f64,
    /// Pixels per side.
    #[arg(long, default_value_t = 256)]
    pub m: usize,
    /// Side length of the square image domain centred on the origin.
    #[arg(long, default_value_t = 2.0)]
    pub width: f64,
    /// Output directory.
    #[arg(long, short, default_value = ".")]
    pub out: PathBuf,
    /// Grey-level window for the PGM previews, as `lo,hi`.
    #[arg(long, value_parser = parse_pair)]
    pub window: Option<(f64, f64)>,
}

#[derive(Args)]
pub struct ProjectArgs {
    /// Phantom JSON written by `phantom`.
    #[arg(long)]
    pub phantom: Option<PathBuf>,
    /// Attenuation image (with `--f`) instead of a phantom; implies `--grid`.
    #[arg(long, requires = "f")]
    pub a: Option<PathBuf>,
    #[arg(long, requires = "a")]
    pub f: Option<PathBuf>,
    /// Exact line integrals through the analytic phantom (default for phantoms).
    #[arg(long, conflicts_with = "grid")]
    pub exact: bool,
    /// Pixel-grid projector.
    #[arg(long)]
    pub grid: bool,
    /// Pixels per side when rasterising a phantom for `--grid`.
    #[arg(long, default_value_t = 256)]
    pub m: usize,
    #[arg(long, default_value_t = 2.0)]
    pub width: f64,
    #[arg(long, default_value_t = 60)]
    pub angles: usize,
    #[arg(long, default_value_t = 129)]
    pub offsets: usize,
    /// Detector half width (default: half the image diagonal).
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Relative Gaussian noise level, e.g. 0.05.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output sinogram (raw f64 plus `.json` sidecar).
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ReconstructArgs {
    /// Sinogram written by `project`.
    #[arg(long)]
    pub data: PathBuf,
    /// Solver settings as JSON; flags below override individual fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    #[arg(long, default_value_t = 2.0)]
    pub width: f64,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long)]
    pub max_outer: Option<usize>,
    /// Admissible attenuation values, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub admissible: Option<Vec<f64>>,
    /// Initial attenuation image (default: zero).
    #[arg(long)]
    pub a0: Option<PathBuf>,
    #[arg(long, short, default_value = "recon")]
    pub out: PathBuf,
    #[arg(long, value_parser = parse_pair)]
    pub window: Option<(f64, f64)>,
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated numbers, got {s:?}"));
    }
    let x = parts[0].trim().parse::<f64>().map_err(|e| e.to_string())?;
    let y = parts[1].trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((x, y))
}

/// Failure categories mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

pub type Outcome = Result<(), Failure>;

/// Rejects missing input files as a usage error.
pub fn require_file(path: &std::path::Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("input file not found: {}", path.display())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Phantom(args) => commands::phantom(&args),
        Command::Project(args) => commands::project(&args),
        Command::Analyze(cmd) => analyze::run(&cmd),
        Command::Reconstruct(args) => commands::reconstruct(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
