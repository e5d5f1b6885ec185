use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "urb",
    version,
    about = "Energy bounds for ultrarelativistic N-boson systems",
    after_help = "Energies are in units of the potential coupling: for V = c r^q with kinetic \
                  term |p| every energy scales as c^(1/(1+q)).\n\
                  Exit codes: 0 ok, 1 verification failure, 2 input error, 3 solver error \
                  or non-convergence.\n\
                  URB_THREADS caps worker threads (default: all cores)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower and Gaussian upper bounds for a range of particle numbers.
    Bounds(BoundsArgs),
    /// Ground state of a √(p² + μ²) + b V(r).
    Solve(SolveArgs),
    /// Monte Carlo check of the massless kinetic identity and mean angles.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Starting basis size.
    #[arg(long)]
    pub basis: Option<usize>,
    /// Relative convergence tolerance between bases n/2 and n.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Largest basis size tried before giving up on convergence.
    #[arg(long = "max-basis")]
    pub max_basis: Option<usize>,
    /// Quadrature nodes per matrix element (at least 4 x basis).
    #[arg(long)]
    pub quad: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// linear[:c], coulomb[:c], harmonic[:c] or power:q:c
    #[arg(long)]
    pub potential: String,
    /// Particle numbers, `a..b` (inclusive) or a single value.
    #[arg(long = "N", value_name = "RANGE")]
    pub particles: String,
    #[arg(long, default_value_t = 0.0)]
    pub mass: f64,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Also write PREFIX_lower.dat and PREFIX_upper.dat (N, energy).
    #[arg(long, value_name = "PREFIX")]
    pub plot: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long)]
    pub potential: String,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Gaussian,
    Mixture,
    Ball,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    /// Comma-separated particle numbers; `a..b` ranges allowed.
    #[arg(long = "N", value_name = "LIST")]
    pub particles: String,
    #[arg(long, default_value_t = 0.0)]
    pub mass: f64,
    /// Configurations per N; accepts `1e6`.
    #[arg(long, default_value = "1e6")]
    pub samples: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Gaussian per-component standard deviation.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Ball radius.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Mixture components as `weight:sigma,...`.
    #[arg(long, default_value = "0.5:1,0.5:3")]
    pub components: String,
    #[command(flatten)]
    pub output: OutputArgs,
}
