//! `orbitlens`: fractal analysis of orbits of parabolic germs.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use config::Config;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input syntax (exit 1).
    Usage(String),
    /// Errors raised by the library (exit 1 for parse errors, 2 otherwise).
    Core(orbitlens::Error),
    /// I/O and other internal failures (exit 3).
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(orbitlens::Error::Parse(_)) => 1,
            CliError::Core(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(orbitlens::Error::Parse(_)) => "parse",
            CliError::Core(orbitlens::Error::Precondition(_)) => "precondition",
            CliError::Core(orbitlens::Error::Domain(_)) => "domain",
            CliError::Core(orbitlens::Error::Numeric(_)) => "numeric",
            CliError::Internal(_) => "internal",
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Internal(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<orbitlens::Error> for CliError {
    fn from(e: orbitlens::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("I/O error: {e}"))
    }
}

#[derive(Parser, Debug)]
#[command(name = "orbitlens", version, about = "Fractal analysis of orbits of parabolic germs")]
#[command(after_help = "Exit codes: 0 ok, 1 usage/parse, 2 numeric precondition, 3 internal.\n\
ORBITLENS_THREADS caps the worker threads used for sweeps.")]
struct Cli {
    /// Flat JSON file with defaults for any long flag (flags win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an orbit and write its ε-sweep as CSV.
    Sweep(SweepArgs),
    /// Classify a germ or real map from the fractal data of one orbit.
    Classify(ClassifyArgs),
    /// Critical Minkowski order of a real orbit in a Chebyshev scale.
    Order(ClassifyArgs),
    /// Evaluate a sectorial solution of H(f(z)) − H(z) = g(z).
    Abel(AbelArgs),
    /// Saddle-loop dimension, cyclicity and hyperbola-family arithmetic.
    Saddle(SaddleArgs),
    /// Write the orbit points as CSV.
    OrbitDump(DumpArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct OrbitArgs {
    /// Complex germ: builtin name (model, zexp, loggerm) or coefficients
    /// a1,a2,... of z, z^2, ... (e.g. 1,0,1 or 1,0.5+0.1i).
    #[arg(long, allow_hyphen_values = true)]
    pub germ: Option<String>,
    /// Real map in x, e.g. x-x^3, x/2, x^2, x-x^2*l with l = -log x.
    #[arg(long, allow_hyphen_values = true)]
    pub germ_real: Option<String>,
    /// Initial point re+imi (default: 0.1 along an attracting direction).
    #[arg(long, allow_hyphen_values = true)]
    pub z0: Option<String>,
    /// Initial point of a real orbit (default 0.3).
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    /// Maximum number of orbit points (default 1000000).
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GridArgs {
    /// Decades of ε ending at the bottom of the valid window (default 2.5).
    #[arg(long)]
    pub decades: Option<f64>,
    /// Grid points per decade (default 60).
    #[arg(long)]
    pub ppd: Option<usize>,
    /// Lower end of an explicit ε range.
    #[arg(long)]
    pub eps_min: Option<f64>,
    /// Upper end of an explicit ε range.
    #[arg(long)]
    pub eps_max: Option<f64>,
    /// Comma-separated list of ε values.
    #[arg(long)]
    pub eps: Option<String>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub orbit: OrbitArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// planar (area, complex measure, directed area) or line (length).
    #[arg(long)]
    pub kind: Option<String>,
    /// Output CSV (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for two-column gnuplot files, one per measure.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub orbit: OrbitArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// parabolic, real, order or holonomy (default: from the other flags).
    #[arg(long)]
    pub route: Option<String>,
    /// Chebyshev scale: power, power_odd, saddle_loop:8, two_saddle,
    /// abelian:a1,a2,..., exp:c1,c2,... or a list like 1,x,x*l,x^2.
    #[arg(long)]
    pub scale: Option<String>,
    /// Resonance p of a p:q saddle; --germ is then its holonomy.
    #[arg(long)]
    pub p: Option<usize>,
    /// Resonance q of a p:q saddle.
    #[arg(long)]
    pub q: Option<usize>,
    /// Re-run the fits on a sweep CSV instead of building an orbit.
    #[arg(long)]
    pub sweep_in: Option<PathBuf>,
    /// Include fit diagnostics in the report.
    #[arg(long)]
    pub diagnostics: bool,
    /// Output JSON (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AbelArgs {
    /// Germ f: builtin name or coefficients.
    #[arg(long, allow_hyphen_values = true)]
    pub germ: Option<String>,
    /// Right-hand side g: polynomial in z (1, -z, 2-z^2) or coefficients from z^0.
    #[arg(long, allow_hyphen_values = true)]
    pub rhs: Option<String>,
    /// Evaluation point re+imi.
    #[arg(long, allow_hyphen_values = true)]
    pub eval: Option<String>,
    /// plus (attracting petal) or minus (repelling petal).
    #[arg(long)]
    pub side: Option<String>,
    /// Also report |H(f(z)) − H(z) − g(z)|.
    #[arg(long)]
    pub check_residual: bool,
    /// Summation tolerance (default 1e-12).
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SaddleArgs {
    /// Codimension of the saddle loop.
    #[arg(long)]
    pub codim: Option<usize>,
    /// Box dimension of a spiral trajectory.
    #[arg(long)]
    pub dim: Option<f64>,
    /// Dimension of the hyperbola family through points of dimension s.
    #[arg(long)]
    pub hyperbolas: bool,
    /// Box dimension s ∈ [0, 1) of the points s_l.
    #[arg(long)]
    pub s: Option<f64>,
    /// Exponent r > 0 in x^r·y = s_l^r.
    #[arg(long)]
    pub r: Option<f64>,
    /// Also box-count a rasterized family (levels 7..12).
    #[arg(long)]
    pub raster: bool,
}

#[derive(Args, Debug)]
pub struct DumpArgs {
    #[command(flatten)]
    pub orbit: OrbitArgs,
    /// Keep every n-th point (default 1).
    #[arg(long)]
    pub stride: Option<usize>,
    /// Output CSV (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let config = match cli.config.as_deref().map(Config::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code());
        }
    };
    let (result, json_errors) = match &cli.command {
        Command::Sweep(a) => (commands::sweep(a, &config), false),
        Command::Classify(a) => (commands::classify(a, &config, None), true),
        Command::Order(a) => (commands::classify(a, &config, Some("order")), true),
        Command::Abel(a) => (commands::abel(a, &config), true),
        Command::Saddle(a) => (commands::saddle(a, &config), true),
        Command::OrbitDump(a) => (commands::orbit_dump(a, &config), false),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if json_errors {
                let body = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
                println!("{body}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
