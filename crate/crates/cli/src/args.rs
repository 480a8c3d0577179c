use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "weaktype", version, about = "Sharp weak-type constants, special functions and their checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed of every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Report format (default json); figure data is always CSV.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Directory for artifacts and their manifests.
    #[arg(long, global = true, env = "WEAKTYPE_OUT_DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for the Monte Carlo suites (0: all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
}

impl GlobalArgs {
    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of the sharp constants at each `--p`.
    Constants {
        #[arg(long = "p", required = true, num_args = 1.., allow_negative_numbers = true)]
        p: Vec<f64>,
    },
    /// Run a property suite; exit status 1 if any check fails.
    Verify(VerifyArgs),
    /// Plot-ready data for the figures.
    Figures {
        #[command(subcommand)]
        which: Figure,
    },
    /// Tabulate the Riccati solution G.
    Gfun {
        #[arg(long, default_value_t = 3.0)]
        p: f64,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = weaktype::ode_g::DEFAULT_STEP)]
        step: f64,
        #[arg(long, value_enum, default_value_t = GMethod::Rk)]
        method: GMethod,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GMethod {
    Rk,
    Bessel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    W,
    UWeak,
    UOrth,
    Ode,
    Extremal,
    McWeakType,
    McStrip,
    Harmonic,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::W => "w",
            Suite::UWeak => "u-weak",
            Suite::UOrth => "u-orth",
            Suite::Ode => "ode",
            Suite::Extremal => "extremal",
            Suite::McWeakType => "mc-weak-type",
            Suite::McStrip => "mc-strip",
            Suite::Harmonic => "harmonic",
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub p: Option<f64>,
    /// Samples (pairs, for mc-weak-type).
    #[arg(long)]
    pub n: Option<usize>,
    /// Time step of the Brownian schemes.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Paths per random pair (mc-weak-type).
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
}

#[derive(Debug, Subcommand)]
pub enum Figure {
    /// Trajectories of the extremal pair (X, Y).
    Trajectories {
        #[arg(long, default_value_t = 3.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0 / 24.0)]
        x: f64,
        #[arg(long, default_value_t = 1.5)]
        delta: f64,
    },
    /// Boundaries between the regions D0..D7 in the upper half-plane.
    Regions {
        #[arg(long, default_value_t = 3.0)]
        p: f64,
        /// Points per boundary curve.
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
}
