use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use periodscope_core::criteria::{DEFAULT_SAMPLES, DEFAULT_TOL_ISO};

#[derive(Parser, Debug)]
#[command(name = "periodscope", version, about = "Period function of Liénard-II centers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a system and print potential and mass diagnostics.
    System(SystemArgs),
    /// Tabulate T(E) by three methods together with dT/dE.
    Period(PeriodArgs),
    /// Classify the period function from the sign of N on the orbit window.
    Monotonicity(CriterionArgs),
    /// Evaluate the isochrony residual, its guards and the C/D constancy test.
    Isochrony(CriterionArgs),
    /// Coefficients, polynomial signs and period sweeps for the rational-mass family.
    ReproKm(ReproKmArgs),
    /// Periods of the reciprocal-weight family built from an even positive w.
    ReproSect3(ReproSect3Args),
}

#[derive(Args, Debug, Clone)]
pub struct SystemInput {
    /// Friction coefficient f(x).
    #[arg(long = "f", value_name = "EXPR", allow_hyphen_values = true)]
    pub f: String,
    /// Restoring coefficient g(x).
    #[arg(long = "g", value_name = "EXPR", allow_hyphen_values = true)]
    pub g: String,
    #[command(flatten)]
    pub numerics: Numerics,
}

#[derive(Args, Debug, Clone)]
pub struct Numerics {
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, default_values_t = [-10.0, 10.0])]
    pub domain: Vec<f64>,
    /// Quadrature tolerance for the antiderivatives.
    #[arg(long, value_name = "X", default_value_t = 1e-10)]
    pub tol_q: f64,
}

#[derive(Args, Debug, Clone, Default)]
pub struct EnergyArgs {
    /// Comma-separated energy list.
    #[arg(long, value_name = "E1,E2,...", value_delimiter = ',', conflicts_with = "e_range")]
    pub energies: Option<Vec<f64>>,
    /// Linear sweep of N energies from MIN to MAX.
    #[arg(long, num_args = 3, value_names = ["MIN", "MAX", "N"])]
    pub e_range: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct SystemArgs {
    #[command(flatten)]
    pub system: SystemInput,
    /// Points in the tabulated series.
    #[arg(long, value_name = "N", default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub system: SystemInput,
    #[command(flatten)]
    pub energies: EnergyArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug, Clone)]
pub struct Sampling {
    /// Relative tolerance of the isochrony decisions.
    #[arg(long, value_name = "X", default_value_t = DEFAULT_TOL_ISO)]
    pub tol_iso: f64,
    /// Sample points per orbit window.
    #[arg(long, value_name = "N", default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct CriterionArgs {
    #[command(flatten)]
    pub system: SystemInput,
    #[command(flatten)]
    pub energies: EnergyArgs,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ReproKmArgs {
    #[arg(long, value_name = "LIST", value_delimiter = ',', allow_negative_numbers = true,
          default_values_t = [0.0, 0.96, 1.0, 1.001, 1.055])]
    pub a3: Vec<f64>,
    #[command(flatten)]
    pub numerics: Numerics,
    #[command(flatten)]
    pub energies: EnergyArgs,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ReproSect3Args {
    /// Even, positive weight w(x).
    #[arg(long, value_name = "EXPR", default_value = "1+x^2", allow_hyphen_values = true)]
    pub w: String,
    #[command(flatten)]
    pub numerics: Numerics,
    #[command(flatten)]
    pub energies: EnergyArgs,
    #[command(flatten)]
    pub output: Output,
}
