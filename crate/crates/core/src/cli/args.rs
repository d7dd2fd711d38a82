use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "rotoseen", version, about = "Spectral laboratory for the rotating Oseen resolvent problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify (2π/T)/ω, report the smallest positive lattice element and
    /// the smallness conditions.
    Resonance(ResonanceArgs),
    /// Rotating-frame resolvent solve of a closed-form right-hand side.
    Solve(SolveArgs),
    /// Assemble a time-periodic solution mode by mode.
    TpAssemble(TpArgs),
    /// Build the resonant counterexample family and its blow-up ratios.
    Counterexample(CounterexampleArgs),
    /// Observed ratio against the predicted constant as s approaches ωℤ.
    Sweep(SweepArgs),
    /// Anisotropic embedding ratios across λ.
    Embedding(EmbeddingArgs),
    /// Full resolvent-estimate report with a fitted C₀.
    Report(ReportArgs),
}

/// Flags shared by every command. Each may also come from `--config`;
/// flags win.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Common {
    /// JSON file with any of these settings (snake_case keys).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $ROTOSEEN_OUT or the working directory).
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    /// Ratio (2π/T)/ω, or α/ω for the counterexample: c/d, sqrt2, golden or a number.
    #[arg(long)]
    pub ratio: Option<String>,
    #[arg(long)]
    pub period: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Spectral grid points per axis (odd).
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Spectral grid half-width.
    #[arg(long)]
    pub grid_l: Option<f64>,
    #[arg(long)]
    pub time_nodes: Option<usize>,
    /// Physical sample box as `half_width,points`.
    #[arg(long = "box")]
    #[serde(rename = "box")]
    pub physical_box: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Common {
    /// Fill unset fields from `other`.
    pub fn or(self, other: Common) -> Common {
        Common {
            config: self.config,
            out: self.out.or(other.out),
            lambda: self.lambda.or(other.lambda),
            omega: self.omega.or(other.omega),
            ratio: self.ratio.or(other.ratio),
            period: self.period.or(other.period),
            s: self.s.or(other.s),
            q: self.q.or(other.q),
            theta: self.theta.or(other.theta),
            n: self.n.or(other.n),
            n_max: self.n_max.or(other.n_max),
            grid_n: self.grid_n.or(other.grid_n),
            grid_l: self.grid_l.or(other.grid_l),
            time_nodes: self.time_nodes.or(other.time_nodes),
            physical_box: self.physical_box.or(other.physical_box),
            seed: self.seed.or(other.seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsKind {
    /// e₁-directed Gaussian (axisymmetric).
    Axial,
    /// Gaussian swirl about e₁ (angular bandwidth 1).
    Swirl,
    /// Gaussian gradient field (pure pressure).
    Gradient,
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    #[command(flatten)]
    pub common: Common,
    /// α; with --omega this classifies α/ω from floats when --ratio is absent.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RhsArgs {
    /// Closed-form right-hand side [default: swirl].
    #[arg(long, value_enum)]
    pub rhs: Option<RhsKind>,
    /// Gaussian width of the right-hand side [default: 1].
    #[arg(long)]
    pub width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub rhs: RhsArgs,
    /// Problem description JSON: {params, rhs, grid, n_time_nodes}. Flags win.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Write velocity and pressure field dumps.
    #[arg(long)]
    pub dump: bool,
}

#[derive(Debug, Args)]
pub struct TpArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub rhs: RhsArgs,
    /// Time modes k carrying the right-hand side.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-2i64, -1, 0, 1, 2])]
    pub modes: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    ANorm,
    L2Norm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    Resonant,
    Literal,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also run the divergence probe for this renormalization.
    #[arg(long, value_enum)]
    pub variant: Option<Variant>,
    #[arg(long, value_enum, default_value = "resonant")]
    pub window: Window,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub rhs: RhsArgs,
    /// Values of s; default ω(1 − 2^{−j}), j = 1..6.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub s_list: Vec<f64>,
    /// C₀ used for the ceiling column.
    #[arg(long, default_value_t = 1.0)]
    pub c0: f64,
    /// Sweep along the counterexample family n = 1..n-max instead.
    #[arg(long)]
    pub counterexample: bool,
}

#[derive(Debug, Args)]
pub struct EmbeddingArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 10.0])]
    pub lambdas: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub rhs: RhsArgs,
    /// Manufactured solutions in the C₀ calibration suite.
    #[arg(long, default_value_t = 50)]
    pub calibration: usize,
}
