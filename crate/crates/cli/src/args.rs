//! Command-line surface and the scalar parsers shared with config files.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qclock::clock::ClockKind;

#[derive(Debug, Parser)]
#[command(name = "qclock", version, about = "Quantum dynamics driven by a random clock")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Sample clock paths Γ_t for one or more rates (CSV).
    ClockPaths(CommonArgs),
    /// Bloch trajectory of a qubit along sampled clock paths (CSV).
    Trajectory(CommonArgs),
    /// Truncated master-equation orbits and the exact averaged orbit (CSV).
    Orbits(CommonArgs),
    /// Monte Carlo ensemble against the closed-form average (JSON).
    McVsExact(CommonArgs),
    /// Atomic-clock, Planck-tick and Fisher bounds (JSON).
    Bounds(CommonArgs),
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::ClockPaths(_) => CommandKind::ClockPaths,
            Command::Trajectory(_) => CommandKind::Trajectory,
            Command::Orbits(_) => CommandKind::Orbits,
            Command::McVsExact(_) => CommandKind::McVsExact,
            Command::Bounds(_) => CommandKind::Bounds,
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::ClockPaths(a)
            | Command::Trajectory(a)
            | Command::Orbits(a)
            | Command::McVsExact(a)
            | Command::Bounds(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    ClockPaths,
    Trajectory,
    Orbits,
    McVsExact,
    Bounds,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::ClockPaths => "clock-paths",
            CommandKind::Trajectory => "trajectory",
            CommandKind::Orbits => "orbits",
            CommandKind::McVsExact => "mc-vs-exact",
            CommandKind::Bounds => "bounds",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    /// Seconds, with H given as an angular frequency H/ħ.
    Si,
    /// ħ = 1, dimensionless time.
    Natural,
}

impl Units {
    pub fn label(self) -> &'static str {
        match self {
            Units::Si => "si",
            Units::Natural => "natural",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Starting state of the system.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Equal superposition of all basis states (|+x⟩ for a qubit).
    PlusX,
    /// Maximally mixed state.
    Mixed,
    /// Computational basis state `k`.
    Basis(usize),
    /// Explicit amplitudes, normalized on use.
    Amplitudes(Vec<Complex64>),
}

/// Flags accepted by every subcommand. Flags override the config file, which
/// overrides the preset.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON config file; flags take precedence over its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named parameter set: fig1, fig2, fig3a, fig3b, bounds-paper.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, value_parser = parse_model)]
    pub model: Option<ClockKind>,
    /// Clock rate(s) κ, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_positive)]
    pub kappa: Option<Vec<f64>>,
    /// Clock scale(s) λ = 1/κ, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_positive)]
    pub lambda: Option<Vec<f64>>,
    /// Spin frequency ω in H = ω·diag(d-1, d-3, …, 1-d).
    #[arg(long, value_parser = parse_number, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long, value_parser = parse_dim)]
    pub dim: Option<usize>,
    /// Explicit energy levels; H becomes diagonal with these entries.
    #[arg(long, value_delimiter = ',', value_parser = parse_number, allow_negative_numbers = true)]
    pub energies: Option<Vec<f64>>,
    /// plus-x, mixed or basis:<k>.
    #[arg(long, value_parser = parse_initial)]
    pub initial: Option<InitialState>,
    /// Truncation orders M, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_order)]
    pub order: Option<Vec<u32>>,
    #[arg(long, value_parser = parse_nonnegative)]
    pub t_end: Option<f64>,
    #[arg(long, value_parser = parse_positive)]
    pub dt: Option<f64>,
    /// Number of equally spaced grid points on [0, t_end].
    #[arg(long, value_parser = parse_count)]
    pub points: Option<usize>,
    #[arg(long, value_parser = parse_count)]
    pub n_traj: Option<usize>,
    /// Master seed, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub units: Option<Units>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Tick-size threshold δ, s.
    #[arg(long, value_parser = parse_positive)]
    pub delta: Option<f64>,
    /// Observation window τ, s.
    #[arg(long, value_parser = parse_positive)]
    pub tau: Option<f64>,
    /// Ramsey interrogation time, s.
    #[arg(long, value_parser = parse_positive)]
    pub ramsey_time: Option<f64>,
    /// Elapsed Newtonian time for the Fisher bound, s.
    #[arg(long, value_parser = parse_positive)]
    pub horizon: Option<f64>,
}

/// A finite floating-point number.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("invalid number {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("number {s:?} is not finite"))
    }
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    match parse_number(s)? {
        v if v > 0.0 => Ok(v),
        v => Err(format!("{v} must be positive")),
    }
}

pub fn parse_nonnegative(s: &str) -> Result<f64, String> {
    match parse_number(s)? {
        v if v >= 0.0 => Ok(v),
        v => Err(format!("{v} must be nonnegative")),
    }
}

/// Comma-separated list of finite numbers.
pub fn parse_number_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_number).collect()
}

pub fn parse_count(s: &str) -> Result<usize, String> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| format!("invalid count {s:?}"))
}

pub fn parse_dim(s: &str) -> Result<usize, String> {
    match parse_count(s)? {
        0 => Err("dimension must be at least 1".into()),
        d => Ok(d),
    }
}

/// Truncation orders are capped well below where the coefficients overflow.
pub const MAX_ORDER: u32 = 64;

pub fn parse_order(s: &str) -> Result<u32, String> {
    let m: u32 = s
        .trim()
        .parse()
        .map_err(|_| format!("invalid truncation order {s:?}"))?;
    if m > MAX_ORDER {
        return Err(format!("truncation order {m} exceeds {MAX_ORDER}"));
    }
    Ok(m)
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| format!("invalid seed {s:?}"))
}

pub fn parse_model(s: &str) -> Result<ClockKind, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "gamma" => Ok(ClockKind::Gamma),
        "ig" | "inverse-gaussian" => Ok(ClockKind::InverseGaussian),
        other => Err(format!("unknown model {other:?} (expected gamma or ig)")),
    }
}

pub fn parse_initial(s: &str) -> Result<InitialState, String> {
    let t = s.trim().to_ascii_lowercase();
    match t.as_str() {
        "plus-x" | "plus" => Ok(InitialState::PlusX),
        "mixed" => Ok(InitialState::Mixed),
        _ => match t.strip_prefix("basis:") {
            Some(k) => parse_count(k).map(InitialState::Basis),
            None => Err(format!(
                "unknown initial state {s:?} (expected plus-x, mixed or basis:<k>)"
            )),
        },
    }
}
