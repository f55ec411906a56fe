//! Layered run configuration: built-in defaults, then a preset, then a JSON
//! config file, then command-line flags.

use std::path::PathBuf;

use num_complex::Complex64;
use qclock::clock::ClockKind;
use serde_json::Value;

use crate::args::{
    parse_count, parse_dim, parse_initial, parse_model, parse_number, parse_order, parse_seed,
    CommandKind, CommonArgs, Format, InitialState, Units,
};
use crate::CliError;

/// Every optional setting; `None` means "not specified at this layer".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub preset: Option<String>,
    pub model: Option<ClockKind>,
    pub kappa: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    pub omega: Option<f64>,
    pub dim: Option<usize>,
    pub energies: Option<Vec<f64>>,
    pub initial: Option<InitialState>,
    pub order: Option<Vec<u32>>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub points: Option<usize>,
    pub n_traj: Option<usize>,
    pub seed: Option<u64>,
    pub units: Option<Units>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub delta: Option<f64>,
    pub tau: Option<f64>,
    pub ramsey_time: Option<f64>,
    pub horizon: Option<f64>,
}

macro_rules! for_each_field {
    ($m:ident) => {
        $m!(
            preset, model, kappa, lambda, omega, dim, energies, initial, order, t_end, dt,
            points, n_traj, seed, units, out, format, delta, tau, ramsey_time, horizon
        )
    };
}

impl Overrides {
    /// Fields of `top` replace those of `self` where set.
    pub fn layered(self, top: Overrides) -> Overrides {
        macro_rules! pick {
            ($($f:ident),*) => {
                Overrides { $($f: top.$f.or(self.$f)),* }
            };
        }
        for_each_field!(pick)
    }

    /// Names of the fields that are set.
    pub fn set_fields(&self) -> Vec<&'static str> {
        let mut names = Vec::new();
        macro_rules! collect {
            ($($f:ident),*) => {
                $(if self.$f.is_some() { names.push(stringify!($f)); })*
            };
        }
        for_each_field!(collect);
        names
    }

    pub fn from_args(a: &CommonArgs) -> Overrides {
        Overrides {
            preset: a.preset.clone(),
            model: a.model,
            kappa: a.kappa.clone(),
            lambda: a.lambda.clone(),
            omega: a.omega,
            dim: a.dim,
            energies: a.energies.clone(),
            initial: a.initial.clone(),
            order: a.order.clone(),
            t_end: a.t_end,
            dt: a.dt,
            points: a.points,
            n_traj: a.n_traj,
            seed: a.seed,
            units: a.units,
            out: a.out.clone(),
            format: a.format,
            delta: a.delta,
            tau: a.tau,
            ramsey_time: a.ramsey_time,
            horizon: a.horizon,
        }
    }

    /// Parses a JSON config object. Unknown keys are rejected.
    pub fn from_json_str(text: &str) -> Result<Overrides, CliError> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::Config {
            field: "<file>".into(),
            message: e.to_string(),
        })?;
        let Value::Object(map) = value else {
            return Err(CliError::Config {
                field: "<file>".into(),
                message: "top level must be an object".into(),
            });
        };
        let mut o = Overrides::default();
        for (key, v) in &map {
            let f = Field { name: key, value: v };
            match key.as_str() {
                "preset" => o.preset = Some(f.string()?),
                "model" => o.model = Some(f.parse_with(parse_model)?),
                "kappa" => o.kappa = Some(f.positive_list()?),
                "lambda" => o.lambda = Some(f.positive_list()?),
                "omega" => o.omega = Some(f.number()?),
                "dim" => o.dim = Some(f.integer(parse_dim)?),
                "energies" => o.energies = Some(f.list(|g| g.number())?),
                "initial" => o.initial = Some(f.initial()?),
                "order" => o.order = Some(f.list(|g| g.integer(parse_order))?),
                "t_end" => o.t_end = Some(f.nonnegative()?),
                "dt" => o.dt = Some(f.positive()?),
                "points" => o.points = Some(f.integer(parse_count)?),
                "n_traj" => o.n_traj = Some(f.integer(parse_count)?),
                "seed" => o.seed = Some(f.integer(parse_seed)?),
                "units" => o.units = Some(f.parse_with(|s| match s {
                    "si" => Ok(Units::Si),
                    "natural" => Ok(Units::Natural),
                    _ => Err(format!("unknown units {s:?} (expected si or natural)")),
                })?),
                "out" => o.out = Some(PathBuf::from(f.string()?)),
                "format" => o.format = Some(f.parse_with(|s| match s {
                    "csv" => Ok(Format::Csv),
                    "json" => Ok(Format::Json),
                    _ => Err(format!("unknown format {s:?} (expected csv or json)")),
                })?),
                "delta" => o.delta = Some(f.positive()?),
                "tau" => o.tau = Some(f.positive()?),
                "ramsey_time" => o.ramsey_time = Some(f.positive()?),
                "horizon" => o.horizon = Some(f.positive()?),
                _ => return Err(f.error("unknown field".into())),
            }
        }
        Ok(o)
    }
}

struct Field<'a> {
    name: &'a str,
    value: &'a Value,
}

impl Field<'_> {
    fn error(&self, message: String) -> CliError {
        CliError::Config {
            field: self.name.to_string(),
            message,
        }
    }

    fn string(&self) -> Result<String, CliError> {
        match self.value {
            Value::String(s) => Ok(s.clone()),
            other => Err(self.error(format!("expected a string, got {other}"))),
        }
    }

    fn parse_with<T>(&self, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, CliError> {
        let s = self.string()?;
        parse(&s).map_err(|m| self.error(m))
    }

    /// A JSON number, or a string holding one.
    fn number(&self) -> Result<f64, CliError> {
        match self.value {
            Value::Number(n) => n
                .as_f64()
                .filter(|v| v.is_finite())
                .ok_or_else(|| self.error(format!("number {n} is out of range"))),
            Value::String(s) => parse_number(s).map_err(|m| self.error(m)),
            other => Err(self.error(format!("expected a number, got {other}"))),
        }
    }

    fn positive(&self) -> Result<f64, CliError> {
        match self.number()? {
            v if v > 0.0 => Ok(v),
            v => Err(self.error(format!("{v} must be positive"))),
        }
    }

    fn nonnegative(&self) -> Result<f64, CliError> {
        match self.number()? {
            v if v >= 0.0 => Ok(v),
            v => Err(self.error(format!("{v} must be nonnegative"))),
        }
    }

    /// Integers are routed through the flag parser so both surfaces agree.
    fn integer<T>(&self, parse: fn(&str) -> Result<T, String>) -> Result<T, CliError> {
        let text = match self.value {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            other => return Err(self.error(format!("expected an integer, got {other}"))),
        };
        parse(&text).map_err(|m| self.error(m))
    }

    /// A scalar is accepted as a one-element list.
    fn list<T>(&self, item: impl Fn(&Field) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
        match self.value {
            Value::Array(items) => {
                if items.is_empty() {
                    return Err(self.error("list is empty".into()));
                }
                items
                    .iter()
                    .map(|v| item(&Field { name: self.name, value: v }))
                    .collect()
            }
            _ => Ok(vec![item(self)?]),
        }
    }

    fn positive_list(&self) -> Result<Vec<f64>, CliError> {
        self.list(|g| g.positive())
    }

    /// A selector string, or an array of amplitudes given as numbers or `[re, im]` pairs.
    fn initial(&self) -> Result<InitialState, CliError> {
        match self.value {
            Value::String(s) => parse_initial(s).map_err(|m| self.error(m)),
            Value::Array(items) if !items.is_empty() => items
                .iter()
                .map(|v| {
                    let g = Field { name: self.name, value: v };
                    match v {
                        Value::Array(pair) if pair.len() == 2 => {
                            let re = Field { name: self.name, value: &pair[0] }.number()?;
                            let im = Field { name: self.name, value: &pair[1] }.number()?;
                            Ok(Complex64::new(re, im))
                        }
                        Value::Array(_) => Err(g.error("amplitude pairs must be [re, im]".into())),
                        _ => Ok(Complex64::new(g.number()?, 0.0)),
                    }
                })
                .collect::<Result<_, _>>()
                .map(InitialState::Amplitudes),
            other => Err(self.error(format!("expected a selector or amplitude list, got {other}"))),
        }
    }
}

/// Reads and parses a config file.
pub fn read_config_file(path: &std::path::Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Overrides::from_json_str(&text)
}

pub const PRESET_NAMES: [&str; 5] = ["fig1", "fig2", "fig3a", "fig3b", "bounds-paper"];

/// The command a preset belongs to and the values it pins.
pub fn preset(name: &str) -> Result<(CommandKind, Overrides), CliError> {
    let o = match name {
        "fig1" => (
            CommandKind::ClockPaths,
            Overrides {
                model: Some(ClockKind::Gamma),
                kappa: Some(vec![100.0, 10.0, 1.0, 0.01]),
                t_end: Some(10.0),
                dt: Some(0.01),
                ..Default::default()
            },
        ),
        "fig2" => (
            CommandKind::Trajectory,
            Overrides {
                model: Some(ClockKind::Gamma),
                kappa: Some(vec![100.0, 10.0, 1.0]),
                omega: Some(0.8),
                initial: Some(InitialState::PlusX),
                t_end: Some(10.0),
                dt: Some(0.01),
                ..Default::default()
            },
        ),
        "fig3a" | "fig3b" => (
            CommandKind::Orbits,
            Overrides {
                model: Some(ClockKind::Gamma),
                lambda: Some(vec![if name == "fig3a" { 0.005 } else { 0.5 }]),
                omega: Some(0.8),
                initial: Some(InitialState::PlusX),
                order: Some(vec![0, 1, 2, 3]),
                t_end: Some(if name == "fig3a" { 20.0 } else { 10.0 }),
                dt: Some(0.05),
                ..Default::default()
            },
        ),
        "bounds-paper" => (
            CommandKind::Bounds,
            Overrides {
                kappa: Some(vec![1e19]),
                delta: Some(qclock::bounds::PLANCK_TIME),
                tau: Some(1e-21),
                ramsey_time: Some(qclock::bounds::DEFAULT_RAMSEY_TIME),
                horizon: Some(30e9 * qclock::bounds::JULIAN_YEAR),
                ..Default::default()
            },
        ),
        other => {
            return Err(CliError::Validation(format!(
                "unknown preset {other:?} (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(o)
}

/// Preset applied when none is named.
pub fn default_preset(cmd: CommandKind) -> Option<&'static str> {
    match cmd {
        CommandKind::ClockPaths => Some("fig1"),
        CommandKind::Trajectory => Some("fig2"),
        CommandKind::Orbits => Some("fig3a"),
        CommandKind::Bounds => Some("bounds-paper"),
        CommandKind::McVsExact => None,
    }
}

/// Values used when neither preset, file nor flags set them.
pub fn builtin(cmd: CommandKind) -> Overrides {
    let common = Overrides {
        model: Some(ClockKind::Gamma),
        units: Some(Units::Si),
        format: Some(match cmd {
            CommandKind::McVsExact | CommandKind::Bounds => Format::Json,
            _ => Format::Csv,
        }),
        ..Default::default()
    };
    match cmd {
        CommandKind::McVsExact => Overrides {
            kappa: Some(vec![10.0]),
            omega: Some(0.8),
            initial: Some(InitialState::PlusX),
            t_end: Some(5.0),
            points: Some(50),
            n_traj: Some(10_000),
            ..common
        },
        _ => common,
    }
}

/// Fields each command reads; anything else is a configuration error.
pub fn accepted_fields(cmd: CommandKind) -> &'static [&'static str] {
    match cmd {
        CommandKind::ClockPaths => &[
            "preset", "units", "out", "format", "model", "kappa", "lambda", "t_end", "dt", "seed",
        ],
        CommandKind::Trajectory => &[
            "preset", "units", "out", "format", "model", "kappa", "lambda", "t_end", "dt", "seed",
            "omega", "dim", "energies", "initial",
        ],
        CommandKind::Orbits => &[
            "preset", "units", "out", "format", "model", "kappa", "lambda", "t_end", "dt", "omega",
            "dim", "energies", "initial", "order",
        ],
        CommandKind::McVsExact => &[
            "preset", "units", "out", "format", "model", "kappa", "lambda", "t_end", "dt", "seed",
            "omega", "dim", "energies", "initial", "points", "n_traj",
        ],
        CommandKind::Bounds => &[
            "preset", "units", "out", "format", "kappa", "lambda", "delta", "tau", "ramsey_time",
            "horizon",
        ],
    }
}

/// Fully layered settings for one command.
pub fn layer(
    cmd: CommandKind,
    file: Option<Overrides>,
    flags: Overrides,
) -> Result<Overrides, CliError> {
    let file = file.unwrap_or_default();
    let user = file.clone().layered(flags.clone());
    let accepted = accepted_fields(cmd);
    for (layer_name, o) in [("config file", &file), ("flags", &flags)] {
        if let Some(bad) = o.set_fields().into_iter().find(|f| !accepted.contains(f)) {
            return Err(CliError::Validation(format!(
                "{layer_name}: `{bad}` does not apply to `{}`",
                cmd.name()
            )));
        }
    }
    let base = match user.preset.as_deref().or(default_preset(cmd)) {
        Some(name) => {
            let (owner, values) = preset(name)?;
            if owner != cmd {
                return Err(CliError::Validation(format!(
                    "preset {name:?} belongs to `{}`, not `{}`",
                    owner.name(),
                    cmd.name()
                )));
            }
            builtin(cmd).layered(values)
        }
        None => builtin(cmd),
    };
    // a user-supplied rate or grid spacing in either form replaces the lower layers' one
    let mut base = base;
    if user.kappa.is_some() || user.lambda.is_some() {
        base.kappa = None;
        base.lambda = None;
    }
    if user.dt.is_some() || user.points.is_some() {
        base.dt = None;
        base.points = None;
    }
    Ok(base.layered(user))
}
