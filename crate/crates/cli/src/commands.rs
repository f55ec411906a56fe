//! The five subcommands, each turning layered settings into an output document.

use num_complex::Complex64;
use qclock::bounds::{
    estimation_error_bound, kappa_lower_bound, planck_tick_report, AtomicClockSpec,
    FrequencyConvention, CESIUM_133_HZ,
};
use qclock::clock::{sample_path, stepped_grid, uniform_grid, ClockKind, ClockModel};
use qclock::master::{default_step, exact_energy_basis_solution, integrate, TruncationOrder};
use qclock::montecarlo::{ensemble_average, evolve_trajectory};
use qclock::qstate::{bloch_coordinates, bloch_of_matrix, trace, DensityMatrix, HamiltonianSpec};
use qclock::seed::{child_seed, child_stream};
use serde_json::{json, Map, Value};

use crate::args::{parse_seed, CommandKind, Format, InitialState, Units};
use crate::config::Overrides;
use crate::output::{Cell, Table};
use crate::{CliError, Outcome, Status, DEFAULT_SEED};

/// Standard errors allowed between the Monte Carlo mean and the closed form.
pub const SIGMA_MULTIPLIER: f64 = 4.0;
/// Absolute slack for entries whose standard error is exactly zero.
pub const DETERMINISTIC_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedChoice {
    pub value: u64,
    pub source: &'static str,
}

/// Flag or config file first, then the environment, then the built-in default.
pub fn resolve_seed(explicit: Option<u64>, env: Option<&str>) -> Result<SeedChoice, CliError> {
    if let Some(value) = explicit {
        return Ok(SeedChoice { value, source: "argument" });
    }
    if let Some(text) = env {
        let value = parse_seed(text)
            .map_err(|m| CliError::Validation(format!("{}: {m}", crate::SEED_ENV)))?;
        return Ok(SeedChoice { value, source: "environment" });
    }
    Ok(SeedChoice { value: DEFAULT_SEED, source: "default" })
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn required<T: Clone>(v: &Option<T>, name: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| invalid(format!("missing `{name}`")))
}

fn models(o: &Overrides) -> Result<Vec<ClockModel>, CliError> {
    let kind = o.model.unwrap_or(ClockKind::Gamma);
    let kappas: Vec<f64> = match (&o.kappa, &o.lambda) {
        (Some(_), Some(_)) => return Err(invalid("give either `kappa` or `lambda`, not both")),
        (Some(k), None) => k.clone(),
        (None, Some(l)) => l.iter().map(|l| 1.0 / l).collect(),
        (None, None) => return Err(invalid("missing `kappa` or `lambda`")),
    };
    if kappas.is_empty() {
        return Err(invalid("empty rate list"));
    }
    Ok(kappas
        .into_iter()
        .map(|k| ClockModel::new(kind, k))
        .collect::<Result<_, _>>()?)
}

fn single_model(o: &Overrides) -> Result<ClockModel, CliError> {
    let mut m = models(o)?;
    if m.len() != 1 {
        return Err(invalid(format!("this command takes one rate, got {}", m.len())));
    }
    Ok(m.remove(0))
}

fn grid(o: &Overrides) -> Result<Vec<f64>, CliError> {
    let t_end = required(&o.t_end, "t_end")?;
    match (o.dt, o.points) {
        (Some(_), Some(_)) => Err(invalid("give either `dt` or `points`, not both")),
        (_, Some(0)) => Err(invalid("`points` must be at least 1")),
        (_, Some(n)) => Ok(uniform_grid(t_end, n)),
        (Some(dt), None) => Ok(stepped_grid(t_end, dt)?),
        (None, None) => Err(invalid("missing `dt` or `points`")),
    }
}

/// `H = ω·diag(d-1, d-3, …, 1-d)`, or the explicit `energies`.
fn hamiltonian(o: &Overrides) -> Result<HamiltonianSpec, CliError> {
    match &o.energies {
        Some(e) => {
            if let Some(d) = o.dim {
                if d != e.len() {
                    return Err(invalid(format!(
                        "dimension mismatch: dim = {d} but {} energies given",
                        e.len()
                    )));
                }
            }
            Ok(HamiltonianSpec::diagonal(e)?)
        }
        None => {
            let d = o.dim.unwrap_or(2);
            let omega = required(&o.omega, "omega")?;
            let levels: Vec<f64> = (0..d)
                .map(|k| omega * (d as f64 - 1.0 - 2.0 * k as f64))
                .collect();
            Ok(HamiltonianSpec::diagonal(&levels)?)
        }
    }
}

fn initial_state(o: &Overrides, dim: usize) -> Result<DensityMatrix, CliError> {
    let rho = match o.initial.clone().unwrap_or(InitialState::PlusX) {
        InitialState::PlusX => DensityMatrix::pure(&vec![Complex64::new(1.0, 0.0); dim])?,
        InitialState::Mixed => DensityMatrix::maximally_mixed(dim),
        InitialState::Basis(k) => {
            if k >= dim {
                return Err(invalid(format!("basis:{k} is outside dimension {dim}")));
            }
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[k] = Complex64::new(1.0, 0.0);
            DensityMatrix::pure(&amps)?
        }
        InitialState::Amplitudes(a) => {
            if a.len() != dim {
                return Err(invalid(format!(
                    "dimension mismatch: initial state has {} amplitudes, Hamiltonian has dimension {dim}",
                    a.len()
                )));
            }
            DensityMatrix::pure(&a)?
        }
    };
    Ok(rho)
}

fn initial_label(o: &Overrides) -> String {
    match o.initial.clone().unwrap_or(InitialState::PlusX) {
        InitialState::PlusX => "plus-x".into(),
        InitialState::Mixed => "mixed".into(),
        InitialState::Basis(k) => format!("basis:{k}"),
        InitialState::Amplitudes(_) => "amplitudes".into(),
    }
}

fn require_qubit(h: &HamiltonianSpec, cmd: CommandKind) -> Result<(), CliError> {
    if h.dim() != 2 {
        return Err(invalid(format!(
            "`{}` reports Bloch coordinates and needs dim = 2, got {}",
            cmd.name(),
            h.dim()
        )));
    }
    Ok(())
}

fn units(o: &Overrides) -> Units {
    o.units.unwrap_or(Units::Si)
}

fn base_meta(cmd: CommandKind, o: &Overrides) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(cmd.name()));
    m.insert("units".into(), json!(units(o).label()));
    m
}

fn seed_meta(m: &mut Map<String, Value>, seed: SeedChoice) {
    m.insert("seed".into(), json!(seed.value));
    m.insert("seed_source".into(), json!(seed.source));
}

fn table_outcome(
    cmd: CommandKind,
    o: &Overrides,
    table: Table,
    meta: Map<String, Value>,
    seed: Option<SeedChoice>,
) -> Outcome {
    let content = match o.format.unwrap_or(Format::Csv) {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(meta),
    };
    let seed_note = seed
        .map(|s| format!(", seed {} ({})", s.value, s.source))
        .unwrap_or_default();
    Outcome {
        content,
        out: o.out.clone(),
        status: Status::Pass,
        summary: format!("{}: {} rows{seed_note}", cmd.name(), table.rows.len()),
    }
}

fn json_only(cmd: CommandKind, o: &Overrides) -> Result<(), CliError> {
    if o.format == Some(Format::Csv) {
        return Err(invalid(format!("`{}` writes a JSON report; csv is not available", cmd.name())));
    }
    Ok(())
}

fn model_meta(m: &mut Map<String, Value>, models: &[ClockModel]) {
    m.insert("model".into(), json!(models[0].kind().label()));
    m.insert(
        "kappa".into(),
        json!(models.iter().map(|m| m.kappa()).collect::<Vec<_>>()),
    );
}

pub fn clock_paths(o: &Overrides, env_seed: Option<&str>) -> Result<Outcome, CliError> {
    let cmd = CommandKind::ClockPaths;
    let models = models(o)?;
    let grid = grid(o)?;
    let seed = resolve_seed(o.seed, env_seed)?;
    let paths = models
        .iter()
        .enumerate()
        .map(|(i, m)| sample_path(m, &grid, &mut child_stream(seed.value, i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(
        std::iter::once("t".to_string())
            .chain(models.iter().map(|m| format!("gamma_kappa_{}", m.kappa()))),
    );
    for (p, &t) in grid.iter().enumerate() {
        let mut row = vec![Cell::Num(t)];
        row.extend(paths.iter().map(|path| Cell::Num(path.values()[p])));
        table.push(row);
    }
    let mut meta = base_meta(cmd, o);
    model_meta(&mut meta, &models);
    seed_meta(&mut meta, seed);
    Ok(table_outcome(cmd, o, table, meta, Some(seed)))
}

pub fn trajectory(o: &Overrides, env_seed: Option<&str>) -> Result<Outcome, CliError> {
    let cmd = CommandKind::Trajectory;
    let models = models(o)?;
    let grid = grid(o)?;
    let h = hamiltonian(o)?;
    require_qubit(&h, cmd)?;
    let rho0 = initial_state(o, h.dim())?;
    let seed = resolve_seed(o.seed, env_seed)?;
    let mut table = Table::new(["t", "gamma", "x", "y", "z", "kappa"]);
    for (i, m) in models.iter().enumerate() {
        let rec = evolve_trajectory(&rho0, &h, m, &grid, child_seed(seed.value, i as u64))?;
        for ((&t, &g), s) in grid.iter().zip(rec.clock.values()).zip(&rec.states) {
            let b = bloch_coordinates(s)?;
            table.push(vec![t.into(), g.into(), b.x.into(), b.y.into(), b.z.into(), m.kappa().into()]);
        }
    }
    let mut meta = base_meta(cmd, o);
    model_meta(&mut meta, &models);
    meta.insert("energies".into(), json!(h.energies()));
    meta.insert("initial".into(), json!(initial_label(o)));
    seed_meta(&mut meta, seed);
    Ok(table_outcome(cmd, o, table, meta, Some(seed)))
}

pub fn orbits(o: &Overrides) -> Result<Outcome, CliError> {
    let cmd = CommandKind::Orbits;
    let model = single_model(o)?;
    let grid = grid(o)?;
    let h = hamiltonian(o)?;
    require_qubit(&h, cmd)?;
    let rho0 = initial_state(o, h.dim())?;
    let orders = o.order.clone().unwrap_or_else(|| vec![0, 1, 2, 3]);
    let t_end = *grid.last().expect("grid is nonempty");
    let intervals = grid.len() - 1;
    // integrate on a refinement of the output grid so that output points are steps
    let substeps = if intervals == 0 {
        1
    } else {
        ((t_end / intervals as f64) / default_step(&h)).ceil().max(1.0) as usize
    };
    let step = if intervals == 0 { 1.0 } else { t_end / (intervals * substeps) as f64 };

    let mut table = Table::new(["t", "order", "x", "y", "z", "min_eigenvalue", "trace_error"]);
    for &m in &orders {
        let steps = integrate(&rho0, &h, &model, TruncationOrder::new(m), t_end, step)?;
        if steps.len() != intervals * substeps + 1 {
            return Err(invalid(format!(
                "integrator returned {} steps, expected {}",
                steps.len(),
                intervals * substeps + 1
            )));
        }
        let label = m.to_string();
        for (p, &t) in grid.iter().enumerate() {
            let s = &steps[p * substeps];
            let b = bloch_of_matrix(&s.state)?;
            table.push(vec![
                t.into(),
                label.as_str().into(),
                b.x.into(),
                b.y.into(),
                b.z.into(),
                s.min_eigenvalue.into(),
                s.trace_error.into(),
            ]);
        }
    }
    for &t in &grid {
        let s = exact_energy_basis_solution(&rho0, &h, &model, t)?;
        let b = bloch_coordinates(&s)?;
        table.push(vec![
            t.into(),
            "exact".into(),
            b.x.into(),
            b.y.into(),
            b.z.into(),
            s.min_eigenvalue().into(),
            (trace(s.matrix()) - 1.0).norm().into(),
        ]);
    }
    let mut meta = base_meta(cmd, o);
    model_meta(&mut meta, std::slice::from_ref(&model));
    meta.insert("lambda".into(), json!(model.lambda()));
    meta.insert("energies".into(), json!(h.energies()));
    meta.insert("initial".into(), json!(initial_label(o)));
    meta.insert("orders".into(), json!(orders));
    meta.insert("integration_step".into(), json!(step));
    Ok(table_outcome(cmd, o, table, meta, None))
}

pub fn mc_vs_exact(o: &Overrides, env_seed: Option<&str>) -> Result<Outcome, CliError> {
    let cmd = CommandKind::McVsExact;
    json_only(cmd, o)?;
    let model = single_model(o)?;
    let grid = grid(o)?;
    let h = hamiltonian(o)?;
    let rho0 = initial_state(o, h.dim())?;
    let n_traj = required(&o.n_traj, "n_traj")?;
    if n_traj < 2 {
        return Err(invalid("`n_traj` must be at least 2"));
    }
    let seed = resolve_seed(o.seed, env_seed)?;
    let est = ensemble_average(&rho0, &h, &model, &grid, n_traj, seed.value)?;

    let mut points = Vec::with_capacity(grid.len());
    let mut all_pass = true;
    let mut worst_z: f64 = 0.0;
    for (p, &t) in grid.iter().enumerate() {
        let exact = exact_energy_basis_solution(&rho0, &h, &model, t)?;
        let diff = est.mean[p].matrix() - exact.matrix();
        let err = &est.stderr[p];
        let mut max_abs: f64 = 0.0;
        let mut max_se: f64 = 0.0;
        let mut point_z: f64 = 0.0;
        let mut pass = true;
        for (k, z) in diff.iter().enumerate() {
            for (d, se) in [(z.re, err.re[k]), (z.im, err.im[k])] {
                max_abs = max_abs.max(d.abs());
                max_se = max_se.max(se);
                if se > 0.0 {
                    point_z = point_z.max(d.abs() / se);
                    pass &= d.abs() <= SIGMA_MULTIPLIER * se;
                } else {
                    pass &= d.abs() <= DETERMINISTIC_SLACK;
                }
            }
        }
        all_pass &= pass;
        worst_z = worst_z.max(point_z);
        points.push(json!({
            "t": t,
            "max_abs_error": max_abs,
            "max_stderr": max_se,
            "envelope": SIGMA_MULTIPLIER * max_se,
            "max_z": point_z,
            "pass": pass,
        }));
    }
    let status = if all_pass { Status::Pass } else { Status::Fail };
    let mut doc = base_meta(cmd, o);
    doc.insert("model".into(), json!(model.kind().label()));
    doc.insert("kappa".into(), json!(model.kappa()));
    doc.insert("energies".into(), json!(h.energies()));
    doc.insert("dim".into(), json!(h.dim()));
    doc.insert("initial".into(), json!(initial_label(o)));
    doc.insert("n_traj".into(), json!(n_traj));
    seed_meta(&mut doc, seed);
    doc.insert("sigma_multiplier".into(), json!(SIGMA_MULTIPLIER));
    doc.insert("points".into(), Value::Array(points));
    doc.insert("max_z".into(), json!(worst_z));
    doc.insert("status".into(), json!(status.label()));
    Ok(Outcome {
        content: pretty(&Value::Object(doc)),
        out: o.out.clone(),
        status,
        summary: format!(
            "mc-vs-exact: {} (max |Δ|/σ = {worst_z:.3}, n_traj {n_traj}, seed {} ({}))",
            status.label(),
            seed.value,
            seed.source
        ),
    })
}

pub fn bounds(o: &Overrides) -> Result<Outcome, CliError> {
    let cmd = CommandKind::Bounds;
    json_only(cmd, o)?;
    if units(o) == Units::Natural {
        return Err(invalid("`bounds` works in SI units; --units natural is not supported"));
    }
    let kappa = single_model(o)?.kappa();
    let delta = required(&o.delta, "delta")?;
    let tau = required(&o.tau, "tau")?;
    let ramsey = required(&o.ramsey_time, "ramsey_time")?;
    let horizon = required(&o.horizon, "horizon")?;
    let cs = AtomicClockSpec::cesium_133(ramsey)?;
    let ordinary = kappa_lower_bound(&cs, FrequencyConvention::Ordinary);
    let angular = kappa_lower_bound(&cs, FrequencyConvention::Angular);
    let ticks = planck_tick_report(kappa, delta, tau)?;
    let est = estimation_error_bound(kappa, horizon)?;
    let mut doc = base_meta(cmd, o);
    doc.insert(
        "inputs".into(),
        json!({
            "kappa": kappa,
            "delta": delta,
            "tau": tau,
            "ramsey_time": ramsey,
            "horizon": horizon,
            "clock": cs.name(),
            "transition_frequency": CESIUM_133_HZ,
        }),
    );
    doc.insert(
        "kappa_min".into(),
        json!({
            "ordinary": ordinary,
            "angular": angular,
            "angular_over_ordinary": angular / ordinary,
        }),
    );
    doc.insert("energy_gap_ev".into(), json!(cs.energy_gap_ev()));
    doc.insert("r_delta".into(), json!(ticks.rate));
    doc.insert("p_at_least_one".into(), json!(ticks.p_at_least_one));
    doc.insert("mean_tick_count".into(), json!(ticks.mean_count));
    doc.insert("inverse_information".into(), json!(est.inverse_information));
    doc.insert("root_inverse_information".into(), json!(est.root_inverse_information));
    Ok(Outcome {
        content: pretty(&Value::Object(doc)),
        out: o.out.clone(),
        status: Status::Pass,
        summary: format!(
            "bounds: r_delta {:.4e}, P(>=1) {:.4}, kappa_min {:.4e} (ordinary)",
            ticks.rate, ticks.p_at_least_one, ordinary
        ),
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn execute(cmd: CommandKind, o: &Overrides, env_seed: Option<&str>) -> Result<Outcome, CliError> {
    match cmd {
        CommandKind::ClockPaths => clock_paths(o, env_seed),
        CommandKind::Trajectory => trajectory(o, env_seed),
        CommandKind::Orbits => orbits(o),
        CommandKind::McVsExact => mc_vs_exact(o, env_seed),
        CommandKind::Bounds => bounds(o),
    }
}
