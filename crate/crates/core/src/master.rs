//! The clock-averaged master equation.
//!
//! Averaging `e^{-iHΔΓ} ρ e^{iHΔΓ}` over the clock gives
//!
//! ```text
//! dρ/dt = i[ρ, H] + Σ_{n≥2} c_n Σ_{k=0}^{n} (-iH)^k/k! ρ (iH)^{n-k}/(n-k)!
//! ```
//!
//! In the energy basis the `n`-th bracket multiplies `ρ_mn` by `(-iν_mn)^n / n!`
//! with `ν_mn = E_m - E_n`, so the generator truncated at order `λ^M` acts on
//! each element as multiplication by `μ_M(ν) = Σ_{n=1}^{M+1} c_n (-iν)^n / n!`
//! (with `c_1 = 1`). That is how [`Generator`] evaluates it. The untruncated
//! series sums to the clock's cumulant `K(-iν)`, which gives the exact solution
//! `ρ_mn(t) = ρ_mn(0) e^{t K(-iν_mn)}`.

use crate::clock::{cn_coefficient, cumulant_rate, series_weight, ClockKind, ClockModel};
use crate::qstate::{
    conjugate_by_propagator, hermitian_part, min_eigenvalue, trace, DensityMatrix,
    HamiltonianSpec,
};
use crate::{CMatrix, Error, Result, C64};

/// Trace drift beyond which integration is aborted.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-8;

/// Default integration step satisfies `dt · max|E| = 0.01`.
pub const DEFAULT_STEP_PHASE: f64 = 0.01;

/// Truncation "up to order `λ^M`": series terms `n = 1..=M+1` are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruncationOrder(u32);

impl TruncationOrder {
    pub const VON_NEUMANN: TruncationOrder = TruncationOrder(0);

    pub fn new(order_in_lambda: u32) -> Self {
        Self(order_in_lambda)
    }

    pub fn order_in_lambda(self) -> u32 {
        self.0
    }

    /// Highest series index `n` retained.
    pub fn highest_term(self) -> u32 {
        self.0 + 1
    }
}

/// Per-mode rate for transition frequency `nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeExponent {
    pub nu: f64,
    pub exponent: C64,
    /// `false` when the untruncated series diverges at this `ν`.
    pub converges: bool,
}

/// `Σ_{n=1}^{N} w_n z^n` by Horner's rule.
fn weighted_power_series(weights: &[f64], z: C64) -> C64 {
    weights
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &w| (acc + w) * z)
}

fn model_weights(model: &ClockModel, order: TruncationOrder) -> Result<Vec<f64>> {
    (1..=order.highest_term())
        .map(|n| {
            let w = series_weight(model, n)?;
            if w.is_finite() {
                Ok(w)
            } else {
                Err(Error::OverflowSaturation {
                    n,
                    log_value: f64::INFINITY,
                })
            }
        })
        .collect()
}

/// Whether `Σ c_n (-iν)^n / n!` converges: `|λν| < 1` for the gamma clock,
/// `|4λν| < 1` for the inverse-Gaussian clock.
pub fn series_converges(nu: f64, model: &ClockModel) -> bool {
    let x = (nu * model.lambda()).abs();
    match model.kind() {
        ClockKind::Gamma => x < 1.0,
        ClockKind::InverseGaussian => 4.0 * x < 1.0,
    }
}

/// `μ_M(ν) = Σ_{n=1}^{M+1} c_n (-iν)^n / n!`.
///
/// For the gamma clock this is the partial sum of `-κ Log(1 + iν/κ)`.
pub fn truncated_mode_exponent(
    nu: f64,
    model: &ClockModel,
    order: TruncationOrder,
) -> Result<ModeExponent> {
    let weights = model_weights(model, order)?;
    Ok(ModeExponent {
        nu,
        exponent: weighted_power_series(&weights, C64::new(0.0, -nu)),
        converges: series_converges(nu, model),
    })
}

/// Untruncated per-mode rate `K(-iν) = log E[e^{-iνΓ_1}]`.
pub fn exact_mode_exponent(nu: f64, model: &ClockModel) -> Result<ModeExponent> {
    Ok(ModeExponent {
        nu,
        exponent: cumulant_rate(model, C64::new(0.0, -nu))?,
        converges: series_converges(nu, model),
    })
}

/// Decay rate of `|ρ_mn|`.
///
/// Gamma: `(κ/2) ln(1 + ν²/κ²)`. Inverse Gaussian: `-Re[(κ/2)(1 - √(1 + 4iν/κ))]`.
pub fn decoherence_rate(nu: f64, model: &ClockModel) -> f64 {
    let kappa = model.kappa();
    match model.kind() {
        ClockKind::Gamma => 0.5 * kappa * (nu / kappa).powi(2).ln_1p(),
        ClockKind::InverseGaussian => match cumulant_rate(model, C64::new(0.0, -nu)) {
            Ok(k) => -k.re,
            Err(_) => f64::NAN,
        },
    }
}

/// The truncated generator, cached as an energy-basis multiplier matrix.
#[derive(Debug, Clone)]
pub struct Generator {
    hamiltonian: HamiltonianSpec,
    multipliers: CMatrix,
}

impl Generator {
    pub fn new(h: &HamiltonianSpec, model: &ClockModel, order: TruncationOrder) -> Result<Self> {
        Ok(Self::from_weights(h, &model_weights(model, order)?))
    }

    /// Generator for an arbitrary coefficient sequence `c_2, c_3, …`.
    pub fn from_coefficients(h: &HamiltonianSpec, cn_from_two: &[f64]) -> Self {
        let mut weights = Vec::with_capacity(cn_from_two.len() + 1);
        weights.push(1.0);
        let mut n_fact = 1.0;
        for (i, &c) in cn_from_two.iter().enumerate() {
            n_fact *= (i + 2) as f64;
            weights.push(c / n_fact);
        }
        Self::from_weights(h, &weights)
    }

    fn from_weights(h: &HamiltonianSpec, weights: &[f64]) -> Self {
        let nu = h.transition_frequencies();
        let d = h.dim();
        let multipliers = CMatrix::from_fn(d, d, |m, n| {
            if m == n {
                C64::new(0.0, 0.0)
            } else {
                weighted_power_series(weights, C64::new(0.0, -nu[(m, n)]))
            }
        });
        Self {
            hamiltonian: h.clone(),
            multipliers,
        }
    }

    pub fn hamiltonian(&self) -> &HamiltonianSpec {
        &self.hamiltonian
    }

    /// `μ(ν_mn)` in the energy basis.
    pub fn multipliers(&self) -> &CMatrix {
        &self.multipliers
    }

    /// `dρ/dt` for a matrix given in the original basis.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.hamiltonian.dim() || rho.ncols() != self.hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.hamiltonian.dim(),
                actual: rho.nrows(),
            });
        }
        let rho_e = self.hamiltonian.to_energy_basis(rho);
        let d_e = rho_e.component_mul(&self.multipliers);
        Ok(hermitian_part(&self.hamiltonian.from_energy_basis(&d_e)))
    }
}

/// Right-hand side of the master equation truncated at order `λ^M`.
pub fn generator_apply(
    rho: &CMatrix,
    h: &HamiltonianSpec,
    model: &ClockModel,
    order: TruncationOrder,
) -> Result<CMatrix> {
    Generator::new(h, model, order)?.apply(rho)
}

/// Same as [`generator_apply`] with explicit `c_2, c_3, …`.
pub fn generator_apply_with_coefficients(
    rho: &CMatrix,
    h: &HamiltonianSpec,
    cn_from_two: &[f64],
) -> Result<CMatrix> {
    Generator::from_coefficients(h, cn_from_two).apply(rho)
}

/// The `c_n` sequence `c_2..=c_{M+1}` of a model.
pub fn model_coefficients(model: &ClockModel, order: TruncationOrder) -> Result<Vec<f64>> {
    (2..=order.highest_term())
        .map(|n| cn_coefficient(model, n))
        .collect()
}

/// One recorded point of an integration run.
#[derive(Debug, Clone)]
pub struct IntegrationStep {
    pub t: f64,
    /// Hermitian, unit trace; not necessarily positive for truncated dynamics.
    pub state: CMatrix,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl IntegrationStep {
    /// The state as a validated density matrix (fails if positivity was lost).
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.state.clone())
    }
}

/// Step with `dt · max|E| = 0.01`.
pub fn default_step(h: &HamiltonianSpec) -> f64 {
    let e = h.max_abs_energy();
    if e > 0.0 {
        DEFAULT_STEP_PHASE / e
    } else {
        DEFAULT_STEP_PHASE
    }
}

/// Fixed-step classical RK4 on the truncated generator over `[0, t_end]`.
///
/// Uses `ceil(t_end/dt_step)` equal steps (so the actual step is at most
/// `dt_step`) and records every step. The state is re-symmetrized after each
/// step and positivity is reported, not enforced.
pub fn integrate(
    rho0: &DensityMatrix,
    h: &HamiltonianSpec,
    model: &ClockModel,
    order: TruncationOrder,
    t_end: f64,
    dt_step: f64,
) -> Result<Vec<IntegrationStep>> {
    integrate_generator(&Generator::new(h, model, order)?, rho0, t_end, dt_step)
}

pub fn integrate_generator(
    generator: &Generator,
    rho0: &DensityMatrix,
    t_end: f64,
    dt_step: f64,
) -> Result<Vec<IntegrationStep>> {
    if !(dt_step.is_finite() && dt_step > 0.0) {
        return Err(Error::InvalidDuration(dt_step));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            value: t_end,
            reason: "must be finite and nonnegative",
        });
    }
    if rho0.dim() != generator.hamiltonian().dim() {
        return Err(Error::DimensionMismatch {
            expected: generator.hamiltonian().dim(),
            actual: rho0.dim(),
        });
    }
    let steps = (t_end / dt_step - 1e-9).ceil().max(0.0) as usize;
    let h = if steps > 0 { t_end / steps as f64 } else { 0.0 };
    let half = C64::new(h / 2.0, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);

    let record = |t: f64, state: CMatrix| -> Result<IntegrationStep> {
        if state.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::StepTooLarge {
                t,
                reason: "state diverged".into(),
            });
        }
        let trace_error = (trace(&state) - 1.0).norm();
        if trace_error > TRACE_DRIFT_LIMIT {
            return Err(Error::StepTooLarge {
                t,
                reason: format!("trace drift {trace_error:e}"),
            });
        }
        Ok(IntegrationStep {
            t,
            min_eigenvalue: min_eigenvalue(&state),
            state,
            trace_error,
        })
    };

    let mut out = Vec::with_capacity(steps + 1);
    let mut y = rho0.matrix().clone();
    out.push(record(0.0, y.clone())?);
    for i in 1..=steps {
        let k1 = generator.apply(&y)?;
        let k2 = generator.apply(&(&y + &k1 * half))?;
        let k3 = generator.apply(&(&y + &k2 * half))?;
        let k4 = generator.apply(&(&y + &k3 * full))?;
        y = hermitian_part(&(y + (k1 + k2 * two + k3 * two + k4) * sixth));
        let t = if i == steps { t_end } else { i as f64 * h };
        out.push(record(t, y.clone())?);
    }
    Ok(out)
}

/// Clock average `E[e^{-iHΓ_t} ρ0 e^{iHΓ_t}]`, elementwise in the energy basis.
pub fn exact_energy_basis_solution(
    rho0: &DensityMatrix,
    h: &HamiltonianSpec,
    model: &ClockModel,
    t: f64,
) -> Result<DensityMatrix> {
    if rho0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: rho0.dim(),
        });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "must be finite and nonnegative",
        });
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let nu = h.transition_frequencies();
    let rho_e = h.to_energy_basis(rho0.matrix());
    let d = h.dim();
    let mut avg = rho_e.clone();
    for m in 0..d {
        for n in 0..d {
            if nu[(m, n)] != 0.0 {
                avg[(m, n)] *= (cumulant_rate(model, C64::new(0.0, -nu[(m, n)]))? * t).exp();
            }
        }
    }
    // each element is scaled by a characteristic function, so the result is
    // an average of unitary conjugates of ρ0 and hence a state
    Ok(DensityMatrix::from_matrix_unchecked(h.from_energy_basis(&avg)))
}

/// Unitary (λ → 0) orbit `e^{-iHt} ρ0 e^{iHt}`.
pub fn von_neumann_solution(
    rho0: &DensityMatrix,
    h: &HamiltonianSpec,
    t: f64,
) -> Result<DensityMatrix> {
    conjugate_by_propagator(rho0, h, t)
}
