//! Random clock processes.
//!
//! A clock `Γ_t` is a subordinator with `E[Γ_t] = t`. Two models are
//! supported, both parameterized by a rate `κ > 0` (and `λ = 1/κ`):
//!
//! - gamma clock: `Γ_t ~ Gamma(shape κt, rate κ)`, variance `t/κ`;
//! - inverse-Gaussian clock: cumulant `(κ/2)(1 - √(1 - 4α/κ))` per unit
//!   time, i.e. `Γ_t ~ IG(mean t, shape κt²/2)`, variance `2t/κ`.
//!
//! Time is in whatever unit `κ` is the inverse of (seconds in SI mode).

mod moments;
mod ticks;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::{Error, Result};

pub use moments::{
    cn_coefficient, cumulant_rate, gamma_raw_moment, log_cn_coefficient, mgf, series_weight,
};
pub use ticks::{fisher_information, levy_tail_rate, poisson_tick_probability, prob_at_least_one_tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClockKind {
    Gamma,
    InverseGaussian,
}

impl ClockKind {
    pub fn label(self) -> &'static str {
        match self {
            ClockKind::Gamma => "gamma",
            ClockKind::InverseGaussian => "ig",
        }
    }
}

/// A clock model: kind plus rate parameter `κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockModel {
    kind: ClockKind,
    kappa: f64,
}

impl ClockModel {
    pub fn new(kind: ClockKind, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidParameter {
                name: "kappa",
                value: kappa,
                reason: "rate must be finite and positive",
            });
        }
        Ok(Self { kind, kappa })
    }

    pub fn gamma(kappa: f64) -> Result<Self> {
        Self::new(ClockKind::Gamma, kappa)
    }

    pub fn inverse_gaussian(kappa: f64) -> Result<Self> {
        Self::new(ClockKind::InverseGaussian, kappa)
    }

    /// Model with `κ = 1/λ`.
    pub fn from_lambda(kind: ClockKind, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                reason: "must be finite and positive",
            });
        }
        Self::new(kind, 1.0 / lambda)
    }

    pub fn kind(&self) -> ClockKind {
        self.kind
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn lambda(&self) -> f64 {
        1.0 / self.kappa
    }
}

/// Clock readings `Γ_{t_i}` on a Newtonian time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockPath {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl ClockPath {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("paths contain at least t = 0")
    }

    /// Increments `Γ_{t_i} - Γ_{t_{i-1}}`.
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// A grid must start at exactly 0 and be strictly increasing and finite.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    match grid.first() {
        None => return Err(Error::InvalidGrid("grid is empty".into())),
        Some(&t0) if t0 != 0.0 => {
            return Err(Error::InvalidGrid(format!("grid starts at {t0}, not 0")))
        }
        _ => {}
    }
    if let Some(t) = grid.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite time {t}")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "grid not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// `n` equally spaced points on `[0, t_end]`; `n = 1` gives `{0}`.
pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let step = t_end / (n - 1) as f64;
            let mut g: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
            g[n - 1] = t_end;
            g
        }
    }
}

/// Grid `0, dt, 2dt, …` up to `t_end`, with the last point pinned to `t_end`.
pub fn stepped_grid(t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidDuration(dt));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidGrid(format!("end time {t_end}")));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    Ok(uniform_grid(t_end, steps + 1))
}

/// Draws `ΔΓ` over a Newtonian interval `dt`, exactly in distribution.
pub fn sample_increment<R: Rng + ?Sized>(model: &ClockModel, dt: f64, rng: &mut R) -> Result<f64> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidDuration(dt));
    }
    match model.kind {
        ClockKind::Gamma => {
            // rand_distr switches to the U^{1/a} boost for shape < 1
            let g = Gamma::new(model.kappa * dt, model.lambda()).map_err(|_| {
                Error::InvalidParameter {
                    name: "kappa*dt",
                    value: model.kappa * dt,
                    reason: "gamma shape out of range",
                }
            })?;
            Ok(g.sample(rng))
        }
        ClockKind::InverseGaussian => Ok(sample_inverse_gaussian(
            dt,
            0.5 * model.kappa * dt * dt,
            rng,
        )),
    }
}

/// Michael–Schucany–Haas transform for `IG(mean, shape)`.
///
/// The smaller root is written as `mean / (1 + w + √(w(w+2)))` with
/// `w = mean·χ²/(2·shape)`, which never cancels and stays positive.
fn sample_inverse_gaussian<R: Rng + ?Sized>(mean: f64, shape: f64, rng: &mut R) -> f64 {
    let n: f64 = rng.sample(StandardNormal);
    let w = mean * n * n / (2.0 * shape);
    let root = mean / (1.0 + w + (w * (w + 2.0)).sqrt());
    let u: f64 = rng.random();
    if u * (mean + root) <= mean {
        root
    } else {
        mean * (mean / root)
    }
}

/// Samples `Γ` on `grid` with independent increments; `Γ_0 = 0`.
pub fn sample_path<R: Rng + ?Sized>(model: &ClockModel, grid: &[f64], rng: &mut R) -> Result<ClockPath> {
    validate_grid(grid)?;
    let mut values = Vec::with_capacity(grid.len());
    let mut level = 0.0;
    values.push(level);
    for w in grid.windows(2) {
        level += sample_increment(model, w[1] - w[0], rng)?;
        values.push(level);
    }
    Ok(ClockPath {
        grid: grid.to_vec(),
        values,
    })
}
