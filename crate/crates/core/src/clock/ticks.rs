//! Tick statistics and time-estimation information for the gamma clock.
//!
//! The gamma clock has Lévy measure `μ(dz) = κ z⁻¹ e^{-κz} dz`. Jumps of size
//! at least `δ` arrive as a Poisson process with rate `r_δ = κ Γ(0, κδ)`.

use crate::special::{gamma_upper_zero, ln_factorial, trigamma};
use crate::{Error, Result};

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "kappa",
            value: kappa,
            reason: "rate must be finite and positive",
        })
    }
}

/// Rate of ticks of size `≥ delta`: `κ Γ(0, δκ)`.
pub fn levy_tail_rate(kappa: f64, delta: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidThreshold(delta));
    }
    Ok(kappa * gamma_upper_zero(kappa * delta))
}

fn tick_mean(kappa: f64, delta: f64, tau: f64) -> Result<f64> {
    let rate = levy_tail_rate(kappa, delta)?;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidDuration(tau));
    }
    Ok(rate * tau)
}

/// Probability of exactly `n` ticks of size `≥ delta` in a window `tau`.
pub fn poisson_tick_probability(n: u64, kappa: f64, delta: f64, tau: f64) -> Result<f64> {
    let mean = tick_mean(kappa, delta, tau)?;
    if mean == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    Ok((n as f64 * mean.ln() - mean - ln_factorial(n)).exp())
}

/// `1 - P(0) = 1 - e^{-r_δ τ}`.
pub fn prob_at_least_one_tick(kappa: f64, delta: f64, tau: f64) -> Result<f64> {
    let mean = tick_mean(kappa, delta, tau)?;
    Ok(-(-mean).exp_m1())
}

/// Fisher information about `t` carried by `Γ_t`: `κ² ψ'(κt)`.
pub fn fisher_information(kappa: f64, t: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidTime(t));
    }
    Ok(kappa * kappa * trigamma(kappa * t))
}
