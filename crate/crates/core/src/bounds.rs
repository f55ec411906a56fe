//! Physical-consistency numbers for the gamma clock: the atomic-clock lower
//! bound on κ, Planck-scale tick probabilities and the Fisher bound on
//! estimating Newtonian time from a clock reading.

use crate::clock::{fisher_information, levy_tail_rate, prob_at_least_one_tick};
use crate::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// One electronvolt, J.
pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;
/// Planck time as quoted to three figures, s.
pub const PLANCK_TIME: f64 = 5.39e-44;
/// Julian year, s.
pub const JULIAN_YEAR: f64 = 31_557_600.0;
/// Cs-133 ground-state hyperfine splitting, Hz.
pub const CESIUM_133_HZ: f64 = 9.192_631_77e9;
/// Default Ramsey interrogation time, s.
pub const DEFAULT_RAMSEY_TIME: f64 = 1.0;

/// How the transition frequency enters `Δν/ħ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrequencyConvention {
    /// `Δν/ħ = f`
    Ordinary,
    /// `Δν/ħ = 2πf`
    Angular,
}

impl FrequencyConvention {
    pub fn label(self) -> &'static str {
        match self {
            FrequencyConvention::Ordinary => "ordinary",
            FrequencyConvention::Angular => "angular",
        }
    }

    fn factor(self) -> f64 {
        match self {
            FrequencyConvention::Ordinary => 1.0,
            FrequencyConvention::Angular => std::f64::consts::TAU,
        }
    }
}

/// An atomic clock: transition frequency in Hz and Ramsey time in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicClockSpec {
    name: String,
    transition_frequency: f64,
    ramsey_time: f64,
}

impl AtomicClockSpec {
    pub fn new(name: impl Into<String>, transition_frequency: f64, ramsey_time: f64) -> Result<Self> {
        for (field, v) in [("transition_frequency", transition_frequency), ("ramsey_time", ramsey_time)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name: field,
                    value: v,
                    reason: "must be finite and positive",
                });
            }
        }
        Ok(Self {
            name: name.into(),
            transition_frequency,
            ramsey_time,
        })
    }

    pub fn cesium_133(ramsey_time: f64) -> Result<Self> {
        Self::new("Cs-133", CESIUM_133_HZ, ramsey_time)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn transition_frequency(&self) -> f64 {
        self.transition_frequency
    }

    pub fn ramsey_time(&self) -> f64 {
        self.ramsey_time
    }

    /// Transition energy `2πħf` in eV.
    pub fn energy_gap_ev(&self) -> f64 {
        std::f64::consts::TAU * HBAR * self.transition_frequency / ELECTRON_VOLT
    }
}

/// Smallest κ with `G·T_R < 1`, where `G = (Δν/ħ)²/(2κ)`.
pub fn kappa_lower_bound(spec: &AtomicClockSpec, convention: FrequencyConvention) -> f64 {
    let w = convention.factor() * spec.transition_frequency;
    w * w * spec.ramsey_time / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanckTickReport {
    /// Rate of ticks of size at least `delta`.
    pub rate: f64,
    /// Probability of at least one such tick in the window.
    pub p_at_least_one: f64,
    /// Expected number of such ticks in the window.
    pub mean_count: f64,
}

pub fn planck_tick_report(kappa: f64, delta: f64, tau: f64) -> Result<PlanckTickReport> {
    let rate = levy_tail_rate(kappa, delta)?;
    let p_at_least_one = prob_at_least_one_tick(kappa, delta, tau)?;
    Ok(PlanckTickReport {
        rate,
        p_at_least_one,
        mean_count: rate * tau,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationBound {
    /// `1/I`, in time².
    pub inverse_information: f64,
    /// `1/√I`, in time.
    pub root_inverse_information: f64,
}

pub fn estimation_error_bound(kappa: f64, t: f64) -> Result<EstimationBound> {
    let info = fisher_information(kappa, t)?;
    Ok(EstimationBound {
        inverse_information: 1.0 / info,
        root_inverse_information: 1.0 / info.sqrt(),
    })
}
