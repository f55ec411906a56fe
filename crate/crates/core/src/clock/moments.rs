use super::{ClockKind, ClockModel};
use crate::special::ln_factorial;
use crate::{Error, Result, C64};

/// Principal `Log(1 + z)`, accurate for small `|z|`.
pub(crate) fn log1p_complex(z: C64) -> C64 {
    let re = 0.5 * (2.0 * z.re + z.re * z.re + z.im * z.im).ln_1p();
    let im = z.im.atan2(1.0 + z.re);
    C64::new(re, im)
}

/// `1 - √(1 + z)` without cancellation near `z = 0`.
pub(crate) fn one_minus_sqrt1p(z: C64) -> C64 {
    let s = (C64::new(1.0, 0.0) + z).sqrt();
    -z / (C64::new(1.0, 0.0) + s)
}

/// Per-unit-time cumulant exponent `K(α) = log E[e^{αΓ_1}]` on the principal branch.
///
/// Gamma: `-κ Log(1 - α/κ)`, defined for `Re α < κ`.
/// Inverse Gaussian: `(κ/2)(1 - √(1 - 4α/κ))`, defined for `Re α ≤ κ/4`.
pub fn cumulant_rate(model: &ClockModel, alpha: C64) -> Result<C64> {
    let kappa = model.kappa();
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::BranchDomain(format!("non-finite α = {alpha}")));
    }
    match model.kind() {
        ClockKind::Gamma => {
            if alpha.re >= kappa {
                return Err(Error::BranchDomain(format!(
                    "gamma MGF needs Re α < κ, got Re α = {} with κ = {kappa}",
                    alpha.re
                )));
            }
            Ok(-kappa * log1p_complex(-alpha / kappa))
        }
        ClockKind::InverseGaussian => {
            if alpha.re > kappa / 4.0 {
                return Err(Error::BranchDomain(format!(
                    "inverse-Gaussian MGF needs Re α ≤ κ/4, got Re α = {} with κ = {kappa}",
                    alpha.re
                )));
            }
            Ok(0.5 * kappa * one_minus_sqrt1p(-4.0 * alpha / kappa))
        }
    }
}

/// `E[e^{αΓ_t}] = exp(t·K(α))`.
pub fn mgf(model: &ClockModel, alpha: C64, t: f64) -> Result<C64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "duration must be finite and nonnegative",
        });
    }
    let k = cumulant_rate(model, alpha)?;
    if alpha == C64::new(0.0, 0.0) || t == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok((k * t).exp())
}

/// `ln c_n` for `n ≥ 1` (with `c_1 = 1`).
pub fn log_cn_coefficient(model: &ClockModel, n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidOrder(n, 1));
    }
    let n64 = u64::from(n);
    let ln_lambda_pow = (n64 - 1) as f64 * model.lambda().ln();
    if n == 1 {
        return Ok(0.0);
    }
    let ln_prefactor = match model.kind() {
        // (n-1)!
        ClockKind::Gamma => ln_factorial(n64 - 1),
        // 2 (2n-3)! / (n-2)!
        ClockKind::InverseGaussian => {
            std::f64::consts::LN_2 + ln_factorial(2 * n64 - 3) - ln_factorial(n64 - 2)
        }
    };
    Ok(ln_prefactor + ln_lambda_pow)
}

/// `c_n = lim E[(ΔΓ)^n]/Δt` for `n ≥ 2`.
///
/// Gamma: `(n-1)! λ^{n-1}`. Inverse Gaussian: `2(2n-3)!/(n-2)! λ^{n-1}`.
/// Evaluated in log space; fails with `OverflowSaturation` past `f64::MAX`.
pub fn cn_coefficient(model: &ClockModel, n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidOrder(n, 2));
    }
    let log_value = log_cn_coefficient(model, n)?;
    if log_value > f64::MAX.ln() {
        return Err(Error::OverflowSaturation { n, log_value });
    }
    if n <= 20 {
        // small orders: direct product keeps the last ulp
        let lambda = model.lambda();
        let pre = match model.kind() {
            ClockKind::Gamma => (1..n).map(f64::from).product::<f64>(),
            ClockKind::InverseGaussian => {
                2.0 * (n - 1..=2 * n - 3).map(f64::from).product::<f64>()
            }
        };
        let v = pre * lambda.powi(n as i32 - 1);
        if v.is_finite() {
            return Ok(v);
        }
    }
    Ok(log_value.exp())
}

/// Series weight `c_n / n!` for `n ≥ 1`, the coefficient of `(-iν)^n` in the
/// per-mode exponent. Computed in log space; may be `+∞` for `λ ≫ 1` and huge `n`.
pub fn series_weight(model: &ClockModel, n: u32) -> Result<f64> {
    let log_w = log_cn_coefficient(model, n)? - ln_factorial(u64::from(n));
    Ok(log_w.exp())
}

/// `E[(ΔΓ)^n] = Δt(Δt + 1/κ)…(Δt + (n-1)/κ)` for the gamma clock.
pub fn gamma_raw_moment(kappa: f64, n: u32, dt: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidOrder(n, 1));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidParameter {
            name: "kappa",
            value: kappa,
            reason: "rate must be finite and positive",
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidDuration(dt));
    }
    Ok((0..n).map(|k| dt + f64::from(k) / kappa).product())
}
