//! Special functions: the exponential integral `E₁(x) = Γ(0, x)` and the
//! trigamma function `ψ'(x)`.

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

/// Upper incomplete gamma function at zero shape, `Γ(0, x) = ∫_x^∞ e^{-z}/z dz`.
///
/// Power series for `x ≤ 1`, modified-Lentz continued fraction otherwise.
/// Returns NaN for `x ≤ 0` or non-finite input other than `+∞`.
pub fn gamma_upper_zero(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x <= 1.0 {
        // E₁(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k·k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..MAX_ITER {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < EPS * sum.abs().max(EPS) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        // e^{-x} / (x + 1 - 1²/(x + 3 - 2²/(x + 5 - ...)))
        let mut b = x + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < EPS {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Trigamma function `ψ'(x)` for `x > 0`.
///
/// Upward recurrence `ψ'(x) = ψ'(x+1) + 1/x²` until `x ≥ 10`, then the
/// asymptotic expansion in Bernoulli numbers. NaN for `x ≤ 0`.
pub fn trigamma(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    // 1/x + 1/(2x²) + Σ B_{2k} / x^{2k+1}
    const B: [f64; 8] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv * inv2;
    for b in B {
        series += b * pow;
        pow *= inv2;
    }
    acc + inv + 0.5 * inv2 + series
}

/// `ln n!`, exact product below 171 and a log-sum above.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 171 {
        (2..=n).map(|k| k as f64).product::<f64>().ln()
    } else {
        ln_factorial(170) + (171..=n).map(|k| (k as f64).ln()).sum::<f64>()
    }
}
