//! Acceptance gate. Each test prints one `[PASS]`/`[FAIL]` line and then
//! asserts, so `cargo test --test acceptance -- --nocapture` shows a summary.

use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use qclock::bounds::{
    estimation_error_bound, kappa_lower_bound, AtomicClockSpec, FrequencyConvention, JULIAN_YEAR,
    PLANCK_TIME,
};
use qclock::clock::{
    cn_coefficient, gamma_raw_moment, levy_tail_rate, prob_at_least_one_tick, sample_increment,
    uniform_grid, ClockKind, ClockModel,
};
use qclock::master::{
    decoherence_rate, exact_energy_basis_solution, generator_apply, integrate,
    truncated_mode_exponent, TruncationOrder,
};
use qclock::montecarlo::{ensemble_average, evolve_trajectory};
use qclock::qstate::{
    conjugate_by_propagator, hermitian_deviation, min_eigenvalue, random_density_matrix,
    random_hermitian, random_pure_state, trace, DensityMatrix, HamiltonianSpec,
};
use qclock::seed::{child_seed, stream};
use qclock::CMatrix;
use qclock_cli::{run_from, Status};
use rand::Rng;
use serde_json::Value;

const FAST_LIMIT: Duration = Duration::from_millis(1);

fn verdict(id: u32, title: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] AC-{id} {title}: {detail}");
    assert!(pass, "AC-{id} {title}: {detail}");
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

#[test]
fn ac01_levy_tail_rate() {
    const TARGET: f64 = 5.53e20;
    const REL_TOL: f64 = 5e-3;
    let (r, dt) = timed(|| levy_tail_rate(1e19, PLANCK_TIME).unwrap());
    let rel = ((r - TARGET) / TARGET).abs();
    verdict(
        1,
        "Lévy tail rate",
        rel <= REL_TOL && dt < FAST_LIMIT,
        &format!("r = {r:.5e} /s (target {TARGET:e} ± 0.5%, rel err {rel:.2e}), {dt:?}"),
    );
}

#[test]
fn ac02_planck_tick_probability() {
    const TARGET: f64 = 0.425;
    const ABS_TOL: f64 = 0.005;
    let (p, dt) = timed(|| prob_at_least_one_tick(1e19, PLANCK_TIME, 1e-21).unwrap());
    verdict(
        2,
        "Planck-tick probability",
        (p - TARGET).abs() <= ABS_TOL && dt < FAST_LIMIT,
        &format!("P(≥1) = {p:.5} (target {TARGET} ± {ABS_TOL}), {dt:?}"),
    );
}

#[test]
fn ac03_atomic_clock_bound() {
    let cs = AtomicClockSpec::cesium_133(1.0).unwrap();
    let ordinary = kappa_lower_bound(&cs, FrequencyConvention::Ordinary);
    let angular = kappa_lower_bound(&cs, FrequencyConvention::Angular);
    let in_range = (1e19..1e20).contains(&ordinary);
    let ratio = angular / ordinary;
    let ratio_ok = (ratio - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12;
    verdict(
        3,
        "atomic-clock bound",
        in_range && ratio_ok,
        &format!(
            "κ_min ordinary = {ordinary:.4e} /s ∈ [1e19, 1e20); angular = {angular:.4e} /s ({ratio:.3}× larger)"
        ),
    );
}

#[test]
fn ac04_fisher_bound() {
    const TARGET: f64 = 0.095;
    const ABS_TOL: f64 = 0.002;
    let t = 30e9 * JULIAN_YEAR;
    let (b, dt) = timed(|| estimation_error_bound(1e19, t).unwrap());
    verdict(
        4,
        "Fisher bound",
        (b.inverse_information - TARGET).abs() <= ABS_TOL && dt < FAST_LIMIT,
        &format!(
            "1/I = {:.5} s² (target {TARGET} ± {ABS_TOL}); 1/√I = {:.4} s, {dt:?}",
            b.inverse_information, b.root_inverse_information
        ),
    );
}

/// Root-mean-square entrywise deviation from the closed form over the grid.
fn rms_deviation(n_traj: usize, seed: u64) -> f64 {
    let rho0 = DensityMatrix::plus_x();
    let h = HamiltonianSpec::spin_z(0.8).unwrap();
    let model = ClockModel::gamma(10.0).unwrap();
    let grid = uniform_grid(5.0, 50);
    let est = ensemble_average(&rho0, &h, &model, &grid, n_traj, seed).unwrap();
    let mut sum = 0.0;
    let mut count = 0.0;
    for (p, &t) in grid.iter().enumerate() {
        let exact = exact_energy_basis_solution(&rho0, &h, &model, t).unwrap();
        for z in (est.mean[p].matrix() - exact.matrix()).iter() {
            sum += z.norm_sqr();
            count += 1.0;
        }
    }
    (sum / count).sqrt()
}

#[test]
fn ac05_monte_carlo_matches_closed_form() {
    const SEED: &str = "20240229";
    const SLOPE_RANGE: (f64, f64) = (-0.75, -0.25);
    const REPEATS: u64 = 6;
    let start = Instant::now();
    let out = run_from(["qclock", "mc-vs-exact", "--seed", SEED], None).unwrap();
    let report: Value = serde_json::from_str(&out.content).unwrap();
    let points = report["points"].as_array().unwrap();
    let all_points = points.len() == 50 && points.iter().all(|p| p["pass"] == true);
    let envelope_ok = out.status == Status::Pass && all_points;

    // O(n^{-1/2}): least-squares slope of log RMS error against log n
    let sizes = [100usize, 1_000, 10_000];
    let logs: Vec<(f64, f64)> = sizes
        .iter()
        .map(|&n| {
            let mean_rms = (0..REPEATS)
                .map(|r| rms_deviation(n, child_seed(0xAC05, r)))
                .sum::<f64>()
                / REPEATS as f64;
            ((n as f64).ln(), mean_rms.ln())
        })
        .collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let slope = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / logs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let elapsed = start.elapsed();
    let slope_ok = (SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&slope);
    verdict(
        5,
        "Monte Carlo vs closed form",
        envelope_ok && slope_ok && elapsed < Duration::from_secs(60),
        &format!(
            "seed {SEED}: {} of 50 points within 4σ (max |Δ|/σ = {:.3}); error slope {slope:.3} in [{}, {}], {elapsed:.2?}",
            points.iter().filter(|p| p["pass"] == true).count(),
            report["max_z"].as_f64().unwrap(),
            SLOPE_RANGE.0,
            SLOPE_RANGE.1
        ),
    );
}

fn cn_closed_form(kind: ClockKind, lambda: f64, n: u32) -> f64 {
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    match (kind, n) {
        (_, 1) => 1.0,
        (ClockKind::Gamma, n) => fact(n - 1) * lambda.powi(n as i32 - 1),
        (ClockKind::InverseGaussian, n) => {
            2.0 * fact(2 * n - 3) / fact(n - 2) * lambda.powi(n as i32 - 1)
        }
    }
}

fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `Σ_{n=1}^{M+1} c_n (-i)^n/n! ad_H^n(ρ)` with explicit nested commutators.
fn nested_commutator_generator(rho: &CMatrix, h: &CMatrix, kind: ClockKind, lambda: f64, m: u32) -> CMatrix {
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    let mut ad = rho.clone();
    let mut factorial = 1.0;
    for n in 1..=m + 1 {
        ad = commutator(h, &ad);
        factorial *= f64::from(n);
        let phase = C64::new(0.0, -1.0).powu(n);
        out += &ad * (phase * (cn_closed_form(kind, lambda, n) / factorial));
    }
    out
}

#[test]
fn ac06_generator_consistency() {
    const TOL: f64 = 1e-12;
    let mut rng = stream(0xAC06);
    let mut worst_diff: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut cases = 0;
    for dim in [2usize, 3] {
        for k in 0..100 {
            let kind = if k % 2 == 0 { ClockKind::Gamma } else { ClockKind::InverseGaussian };
            let lambda = 0.1;
            let model = ClockModel::from_lambda(kind, lambda).unwrap();
            let rho = random_density_matrix(dim, &mut rng);
            let hm = random_hermitian(dim, 1.0, &mut rng);
            let h = HamiltonianSpec::new(hm.clone()).unwrap();
            let got = generator_apply(rho.matrix(), &h, &model, TruncationOrder::new(3)).unwrap();
            let want = nested_commutator_generator(rho.matrix(), &hm, kind, lambda, 3);
            worst_diff = worst_diff.max((got - want).iter().fold(0.0, |a, z| a.max(z.norm())));
            for m in 0..=8 {
                let g = generator_apply(rho.matrix(), &h, &model, TruncationOrder::new(m)).unwrap();
                worst_trace = worst_trace.max(trace(&g).norm());
            }
            cases += 1;
        }
    }
    verdict(
        6,
        "generator consistency",
        worst_diff <= TOL && worst_trace <= TOL,
        &format!(
            "{cases} qubit/qutrit cases, M = 3 vs nested commutators max diff {worst_diff:.2e}; max |tr| over M ≤ 8 {worst_trace:.2e} (tol {TOL:e})"
        ),
    );
}

#[test]
fn ac07_series_converges_to_exact() {
    const FLOOR: f64 = 1e-11;
    const RATIO_REL_TOL: f64 = 0.15;
    const RATE_TOL: f64 = 1e-10;
    let kappa = 1.0;
    let model = ClockModel::gamma(kappa).unwrap();
    let mut details = Vec::new();
    let mut pass = true;
    for nu in [0.1, 0.25, 0.4, 0.5] {
        let exact = -kappa * (C64::new(1.0, nu / kappa)).ln();
        let errors: Vec<f64> = (0..200)
            .map(|m| (truncated_mode_exponent(nu, &model, TruncationOrder::new(m)).unwrap().exponent - exact).norm())
            .collect();
        let m_last = (0..errors.len() - 1)
            .rev()
            .find(|&m| errors[m] >= FLOOR && errors[m + 1] >= FLOOR)
            .unwrap();
        let ratio = errors[m_last + 1] / errors[m_last];
        let target = nu / kappa;
        let ratio_ok = ((ratio - target) / target).abs() <= RATIO_REL_TOL;
        let converged = errors[199] < 1e-13;
        let limit = -truncated_mode_exponent(nu, &model, TruncationOrder::new(199)).unwrap().exponent.re;
        let rate_err = (limit - decoherence_rate(nu, &model)).abs();
        pass &= ratio_ok && converged && rate_err <= RATE_TOL;
        details.push(format!("|λν|={target}: ratio {ratio:.4} at M={m_last}, Re gap {rate_err:.1e}"));
    }
    verdict(7, "series-to-exact convergence", pass, &details.join("; "));
}

fn bloch_rows(csv: &str) -> Vec<(f64, String, f64, f64, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            let f = |i: usize| c[i].parse::<f64>().unwrap();
            (f(0), c[1].to_string(), f(2), f(3), f(4))
        })
        .collect()
}

fn orbit<'a>(rows: &'a [(f64, String, f64, f64, f64)], order: &str) -> Vec<&'a (f64, String, f64, f64, f64)> {
    rows.iter().filter(|r| r.1 == order).collect()
}

fn dist(a: &(f64, String, f64, f64, f64), b: &(f64, String, f64, f64, f64)) -> f64 {
    ((a.2 - b.2).powi(2) + (a.3 - b.3).powi(2) + (a.4 - b.4).powi(2)).sqrt()
}

#[test]
fn ac08_figure_properties() {
    const COINCIDE: f64 = 1e-3;
    const DISTINCT: f64 = 1e-2;
    let start = Instant::now();
    let a = run_from(["qclock", "orbits", "--preset", "fig3a"], None).unwrap();
    let rows = bloch_rows(&a.content);
    let (o0, o1, o2, o3) = (orbit(&rows, "0"), orbit(&rows, "1"), orbit(&rows, "2"), orbit(&rows, "3"));
    let mut spread: f64 = 0.0;
    let mut unitary_gap: f64 = 0.0;
    for i in 0..o1.len() {
        spread = spread.max(dist(o1[i], o2[i])).max(dist(o1[i], o3[i])).max(dist(o2[i], o3[i]));
        unitary_gap = unitary_gap.max(dist(o0[i], o1[i]));
    }
    let b = run_from(["qclock", "orbits", "--preset", "fig3b"], None).unwrap();
    let rows = bloch_rows(&b.content);
    let at5 = |order: &str| {
        let r = orbit(&rows, order).into_iter().find(|r| (r.0 - 5.0).abs() < 1e-9).unwrap();
        // |ρ01| is half the transverse Bloch radius
        0.5 * r.2.hypot(r.3)
    };
    let (m2, m3) = (at5("2"), at5("3"));
    let elapsed = start.elapsed();
    verdict(
        8,
        "figure reproduction",
        spread <= COINCIDE && unitary_gap > DISTINCT && m3 >= m2 && elapsed < Duration::from_secs(10),
        &format!(
            "fig3a M≥1 spread {spread:.2e} (≤ {COINCIDE:e}), M=0 gap {unitary_gap:.3}; fig3b |ρ01|(t=5) M=3 {m3:.5} ≥ M=2 {m2:.5}, {elapsed:.2?}"
        ),
    );
}

/// `n!/(2π rⁿ) ∮ K(z) z^{-n-1} dz` on a circle of radius `r`, trapezoid rule.
fn contour_derivative(k: impl Fn(C64) -> C64, n: u32, r: f64, points: usize) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..points {
        let theta = std::f64::consts::TAU * j as f64 / points as f64;
        let z = C64::from_polar(r, theta);
        acc += k(z) * C64::from_polar(1.0, -(n as f64) * theta);
    }
    let fact: f64 = (1..=n).map(f64::from).product();
    (acc / points as f64).re * fact / r.powi(n as i32)
}

#[test]
fn ac09_clock_moments() {
    const N: usize = 1_000_000;
    const SIGMAS: f64 = 4.0;
    const CN_REL_TOL: f64 = 1e-4;
    let (kappa, dt) = (2.0, 0.5);
    let model = ClockModel::gamma(kappa).unwrap();
    let mut rng = stream(0xAC09);
    let xs: Vec<f64> = (0..N).map(|_| sample_increment(&model, dt, &mut rng).unwrap()).collect();
    let mut worst_z: f64 = 0.0;
    for n in 1..=4 {
        let p: Vec<f64> = xs.iter().map(|x| x.powi(n)).collect();
        let mean = p.iter().sum::<f64>() / N as f64;
        let var = p.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (N - 1) as f64;
        let se = (var / N as f64).sqrt();
        worst_z = worst_z.max((mean - gamma_raw_moment(kappa, n as u32, dt).unwrap()).abs() / se);
    }
    let mut worst_rel: f64 = 0.0;
    for kappa in [1.0, 10.0] {
        let gamma = |z: C64| -kappa * (C64::new(1.0, 0.0) - z / kappa).ln();
        let ig = |z: C64| kappa / 2.0 * (C64::new(1.0, 0.0) - (C64::new(1.0, 0.0) - z * (4.0 / kappa)).sqrt());
        for n in 2..=6 {
            for (kind, oracle) in [
                (ClockKind::Gamma, contour_derivative(gamma, n, kappa / 8.0, 64)),
                (ClockKind::InverseGaussian, contour_derivative(ig, n, kappa / 8.0, 64)),
            ] {
                let closed = cn_coefficient(&ClockModel::new(kind, kappa).unwrap(), n).unwrap();
                worst_rel = worst_rel.max(((closed - oracle) / oracle).abs());
            }
        }
    }
    verdict(
        9,
        "clock moment suite",
        worst_z <= SIGMAS && worst_rel <= CN_REL_TOL,
        &format!(
            "N = {N}: raw moments n ≤ 4 max |Δ|/σ = {worst_z:.2} (≤ {SIGMAS}); c_2..c_6 contour oracle max rel err {worst_rel:.1e} (≤ {CN_REL_TOL:e})"
        ),
    );
}

fn is_state(m: &CMatrix, tol: f64) -> bool {
    hermitian_deviation(m) <= tol && (trace(m) - 1.0).norm() <= tol && min_eigenvalue(m) >= -tol
}

/// Checks one randomized case; returns a description of the first violation.
fn invariant_case(seed: u64) -> Result<(), String> {
    let mut rng = stream(seed);
    let dim = rng.random_range(2..=4);
    let kind = if rng.random_bool(0.5) { ClockKind::Gamma } else { ClockKind::InverseGaussian };
    let kappa = 10f64.powf(rng.random_range(-1.0..1.0));
    let model = ClockModel::new(kind, kappa).unwrap();
    let rho = if rng.random_bool(0.5) {
        random_density_matrix(dim, &mut rng)
    } else {
        random_pure_state(dim, &mut rng)
    };
    let h = HamiltonianSpec::new(random_hermitian(dim, 1.0, &mut rng)).unwrap();
    let tau = rng.random_range(0.0..5.0);

    if !is_state(rho.matrix(), 1e-10) {
        return Err("random state invalid".into());
    }
    let u = conjugate_by_propagator(&rho, &h, tau).unwrap();
    if !is_state(u.matrix(), 1e-10) || (u.purity() - rho.purity()).abs() > 1e-10 {
        return Err("unitary conjugation broke an invariant".into());
    }
    let e = exact_energy_basis_solution(&rho, &h, &model, tau).unwrap();
    if !is_state(e.matrix(), 1e-10) || e.purity() > rho.purity() + 1e-10 {
        return Err("averaged state invalid".into());
    }
    for m in 0..=8 {
        let g = generator_apply(rho.matrix(), &h, &model, TruncationOrder::new(m)).unwrap();
        let scale = g.iter().fold(1.0f64, |a, z| a.max(z.norm()));
        if hermitian_deviation(&g) > 1e-12 * scale || trace(&g).norm() > 1e-12 * scale {
            return Err(format!("generator at M = {m} not Hermitian and traceless"));
        }
    }
    let tr = evolve_trajectory(&rho, &h, &model, &uniform_grid(tau, 6), child_seed(seed, 1)).unwrap();
    if tr.states.iter().any(|s| !is_state(s.matrix(), 1e-10) || (s.purity() - rho.purity()).abs() > 1e-10) {
        return Err("trajectory state invalid".into());
    }
    // the first-order generator is of Lindblad form, so the flow stays positive
    // step resolves both the fastest phase and the fastest decay λν²
    let e = h.max_abs_energy();
    let step = 0.05 / (e + model.lambda() * 4.0 * e * e);
    let steps = integrate(&rho, &h, &model, TruncationOrder::new(1), 1.0, step).unwrap();
    if steps.iter().any(|s| !is_state(&s.state, 1e-9)) {
        return Err("Lindblad flow left the state space".into());
    }
    Ok(())
}

#[test]
fn ac10_invariant_suite() {
    const MASTER_SEED: u64 = 0xAC10;
    const CASES: u64 = 1000;
    let failures: Vec<String> = (0..CASES)
        .filter_map(|k| {
            let seed = child_seed(MASTER_SEED, k);
            invariant_case(seed).err().map(|e| format!("case {k} (seed {seed:#x}): {e}"))
        })
        .collect();
    verdict(
        10,
        "invariant suite",
        failures.is_empty(),
        &format!(
            "{} of {CASES} randomized cases green (master seed {MASTER_SEED:#x}){}",
            CASES as usize - failures.len(),
            failures.first().map(|f| format!("; first failure {f}")).unwrap_or_default()
        ),
    );
}
