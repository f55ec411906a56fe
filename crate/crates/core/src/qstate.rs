//! Finite-dimensional quantum states and Hamiltonians.
//!
//! Unitary evolution is always applied through the spectral decomposition of
//! the Hamiltonian: in the energy basis `e^{-iHτ} ρ e^{iHτ}` multiplies the
//! element `ρ_mn` by `e^{-i(E_m - E_n)τ}`, which is exact for any `τ`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{CMatrix, Error, Result, C64};

/// Absolute Hermiticity tolerance for states (entries are bounded by one).
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on `|tr ρ - 1|`.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted for a positive semidefinite state.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Largest `|m_ij - conj(m_ji)|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    let mut out = m.clone();
    let n = m.nrows();
    for i in 0..n {
        out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[(i, j)] = avg;
            out[(j, i)] = avg.conj();
        }
    }
    out
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = hermitian_part(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)
        .first()
        .copied()
        .unwrap_or(f64::NAN)
}

/// Complex trace.
pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() == 0 || m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidState("non-finite entry".into()))
    }
}

pub fn pauli_x() -> CMatrix {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    CMatrix::from_row_slice(2, 2, &[o, l, l, o])
}

pub fn pauli_y() -> CMatrix {
    let (o, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    CMatrix::from_row_slice(2, 2, &[o, -i, i, o])
}

pub fn pauli_z() -> CMatrix {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    CMatrix::from_row_slice(2, 2, &[l, o, o, -l])
}

/// A density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates all three state invariants and stores the Hermitian part.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square(&matrix)?;
        check_finite(&matrix)?;
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NonHermitianInput { deviation: dev });
        }
        let matrix = hermitian_part(&matrix);
        let tr = trace(&matrix).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min_ev = min_eigenvalue(&matrix);
        if min_ev < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_ev:e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Caller guarantees the invariants; only symmetrization is applied.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self {
            matrix: hermitian_part(&matrix),
        }
    }

    /// `|ψ⟩⟨ψ|` for the normalized amplitude vector.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty state vector".into()));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState(format!("state vector norm {norm}")));
        }
        let d = amplitudes.len();
        let psi: Vec<C64> = amplitudes.iter().map(|a| a / norm).collect();
        let m = CMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj());
        Ok(Self::from_matrix_unchecked(m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        let w = 1.0 / dim as f64;
        Self {
            matrix: CMatrix::from_diagonal_element(dim, dim, C64::new(w, 0.0)),
        }
    }

    /// Qubit state with the given Bloch vector; `|r| ≤ 1` is required.
    pub fn from_bloch(b: BlochVector) -> Result<Self> {
        let r2 = b.x * b.x + b.y * b.y + b.z * b.z;
        if !r2.is_finite() || r2 > 1.0 + POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("Bloch radius² {r2} > 1")));
        }
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new((1.0 + b.z) / 2.0, 0.0),
                C64::new(b.x / 2.0, -b.y / 2.0),
                C64::new(b.x / 2.0, b.y / 2.0),
                C64::new((1.0 - b.z) / 2.0, 0.0),
            ],
        );
        Ok(Self::from_matrix_unchecked(m))
    }

    /// The +1 eigenstate of σ_x.
    pub fn plus_x() -> Self {
        let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::pure(&[a, a]).expect("normalized vector")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        trace(&self.matrix)
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }
}

/// Hermitian operator with its spectral decomposition `H = V diag(E) V†`.
///
/// Eigenvalues are stored ascending; eigenvector columns follow the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    matrix: CMatrix,
    energies: Vec<f64>,
    eigenvectors: CMatrix,
}

/// Diagonalizes a Hermitian matrix. Hermiticity is checked relative to the
/// largest entry, so Hamiltonians in any frequency unit are accepted.
pub fn spectral_decompose(h: &CMatrix) -> Result<HamiltonianSpec> {
    let dim = check_square(h)?;
    check_finite(h).map_err(|_| Error::NonHermitianInput {
        deviation: f64::NAN,
    })?;
    let scale = h.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let dev = hermitian_deviation(h);
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NonHermitianInput { deviation: dev });
    }
    let matrix = hermitian_part(h);
    let eig = matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = CMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HamiltonianSpec {
        matrix,
        energies,
        eigenvectors,
    })
}

impl HamiltonianSpec {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        spectral_decompose(&matrix)
    }

    /// Hamiltonian that is already diagonal in the computational basis.
    pub fn diagonal(energies: &[f64]) -> Result<Self> {
        let d = energies.len();
        let m = CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(energies[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        spectral_decompose(&m)
    }

    /// `ω σ_z`.
    pub fn spin_z(omega: f64) -> Result<Self> {
        spectral_decompose(&(pauli_z() * C64::new(omega, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn max_abs_energy(&self) -> f64 {
        self.energies.iter().fold(0.0, |a, e| a.max(e.abs()))
    }

    /// Transition frequencies `ν_mn = E_m - E_n`.
    pub fn transition_frequencies(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |m, n| self.energies[m] - self.energies[n])
    }

    /// `V† A V`.
    pub fn to_energy_basis(&self, a: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * a * &self.eigenvectors
    }

    /// `V A V†`.
    pub fn from_energy_basis(&self, a: &CMatrix) -> CMatrix {
        &self.eigenvectors * a * self.eigenvectors.adjoint()
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: dim,
            });
        }
        Ok(())
    }

    /// Entrywise `a_mn · e^{-i ν_mn τ}` for `a` given in the energy basis.
    pub(crate) fn rotate_energy_basis(&self, a: &CMatrix, tau: f64) -> CMatrix {
        let e = &self.energies;
        CMatrix::from_fn(a.nrows(), a.ncols(), |m, n| {
            a[(m, n)] * C64::from_polar(1.0, -(e[m] - e[n]) * tau)
        })
    }
}

/// `e^{-iHτ} ρ e^{iHτ}` evaluated in the energy eigenbasis.
pub fn conjugate_by_propagator(
    rho: &DensityMatrix,
    h: &HamiltonianSpec,
    tau: f64,
) -> Result<DensityMatrix> {
    h.check_dim(rho.dim())?;
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            value: tau,
            reason: "clock time must be finite and nonnegative",
        });
    }
    if tau == 0.0 {
        return Ok(rho.clone());
    }
    let rotated = h.rotate_energy_basis(&h.to_energy_basis(rho.matrix()), tau);
    Ok(DensityMatrix::from_matrix_unchecked(
        h.from_energy_basis(&rotated),
    ))
}

/// Real Bloch vector of a qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// `x = 2 Re ρ_01`, `y = 2 Im ρ_10`, `z = ρ_00 - ρ_11`.
pub fn bloch_coordinates(rho: &DensityMatrix) -> Result<BlochVector> {
    bloch_of_matrix(rho.matrix())
}

/// Same as [`bloch_coordinates`] for a raw (possibly non-positive) matrix.
pub fn bloch_of_matrix(m: &CMatrix) -> Result<BlochVector> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: m.nrows(),
        });
    }
    Ok(BlochVector {
        x: 2.0 * m[(0, 1)].re,
        y: 2.0 * m[(1, 0)].im,
        z: (m[(0, 0)] - m[(1, 1)]).re,
    })
}

/// Random mixed state from the Ginibre ensemble: `ρ = AA† / tr(AA†)`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let a = random_complex_matrix(dim, rng);
    let aa = &a * a.adjoint();
    let tr = trace(&aa).re;
    DensityMatrix::from_matrix_unchecked(aa / C64::new(tr, 0.0))
}

/// Random pure state with Gaussian amplitudes.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let amps: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    DensityMatrix::pure(&amps).expect("Gaussian vector is nonzero almost surely")
}

/// Random Hermitian matrix `scale · (A + A†)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> CMatrix {
    hermitian_part(&random_complex_matrix(dim, rng)) * C64::new(scale, 0.0)
}

fn random_complex_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    fn reconstruct(h: &HamiltonianSpec) -> CMatrix {
        let d = h.dim();
        let diag = CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(h.energies()[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        h.from_energy_basis(&diag)
    }

    #[test]
    fn decompose_spin_z() {
        let h = HamiltonianSpec::spin_z(0.8).unwrap();
        assert_eq!(h.energies(), &[-0.8, 0.8]);
        let v = h.eigenvectors();
        // lowest energy lives on |1⟩: V is a permutation up to phases
        assert!(v[(0, 0)].norm() < 1e-15 && (v[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!(v[(1, 1)].norm() < 1e-15 && (v[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decompose_identity_is_degenerate() {
        let h = spectral_decompose(&CMatrix::identity(3, 3)).unwrap();
        for e in h.energies() {
            assert!((e - 1.0).abs() < 1e-14);
        }
        let v = h.eigenvectors();
        assert!(max_abs_diff(&(v.adjoint() * v), &CMatrix::identity(3, 3)) < 1e-12);
    }

    #[test]
    fn decompose_known_spectrum() {
        // build H = U diag(E) U† from a random unitary, then recover E
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = spectral_decompose(&random_hermitian(4, 1.0, &mut rng))
            .unwrap()
            .eigenvectors()
            .clone();
        let spectrum = [-1.3, -0.2, 0.4, 2.5];
        let diag = CMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                C64::new(spectrum[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let m = &u * diag * u.adjoint();
        let h = spectral_decompose(&m).unwrap();
        for (e, want) in h.energies().iter().zip(spectrum) {
            assert!((e - want).abs() < 1e-12);
        }
        assert!(max_abs_diff(&reconstruct(&h), &m) < 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = pauli_x();
        m[(0, 1)] = C64::new(1.0, 0.1);
        assert!(matches!(
            spectral_decompose(&m),
            Err(Error::NonHermitianInput { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(m),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = CMatrix::identity(2, 2);
        assert!(matches!(
            DensityMatrix::new(bad_trace),
            Err(Error::InvalidState(_))
        ));
        let negative = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.5, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-0.5, 0.0)],
        );
        assert!(matches!(DensityMatrix::new(negative), Err(Error::InvalidState(_))));
        assert!(matches!(
            DensityMatrix::new(CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn zero_time_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density_matrix(3, &mut rng);
        let h = HamiltonianSpec::new(random_hermitian(3, 1.0, &mut rng)).unwrap();
        assert_eq!(conjugate_by_propagator(&rho, &h, 0.0).unwrap(), rho);
    }

    #[test]
    fn commuting_state_is_stationary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = HamiltonianSpec::new(random_hermitian(3, 1.0, &mut rng)).unwrap();
        let diag = CMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                C64::new([0.5, 0.3, 0.2][i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let rho = DensityMatrix::new(h.from_energy_basis(&diag)).unwrap();
        for tau in [0.1, 3.0, 1234.5] {
            let out = conjugate_by_propagator(&rho, &h, tau).unwrap();
            assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-12);
        }
    }

    #[test]
    fn plus_x_rotates_to_minus_x() {
        // ω = 0.8: the Bloch vector precesses at 2ω, so τ = π/1.6 is half a turn
        let h = HamiltonianSpec::spin_z(0.8).unwrap();
        let out =
            conjugate_by_propagator(&DensityMatrix::plus_x(), &h, std::f64::consts::PI / 1.6)
                .unwrap();
        let b = bloch_coordinates(&out).unwrap();
        assert!(b.distance(&BlochVector::new(-1.0, 0.0, 0.0)) < 1e-10, "{b:?}");
    }

    #[test]
    fn rotation_matches_closed_form() {
        // closed-form precession: (x, y) → (x cos 2ωτ - y sin 2ωτ, x sin 2ωτ + y cos 2ωτ)
        let omega = 0.8;
        let h = HamiltonianSpec::spin_z(omega).unwrap();
        let start = BlochVector::new(0.6, 0.0, 0.3);
        let rho = DensityMatrix::from_bloch(start).unwrap();
        for tau in [0.05, 0.7, 2.3, 11.0] {
            let b = bloch_coordinates(&conjugate_by_propagator(&rho, &h, tau).unwrap()).unwrap();
            let th = 2.0 * omega * tau;
            let want = BlochVector::new(
                start.x * th.cos() - start.y * th.sin(),
                start.x * th.sin() + start.y * th.cos(),
                start.z,
            );
            assert!(b.distance(&want) < 1e-12);
        }
    }

    #[test]
    fn bloch_examples() {
        let mixed = bloch_coordinates(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert_eq!(mixed, BlochVector::new(0.0, 0.0, 0.0));
        let px = bloch_coordinates(&DensityMatrix::plus_x()).unwrap();
        assert!(px.distance(&BlochVector::new(1.0, 0.0, 0.0)) < 1e-15);
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.75, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.25, 0.0)],
        );
        let b = bloch_coordinates(&DensityMatrix::new(m).unwrap()).unwrap();
        assert_eq!(b, BlochVector::new(0.0, 0.0, 0.5));
        // y sign convention: |+y⟩ = (|0⟩ + i|1⟩)/√2
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let py = DensityMatrix::pure(&[C64::new(s, 0.0), C64::new(0.0, s)]).unwrap();
        assert!(bloch_coordinates(&py).unwrap().distance(&BlochVector::new(0.0, 1.0, 0.0)) < 1e-15);
        assert!(matches!(
            bloch_coordinates(&DensityMatrix::maximally_mixed(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let h = HamiltonianSpec::spin_z(1.0).unwrap();
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            conjugate_by_propagator(&rho, &h, 1.0),
            Err(Error::DimensionMismatch { expected: 2, actual: 3 })
        ));
    }

    fn check_state(rho: &DensityMatrix) {
        assert!(hermitian_deviation(rho.matrix()) <= HERMITIAN_TOL);
        assert!((rho.trace().re - 1.0).abs() <= TRACE_TOL);
        assert!(rho.min_eigenvalue() >= -POSITIVITY_TOL);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn conjugation_group_property(seed in any::<u64>(), dim in 2usize..5,
                                      t1 in 0.0f64..20.0, t2 in 0.0f64..20.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density_matrix(dim, &mut rng);
            let h = HamiltonianSpec::new(random_hermitian(dim, 1.0, &mut rng)).unwrap();
            let two_step = conjugate_by_propagator(
                &conjugate_by_propagator(&rho, &h, t1).unwrap(), &h, t2).unwrap();
            let one_step = conjugate_by_propagator(&rho, &h, t1 + t2).unwrap();
            prop_assert!(max_abs_diff(two_step.matrix(), one_step.matrix()) < 1e-12);
        }

        #[test]
        fn conjugation_preserves_invariants(seed in any::<u64>(), dim in 2usize..6,
                                            tau in 0.0f64..100.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density_matrix(dim, &mut rng);
            let h = HamiltonianSpec::new(random_hermitian(dim, 2.0, &mut rng)).unwrap();
            let out = conjugate_by_propagator(&rho, &h, tau).unwrap();
            check_state(&out);
            prop_assert!((out.purity() - rho.purity()).abs() < 1e-12);
            prop_assert!((out.trace() - rho.trace()).norm() < 1e-12);
            let before = hermitian_eigenvalues(rho.matrix());
            let after = hermitian_eigenvalues(out.matrix());
            for (a, b) in before.iter().zip(&after) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn decomposition_reconstructs(seed in any::<u64>(), dim in 1usize..7, scale in 0.01f64..50.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_hermitian(dim, scale, &mut rng);
            let h = spectral_decompose(&m).unwrap();
            prop_assert!(h.energies().windows(2).all(|w| w[0] <= w[1]));
            let v = h.eigenvectors();
            prop_assert!(max_abs_diff(&(v.adjoint() * v), &CMatrix::identity(dim, dim)) < 1e-10);
            prop_assert!(max_abs_diff(&reconstruct(&h), &m) < 1e-10 * scale.max(1.0));
        }

        #[test]
        fn bloch_vector_inside_ball(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density_matrix(2, &mut rng);
            let b = bloch_coordinates(&rho).unwrap();
            prop_assert!(b.norm() <= 1.0 + 1e-10);
            let back = DensityMatrix::from_bloch(b).unwrap();
            prop_assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-14);
        }
    }
}
