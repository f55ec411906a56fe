//! Random-unitary trajectories and their ensemble average.
//!
//! A trajectory is `ρ_t = e^{-iHΓ_t} ρ0 e^{iHΓ_t}` along one sampled clock
//! path. Averaging many of them estimates the density matrix of the ensemble.
//!
//! Trajectory `k` of an ensemble draws its clock from
//! [`child_stream(master_seed, k)`](crate::seed::child_stream). Trajectories
//! are evaluated in parallel batches and reduced in index order with
//! compensated sums, so the estimate is bit-identical for any worker count.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::clock::{sample_path, ClockModel, ClockPath};
use crate::qstate::{DensityMatrix, HamiltonianSpec};
use crate::seed::{child_seed, child_stream, stream};
use crate::{CMatrix, Error, Result};

const BATCH: usize = 256;

/// One sampled trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub clock: ClockPath,
    pub states: Vec<DensityMatrix>,
}

impl TrajectoryRecord {
    pub fn grid(&self) -> &[f64] {
        self.clock.grid()
    }
}

fn check_dims(rho0: &DensityMatrix, h: &HamiltonianSpec) -> Result<()> {
    if rho0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: rho0.dim(),
        });
    }
    Ok(())
}

/// States along one clock path, as raw matrices in the original basis.
fn states_along(rho0: &DensityMatrix, h: &HamiltonianSpec, path: &ClockPath) -> Vec<CMatrix> {
    let rho_e = h.to_energy_basis(rho0.matrix());
    path.values()
        .iter()
        .map(|&gamma| {
            if gamma == 0.0 {
                rho0.matrix().clone()
            } else {
                h.from_energy_basis(&h.rotate_energy_basis(&rho_e, gamma))
            }
        })
        .collect()
}

/// Evolves `rho0` along a clock path sampled from `stream(seed)`.
pub fn evolve_trajectory(
    rho0: &DensityMatrix,
    h: &HamiltonianSpec,
    model: &ClockModel,
    grid: &[f64],
    seed: u64,
) -> Result<TrajectoryRecord> {
    check_dims(rho0, h)?;
    let clock = sample_path(model, grid, &mut stream(seed))?;
    let states = states_along(rho0, h, &clock)
        .into_iter()
        .map(DensityMatrix::from_matrix_unchecked)
        .collect();
    Ok(TrajectoryRecord { clock, states })
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Standard errors of the mean, per real component of each matrix entry.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryErrors {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
}

impl EntryErrors {
    pub fn max(&self) -> f64 {
        self.re.iter().chain(self.im.iter()).fold(0.0, |a, &b| a.max(b))
    }
}

/// Monte Carlo estimate of the averaged density matrix on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleEstimate {
    pub grid: Vec<f64>,
    pub mean: Vec<DensityMatrix>,
    pub stderr: Vec<EntryErrors>,
    pub n_traj: usize,
}

/// Per grid point, per entry: sums of re, im, re², im².
struct Accumulator {
    dim: usize,
    sums: Vec<[CompensatedSum; 4]>,
}

impl Accumulator {
    fn new(points: usize, dim: usize) -> Self {
        Self {
            dim,
            sums: vec![[CompensatedSum::default(); 4]; points * dim * dim],
        }
    }

    fn add(&mut self, states: &[CMatrix]) {
        let dd = self.dim * self.dim;
        for (p, m) in states.iter().enumerate() {
            for (k, z) in m.iter().enumerate() {
                let s = &mut self.sums[p * dd + k];
                s[0].add(z.re);
                s[1].add(z.im);
                s[2].add(z.re * z.re);
                s[3].add(z.im * z.im);
            }
        }
    }

    fn finish(self, grid: Vec<f64>, n: usize) -> EnsembleEstimate {
        let d = self.dim;
        let dd = d * d;
        let nf = n as f64;
        let stderr_of = |sum: f64, sq: f64| {
            let mean = sum / nf;
            let var = ((sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
            (var / nf).sqrt()
        };
        let mut mean = Vec::with_capacity(grid.len());
        let mut stderr = Vec::with_capacity(grid.len());
        for p in 0..grid.len() {
            let cell = &self.sums[p * dd..(p + 1) * dd];
            // nalgebra storage is column-major, matching the iteration in `add`
            let m = CMatrix::from_iterator(
                d,
                d,
                cell.iter()
                    .map(|s| crate::C64::new(s[0].value() / nf, s[1].value() / nf)),
            );
            mean.push(DensityMatrix::from_matrix_unchecked(m));
            stderr.push(EntryErrors {
                re: DMatrix::from_iterator(d, d, cell.iter().map(|s| stderr_of(s[0].value(), s[2].value()))),
                im: DMatrix::from_iterator(d, d, cell.iter().map(|s| stderr_of(s[1].value(), s[3].value()))),
            });
        }
        EnsembleEstimate {
            grid,
            mean,
            stderr,
            n_traj: n,
        }
    }
}

/// Mean and standard error over `n_traj` independent trajectories.
pub fn ensemble_average(
    rho0: &DensityMatrix,
    h: &HamiltonianSpec,
    model: &ClockModel,
    grid: &[f64],
    n_traj: usize,
    master_seed: u64,
) -> Result<EnsembleEstimate> {
    if n_traj < 2 {
        return Err(Error::InsufficientSamples(n_traj));
    }
    check_dims(rho0, h)?;
    crate::clock::validate_grid(grid)?;
    let mut acc = Accumulator::new(grid.len(), h.dim());
    let mut start = 0;
    while start < n_traj {
        let end = (start + BATCH).min(n_traj);
        let batch: Vec<Vec<CMatrix>> = (start..end)
            .into_par_iter()
            .map(|k| {
                let path = sample_path(model, grid, &mut child_stream(master_seed, k as u64))?;
                Ok(states_along(rho0, h, &path))
            })
            .collect::<Result<_>>()?;
        for states in &batch {
            acc.add(states);
        }
        start = end;
    }
    Ok(acc.finish(grid.to_vec(), n_traj))
}

/// Seed used for trajectory `index` of an ensemble.
pub fn trajectory_seed(master_seed: u64, index: u64) -> u64 {
    child_seed(master_seed, index)
}
