//! Quantum dynamics under a random clock.
//!
//! The Newtonian time in `exp(-iHt)` is replaced by a nondecreasing random
//! process `Γ_t` (a subordinator) with `E[Γ_t] = t`. This crate samples the
//! clock, evolves states along random clock paths, averages them into density
//! matrices, and integrates the averaged master equation at any truncation
//! order in `λ = 1/κ`.
//!
//! Module map:
//!
//! - [`qstate`]: density matrices, Hamiltonians, unitary conjugation, Bloch vectors.
//! - [`clock`]: gamma and inverse-Gaussian clocks, moments, tick statistics.
//! - [`montecarlo`]: random-unitary trajectories and ensemble averages.
//! - [`master`]: the `c_n`-series generator, its integration, and the exact solution.
//! - [`bounds`]: atomic-clock bound on `κ`, Planck-scale ticks, estimation error.

pub mod bounds;
pub mod clock;
mod error;
pub mod master;
pub mod montecarlo;
pub mod qstate;
pub mod seed;
pub mod special;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
