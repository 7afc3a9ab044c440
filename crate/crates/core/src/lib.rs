//! Numerical laboratory for Wegner estimates of alloy-type random lattice
//! operators whose single-site potential may change sign.
//!
//! The single-site potential is a finite convolution vector `α` on `Z^d`.
//! The crate builds the truncated Toeplitz matrices that decorrelate the
//! potential, assembles the finite-box operator `−Δ + V₀ + V_ω`, and runs
//! seeded Monte Carlo checks of the trace bound
//! `E[Tr P([E−ε, E])] ≤ C ε l^d`, the Lipschitz bound on the integrated
//! density of states, and ground-state tail probabilities near the bottom of
//! the spectrum.

pub mod canonical;
pub mod disorder;
pub mod error;
pub mod hamiltonian;
pub mod initial_scale;
pub mod lattice;
pub mod model;
pub mod spectral;
pub mod stats;
pub mod toeplitz;
pub mod wegner;

pub use error::{Error, Result};
