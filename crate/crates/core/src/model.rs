//! The random operator `H_ω = −Δ + V₀ + Σ_k ω_k u(· − k)` restricted to boxes.

use serde::{Deserialize, Serialize};

use crate::disorder::{sample_omega, DensityModel, DisorderSample};
use crate::error::{Error, Result};
use crate::hamiltonian::{alloy_potential, assemble, HamiltonianMatrix, PeriodicPotential};
use crate::lattice::{BoundaryCondition, BoxGeometry};
use crate::spectral::{eigenvalues, Provenance, SpectrumResult};
use crate::toeplitz::{extended_sites, ConvolutionVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlloyModel {
    pub alpha: ConvolutionVector,
    pub density: DensityModel,
    #[serde(default = "PeriodicPotential::zero")]
    pub v0: PeriodicPotential,
    pub bc: BoundaryCondition,
}

/// Sample ids are namespaced by box side so different sides use
/// independent coupling constants.
pub fn sample_id(side: usize, index: usize) -> u64 {
    ((side as u64) << 32) | index as u64
}

impl AlloyModel {
    pub fn dim(&self) -> usize {
        self.alpha.dim()
    }

    pub fn validate(&self) -> Result<()> {
        self.v0.validate(self.dim())
    }

    pub fn geometry(&self, side: usize) -> Result<BoxGeometry> {
        BoxGeometry::new(self.dim(), side, self.bc)
    }

    pub fn sample(&self, geometry: &BoxGeometry, seed: u64, sample_id: u64) -> DisorderSample {
        let sites = extended_sites(geometry, &self.alpha.support());
        sample_omega(&self.density, &sites, seed, sample_id)
    }

    pub fn hamiltonian(&self, geometry: &BoxGeometry, omega: &DisorderSample) -> Result<HamiltonianMatrix> {
        let v = alloy_potential(&self.alpha, omega, geometry)?;
        assemble(geometry, &self.v0, &v)
    }

    pub fn spectrum(&self, geometry: &BoxGeometry, seed: u64, sample_id: u64, config_hash: &str) -> Result<SpectrumResult> {
        let omega = self.sample(geometry, seed, sample_id);
        let h = self.hamiltonian(geometry, &omega)?;
        eigenvalues(
            &h,
            &Provenance {
                config_hash: config_hash.to_string(),
                seed,
                sample_id,
            },
        )
    }

    /// The same operator written with `α_0 = 1`: returns the normalized
    /// vector and the law of `α_0 ω_0`.
    pub fn normalized(&self) -> Result<(ConvolutionVector, DensityModel)> {
        let (alpha, a0) = self.alpha.normalize()?;
        let density = if a0 == 1.0 { self.density.clone() } else { self.density.scaled(a0)? };
        Ok((alpha, density))
    }

    /// `(lo, hi)` containing every attainable eigenvalue: the Laplacian range
    /// `[0, 4d]` widened by `‖V₀‖_∞ + sup|supp f| Σ|α_k|`.
    pub fn attainable_range(&self) -> (f64, f64) {
        let (a, b) = self.density.support();
        let v = self.v0.max_abs() + a.abs().max(b.abs()) * self.alpha.l1_norm();
        (-v, 4.0 * self.dim() as f64 + v)
    }

    /// `count` equispaced energies on the attainable range padded by 1.
    pub fn default_energy_grid(&self, count: usize) -> Vec<f64> {
        let (lo, hi) = self.attainable_range();
        let (lo, hi) = (lo - 1.0, hi + 1.0);
        if count < 2 {
            return vec![0.5 * (lo + hi)];
        }
        (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
    }

    pub fn check_dim(&self, d: Option<usize>) -> Result<()> {
        match d {
            Some(d) if d != self.dim() => Err(Error::Config(format!(
                "d = {d} but the convolution vector has dimension {}",
                self.dim()
            ))),
            _ => Ok(()),
        }
    }
}
