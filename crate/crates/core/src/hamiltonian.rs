//! Finite-volume lattice operator `h_ω = −Δ_disc + V₀ + V_ω` on a box.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::disorder::DisorderSample;
use crate::error::{Error, Result};
use crate::lattice::{BoundaryCondition, BoxGeometry, Site};
use crate::toeplitz::ConvolutionVector;

/// Largest box volume for which a dense matrix is materialized.
pub const DENSE_LIMIT: usize = 4096;

/// A `Z^d`-periodic background potential given on one cell `{0, …, p−1}^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPotential {
    pub period: usize,
    pub values: Vec<f64>,
}

impl PeriodicPotential {
    pub fn zero() -> Self {
        PeriodicPotential {
            period: 1,
            values: vec![0.0],
        }
    }

    pub fn constant(c: f64) -> Self {
        PeriodicPotential {
            period: 1,
            values: vec![c],
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.period == 0 {
            return Err(Error::Config("periodic potential needs period >= 1".into()));
        }
        let cell = self.period.pow(dim as u32);
        if self.values.len() != cell {
            return Err(Error::ShapeMismatch {
                expected: cell,
                got: self.values.len(),
            });
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("periodic potential has non-finite values".into()));
        }
        Ok(())
    }

    fn cell(&self, dim: usize) -> BoxGeometry {
        BoxGeometry::new(dim, self.period, BoundaryCondition::Periodic).expect("validated period")
    }

    /// Value at `site`, which only depends on `site mod period`.
    pub fn value_at(&self, dim: usize, site: &Site) -> f64 {
        let p = self.period as i64;
        let reduced: Vec<i64> = site.coords(dim).iter().map(|c| c.rem_euclid(p)).collect();
        let idx = self.cell(dim).index_of(&Site::new(&reduced).unwrap()).unwrap();
        self.values[idx]
    }

    /// Invariance under `x_i ↦ −x_i` (mod period) along every axis.
    pub fn is_reflection_symmetric(&self, dim: usize) -> bool {
        let cell = self.cell(dim);
        cell.sites().iter().all(|s| {
            (0..dim).all(|axis| {
                let reflected = s.with_coord(axis, -s.coord(axis));
                self.value_at(dim, &reflected) == self.value_at(dim, s)
            })
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Real symmetric operator on a box, stored row-compressed with sorted
/// column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianMatrix {
    geometry: BoxGeometry,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl HamiltonianMatrix {
    fn from_rows(geometry: BoxGeometry, rows: Vec<BTreeMap<usize, f64>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        HamiltonianMatrix {
            geometry,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Wraps a dense symmetric matrix whose size matches the box volume.
    pub fn from_dense(geometry: BoxGeometry, m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != geometry.volume() || m.ncols() != geometry.volume() {
            return Err(Error::ShapeMismatch {
                expected: geometry.volume(),
                got: m.nrows(),
            });
        }
        if m != &m.transpose() {
            return Err(Error::NotApplicable("matrix is not symmetric".into()));
        }
        let rows = m
            .row_iter()
            .map(|r| r.iter().copied().enumerate().collect::<BTreeMap<_, _>>())
            .collect();
        Ok(Self::from_rows(geometry, rows))
    }

    pub fn geometry(&self) -> &BoxGeometry {
        &self.geometry
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    /// Nonzero entries of row `i` as `(column, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(pos) => self.vals[r.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entry(i, i)).collect()
    }

    /// Number of stored off-diagonal nonzeros.
    pub fn offdiagonal_count(&self) -> usize {
        (0..self.dim()).map(|i| self.row(i).filter(|(c, _)| *c != i).count()).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim()).all(|i| self.row(i).all(|(j, v)| self.entry(j, i).to_bits() == v.to_bits()))
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.dim(), |i, _| self.row(i).map(|(j, v)| v * x[j]).sum())
    }

    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let n = self.dim();
        if n > DENSE_LIMIT {
            return Err(Error::NotApplicable(format!(
                "dense storage limited to {DENSE_LIMIT} sites, box has {n}"
            )));
        }
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    /// Adds `values` to the diagonal.
    pub fn with_diagonal_added(&self, values: &[f64]) -> Result<Self> {
        if values.len() != self.dim() {
            return Err(Error::ShapeMismatch {
                expected: self.dim(),
                got: values.len(),
            });
        }
        let mut out = self.clone();
        for (i, add) in values.iter().enumerate() {
            let r = out.row_ptr[i]..out.row_ptr[i + 1];
            match out.cols[r.clone()].binary_search(&i) {
                Ok(pos) => out.vals[r.start + pos] += add,
                Err(pos) => {
                    out.cols.insert(r.start + pos, i);
                    out.vals.insert(r.start + pos, *add);
                    for p in &mut out.row_ptr[i + 1..] {
                        *p += 1;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Coordinate text dump, one `row col value` triple per line.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> Result<()> {
        for i in 0..self.dim() {
            for (j, v) in self.row(i) {
                writeln!(w, "{i} {j} {v:e}")?;
            }
        }
        Ok(())
    }
}

/// `[−Δ φ](i) = Σ_{|i−n|=1} (φ(i) − φ(n))` under the box boundary condition.
///
/// Periodic: diagonal `2d` and `−1` per wrapped neighbour. Dirichlet: diagonal
/// `2d`, couplings to in-box neighbours only. Neumann: the graph Laplacian of
/// the box, so constants are the ground state with eigenvalue 0.
pub fn discrete_laplacian(geometry: &BoxGeometry) -> HamiltonianMatrix {
    let d = geometry.dim() as f64;
    let rows = (0..geometry.volume())
        .map(|i| {
            let neighbors = geometry.neighbors(i);
            let mut row = BTreeMap::new();
            let diag = match geometry.bc() {
                BoundaryCondition::Neumann => neighbors.len() as f64,
                BoundaryCondition::Periodic | BoundaryCondition::Dirichlet => 2.0 * d,
            };
            row.insert(i, diag);
            for n in neighbors {
                *row.entry(n).or_insert(0.0) -= 1.0;
            }
            row
        })
        .collect();
    HamiltonianMatrix::from_rows(*geometry, rows)
}

/// `V_ω(i) = Σ_{k∈Λ⁺} ω_k α_{i−k}` for `i ∈ Λ̃`, summed in `Λ⁺` order. The
/// potential never wraps around, whatever the kinetic boundary condition.
pub fn alloy_potential(alpha: &ConvolutionVector, omega: &DisorderSample, geometry: &BoxGeometry) -> Result<Vec<f64>> {
    let lookup: std::collections::HashMap<Site, f64> =
        omega.sites.iter().copied().zip(omega.omega.iter().copied()).collect();
    // ascending k = i − γ means descending γ
    let gamma: Vec<(Site, f64)> = alpha.entries().collect::<Vec<_>>().into_iter().rev().collect();
    geometry
        .sites()
        .iter()
        .map(|i| {
            let mut acc = 0.0;
            for (g, a) in &gamma {
                let k = *i - *g;
                let w = lookup
                    .get(&k)
                    .ok_or_else(|| Error::MissingSite(k.coords(geometry.dim()).to_vec()))?;
                acc += a * w;
            }
            Ok(acc)
        })
        .collect()
}

/// `−Δ + V₀ + V_ω` with `V₀` extended periodically from the origin.
pub fn assemble(geometry: &BoxGeometry, v0: &PeriodicPotential, v_omega: &[f64]) -> Result<HamiltonianMatrix> {
    if v_omega.len() != geometry.volume() {
        return Err(Error::ShapeMismatch {
            expected: geometry.volume(),
            got: v_omega.len(),
        });
    }
    v0.validate(geometry.dim())?;
    let diag: Vec<f64> = geometry
        .sites()
        .iter()
        .zip(v_omega)
        .map(|(s, v)| v0.value_at(geometry.dim(), s) + v)
        .collect();
    discrete_laplacian(geometry).with_diagonal_added(&diag)
}
