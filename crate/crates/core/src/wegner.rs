//! Monte Carlo verification of the Wegner trace bound, the Lipschitz bound on
//! the integrated density of states, and the finite-volume probability bound.
//!
//! Every driver draws `M` independent disorder realizations per box side,
//! solves each spectrum once, and reduces per-sample observables in sample
//! order, so results do not depend on the worker count.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::short_hash;
use crate::error::{Error, Result};
use crate::model::{sample_id, AlloyModel};
use crate::spectral::{counting_function, trace_projection, Interval, SpectrumResult};
use crate::stats::MeanEstimate;

/// Placeholder for the continuum heat-kernel constant in the comparison column.
pub const CONTINUUM_CV_PLACEHOLDER: f64 = 1.0;

/// Smallest IDS grid spacing accepted by the Lipschitz check.
pub const MIN_GRID_SPACING: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantMode {
    /// `α* < |α_0|`: uniform inverse bound, constant `(1 − α*)⁻¹ ‖f′‖_{L¹}`.
    Certified,
    /// No uniform inverse bound: column sums bounded by `|Λ⁺|`.
    VolumeFactor,
    /// Uniform coupling density, constant from `|supp f| ‖f‖_∞ = 1`.
    UniformDensity,
}

impl ConstantMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConstantMode::Certified => "certified",
            ConstantMode::VolumeFactor => "volume_factor",
            ConstantMode::UniformDensity => "uniform_density",
        }
    }
}

/// Uniform energy grid for IDS and DOS estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdsGrid {
    pub side: usize,
    pub e_min: f64,
    pub e_max: f64,
    pub h: f64,
}

impl IdsGrid {
    pub fn energies(&self) -> Vec<f64> {
        let n = ((self.e_max - self.e_min) / self.h).round() as usize;
        (0..=n).map(|i| self.e_min + i as f64 * self.h).collect()
    }
}

/// Cells for the finite-volume probability check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct H2Spec {
    pub side: usize,
    pub energies: Vec<f64>,
    pub etas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WegnerConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub mode: ConstantMode,
    #[serde(flatten)]
    pub model: AlloyModel,
    /// Empty means the default grid over the attainable spectrum.
    #[serde(default)]
    pub energies: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub sides: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ids: Option<IdsGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h2: Option<H2Spec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// One validation finding, located by a dotted JSON path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(path: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            path: path.to_string(),
            message: message.into(),
        }
    }

    pub fn warning(path: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            path: path.to_string(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.path, self.message)
    }
}

/// Turns error-level diagnostics into a single configuration error.
pub fn reject_errors(diagnostics: &[Diagnostic]) -> Result<()> {
    let errors: Vec<String> = diagnostics
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| d.to_string())
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(errors.join("; ")))
    }
}

impl WegnerConfig {
    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn hash(&self) -> Result<String> {
        short_hash(self)
    }

    pub fn energy_grid(&self) -> Vec<f64> {
        if self.energies.is_empty() {
            self.model.default_energy_grid(9)
        } else {
            self.energies.clone()
        }
    }

    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if let Err(e) = self.model.check_dim(self.d) {
            out.push(Diagnostic::error("d", e.to_string()));
        }
        if let Err(e) = self.model.validate() {
            out.push(Diagnostic::error("v0", e.to_string()));
        }
        let normalized = self.model.normalized();
        match self.mode {
            ConstantMode::Certified => {
                if self.model.density.is_uniform() {
                    out.push(Diagnostic::error(
                        "density.kind",
                        "certified mode needs a piecewise-linear (W1,1) density",
                    ));
                }
                if let Ok((alpha, _)) = &normalized {
                    if alpha.alpha_star() >= 1.0 {
                        out.push(Diagnostic::error(
                            "alpha",
                            format!(
                                "alpha* / |alpha_0| = {} >= 1: certified mode needs a uniform inverse bound",
                                alpha.alpha_star()
                            ),
                        ));
                    }
                }
            }
            ConstantMode::VolumeFactor => {
                if self.model.density.is_uniform() {
                    out.push(Diagnostic::error(
                        "density.kind",
                        "volume_factor mode needs a piecewise-linear (W1,1) density",
                    ));
                }
            }
            ConstantMode::UniformDensity => {
                if !self.model.density.is_uniform() {
                    out.push(Diagnostic::error(
                        "density.kind",
                        "uniform_density mode needs a uniform density",
                    ));
                }
            }
        }
        if let Err(e) = &normalized {
            out.push(Diagnostic::error("density", e.to_string()));
        }
        if self.samples < 100 {
            out.push(Diagnostic::error("samples", format!("M = {} < 100", self.samples)));
        }
        for (i, eps) in self.epsilons.iter().enumerate() {
            if !(eps.is_finite() && *eps >= 0.0) {
                out.push(Diagnostic::error(&format!("epsilons.{i}"), format!("epsilon {eps} must be >= 0")));
            }
        }
        for (i, e) in self.energies.iter().enumerate() {
            if !e.is_finite() {
                out.push(Diagnostic::error(&format!("energies.{i}"), "energy must be finite"));
            }
        }
        if self.sides.is_empty() {
            out.push(Diagnostic::error("sides", "at least one box side is required"));
        }
        for (i, &l) in self.sides.iter().enumerate() {
            self.check_side(&format!("sides.{i}"), l, &mut out);
        }
        if let Some(ids) = &self.ids {
            self.check_side("ids.side", ids.side, &mut out);
            if !(ids.h > 0.0 && ids.e_max > ids.e_min) {
                out.push(Diagnostic::error("ids", "grid needs h > 0 and e_max > e_min"));
            } else if ids.h < MIN_GRID_SPACING {
                out.push(Diagnostic::error(
                    "ids.h",
                    format!("grid spacing {} below the resolution floor {MIN_GRID_SPACING}", ids.h),
                ));
            }
            if self.mode != ConstantMode::Certified {
                out.push(Diagnostic::warning(
                    "mode",
                    format!("Lipschitz check is excluded in {} mode; ids/dos still run", self.mode.as_str()),
                ));
            }
        }
        if let Some(h2) = &self.h2 {
            self.check_side("h2.side", h2.side, &mut out);
            if self.mode != ConstantMode::Certified {
                out.push(Diagnostic::error("h2", "probability check needs certified mode"));
            }
            for (i, eta) in h2.etas.iter().enumerate() {
                if !(*eta > 0.0) {
                    out.push(Diagnostic::error(&format!("h2.etas.{i}"), "eta must be > 0"));
                }
            }
        }
        out
    }

    fn check_side(&self, path: &str, side: usize, out: &mut Vec<Diagnostic>) {
        if side < 2 {
            out.push(Diagnostic::error(path, format!("side {side} < 2")));
        } else if side.pow(self.dim() as u32) > crate::hamiltonian::DENSE_LIMIT {
            out.push(Diagnostic::error(
                path,
                format!("side {side} exceeds the dense-spectrum limit in d = {}", self.dim()),
            ));
        }
    }

    pub fn validate(&self) -> Result<()> {
        reject_errors(&self.diagnostics())
    }
}

/// `C_disc = (1 − α*)⁻¹ ‖f′‖_{L¹}`, computed for the normalized vector
/// (`α_0 = 1`) and the law of `α_0 ω_0`.
pub fn theoretical_constant(config: &WegnerConfig) -> Result<f64> {
    if config.mode != ConstantMode::Certified {
        return Err(Error::Config(format!(
            "theoretical constant needs certified mode, got {}",
            config.mode.as_str()
        )));
    }
    let (alpha, density) = config.model.normalized()?;
    let s = alpha.alpha_star();
    if s >= 1.0 {
        return Err(Error::NotCertifiable { alpha_star: s });
    }
    Ok(density.f_prime_l1()? / (1.0 - s))
}

/// Bound on `E[Tr P([E − ε, E])]` for the configured mode, with the constant
/// multiplying `ε l^d` (or `ε l^{2d}` in volume-factor mode).
pub fn mode_bound(config: &WegnerConfig, eps: f64, side: usize) -> Result<(f64, f64)> {
    let d = config.dim() as i32;
    let volume = (side as f64).powi(d);
    let (alpha, density) = config.model.normalized()?;
    match config.mode {
        ConstantMode::Certified => {
            let c = theoretical_constant(config)?;
            Ok((c * eps * volume, c))
        }
        ConstantMode::VolumeFactor => {
            // Σ_k |b_{k,j}| ≤ |Λ⁺| ≤ (l + g)^d = C_Γ l^d
            let g = alpha.diameter() as f64;
            let c_gamma = ((side as f64 + g) / side as f64).powi(d);
            let c = density.f_prime_l1()? * c_gamma;
            Ok((c * eps * volume * volume, c))
        }
        ConstantMode::UniformDensity => {
            if !density.is_uniform() {
                return Err(Error::Config("uniform_density mode needs a uniform density".into()));
            }
            // ‖f‖_∞ of the law of α_0 ω_0, which is 1 for α_0 = 1 and ω_0 ~ U[0, 1]
            let c = density.sup_norm();
            Ok((c * eps * volume, c))
        }
    }
}

fn spectra(config: &WegnerConfig, side: usize, hash: &str) -> Result<Vec<SpectrumResult>> {
    let geometry = config.model.geometry(side)?;
    (0..config.samples)
        .into_par_iter()
        .map(|m| config.model.spectrum(&geometry, config.seed, sample_id(side, m), hash))
        .collect()
}

fn traces(spectra: &[SpectrumResult], interval: &Interval) -> Vec<f64> {
    spectra.iter().map(|s| trace_projection(s, interval) as f64).collect()
}

/// Mean and standard error of `Tr P([E − ε, E])` over the configured samples.
pub fn mc_expected_trace(config: &WegnerConfig, energy: f64, eps: f64, side: usize) -> Result<MeanEstimate> {
    config.validate()?;
    let hash = config.hash()?;
    let s = spectra(config, side, &hash)?;
    Ok(MeanEstimate::from_samples(&traces(&s, &Interval::below(energy, eps))))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WegnerCell {
    pub mode: ConstantMode,
    pub d: usize,
    pub l: usize,
    pub bc: String,
    pub energy: f64,
    pub eps: f64,
    pub samples: usize,
    pub mean_trace: f64,
    pub se: f64,
    pub ucl99: f64,
    pub bound: f64,
    pub constant: f64,
    pub pass: bool,
    /// `e^E C_V C_disc` with the placeholder `C_V`; certified mode only.
    pub continuum_constant: Option<f64>,
    /// `‖f′‖ ε l^d`, reported (not asserted) in volume-factor mode.
    pub reference_bound: Option<f64>,
    /// Samples with a nonzero count at `ε = 0`.
    pub degenerate_hits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WegnerReport {
    pub config_hash: String,
    pub seed: u64,
    pub mode: ConstantMode,
    pub cells: Vec<WegnerCell>,
    pub wall_time_s: f64,
}

pub const WEGNER_CSV_HEADER: [&str; 14] = [
    "mode", "d", "l", "bc", "E", "eps", "M", "mean_trace", "se", "ucl99", "bound", "constant", "pass",
    "config_hash",
];

impl WegnerReport {
    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &WegnerCell> {
        self.cells.iter().filter(|c| !c.pass)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(WEGNER_CSV_HEADER)?;
        for c in &self.cells {
            out.write_record([
                c.mode.as_str().to_string(),
                c.d.to_string(),
                c.l.to_string(),
                c.bc.clone(),
                c.energy.to_string(),
                c.eps.to_string(),
                c.samples.to_string(),
                c.mean_trace.to_string(),
                c.se.to_string(),
                c.ucl99.to_string(),
                c.bound.to_string(),
                c.constant.to_string(),
                c.pass.to_string(),
                self.config_hash.clone(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Checks every `(l, E, ε)` cell: pass iff the 99% upper confidence limit of
/// the mean trace is at most the mode's bound.
pub fn verify_wegner(config: &WegnerConfig) -> Result<WegnerReport> {
    config.validate()?;
    let start = Instant::now();
    let hash = config.hash()?;
    let energies = config.energy_grid();
    let mut cells = Vec::new();
    for &side in &config.sides {
        let s = spectra(config, side, &hash)?;
        for &energy in &energies {
            for &eps in &config.epsilons {
                let t = traces(&s, &Interval::below(energy, eps));
                let est = MeanEstimate::from_samples(&t);
                let (bound, constant) = mode_bound(config, eps, side)?;
                let continuum_constant = (config.mode == ConstantMode::Certified)
                    .then(|| energy.exp() * CONTINUUM_CV_PLACEHOLDER * constant);
                let reference_bound = match config.mode {
                    ConstantMode::VolumeFactor => {
                        let (_, density) = config.model.normalized()?;
                        Some(density.f_prime_l1()? * eps * (side as f64).powi(config.dim() as i32))
                    }
                    _ => None,
                };
                let degenerate_hits = if eps == 0.0 { t.iter().filter(|&&x| x > 0.0).count() } else { 0 };
                cells.push(WegnerCell {
                    mode: config.mode,
                    d: config.dim(),
                    l: side,
                    bc: config.model.bc.to_string(),
                    energy,
                    eps,
                    samples: config.samples,
                    mean_trace: est.mean,
                    se: est.se,
                    ucl99: est.ucl99(),
                    bound,
                    constant,
                    pass: est.ucl99() <= bound,
                    continuum_constant,
                    reference_bound,
                    degenerate_hits,
                });
            }
        }
    }
    Ok(WegnerReport {
        config_hash: hash,
        seed: config.seed,
        mode: config.mode,
        cells,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Sample-averaged counting function on an energy grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdsCurve {
    pub side: usize,
    pub samples: usize,
    pub energies: Vec<f64>,
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
    /// Standard error of each per-sample increment `N(E_{i+1}) − N(E_i)`.
    pub increment_se: Vec<f64>,
}

impl IdsCurve {
    fn from_rows(side: usize, energies: Vec<f64>, per_sample: &[Vec<f64>]) -> Self {
        let n = energies.len();
        let column = |i: usize| -> Vec<f64> { per_sample.iter().map(|r| r[i]).collect() };
        let point: Vec<MeanEstimate> = (0..n).map(|i| MeanEstimate::from_samples(&column(i))).collect();
        let increment_se = (1..n)
            .map(|i| {
                let diffs: Vec<f64> = per_sample.iter().map(|r| r[i] - r[i - 1]).collect();
                MeanEstimate::from_samples(&diffs).se
            })
            .collect();
        IdsCurve {
            side,
            samples: per_sample.len(),
            energies,
            mean: point.iter().map(|p| p.mean).collect(),
            se: point.iter().map(|p| p.se).collect(),
            increment_se,
        }
    }

    /// Counting function of a single (disorder-free) spectrum.
    pub fn deterministic(spectrum: &SpectrumResult, side: usize, energies: &[f64]) -> Self {
        let row: Vec<f64> = energies.iter().map(|&e| counting_function(spectrum, e)).collect();
        let n = energies.len();
        IdsCurve {
            side,
            samples: 1,
            energies: energies.to_vec(),
            mean: row,
            se: vec![0.0; n],
            increment_se: vec![0.0; n.saturating_sub(1)],
        }
    }

    /// Grid spacing, if the grid is uniform.
    pub fn spacing(&self) -> Option<f64> {
        if self.energies.len() < 2 {
            return None;
        }
        let h = (self.energies[self.energies.len() - 1] - self.energies[0]) / (self.energies.len() - 1) as f64;
        let uniform = self
            .energies
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
        (uniform && h > 0.0).then_some(h)
    }

    pub fn write_csv<W: Write>(&self, w: W, config_hash: &str) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["l", "M", "E", "ids", "se", "config_hash"])?;
        for i in 0..self.energies.len() {
            out.write_record([
                self.side.to_string(),
                self.samples.to_string(),
                self.energies[i].to_string(),
                self.mean[i].to_string(),
                self.se[i].to_string(),
                config_hash.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Mean of `N_ω^l(E)` over the configured samples on a sorted grid.
pub fn ids_estimate(config: &WegnerConfig, grid: &[f64], side: usize) -> Result<IdsCurve> {
    config.validate()?;
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("IDS grid must be sorted".into()));
    }
    let hash = config.hash()?;
    let s = spectra(config, side, &hash)?;
    let rows: Vec<Vec<f64>> = s
        .iter()
        .map(|sp| grid.iter().map(|&e| counting_function(sp, e)).collect())
        .collect();
    Ok(IdsCurve::from_rows(side, grid.to_vec(), &rows))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzResult {
    pub max_quotient: f64,
    pub constant: f64,
    /// `3 · SE / h` at the increment attaining the largest excess.
    pub allowance: f64,
    pub h: f64,
    pub pass: bool,
}

/// Largest difference quotient `(N(E) − N(E − h))/h` against `C` plus a
/// Monte Carlo allowance of three standard errors of the increment over `h`.
pub fn lipschitz_check(curve: &IdsCurve, constant: f64) -> Result<LipschitzResult> {
    let h = curve
        .spacing()
        .ok_or_else(|| Error::Config("Lipschitz check needs a uniform grid with at least 2 points".into()))?;
    if h < MIN_GRID_SPACING {
        return Err(Error::Config(format!(
            "grid spacing {h} below the resolution floor {MIN_GRID_SPACING}"
        )));
    }
    let mut max_quotient: f64 = 0.0;
    let mut worst = (f64::NEG_INFINITY, 0.0);
    for i in 1..curve.energies.len() {
        let q = (curve.mean[i] - curve.mean[i - 1]) / h;
        let allowance = 3.0 * curve.increment_se[i - 1] / h;
        max_quotient = max_quotient.max(q);
        let excess = q - constant - allowance;
        if excess > worst.0 {
            worst = (excess, allowance);
        }
    }
    Ok(LipschitzResult {
        max_quotient,
        constant,
        allowance: worst.1,
        h,
        pass: worst.0 <= 0.0,
    })
}

/// [`lipschitz_check`] against `C_disc`; only certified mode qualifies.
pub fn lipschitz_for_config(config: &WegnerConfig, curve: &IdsCurve) -> Result<LipschitzResult> {
    if config.mode != ConstantMode::Certified {
        return Err(Error::NotApplicable(format!(
            "Lipschitz continuity of the IDS does not follow in {} mode",
            config.mode.as_str()
        )));
    }
    lipschitz_check(curve, theoretical_constant(config)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DosRow {
    pub energy: f64,
    pub dos: f64,
    pub se: f64,
}

/// Centered differences `(N(E + h) − N(E − h)) / 2h` at interior grid points.
pub fn dos_estimate(curve: &IdsCurve) -> Result<Vec<DosRow>> {
    let h = curve
        .spacing()
        .ok_or_else(|| Error::Config("DOS estimate needs a uniform grid".into()))?;
    Ok((1..curve.energies.len().saturating_sub(1))
        .map(|i| DosRow {
            energy: curve.energies[i],
            dos: (curve.mean[i + 1] - curve.mean[i - 1]) / (2.0 * h),
            se: (curve.se[i + 1].powi(2) + curve.se[i - 1].powi(2)).sqrt() / (2.0 * h),
        })
        .collect())
}

pub fn write_dos_csv<W: Write>(rows: &[DosRow], side: usize, w: W, config_hash: &str) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["l", "E", "dos", "se", "config_hash"])?;
    for r in rows {
        out.write_record([
            side.to_string(),
            r.energy.to_string(),
            r.dos.to_string(),
            r.se.to_string(),
            config_hash.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct H2Result {
    pub l: usize,
    pub energy: f64,
    pub eta: f64,
    pub p_hat: f64,
    pub se: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Empirical `P{ dist(σ(H_ω^l), E) ≤ η }` against `C_disc (2η) l^d + 3 SE`.
pub fn h2_probability_check(config: &WegnerConfig, energy: f64, eta: f64, side: usize) -> Result<H2Result> {
    Ok(h2_cells(config, &[energy], &[eta], side)?.remove(0))
}

pub fn h2_cells(config: &WegnerConfig, energies: &[f64], etas: &[f64], side: usize) -> Result<Vec<H2Result>> {
    config.validate()?;
    if etas.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Config("eta must be > 0".into()));
    }
    let c = theoretical_constant(config)?;
    let hash = config.hash()?;
    let s = spectra(config, side, &hash)?;
    let volume = (side as f64).powi(config.dim() as i32);
    let mut out = Vec::new();
    for &energy in energies {
        for &eta in etas {
            let iv = Interval::new(energy - eta, energy + eta);
            let hits: Vec<f64> = s
                .iter()
                .map(|sp| f64::from(u8::from(trace_projection(sp, &iv) > 0)))
                .collect();
            let est = MeanEstimate::from_samples(&hits);
            let bound = c * 2.0 * eta * volume;
            out.push(H2Result {
                l: side,
                energy,
                eta,
                p_hat: est.mean,
                se: est.se,
                bound,
                pass: est.mean <= bound + 3.0 * est.se,
            });
        }
    }
    Ok(out)
}

pub fn write_h2_csv<W: Write>(rows: &[H2Result], w: W, config_hash: &str) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["l", "E", "eta", "p_hat", "se", "bound", "pass", "config_hash"])?;
    for r in rows {
        out.write_record([
            r.l.to_string(),
            r.energy.to_string(),
            r.eta.to_string(),
            r.p_hat.to_string(),
            r.se.to_string(),
            r.bound.to_string(),
            r.pass.to_string(),
            config_hash.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
