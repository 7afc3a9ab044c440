//! Ground-state tail probabilities near the bottom of the spectrum.
//!
//! The single-site potential is split as `u = u₊ − ε_u u₋` with both parts
//! nonnegative. With `V₀ = 0` the Neumann ground state is constant, so the
//! weighted mean of `u` is `m₁ = Σ_k α_k`. The module estimates
//! `P{λ₁(H^{l,N}) < E}`, monitors the rare-configuration implication, fits
//! large-deviation decay in `l^d`, and checks the two-scale union bound.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::short_hash;
use crate::disorder::DensityModel;
use crate::error::{Error, Result};
use crate::hamiltonian::PeriodicPotential;
use crate::lattice::BoundaryCondition;
use crate::model::{sample_id, AlloyModel};
use crate::spectral::ground_state_energy;
use crate::stats::{least_squares, wilson_interval, MeanEstimate, Z95};
use crate::toeplitz::{ConvolutionVector, SiteProfile};
use crate::wegner::{reject_errors, Diagnostic};

/// Largest box volume accepted for tail runs.
pub const MAX_TAIL_VOLUME: usize = 1 << 16;

/// Side below which the rare-configuration monitor only reports.
pub const MONITOR_ASSERT_SIDE: usize = 16;

/// `u = u₊ − ε_u u₋`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndefiniteSiteSpec {
    pub u_plus: SiteProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_minus: Option<SiteProfile>,
    #[serde(default)]
    pub eps_u: f64,
}

impl IndefiniteSiteSpec {
    pub fn new(u_plus: SiteProfile, u_minus: Option<SiteProfile>, eps_u: f64) -> Result<Self> {
        let spec = IndefiniteSiteSpec { u_plus, u_minus, eps_u };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.u_plus.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eps_u) {
            return Err(Error::Config(format!("eps_u = {} not in [0, 1]", self.eps_u)));
        }
        if let Some(m) = &self.u_minus {
            if m.dim() != self.dim() {
                return Err(Error::Config(format!(
                    "u_minus has dimension {} but u_plus has {}",
                    m.dim(),
                    self.dim()
                )));
            }
            if m.max_coefficient() > 1.0 {
                return Err(Error::Config(format!(
                    "max coefficient of u_minus is {} > 1",
                    m.max_coefficient()
                )));
            }
        }
        Ok(())
    }

    pub fn u_minus(&self) -> SiteProfile {
        self.u_minus
            .clone()
            .unwrap_or_else(|| SiteProfile::zero(self.dim()).expect("valid dimension"))
    }

    pub fn with_eps_u(&self, eps_u: f64) -> Self {
        IndefiniteSiteSpec { eps_u, ..self.clone() }
    }

    /// `α_k = (u₊)_k − ε_u (u₋)_k`, keeping the support of both parts.
    pub fn effective_alpha(&self) -> Result<ConvolutionVector> {
        SiteProfile::combine(&self.u_plus, &self.u_minus(), self.eps_u)
    }

    /// `N = ‖Σ_k u₋(· − k)‖_∞`; on `Z^d` every residue sees the full sum.
    pub fn n_overlap(&self) -> f64 {
        self.u_minus().total()
    }

    /// `Σ_k α_k` without requiring a valid convolution vector.
    fn raw_m1(&self) -> f64 {
        self.u_plus.total() - self.eps_u * self.u_minus().total()
    }
}

/// `m₁ = Σ_k α_k`; the tail argument needs it positive.
pub fn m1(spec: &IndefiniteSiteSpec) -> Result<f64> {
    let m = spec.raw_m1();
    if m > 0.0 {
        Ok(m)
    } else {
        Err(Error::Config(format!("m1 = {m} <= 0: eps_u too large for the tail argument")))
    }
}

/// Upper end `ω₊` of a coupling density supported on `[0, ω₊]`.
pub fn omega_plus(density: &DensityModel) -> Result<f64> {
    let (lo, hi) = density.support();
    if lo != 0.0 {
        return Err(Error::Config(format!(
            "tail runs need supp f = [0, omega_plus], got [{lo}, {hi}]"
        )));
    }
    Ok(hi)
}

/// `E / (8 ω₊ N)`, or `+∞` when `u₋ = 0`.
pub fn eps_u_threshold(spec: &IndefiniteSiteSpec, density: &DensityModel, energy: f64) -> Result<f64> {
    let n = spec.n_overlap();
    if n == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(energy / (8.0 * omega_plus(density)? * n))
}

/// Inputs of the rare-configuration hypotheses. `q1` and `beta0` exist but
/// are not quantified, so `None` means "not checked".
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HypothesisGates {
    #[serde(default)]
    pub q1: Option<usize>,
    #[serde(default)]
    pub beta0: Option<f64>,
}

/// Whether `(spec, E, l, β)` meets every checkable hypothesis gate:
/// `m₁ > 0`, `ε_u ≤ E/(8 ω₊ N)`, `l ≥ Q₁` and `β ≥ β₀`.
pub fn admissible(
    spec: &IndefiniteSiteSpec,
    density: &DensityModel,
    energy: f64,
    side: usize,
    beta: Option<f64>,
    gates: &HypothesisGates,
) -> bool {
    let threshold = match eps_u_threshold(spec, density, energy) {
        Ok(t) => t,
        Err(_) => return false,
    };
    spec.raw_m1() > 0.0
        && spec.eps_u <= threshold
        && gates.q1.is_none_or(|q| side >= q)
        && match (gates.beta0, beta) {
            (Some(b0), Some(b)) => b >= b0,
            (Some(_), None) => false,
            (None, _) => true,
        }
}

/// The operator `−Δ_N + Σ_k ω_k u(· − k)` with `V₀ = 0`.
pub fn tail_model(spec: &IndefiniteSiteSpec, density: &DensityModel, bc: BoundaryCondition) -> Result<AlloyModel> {
    spec.validate()?;
    Ok(AlloyModel {
        alpha: spec.effective_alpha()?,
        density: density.clone(),
        v0: PeriodicPotential::zero(),
        bc,
    })
}

/// Ground state of one sample, with the couplings on the box sites.
#[derive(Clone, Debug, PartialEq)]
pub struct TailSample {
    pub sample_id: u64,
    pub lambda1: f64,
    pub box_couplings: Vec<f64>,
}

fn ground_state_sample(model: &AlloyModel, side: usize, seed: u64, id: u64) -> Result<TailSample> {
    let geometry = model.geometry(side)?;
    let omega = model.sample(&geometry, seed, id);
    let h = model.hamiltonian(&geometry, &omega)?;
    let lambda1 = ground_state_energy(&h).map_err(|e| Error::Solver {
        context: format!("seed {seed} sample {id}"),
        reason: e.to_string(),
    })?;
    let box_couplings = geometry
        .sites()
        .into_iter()
        .map(|s| {
            omega
                .sites
                .binary_search(&s)
                .map(|i| omega.omega[i])
                .map_err(|_| Error::MissingSite(s.coords(geometry.dim()).to_vec()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TailSample {
        sample_id: id,
        lambda1,
        box_couplings,
    })
}

/// `M` Neumann ground states at side `l`, in sample order.
pub fn tail_samples(
    spec: &IndefiniteSiteSpec,
    density: &DensityModel,
    side: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<TailSample>> {
    let model = tail_model(spec, density, BoundaryCondition::Neumann)?;
    (0..samples)
        .into_par_iter()
        .map(|m| ground_state_sample(&model, side, seed, sample_id(side, m)))
        .collect()
}

/// Samples with `λ₁ < E` but `#{k ∈ Λ_l : ω_k < 4E/m₁} ≤ l^d/2`.
pub fn rare_config_monitor(samples: &[TailSample], energy: f64, m1_value: f64) -> usize {
    let cut = 4.0 * energy / m1_value;
    samples
        .iter()
        .filter(|s| s.lambda1 < energy)
        .filter(|s| {
            let small = s.box_couplings.iter().filter(|&&w| w < cut).count();
            2 * small <= s.box_couplings.len()
        })
        .count()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailRow {
    pub l: usize,
    pub energy: f64,
    pub eps_u: f64,
    pub samples: usize,
    pub hits: usize,
    pub p_hat: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub violations: usize,
    /// Violations fail the run only when `ε_u = 0` and `l ≥ 16`.
    pub asserted: bool,
    pub c_hat: Option<f64>,
}

/// Tail row from precomputed ground states.
pub fn tail_row(samples: &[TailSample], side: usize, energy: f64, spec: &IndefiniteSiteSpec) -> Result<TailRow> {
    let m = m1(spec)?;
    let hits = samples.iter().filter(|s| s.lambda1 < energy).count();
    let (wilson_lo, wilson_hi) = wilson_interval(hits, samples.len(), Z95);
    Ok(TailRow {
        l: side,
        energy,
        eps_u: spec.eps_u,
        samples: samples.len(),
        hits,
        p_hat: hits as f64 / samples.len() as f64,
        wilson_lo,
        wilson_hi,
        violations: rare_config_monitor(samples, energy, m),
        asserted: spec.eps_u == 0.0 && side >= MONITOR_ASSERT_SIDE,
        c_hat: None,
    })
}

/// `P̂{λ₁(H^{l,N}) < E}` with a 95% Wilson interval.
pub fn tail_probability(
    spec: &IndefiniteSiteSpec,
    density: &DensityModel,
    energy: f64,
    side: usize,
    samples: usize,
    seed: u64,
) -> Result<TailRow> {
    omega_plus(density)?;
    let s = tail_samples(spec, density, side, samples, seed)?;
    tail_row(&s, side, energy, spec)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LdFit {
    /// Slope of `−log P̂` against `l^d`.
    pub c_hat: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    /// `P̂` strictly decreasing in `l` over every supplied row.
    pub monotone: bool,
    pub points_used: usize,
}

/// Least-squares fit of `−log P̂ = a + c l^d` over rows with `P̂ > 0`.
pub fn large_deviation_fit(points: &[(usize, f64)], dim: usize, samples: usize) -> Result<LdFit> {
    let mut sorted = points.to_vec();
    sorted.sort_by_key(|p| p.0);
    let monotone = sorted.windows(2).all(|w| w[1].1 < w[0].1);
    let used: Vec<(f64, f64)> = sorted
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|&(l, p)| ((l as f64).powi(dim as i32), -p.ln()))
        .collect();
    if used.len() < 3 {
        return Err(Error::Fit(format!(
            "{} of {} sides have a nonzero tail estimate; need 3 (detection floor 1/M = {})",
            used.len(),
            sorted.len(),
            1.0 / samples as f64
        )));
    }
    let xs: Vec<f64> = used.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.1).collect();
    let (intercept, c_hat) =
        least_squares(&xs, &ys).ok_or_else(|| Error::Fit("degenerate abscissae in decay fit".into()))?;
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - intercept - c_hat * x).collect();
    Ok(LdFit {
        c_hat,
        intercept,
        residuals,
        monotone,
        points_used: used.len(),
    })
}

/// `[L^{1−ζ/2} β^{−1/2} − 1]`, the side of the Neumann subcubes.
pub fn subcube_side(big_l: usize, zeta: f64, beta: f64) -> Result<usize> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::Config(format!("zeta = {zeta} not in (0, 1)")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Config(format!("beta = {beta} must be > 0")));
    }
    let raw = (big_l as f64).powf(1.0 - zeta / 2.0) / beta.sqrt() - 1.0;
    let l = raw.floor();
    if l < 2.0 {
        return Err(Error::Config(format!(
            "subcube side [{raw}] < 2 for L = {big_l}, zeta = {zeta}, beta = {beta}"
        )));
    }
    Ok(l as usize)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoScaleResult {
    pub big_l: usize,
    pub l: usize,
    pub d: usize,
    pub samples: usize,
    /// `L^{ζ−2}`, compared with strict `<`.
    pub lhs_threshold: f64,
    /// `β⁻¹ (l + 1)⁻²`, compared with `≤`.
    pub sub_threshold: f64,
    pub lhs_p: f64,
    pub lhs_se: f64,
    pub sub_p: f64,
    pub sub_se: f64,
    /// `(L/l)^d`.
    pub union_factor: f64,
    pub union_bound: f64,
    pub combined_se: f64,
    pub pass: bool,
}

fn indicator_estimate(samples: &[TailSample], hit: impl Fn(f64) -> bool) -> MeanEstimate {
    let xs: Vec<f64> = samples
        .iter()
        .map(|s| f64::from(u8::from(hit(s.lambda1))))
        .collect();
    MeanEstimate::from_samples(&xs)
}

/// Compares the direct estimate on the big box with the subcube union
/// bound, given ground states on both scales.
pub fn two_scale_compare(
    big_l: usize,
    l: usize,
    d: usize,
    zeta: f64,
    beta: f64,
    big: &[TailSample],
    small: &[TailSample],
) -> TwoScaleResult {
    let lhs_threshold = (big_l as f64).powf(zeta - 2.0);
    let sub_threshold = 1.0 / (beta * ((l + 1) as f64).powi(2));
    let lhs = indicator_estimate(big, |x| x < lhs_threshold);
    let sub = indicator_estimate(small, |x| x <= sub_threshold);
    let union_factor = (big_l as f64 / l as f64).powi(d as i32);
    let union_bound = union_factor * sub.mean;
    let combined_se = (lhs.se.powi(2) + (union_factor * sub.se).powi(2)).sqrt();
    TwoScaleResult {
        big_l,
        l,
        d,
        samples: big.len(),
        lhs_threshold,
        sub_threshold,
        lhs_p: lhs.mean,
        lhs_se: lhs.se,
        sub_p: sub.mean,
        sub_se: sub.se,
        union_factor,
        union_bound,
        combined_se,
        pass: lhs.mean <= union_bound + 3.0 * combined_se,
    }
}

/// Direct `P̂{λ₁(H^{L,N}) < L^{ζ−2}}` against
/// `(L/l)^d P̂{λ₁(H^{l,N}) ≤ β⁻¹(l+1)⁻²}`.
pub fn two_scale_probe(
    spec: &IndefiniteSiteSpec,
    density: &DensityModel,
    big_l: usize,
    zeta: f64,
    beta: f64,
    samples: usize,
    seed: u64,
) -> Result<TwoScaleResult> {
    let l = subcube_side(big_l, zeta, beta)?;
    let big = tail_samples(spec, density, big_l, samples, seed)?;
    let small = tail_samples(spec, density, l, samples, seed)?;
    Ok(two_scale_compare(big_l, l, spec.dim(), zeta, beta, &big, &small))
}

/// Neumann, periodic and Dirichlet ground states of one realization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bracket {
    pub neumann: f64,
    pub periodic: f64,
    pub dirichlet: f64,
}

impl Bracket {
    /// `λ₁^N ≤ λ₁^per ≤ λ₁^D` up to `slack`.
    pub fn ordered(&self, slack: f64) -> bool {
        self.neumann <= self.periodic + slack && self.periodic <= self.dirichlet + slack
    }
}

/// Ground states of the same couplings under the three boundary conditions.
pub fn ground_state_bracket(model: &AlloyModel, side: usize, seed: u64, id: u64) -> Result<Bracket> {
    let mut lambda = [0.0; 3];
    let bcs = [BoundaryCondition::Neumann, BoundaryCondition::Periodic, BoundaryCondition::Dirichlet];
    for (slot, bc) in lambda.iter_mut().zip(bcs) {
        let m = AlloyModel { bc, ..model.clone() };
        *slot = ground_state_sample(&m, side, seed, id)?.lambda1;
    }
    Ok(Bracket {
        neumann: lambda[0],
        periodic: lambda[1],
        dirichlet: lambda[2],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoScaleSpec {
    #[serde(rename = "L")]
    pub big_l: usize,
    pub zeta: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(flatten)]
    pub site: IndefiniteSiteSpec,
    pub density: DensityModel,
    pub energies: Vec<f64>,
    pub sides: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub big_l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
}

impl TailsConfig {
    pub fn dim(&self) -> usize {
        self.site.dim()
    }

    pub fn hash(&self) -> Result<String> {
        short_hash(self)
    }

    pub fn gates(&self) -> HypothesisGates {
        HypothesisGates {
            q1: self.q1,
            beta0: self.beta0,
        }
    }

    pub fn two_scale(&self) -> Option<TwoScaleSpec> {
        match (self.big_l, self.zeta, self.beta) {
            (Some(big_l), Some(zeta), Some(beta)) => Some(TwoScaleSpec { big_l, zeta, beta }),
            _ => None,
        }
    }

    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if let Some(d) = self.d {
            if d != self.dim() {
                out.push(Diagnostic::error("d", format!("d = {d} but u_plus has dimension {}", self.dim())));
            }
        }
        if let Err(e) = self.site.validate() {
            out.push(Diagnostic::error("eps_u", e.to_string()));
        }
        if let Err(e) = m1(&self.site) {
            out.push(Diagnostic::error("eps_u", e.to_string()));
        }
        if let Err(e) = self.site.effective_alpha() {
            out.push(Diagnostic::error("u_plus", e.to_string()));
        }
        if let Err(e) = omega_plus(&self.density) {
            out.push(Diagnostic::error("density", e.to_string()));
        }
        if self.samples < 100 {
            out.push(Diagnostic::error("samples", format!("M = {} < 100", self.samples)));
        }
        for (i, e) in self.energies.iter().enumerate() {
            if !e.is_finite() {
                out.push(Diagnostic::error(&format!("energies.{i}"), "energy must be finite"));
            } else if let Ok(t) = eps_u_threshold(&self.site, &self.density, *e) {
                if self.site.eps_u > t {
                    out.push(Diagnostic::warning(
                        &format!("energies.{i}"),
                        format!(
                            "eps_u = {} exceeds E/(8 omega_plus N) = {t} at E = {e}: outside the rare-configuration hypothesis",
                            self.site.eps_u
                        ),
                    ));
                }
            }
        }
        for (i, &l) in self.sides.iter().enumerate() {
            self.check_side(&format!("sides.{i}"), l, &mut out);
        }
        if self.q1.is_none() || self.beta0.is_none() {
            out.push(Diagnostic::warning(
                "q1",
                "initial-scale constants Q1 and beta0 are not quantified; the monitor asserts only for eps_u = 0 and l >= 16",
            ));
        }
        match (self.big_l, self.zeta, self.beta) {
            (None, None, None) => {}
            (Some(big_l), Some(zeta), Some(beta)) => match subcube_side(big_l, zeta, beta) {
                Ok(l) => self.check_side("L", big_l.max(l), &mut out),
                Err(e) => out.push(Diagnostic::error("L", e.to_string())),
            },
            _ => out.push(Diagnostic::error("L", "two-scale probe needs all of L, zeta and beta")),
        }
        out
    }

    fn check_side(&self, path: &str, side: usize, out: &mut Vec<Diagnostic>) {
        if side < 2 {
            out.push(Diagnostic::error(path, format!("side {side} < 2")));
        } else if side.checked_pow(self.dim() as u32).is_none_or(|v| v > MAX_TAIL_VOLUME) {
            out.push(Diagnostic::error(path, format!("box volume exceeds {MAX_TAIL_VOLUME}")));
        }
    }

    pub fn validate(&self) -> Result<()> {
        reject_errors(&self.diagnostics())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailReport {
    pub config_hash: String,
    pub seed: u64,
    pub rows: Vec<TailRow>,
    /// One fit per energy, or the reason it could not be made.
    pub fits: Vec<(f64, std::result::Result<LdFit, String>)>,
    pub wall_time_s: f64,
}

impl TailReport {
    /// No asserted rare-configuration violation.
    pub fn monitor_pass(&self) -> bool {
        self.rows.iter().all(|r| !r.asserted || r.violations == 0)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "l", "E", "eps_u", "M", "p_hat", "wilson_lo", "wilson_hi", "violations", "c_hat", "config_hash",
        ])?;
        for r in &self.rows {
            out.write_record([
                r.l.to_string(),
                r.energy.to_string(),
                r.eps_u.to_string(),
                r.samples.to_string(),
                r.p_hat.to_string(),
                r.wilson_lo.to_string(),
                r.wilson_hi.to_string(),
                r.violations.to_string(),
                r.c_hat.map(|c| c.to_string()).unwrap_or_default(),
                self.config_hash.clone(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Tail rows for every `(l, E)` plus one decay fit per energy.
pub fn run_tails(config: &TailsConfig) -> Result<TailReport> {
    config.validate()?;
    let start = Instant::now();
    let mut rows = Vec::new();
    for &side in &config.sides {
        let s = tail_samples(&config.site, &config.density, side, config.samples, config.seed)?;
        for &energy in &config.energies {
            rows.push(tail_row(&s, side, energy, &config.site)?);
        }
    }
    let mut fits = Vec::new();
    for &energy in &config.energies {
        let points: Vec<(usize, f64)> = rows
            .iter()
            .filter(|r| r.energy == energy)
            .map(|r| (r.l, r.p_hat))
            .collect();
        let fit = large_deviation_fit(&points, config.dim(), config.samples);
        if let Ok(f) = &fit {
            for r in rows.iter_mut().filter(|r| r.energy == energy) {
                r.c_hat = Some(f.c_hat);
            }
        }
        fits.push((energy, fit.map_err(|e| e.to_string())));
    }
    Ok(TailReport {
        config_hash: config.hash()?,
        seed: config.seed,
        rows,
        fits,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn write_two_scale_csv<W: Write>(r: &TwoScaleResult, w: W, config_hash: &str) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "L", "l", "d", "M", "lhs_threshold", "sub_threshold", "lhs_p", "lhs_se", "sub_p", "sub_se", "union_factor",
        "union_bound", "pass", "config_hash",
    ])?;
    out.write_record([
        r.big_l.to_string(),
        r.l.to_string(),
        r.d.to_string(),
        r.samples.to_string(),
        r.lhs_threshold.to_string(),
        r.sub_threshold.to_string(),
        r.lhs_p.to_string(),
        r.lhs_se.to_string(),
        r.sub_p.to_string(),
        r.sub_se.to_string(),
        r.union_factor.to_string(),
        r.union_bound.to_string(),
        r.pass.to_string(),
        config_hash.to_string(),
    ])?;
    out.flush()?;
    Ok(())
}
