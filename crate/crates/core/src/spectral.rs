//! Spectra, counting functions, spectral-projection traces and the
//! one-parameter spectral-averaging bound.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::disorder::DensityModel;
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianMatrix;

/// Box volumes above this use Lanczos for the ground state.
pub const ITERATIVE_THRESHOLD: usize = 512;

const SOLVER_EPS: f64 = 1e-15;
const SOLVER_MAX_ITER: usize = 10_000;

/// Where a spectrum came from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub sample_id: u64,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config {} seed {} sample {}", self.config_hash, self.seed, self.sample_id)
    }
}

/// Closed energy interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    /// `[E − ε, E]`.
    pub fn below(e: f64, eps: f64) -> Self {
        Interval { lo: e - eps, hi: e }
    }

    pub fn whole_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn length(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }
}

/// Eigenvalues in nondecreasing order, with multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub provenance: Provenance,
}

impl SpectrumResult {
    pub fn from_unsorted(mut eigenvalues: Vec<f64>, provenance: Provenance) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        SpectrumResult {
            eigenvalues,
            provenance,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn ground_state(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Writes spectra as `sample_id,index,eigenvalue,config_hash` rows.
pub fn write_spectra_csv<W: std::io::Write>(spectra: &[SpectrumResult], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["sample_id", "index", "eigenvalue", "config_hash"])?;
    for s in spectra {
        for (i, e) in s.eigenvalues.iter().enumerate() {
            out.write_record([
                s.provenance.sample_id.to_string(),
                i.to_string(),
                e.to_string(),
                s.provenance.config_hash.clone(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Orthonormal eigenpairs, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        Self::with_context(m, "dense symmetric matrix")
    }

    fn with_context(m: DMatrix<f64>, context: &str) -> Result<Self> {
        let eig = SymmetricEigen::try_new(m, SOLVER_EPS, SOLVER_MAX_ITER).ok_or_else(|| Error::Solver {
            context: context.to_string(),
            reason: "QR iteration did not converge".into(),
        })?;
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = eig.eigenvectors.select_columns(&order);
        Ok(EigenDecomposition { values, vectors })
    }

    /// `Σ_{λ_i ∈ I} |v_i(j)|²`.
    pub fn site_weight(&self, interval: &Interval, j: usize) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &l)| interval.contains(l))
            .map(|(i, _)| self.vectors[(j, i)].powi(2))
            .sum()
    }

    /// `max_i ‖M v_i − λ_i v_i‖` over up to `count` evenly spaced pairs.
    pub fn max_residual(&self, m: &DMatrix<f64>, count: usize) -> f64 {
        let n = self.values.len();
        if n == 0 {
            return 0.0;
        }
        let step = (n / count.max(1)).max(1);
        (0..n)
            .step_by(step)
            .map(|i| {
                let v = self.vectors.column(i);
                (m * v - v * self.values[i]).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Full spectrum of `h`, with a residual spot check on ten eigenpairs.
pub fn eigenvalues(h: &HamiltonianMatrix, provenance: &Provenance) -> Result<SpectrumResult> {
    let m = h.to_dense()?;
    let context = provenance.to_string();
    let eig = EigenDecomposition::with_context(m.clone(), &context)?;
    let residual = eig.max_residual(&m, 10);
    let scale = h.norm_bound().max(1.0);
    if residual > 1e-8 * scale {
        return Err(Error::Solver {
            context,
            reason: format!("eigenpair residual {residual:e} exceeds tolerance"),
        });
    }
    Ok(SpectrumResult {
        eigenvalues: eig.values,
        provenance: provenance.clone(),
    })
}

/// `l^{−d} #{ i : λ_i < E }`.
pub fn counting_function(spectrum: &SpectrumResult, e: f64) -> f64 {
    if spectrum.is_empty() {
        return 0.0;
    }
    let count = spectrum.eigenvalues.partition_point(|&l| l < e);
    count as f64 / spectrum.len() as f64
}

/// `#{ i : λ_i ∈ [lo, hi] }`, multiplicities counted.
pub fn trace_projection(spectrum: &SpectrumResult, interval: &Interval) -> usize {
    if interval.lo > interval.hi {
        return 0;
    }
    let lo = spectrum.eigenvalues.partition_point(|&l| l < interval.lo);
    let hi = spectrum.eigenvalues.partition_point(|&l| l <= interval.hi);
    hi - lo
}

/// `⟨δ_j, P_H(I) δ_j⟩`.
pub fn site_diagonal_projection(h: &HamiltonianMatrix, interval: &Interval, j: usize) -> Result<f64> {
    if j >= h.dim() {
        return Err(Error::IndexOutOfRange { index: j, len: h.dim() });
    }
    Ok(EigenDecomposition::new(h.to_dense()?)?.site_weight(interval, j))
}

/// Result of one spectral-averaging quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AveragingCheck {
    /// `∫ f(t) ⟨δ_j, P_{H0 + t δ_j⊗δ_j}(I) δ_j⟩ dt`.
    pub lhs: f64,
    /// `|I| · ‖f‖_∞`.
    pub bound: f64,
}

impl AveragingCheck {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.lhs <= self.bound + tolerance
    }
}

struct RankOneFamily<'a> {
    h0: &'a DMatrix<f64>,
    site: usize,
    interval: Interval,
}

impl RankOneFamily<'_> {
    fn at(&self, t: f64) -> DMatrix<f64> {
        let mut m = self.h0.clone();
        m[(self.site, self.site)] += t;
        m
    }

    fn weight(&self, t: f64) -> Result<f64> {
        Ok(EigenDecomposition::new(self.at(t))?.site_weight(&self.interval, self.site))
    }

    /// `#{λ_i(t) < e}`, nonincreasing in `t`.
    fn count_below(&self, t: f64, e: f64) -> Result<usize> {
        let m = self.at(t);
        let eig = SymmetricEigen::try_new(m, SOLVER_EPS, SOLVER_MAX_ITER).ok_or_else(|| Error::Solver {
            context: "spectral averaging".into(),
            reason: "QR iteration did not converge".into(),
        })?;
        Ok(eig.eigenvalues.iter().filter(|&&l| l < e).count())
    }

    /// Parameters where an eigenvalue crosses `e`, located by bisection.
    fn crossings(&self, a: f64, b: f64, e: f64, out: &mut Vec<f64>) -> Result<()> {
        if !e.is_finite() {
            return Ok(());
        }
        let (ca, cb) = (self.count_below(a, e)?, self.count_below(b, e)?);
        self.bisect(a, b, ca, cb, e, out)
    }

    fn bisect(&self, a: f64, b: f64, ca: usize, cb: usize, e: f64, out: &mut Vec<f64>) -> Result<()> {
        if ca == cb {
            return Ok(());
        }
        if b - a <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            out.push(0.5 * (a + b));
            return Ok(());
        }
        let m = 0.5 * (a + b);
        let cm = self.count_below(m, e)?;
        self.bisect(a, m, ca, cm, e, out)?;
        self.bisect(m, b, cm, cb, e, out)
    }
}

fn adaptive_simpson<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // panels this narrow contribute at most width · sup|f|, far below any tolerance in use
    let negligible = b - a <= 1e-13 * (1.0 + a.abs().max(b.abs()));
    if delta.abs() <= 15.0 * tol || negligible {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "refinement cap reached on [{a}, {b}] (error estimate {delta:e})"
        )));
    }
    Ok(adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Integrates `f(t) ⟨δ_j, P_{H0 + t δ_j⊗δ_j}(I) δ_j⟩` over `supp f`.
///
/// The integrand jumps only where an eigenvalue crosses an endpoint of `I`;
/// those parameters are located by bisection on the (monotone) eigenvalue
/// count, together with the kinks of `f`, and adaptive Simpson runs on each
/// smooth piece starting from `quadrature_points` panels.
pub fn spectral_averaging_check(
    h0: &DMatrix<f64>,
    site: usize,
    interval: &Interval,
    density: &DensityModel,
    quadrature_points: usize,
) -> Result<AveragingCheck> {
    if !h0.is_square() || site >= h0.nrows() {
        return Err(Error::IndexOutOfRange {
            index: site,
            len: h0.nrows(),
        });
    }
    let family = RankOneFamily {
        h0,
        site,
        interval: *interval,
    };
    let (a, b) = density.support();
    let mut nodes = density.breakpoints();
    family.crossings(a, b, interval.lo, &mut nodes)?;
    // the upper endpoint is closed: jumps happen where the count of λ ≤ hi changes
    family.crossings(a, b, next_up(interval.hi), &mut nodes)?;
    nodes.retain(|t| (a..=b).contains(t));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    let integrand = |t: f64| -> Result<f64> { Ok(density.pdf(t) * family.weight(t)?) };
    let panels = quadrature_points.max(1);
    let mut lhs = 0.0;
    for w in nodes.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        // evaluate strictly inside the piece so endpoint jumps never leak in
        let shrink = 1e-12 * (hi - lo);
        let h = (hi - lo) / panels as f64;
        for p in 0..panels {
            let pa = lo + p as f64 * h + if p == 0 { shrink } else { 0.0 };
            let pb = lo + (p + 1) as f64 * h - if p + 1 == panels { shrink } else { 0.0 };
            let (fa, fm, fb) = (integrand(pa)?, integrand(0.5 * (pa + pb))?, integrand(pb)?);
            let whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
            lhs += adaptive_simpson(&integrand, pa, pb, fa, fm, fb, whole, 1e-10 / panels as f64, 40)?;
        }
    }
    Ok(AveragingCheck {
        lhs,
        bound: interval.length() * density.sup_norm(),
    })
}

fn next_up(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}

fn dense_ground_state(h: &HamiltonianMatrix) -> Result<f64> {
    let m = h.to_dense()?;
    let values = SymmetricEigen::try_new(m, SOLVER_EPS, SOLVER_MAX_ITER)
        .ok_or_else(|| Error::Solver {
            context: "ground state".into(),
            reason: "QR iteration did not converge".into(),
        })?
        .eigenvalues;
    Ok(values.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Smallest eigenvalue by restarted Lanczos with full reorthogonalization.
/// Converged when `‖H y − θ y‖ ≤ tol · max(1, ‖H‖)`.
pub fn lanczos_ground_state(h: &HamiltonianMatrix, tol: f64, max_restarts: usize) -> Result<(f64, DVector<f64>)> {
    let n = h.dim();
    let scale = h.norm_bound().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut start = DVector::from_fn(n, |_, _| 1.0 + 0.5 * rng.random::<f64>());
    start /= start.norm();
    let krylov = n.min(160);
    for _ in 0..=max_restarts {
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(krylov);
        let mut alphas = Vec::with_capacity(krylov);
        let mut betas: Vec<f64> = Vec::with_capacity(krylov);
        basis.push(start.clone());
        for k in 0..krylov {
            let mut w = h.matvec(&basis[k]);
            let a = basis[k].dot(&w);
            alphas.push(a);
            for _ in 0..2 {
                for v in &basis {
                    let c = v.dot(&w);
                    w.axpy(-c, v, 1.0);
                }
            }
            let b = w.norm();
            if k + 1 == krylov || b <= 1e-14 * scale {
                break;
            }
            betas.push(b);
            basis.push(w / b);
        }
        let m = alphas.len();
        let t = DMatrix::from_fn(m, m, |i, j| match i.abs_diff(j) {
            0 => alphas[i],
            1 => betas[i.min(j)],
            _ => 0.0,
        });
        let eig = EigenDecomposition::new(t)?;
        let s = eig.vectors.column(0);
        let mut y = DVector::zeros(n);
        for (i, v) in basis.iter().enumerate() {
            y.axpy(s[i], v, 1.0);
        }
        y /= y.norm();
        let theta = y.dot(&h.matvec(&y));
        let residual = (h.matvec(&y) - &y * theta).norm();
        if residual <= tol * scale {
            return Ok((theta, y));
        }
        start = y;
    }
    Err(Error::Solver {
        context: "Lanczos ground state".into(),
        reason: format!("no convergence after {max_restarts} restarts"),
    })
}

/// `λ₁(h)`: dense QR for small boxes, Lanczos above [`ITERATIVE_THRESHOLD`].
pub fn ground_state_energy(h: &HamiltonianMatrix) -> Result<f64> {
    if h.dim() <= ITERATIVE_THRESHOLD {
        dense_ground_state(h)
    } else {
        lanczos_ground_state(h, 1e-8, 500).map(|(e, _)| e)
    }
}

/// Allowed excess of the averaging integral over `|I| ‖f‖_∞`.
pub const AVERAGING_TOLERANCE: f64 = 1e-4;

/// A batch of random rank-one averaging checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragingConfig {
    pub density: DensityModel,
    pub systems: usize,
    pub max_size: usize,
    pub seed: u64,
    #[serde(default = "default_quadrature_points")]
    pub quadrature_points: usize,
}

fn default_quadrature_points() -> usize {
    16
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AveragingRow {
    pub system: usize,
    pub size: usize,
    pub site: usize,
    pub interval: Interval,
    pub check: AveragingCheck,
    pub pass: bool,
}

/// Symmetric matrix with entries uniform in `[−1, 1]`.
pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
    (&a + a.transpose()) * 0.5
}

/// Runs the averaging check on `systems` random matrices of size
/// `2..=max_size`, random sites and random intervals inside `[−3, 3]`.
pub fn averaging_suite(config: &AveragingConfig) -> Result<Vec<AveragingRow>> {
    if config.max_size < 2 {
        return Err(Error::Config(format!("max_size = {} < 2", config.max_size)));
    }
    (0..config.systems)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let n = rng.random_range(2..=config.max_size);
            let h0 = random_symmetric(&mut rng, n);
            let site = rng.random_range(0..n);
            let center = rng.random_range(-2.0..2.0);
            let width = rng.random_range(0.05..1.0);
            let interval = Interval::new(center - 0.5 * width, center + 0.5 * width);
            let check = spectral_averaging_check(&h0, site, &interval, &config.density, config.quadrature_points)?;
            Ok(AveragingRow {
                system: i,
                size: n,
                site,
                interval,
                check,
                pass: check.holds(AVERAGING_TOLERANCE),
            })
        })
        .collect()
}

pub fn write_averaging_csv<W: std::io::Write>(rows: &[AveragingRow], w: W, config_hash: &str) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["system", "size", "site", "lo", "hi", "lhs", "bound", "pass", "config_hash"])?;
    for r in rows {
        out.write_record([
            r.system.to_string(),
            r.size.to_string(),
            r.site.to_string(),
            r.interval.lo.to_string(),
            r.interval.hi.to_string(),
            r.check.lhs.to_string(),
            r.check.bound.to_string(),
            r.pass.to_string(),
            config_hash.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
