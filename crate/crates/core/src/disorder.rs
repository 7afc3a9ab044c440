//! Coupling-constant densities, reproducible iid sampling of `ω` over `Λ⁺`,
//! and the change of variables `η = A_Λ ω`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::toeplitz::TruncatedToeplitz;

const NORMALIZATION_TOL: f64 = 1e-10;

/// Density `f` of a single coupling constant.
///
/// Piecewise-linear densities vanish at both ends of their support so that
/// `f ∈ W¹₁` and `‖f′‖_{L¹}` is the total variation of the breakpoint values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "DensityJson", into = "DensityJson")]
pub enum DensityModel {
    PiecewiseLinear { points: Vec<(f64, f64)> },
    Uniform { omega_plus: f64 },
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum DensityJson {
    PiecewiseLinear { points: Vec<[f64; 2]> },
    Uniform { omega_plus: f64 },
}

impl TryFrom<DensityJson> for DensityModel {
    type Error = Error;
    fn try_from(raw: DensityJson) -> Result<Self> {
        match raw {
            DensityJson::PiecewiseLinear { points } => {
                DensityModel::piecewise_linear(points.into_iter().map(|[x, f]| (x, f)).collect())
            }
            DensityJson::Uniform { omega_plus } => DensityModel::uniform(omega_plus),
        }
    }
}

impl From<DensityModel> for DensityJson {
    fn from(d: DensityModel) -> Self {
        match d {
            DensityModel::PiecewiseLinear { points } => DensityJson::PiecewiseLinear {
                points: points.into_iter().map(|(x, f)| [x, f]).collect(),
            },
            DensityModel::Uniform { omega_plus } => DensityJson::Uniform { omega_plus },
        }
    }
}

impl DensityModel {
    pub fn piecewise_linear(points: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDensity(msg));
        if points.len() < 3 {
            return bad("piecewise-linear density needs at least 3 breakpoints".into());
        }
        if points.iter().any(|(x, f)| !x.is_finite() || !f.is_finite() || *f < 0.0) {
            return bad("breakpoints must be finite with nonnegative values".into());
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return bad("breakpoint abscissae must be strictly increasing".into());
        }
        if points[0].1 != 0.0 || points[points.len() - 1].1 != 0.0 {
            return bad("density must vanish at both support endpoints".into());
        }
        let mass = trapezoid_mass(&points);
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return bad(format!("density integrates to {mass}, not 1"));
        }
        Ok(DensityModel::PiecewiseLinear { points })
    }

    pub fn uniform(omega_plus: f64) -> Result<Self> {
        if !(omega_plus.is_finite() && omega_plus > 0.0) {
            return Err(Error::InvalidDensity(format!(
                "uniform density needs omega_plus > 0, got {omega_plus}"
            )));
        }
        Ok(DensityModel::Uniform { omega_plus })
    }

    /// Symmetric triangle on `[a, b]` with peak `2/(b−a)` at the midpoint.
    pub fn triangle(a: f64, b: f64) -> Result<Self> {
        Self::piecewise_linear(vec![(a, 0.0), (0.5 * (a + b), 2.0 / (b - a)), (b, 0.0)])
    }

    /// Symmetric trapezoid on `[a, b]` with linear ramps of width `ramp`,
    /// scaled to unit mass.
    pub fn trapezoid(a: f64, b: f64, ramp: f64) -> Result<Self> {
        let height = 1.0 / (b - a - ramp);
        Self::piecewise_linear(vec![(a, 0.0), (a + ramp, height), (b - ramp, height), (b, 0.0)])
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, DensityModel::Uniform { .. })
    }

    /// `[inf supp f, sup supp f]`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            DensityModel::PiecewiseLinear { points } => (points[0].0, points[points.len() - 1].0),
            DensityModel::Uniform { omega_plus } => (0.0, *omega_plus),
        }
    }

    /// `‖f‖_∞`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            DensityModel::PiecewiseLinear { points } => points.iter().map(|p| p.1).fold(0.0, f64::max),
            DensityModel::Uniform { omega_plus } => 1.0 / omega_plus,
        }
    }

    /// Points where `f` is not smooth, support endpoints included.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            DensityModel::PiecewiseLinear { points } => points.iter().map(|p| p.0).collect(),
            DensityModel::Uniform { omega_plus } => vec![0.0, *omega_plus],
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            DensityModel::PiecewiseLinear { points } => {
                let (lo, hi) = self.support();
                if !(lo..=hi).contains(&x) {
                    return 0.0;
                }
                let i = segment_index(points, x);
                let ((x0, f0), (x1, f1)) = (points[i], points[i + 1]);
                f0 + (f1 - f0) * (x - x0) / (x1 - x0)
            }
            DensityModel::Uniform { omega_plus } => {
                if (0.0..=*omega_plus).contains(&x) {
                    1.0 / omega_plus
                } else {
                    0.0
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            DensityModel::PiecewiseLinear { points } => {
                let (lo, hi) = self.support();
                if x <= lo {
                    return 0.0;
                }
                if x >= hi {
                    return 1.0;
                }
                let i = segment_index(points, x);
                let below = trapezoid_mass(&points[..=i]);
                let ((x0, f0), (x1, f1)) = (points[i], points[i + 1]);
                let t = x - x0;
                let slope = (f1 - f0) / (x1 - x0);
                below + f0 * t + 0.5 * slope * t * t
            }
            DensityModel::Uniform { omega_plus } => (x / omega_plus).clamp(0.0, 1.0),
        }
    }

    /// Inverse CDF on `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            DensityModel::PiecewiseLinear { points } => {
                let mut below = 0.0;
                let last = points.len() - 2;
                for (i, w) in points.windows(2).enumerate() {
                    let ((x0, f0), (x1, f1)) = (w[0], w[1]);
                    let mass = 0.5 * (f0 + f1) * (x1 - x0);
                    if u <= below + mass || i == last {
                        let r = (u - below).max(0.0);
                        let slope = (f1 - f0) / (x1 - x0);
                        // root of slope/2 t² + f0 t − r = 0 in its cancellation-free form
                        let disc = (f0 * f0 + 2.0 * slope * r).max(0.0);
                        let denom = f0 + disc.sqrt();
                        let t = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
                        return (x0 + t).clamp(x0, x1);
                    }
                    below += mass;
                }
                points[points.len() - 1].0
            }
            DensityModel::Uniform { omega_plus } => omega_plus * u.clamp(0.0, 1.0),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            DensityModel::PiecewiseLinear { points } => points
                .windows(2)
                .map(|w| {
                    let ((x0, f0), (x1, f1)) = (w[0], w[1]);
                    // ∫ x f(x) over a linear piece
                    (x1 - x0) * (f0 * (2.0 * x0 + x1) + f1 * (x0 + 2.0 * x1)) / 6.0
                })
                .sum(),
            DensityModel::Uniform { omega_plus } => 0.5 * omega_plus,
        }
    }

    /// `‖f′‖_{L¹}`; not defined for the uniform density.
    pub fn f_prime_l1(&self) -> Result<f64> {
        match self {
            DensityModel::PiecewiseLinear { points } => {
                Ok(points.windows(2).map(|w| (w[1].1 - w[0].1).abs()).sum())
            }
            DensityModel::Uniform { .. } => Err(Error::NotApplicable(
                "uniform density has no W1,1 derivative".into(),
            )),
        }
    }

    /// Law of `c·ω₀` for `c ≠ 0`. Uniform densities only admit `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::InvalidDensity(format!("cannot rescale by {c}")));
        }
        match self {
            DensityModel::PiecewiseLinear { points } => {
                let mut pts: Vec<(f64, f64)> = points.iter().map(|(x, f)| (c * x, f / c.abs())).collect();
                if c < 0.0 {
                    pts.reverse();
                }
                Self::piecewise_linear(pts)
            }
            DensityModel::Uniform { omega_plus } if c > 0.0 => Self::uniform(c * omega_plus),
            DensityModel::Uniform { .. } => Err(Error::InvalidDensity(
                "uniform density on [0, omega_plus] cannot be reflected".into(),
            )),
        }
    }
}

fn trapezoid_mass(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum()
}

fn segment_index(points: &[(f64, f64)], x: f64) -> usize {
    let i = points.partition_point(|p| p.0 <= x);
    i.saturating_sub(1).min(points.len() - 2)
}

/// One realization of the coupling constants on an ordered site list.
#[derive(Clone, Debug, PartialEq)]
pub struct DisorderSample {
    pub sites: Vec<Site>,
    pub omega: Vec<f64>,
    pub seed: u64,
    pub sample_id: u64,
}

fn sample_key(seed: u64, sample_id: u64) -> [u8; 32] {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&sample_id.to_le_bytes());
    key
}

/// A uniform variate in `[0, 1)` that depends only on `(seed, sample_id, site)`.
pub fn site_uniform(seed: u64, sample_id: u64, site: &Site) -> f64 {
    let mut rng = ChaCha8Rng::from_seed(sample_key(seed, sample_id));
    rng.set_stream(site.packed());
    rng.random::<f64>()
}

/// Coupling constants for `sites`, one inverse-CDF draw per site from a
/// ChaCha stream keyed by `(seed, sample_id)` and selected by the site.
/// Two boxes that share a site see the same coupling constant there.
pub fn sample_values(density: &DensityModel, sites: &[Site], seed: u64, sample_id: u64) -> Vec<f64> {
    sites
        .iter()
        .map(|site| density.quantile(site_uniform(seed, sample_id, site)))
        .collect()
}

pub fn sample_omega(density: &DensityModel, sites: &[Site], seed: u64, sample_id: u64) -> DisorderSample {
    DisorderSample {
        sites: sites.to_vec(),
        omega: sample_values(density, sites, seed, sample_id),
        seed,
        sample_id,
    }
}

/// `η = A_Λ ω`, summed over columns in `Λ⁺` order.
pub fn transform(a: &TruncatedToeplitz, omega: &DisorderSample) -> Result<Vec<f64>> {
    if a.sites() != omega.sites.as_slice() {
        return Err(Error::ShapeMismatch {
            expected: a.len(),
            got: omega.sites.len(),
        });
    }
    let m = a.matrix();
    Ok((0..m.nrows())
        .map(|j| {
            let mut acc = 0.0;
            for (k, w) in omega.omega.iter().enumerate() {
                acc += m[(j, k)] * w;
            }
            acc
        })
        .collect())
}

/// `k(η) = |det B| Π_k f((Bη)_k)` with `B = A_Λ⁻¹`.
pub fn transformed_density_value(density: &DensityModel, b: &DMatrix<f64>, eta: &[f64]) -> Result<f64> {
    if b.ncols() != eta.len() {
        return Err(Error::ShapeMismatch {
            expected: b.ncols(),
            got: eta.len(),
        });
    }
    let omega = b * nalgebra::DVector::from_column_slice(eta);
    let det = b.clone().lu().determinant().abs();
    Ok(omega.iter().fold(det, |acc, &w| acc * density.pdf(w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::ConvolutionVector;
    use approx::assert_relative_eq;

    fn sites1(n: i64) -> Vec<Site> {
        (0..n).map(|k| Site::new(&[k]).unwrap()).collect()
    }

    #[test]
    fn validation() {
        assert!(DensityModel::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(DensityModel::piecewise_linear(vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]).is_err());
        assert!(DensityModel::piecewise_linear(vec![(0.0, 0.5), (1.0, 0.5), (2.0, 0.5)]).is_err());
        assert!(DensityModel::piecewise_linear(vec![(0.0, 0.0), (0.0, 2.0), (1.0, 0.0)]).is_err());
        assert!(DensityModel::uniform(0.0).is_err());
        assert!(DensityModel::triangle(0.0, 1.0).is_ok());
    }

    #[test]
    fn f_prime_examples() {
        assert_relative_eq!(DensityModel::triangle(0.0, 1.0).unwrap().f_prime_l1().unwrap(), 4.0);
        let trap = DensityModel::trapezoid(0.0, 2.0, 0.5).unwrap();
        assert_eq!(trap.sup_norm(), 1.0 / 1.5);
        // heights 1/1.5 up and down
        assert_relative_eq!(trap.f_prime_l1().unwrap(), 2.0 / 1.5);
        let unit_trap = DensityModel::piecewise_linear(vec![(0.0, 0.0), (0.5, 1.0), (1.0, 1.0), (1.5, 0.0)]).unwrap();
        assert_eq!(unit_trap.f_prime_l1().unwrap(), 2.0);
        assert!(matches!(
            DensityModel::uniform(1.0).unwrap().f_prime_l1(),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn cdf_quantile_consistency() {
        let d = DensityModel::piecewise_linear(vec![(-1.0, 0.0), (0.0, 0.8), (0.5, 0.4), (2.0, 0.0)]).unwrap();
        for i in 0..=100 {
            let u = i as f64 / 100.0;
            assert_relative_eq!(d.cdf(d.quantile(u)), u, epsilon = 1e-12);
        }
        assert_eq!(d.cdf(-2.0), 0.0);
        assert_eq!(d.cdf(2.0), 1.0);
    }

    #[test]
    fn mean_of_shipped_densities() {
        assert_relative_eq!(DensityModel::triangle(0.0, 1.0).unwrap().mean(), 0.5, max_relative = 1e-14);
        assert_eq!(DensityModel::uniform(3.0).unwrap().mean(), 1.5);
        let skew = DensityModel::piecewise_linear(vec![(0.0, 0.0), (1.0, 2.0), (1.0 + 1e-9, 0.0)]);
        // mass 1 + 1e-9 exceeds the normalization tolerance
        assert!(skew.is_err());
        let right = DensityModel::piecewise_linear(vec![(0.0, 0.0), (0.75, 2.0), (1.0, 0.0)]).unwrap();
        assert_relative_eq!(right.mean(), (0.0 + 0.75 + 1.0) / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn uniform_sample_mean() {
        let d = DensityModel::uniform(1.0).unwrap();
        let sites = sites1(100_000);
        let xs = sample_values(&d, &sites, 7, 0);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn samples_stay_in_support_and_are_deterministic() {
        let d = DensityModel::triangle(0.0, 1.0).unwrap();
        let sites = sites1(5_000);
        let a = sample_omega(&d, &sites, 11, 3);
        let b = sample_omega(&d, &sites, 11, 3);
        assert_eq!(a, b);
        assert!(a.omega.iter().all(|w| (0.0..=1.0).contains(w)));
        let c = sample_omega(&d, &sites, 11, 4);
        assert_ne!(a.omega, c.omega);
    }

    #[test]
    fn shared_sites_share_couplings() {
        let d = DensityModel::uniform(1.0).unwrap();
        let big = sample_values(&d, &sites1(10), 5, 9);
        let small = sample_values(&d, &sites1(4), 5, 9);
        assert_eq!(&big[..4], small.as_slice());
    }

    #[test]
    fn transform_examples() {
        let sites = sites1(5);
        let d = DensityModel::uniform(1.0).unwrap();
        let w = sample_omega(&d, &sites, 1, 0);
        let id = TruncatedToeplitz::on_sites(&ConvolutionVector::delta(1).unwrap(), sites.clone());
        assert_eq!(transform(&id, &w).unwrap(), w.omega);

        let step = TruncatedToeplitz::on_sites(&ConvolutionVector::step(1).unwrap(), sites.clone());
        let constant = DisorderSample { omega: vec![0.3; 5], ..w.clone() };
        let eta = transform(&step, &constant).unwrap();
        assert_eq!(eta[0], 0.3);
        assert!(eta[1..].iter().all(|&e| e == 0.0));

        let a = ConvolutionVector::one_dim(&[(0, 1.0), (1, -0.4), (-2, 0.3)]).unwrap();
        let t = TruncatedToeplitz::on_sites(&a, sites.clone());
        let eta = transform(&t, &w).unwrap();
        let oracle = t.matrix() * nalgebra::DVector::from_vec(w.omega.clone());
        for (x, y) in eta.iter().zip(oracle.iter()) {
            assert_relative_eq!(x, y, epsilon = 1e-15);
        }

        let short = TruncatedToeplitz::on_sites(&a, sites1(4));
        assert!(transform(&short, &w).is_err());
    }

    #[test]
    fn transformed_density_examples() {
        let f = DensityModel::triangle(0.0, 1.0).unwrap();
        let id = DMatrix::<f64>::identity(3, 3);
        let eta = [0.2, 0.5, 0.9];
        let expected: f64 = eta.iter().map(|&x| f.pdf(x)).product();
        assert_relative_eq!(transformed_density_value(&f, &id, &eta).unwrap(), expected);
        let one = DMatrix::<f64>::identity(1, 1);
        assert_eq!(transformed_density_value(&f, &one, &[0.3]).unwrap(), f.pdf(0.3));
        assert_eq!(transformed_density_value(&f, &one, &[1.3]).unwrap(), 0.0);
    }

    #[test]
    fn transformed_density_integrates_to_one() {
        // α = δ_0 − δ_1 on two sites: η = (ω_0, ω_1 − ω_0); midpoint rule on a box covering supp k.
        let f = DensityModel::triangle(0.0, 1.0).unwrap();
        let sites = sites1(2);
        let a = TruncatedToeplitz::on_sites(&ConvolutionVector::step(1).unwrap(), sites);
        let b = crate::toeplitz::invert_truncation(&a).unwrap();
        let n = 1000;
        let (x0, x1, y0, y1) = (0.0, 1.0, -1.0, 1.0);
        let (hx, hy) = ((x1 - x0) / n as f64, (y1 - y0) / n as f64);
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let eta = [x0 + (i as f64 + 0.5) * hx, y0 + (j as f64 + 0.5) * hy];
                total += transformed_density_value(&f, &b, &eta).unwrap();
            }
        }
        total *= hx * hy;
        assert!((total - 1.0).abs() < 1e-5, "mass {total}");
    }

    #[test]
    fn step_truncation_has_unit_determinant() {
        let sites = sites1(7);
        let a = TruncatedToeplitz::on_sites(&ConvolutionVector::step(1).unwrap(), sites);
        assert_eq!(a.matrix().clone().lu().determinant().abs(), 1.0);
    }

    #[test]
    fn density_json_schema() {
        let d: DensityModel = serde_json::from_str(r#"{"kind":"uniform","omega_plus":2.0}"#).unwrap();
        assert_eq!(d, DensityModel::uniform(2.0).unwrap());
        let d: DensityModel =
            serde_json::from_str(r#"{"kind":"piecewise_linear","points":[[0,0],[0.5,2],[1,0]]}"#).unwrap();
        assert_eq!(d, DensityModel::triangle(0.0, 1.0).unwrap());
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<DensityModel>(&s).unwrap(), d);
        assert!(serde_json::from_str::<DensityModel>(r#"{"kind":"uniform","omega_plus":-1}"#).is_err());
        assert!(serde_json::from_str::<DensityModel>(r#"{"kind":"gaussian"}"#).is_err());
    }
}
