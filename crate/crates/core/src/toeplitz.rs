//! Convolution vectors, the truncated Toeplitz matrices they generate on the
//! extended site set, and inverse-norm certificates.
//!
//! A convolution vector `α` with finite support `Γ ⊂ Z^d` defines the
//! single-site potential `u = Σ_{k∈Γ} α_k δ_k`. On a box the coupling
//! constants that reach into it live on `Λ⁺ = Λ̃ − Γ`, and the linear map
//! `η = A ω` with `A_{j,k} = α_{j−k}` turns the correlated sign-changing
//! potential into a site-diagonal one.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BoxGeometry, Site, MAX_DIM};

/// Finitely supported real coefficients `α_k`, `k ∈ Γ ⊂ Z^d`, with `α_0 ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionVector {
    dim: usize,
    entries: BTreeMap<Site, f64>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    k: Vec<i64>,
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct ConvolutionJson {
    d: usize,
    entries: Vec<EntryJson>,
}

impl ConvolutionJson {
    fn into_entries(self) -> Result<Vec<(Site, f64)>> {
        let d = self.d;
        self.entries
            .into_iter()
            .map(|e| {
                if e.k.len() != d {
                    return Err(Error::InvalidConvolution(format!(
                        "offset {:?} has {} coordinates, expected d = {d}",
                        e.k,
                        e.k.len()
                    )));
                }
                Ok((Site::new(&e.k)?, e.alpha))
            })
            .collect()
    }

    fn from_map(dim: usize, entries: &BTreeMap<Site, f64>) -> Self {
        ConvolutionJson {
            d: dim,
            entries: entries
                .iter()
                .map(|(k, a)| EntryJson {
                    k: k.coords(dim).to_vec(),
                    alpha: *a,
                })
                .collect(),
        }
    }
}

impl ConvolutionVector {
    pub fn new(dim: usize, entries: impl IntoIterator<Item = (Site, f64)>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidConvolution(format!(
                "dimension {dim} not in 1..={MAX_DIM}"
            )));
        }
        let mut map = BTreeMap::new();
        for (k, a) in entries {
            if !k.fits_dim(dim) {
                return Err(Error::InvalidConvolution(format!(
                    "offset {k:?} has nonzero coordinates beyond d = {dim}"
                )));
            }
            if !a.is_finite() {
                return Err(Error::InvalidConvolution(format!(
                    "coefficient at {k:?} is not finite"
                )));
            }
            if map.insert(k, a).is_some() {
                return Err(Error::InvalidConvolution(format!("duplicate offset {k:?}")));
            }
        }
        match map.get(&Site::ORIGIN) {
            Some(&a0) if a0 != 0.0 => Ok(ConvolutionVector { dim, entries: map }),
            _ => Err(Error::InvalidConvolution("alpha_0 must be present and nonzero".into())),
        }
    }

    /// Convenience constructor for `d = 1`: pairs of (offset, coefficient).
    pub fn one_dim(entries: &[(i64, f64)]) -> Result<Self> {
        Self::new(1, entries.iter().map(|&(k, a)| (Site::new(&[k]).unwrap(), a)))
    }

    /// The single-site vector `δ_0`.
    pub fn delta(dim: usize) -> Result<Self> {
        Self::new(dim, [(Site::ORIGIN, 1.0)])
    }

    /// `δ_0 − δ_e` with `e` the first unit vector.
    pub fn step(dim: usize) -> Result<Self> {
        Self::new(dim, [(Site::ORIGIN, 1.0), (Site::unit(0), -1.0)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> impl Iterator<Item = (Site, f64)> + '_ {
        self.entries.iter().map(|(k, a)| (*k, *a))
    }

    /// The support `Γ` in lexicographic order.
    pub fn support(&self) -> Vec<Site> {
        self.entries.keys().copied().collect()
    }

    pub fn coefficient(&self, k: &Site) -> f64 {
        self.entries.get(k).copied().unwrap_or(0.0)
    }

    pub fn alpha0(&self) -> f64 {
        self.entries[&Site::ORIGIN]
    }

    /// `α* = Σ_{k≠0} |α_k|`.
    pub fn alpha_star(&self) -> f64 {
        self.entries
            .iter()
            .filter(|(k, _)| !k.is_origin())
            .map(|(_, a)| a.abs())
            .sum()
    }

    /// `Σ_k |α_k|`, the row-sum norm of the infinite Toeplitz operator.
    pub fn l1_norm(&self) -> f64 {
        self.entries.values().map(|a| a.abs()).sum()
    }

    /// `Σ_k α_k`.
    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Rescales so that `α_0 = 1`; returns the new vector and the old `α_0`.
    pub fn normalize(&self) -> Result<(ConvolutionVector, f64)> {
        let a0 = self.alpha0();
        let entries = self.entries.iter().map(|(k, a)| (*k, a / a0)).collect();
        Ok((
            ConvolutionVector {
                dim: self.dim,
                entries,
            },
            a0,
        ))
    }

    /// Multiplies every coefficient by `c ≠ 0`.
    pub fn scaled(&self, c: f64) -> Result<ConvolutionVector> {
        ConvolutionVector::new(self.dim, self.entries.iter().map(|(k, a)| (*k, a * c)))
    }

    /// `diam Γ` in the max-norm.
    pub fn diameter(&self) -> i64 {
        let support = self.support();
        support
            .iter()
            .flat_map(|a| support.iter().map(move |b| a.sup_distance(b)))
            .max()
            .unwrap_or(0)
    }

    pub fn is_normalized(&self) -> bool {
        self.alpha0() == 1.0
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: ConvolutionJson = serde_json::from_str(s)?;
        Self::from_json_value(raw)
    }

    fn from_json_value(raw: ConvolutionJson) -> Result<Self> {
        let d = raw.d;
        Self::new(d, raw.into_entries()?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("serializable")
    }

    fn to_raw(&self) -> ConvolutionJson {
        ConvolutionJson::from_map(self.dim, &self.entries)
    }
}

impl Serialize for ConvolutionVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_raw().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvolutionVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ConvolutionJson::deserialize(d)?;
        Self::from_json_value(raw).map_err(serde::de::Error::custom)
    }
}

/// Finitely supported nonnegative coefficients, such as the positive and
/// negative parts `u₊`, `u₋` of a sign-changing single-site potential.
/// Unlike [`ConvolutionVector`] the origin may be absent and the profile
/// may be empty.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteProfile {
    dim: usize,
    entries: BTreeMap<Site, f64>,
}

impl SiteProfile {
    pub fn new(dim: usize, entries: impl IntoIterator<Item = (Site, f64)>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidConvolution(format!(
                "dimension {dim} not in 1..={MAX_DIM}"
            )));
        }
        let mut map = BTreeMap::new();
        for (k, a) in entries {
            if !k.fits_dim(dim) {
                return Err(Error::InvalidConvolution(format!(
                    "offset {k:?} has nonzero coordinates beyond d = {dim}"
                )));
            }
            if !(a.is_finite() && a >= 0.0) {
                return Err(Error::InvalidConvolution(format!(
                    "profile coefficient at {k:?} must be finite and >= 0, got {a}"
                )));
            }
            if map.insert(k, a).is_some() {
                return Err(Error::InvalidConvolution(format!("duplicate offset {k:?}")));
            }
        }
        Ok(SiteProfile { dim, entries: map })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, [])
    }

    pub fn one_dim(entries: &[(i64, f64)]) -> Result<Self> {
        Self::new(1, entries.iter().map(|&(k, a)| (Site::new(&[k]).unwrap(), a)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> impl Iterator<Item = (Site, f64)> + '_ {
        self.entries.iter().map(|(k, a)| (*k, *a))
    }

    pub fn coefficient(&self, k: &Site) -> f64 {
        self.entries.get(k).copied().unwrap_or(0.0)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.entries.values().copied().fold(0.0, f64::max)
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|&a| a == 0.0)
    }

    /// `u₊ − c u₋` as a convolution vector.
    pub fn combine(plus: &SiteProfile, minus: &SiteProfile, c: f64) -> Result<ConvolutionVector> {
        if plus.dim != minus.dim {
            return Err(Error::InvalidConvolution(format!(
                "profiles have dimensions {} and {}",
                plus.dim, minus.dim
            )));
        }
        let mut map: BTreeMap<Site, f64> = plus.entries.clone();
        for (k, a) in &minus.entries {
            *map.entry(*k).or_insert(0.0) -= c * a;
        }
        ConvolutionVector::new(plus.dim, map)
    }
}

impl Serialize for SiteProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConvolutionJson::from_map(self.dim, &self.entries).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SiteProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ConvolutionJson::deserialize(d)?;
        let dim = raw.d;
        let entries = raw.into_entries().map_err(serde::de::Error::custom)?;
        SiteProfile::new(dim, entries).map_err(serde::de::Error::custom)
    }
}

/// `Λ⁺ = { λ − γ : λ ∈ Λ̃, γ ∈ Γ }` in lexicographic order.
pub fn extended_sites(geometry: &BoxGeometry, gamma: &[Site]) -> Vec<Site> {
    let mut set = BTreeSet::new();
    for site in geometry.sites() {
        for g in gamma {
            set.insert(site - *g);
        }
    }
    set.into_iter().collect()
}

/// The truncation `A_Λ = {α_{j−k}}_{j,k ∈ Λ⁺}`.
#[derive(Clone, Debug)]
pub struct TruncatedToeplitz {
    sites: Vec<Site>,
    matrix: DMatrix<f64>,
}

impl TruncatedToeplitz {
    /// Truncation of `α` to an explicit ordered site list.
    pub fn on_sites(alpha: &ConvolutionVector, sites: Vec<Site>) -> Self {
        let n = sites.len();
        let index: HashMap<Site, usize> = sites.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut matrix = DMatrix::zeros(n, n);
        for (col, k) in sites.iter().enumerate() {
            for (gamma, a) in alpha.entries() {
                if let Some(&row) = index.get(&(*k + gamma)) {
                    matrix[(row, col)] = a;
                }
            }
        }
        TruncatedToeplitz { sites, matrix }
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// The matrix as integers, if every entry is integral.
    pub fn to_integer(&self) -> Option<DMatrix<i64>> {
        if self.matrix.iter().all(|v| v.fract() == 0.0) {
            Some(self.matrix.map(|v| v as i64))
        } else {
            None
        }
    }
}

/// `A_Λ` on `Λ⁺ = extended_sites(geometry, Γ)`.
pub fn build_truncation(alpha: &ConvolutionVector, geometry: &BoxGeometry) -> TruncatedToeplitz {
    TruncatedToeplitz::on_sites(alpha, extended_sites(geometry, &alpha.support()))
}

/// `max_j Σ_k |M_{j,k}|`.
pub fn row_sum_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Uniform bound `1/(1 − α*)` on every truncated inverse, valid when `α_0 = 1`
/// and `α* < 1`.
pub fn neumann_inverse_bound(alpha: &ConvolutionVector) -> Result<f64> {
    if !alpha.is_normalized() {
        return Err(Error::InvalidConvolution(format!(
            "alpha_0 = {} but the Neumann certificate needs a normalized vector",
            alpha.alpha0()
        )));
    }
    let s = alpha.alpha_star();
    if s < 1.0 {
        Ok(1.0 / (1.0 - s))
    } else {
        Err(Error::NotCertifiable { alpha_star: s })
    }
}

/// Dense LU inverse of `A_Λ`; fails when `‖A·B − Id‖_max > 1e-10 · |Λ⁺|`.
pub fn invert_truncation(a: &TruncatedToeplitz) -> Result<DMatrix<f64>> {
    let n = a.len();
    let singular = || Error::SingularTruncation { size: n };
    let inverse = a.matrix.clone().lu().try_inverse().ok_or_else(singular)?;
    if !inverse.iter().all(|v| v.is_finite()) {
        return Err(singular());
    }
    let residual = (&a.matrix * &inverse - DMatrix::<f64>::identity(n, n)).amax();
    if residual > 1e-10 * n.max(1) as f64 {
        return Err(singular());
    }
    Ok(inverse)
}

/// Exact inverse of the truncation of `δ_0 − δ_e`: `b_{j,k} = 1` when
/// `k_1 ≤ j_1` and the remaining coordinates agree. Requires every line
/// parallel to the first axis to meet `sites` in a contiguous interval.
pub fn step_inverse_on_sites(sites: &[Site]) -> Result<DMatrix<i64>> {
    let mut lines: HashMap<Site, (i64, i64, usize)> = HashMap::new();
    for s in sites {
        let e = lines.entry(s.with_coord(0, 0)).or_insert((i64::MAX, i64::MIN, 0));
        e.0 = e.0.min(s.coord(0));
        e.1 = e.1.max(s.coord(0));
        e.2 += 1;
    }
    if lines.values().any(|&(lo, hi, count)| (hi - lo + 1) as usize != count) {
        return Err(Error::InvalidGeometry(
            "site set is not a union of intervals along the first axis".into(),
        ));
    }
    let n = sites.len();
    Ok(DMatrix::from_fn(n, n, |r, c| {
        let (j, k) = (sites[r], sites[c]);
        let same_line = (1..MAX_DIM).all(|i| j.coord(i) == k.coord(i));
        i64::from(same_line && k.coord(0) <= j.coord(0))
    }))
}

/// [`step_inverse_on_sites`] on `Λ⁺` of a box.
pub fn closed_form_step_inverse(geometry: &BoxGeometry) -> Result<DMatrix<i64>> {
    let gamma = [Site::ORIGIN, Site::unit(0)];
    step_inverse_on_sites(&extended_sites(geometry, &gamma))
}

/// `Σ_k |B_{k,j}|`.
pub fn column_abs_sum(b: &DMatrix<f64>, j: usize) -> Result<f64> {
    if j >= b.ncols() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: b.ncols(),
        });
    }
    Ok(b.column(j).iter().map(|v| v.abs()).sum())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub side: usize,
    pub size: usize,
    pub inverse_norm: f64,
}

/// Row-sum norms of the truncated inverses over a range of box sides, with
/// the least-squares slope of `log ‖A_Λ⁻¹‖` against `log |Λ⁺|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    pub exponent: f64,
}

pub fn norm_growth_probe(alpha: &ConvolutionVector, sides: &[usize]) -> Result<GrowthTable> {
    let mut rows = Vec::with_capacity(sides.len());
    for &side in sides {
        let geometry = BoxGeometry::new(alpha.dim(), side, crate::lattice::BoundaryCondition::Periodic)?;
        let a = build_truncation(alpha, &geometry);
        let b = invert_truncation(&a)?;
        rows.push(GrowthRow {
            side,
            size: a.len(),
            inverse_norm: row_sum_norm(&b),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.size as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.inverse_norm.ln()).collect();
    let exponent = crate::stats::least_squares_slope(&xs, &ys).unwrap_or(0.0);
    Ok(GrowthTable { rows, exponent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BoundaryCondition;
    use approx::assert_relative_eq;

    #[test]
    fn site_profiles_combine_into_effective_vector() {
        let plus = SiteProfile::one_dim(&[(0, 2.0)]).unwrap();
        let minus = SiteProfile::one_dim(&[(1, 1.0)]).unwrap();
        let alpha = SiteProfile::combine(&plus, &minus, 0.5).unwrap();
        assert_eq!(alpha.coefficient(&s1(0)), 2.0);
        assert_eq!(alpha.coefficient(&s1(1)), -0.5);
        assert_eq!(alpha.total(), 1.5);
        assert!(SiteProfile::one_dim(&[(0, -1.0)]).is_err());
        assert!(SiteProfile::zero(1).unwrap().is_zero());
        // origin cancelled exactly: no longer a convolution vector
        let p = SiteProfile::one_dim(&[(0, 1.0)]).unwrap();
        assert!(SiteProfile::combine(&p, &p, 1.0).is_err());
        let json = serde_json::to_string(&minus).unwrap();
        assert_eq!(json, r#"{"d":1,"entries":[{"k":[1],"alpha":1.0}]}"#);
        assert_eq!(serde_json::from_str::<SiteProfile>(&json).unwrap(), minus);
    }

    fn s1(k: i64) -> Site {
        Site::new(&[k]).unwrap()
    }

    fn box1(l: usize) -> BoxGeometry {
        BoxGeometry::new(1, l, BoundaryCondition::Periodic).unwrap()
    }

    #[test]
    fn alpha_star_examples() {
        assert_eq!(ConvolutionVector::delta(2).unwrap().alpha_star(), 0.0);
        assert_eq!(ConvolutionVector::step(3).unwrap().alpha_star(), 1.0);
        let a = ConvolutionVector::one_dim(&[(0, 1.0), (1, 0.3), (-2, -0.2)]).unwrap();
        assert_relative_eq!(a.alpha_star(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn rejects_missing_or_zero_alpha0() {
        assert!(ConvolutionVector::one_dim(&[(1, 1.0)]).is_err());
        assert!(ConvolutionVector::one_dim(&[(0, 0.0), (1, 1.0)]).is_err());
        assert!(ConvolutionVector::one_dim(&[(0, f64::NAN)]).is_err());
        assert!(ConvolutionVector::one_dim(&[(0, 1.0), (0, 2.0)]).is_err());
    }

    #[test]
    fn normalize_examples() {
        let (n, s) = ConvolutionVector::one_dim(&[(0, 2.0), (1, -1.0)])
            .unwrap()
            .normalize()
            .unwrap();
        assert_eq!(s, 2.0);
        assert_eq!(n, ConvolutionVector::one_dim(&[(0, 1.0), (1, -0.5)]).unwrap());

        let (n, s) = ConvolutionVector::delta(1).unwrap().normalize().unwrap();
        assert_eq!((n, s), (ConvolutionVector::delta(1).unwrap(), 1.0));

        let (n, s) = ConvolutionVector::one_dim(&[(0, -0.5), (1, 0.25)])
            .unwrap()
            .normalize()
            .unwrap();
        assert_eq!(s, -0.5);
        assert_eq!(n, ConvolutionVector::one_dim(&[(0, 1.0), (1, -0.5)]).unwrap());
    }

    #[test]
    fn extended_sites_examples() {
        let b = box1(3);
        let plus = extended_sites(&b, &[s1(0), s1(1)]);
        assert_eq!(plus, vec![s1(-1), s1(0), s1(1), s1(2)]);
        assert_eq!(extended_sites(&b, &[s1(0)]), b.sites());
    }

    #[test]
    fn extended_sites_two_dim_brute_force() {
        let b = BoxGeometry::new(2, 3, BoundaryCondition::Periodic).unwrap();
        let gamma = [Site::ORIGIN, Site::unit(0)];
        let mut brute = Vec::new();
        for x in -5..5 {
            for y in -5..5 {
                let s = Site::new(&[x, y]).unwrap();
                if gamma.iter().any(|g| b.contains(&(s + *g))) {
                    brute.push(s);
                }
            }
        }
        let plus = extended_sites(&b, &gamma);
        assert_eq!(plus, brute);
        assert_eq!(plus.len(), 12);
        assert!(plus.len() <= 16);
    }

    #[test]
    fn truncation_examples() {
        let a = ConvolutionVector::one_dim(&[(0, 1.0), (1, -1.0)]).unwrap();
        let t = TruncatedToeplitz::on_sites(&a, vec![s1(0), s1(1)]);
        assert_eq!(t.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 1.0]));

        let t = TruncatedToeplitz::on_sites(&a, vec![s1(0), s1(1), s1(2)]);
        let expected = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, -1.0, 1.0]);
        assert_eq!(t.matrix(), &expected);

        let id = build_truncation(&ConvolutionVector::delta(2).unwrap(), &BoxGeometry::new(2, 3, BoundaryCondition::Periodic).unwrap());
        assert_eq!(id.matrix(), &DMatrix::identity(9, 9));
    }

    #[test]
    fn row_sum_examples() {
        assert_eq!(row_sum_norm(&DMatrix::identity(5, 5)), 1.0);
        assert_eq!(row_sum_norm(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 1.0])), 2.0);
        let a = ConvolutionVector::one_dim(&[(0, 1.0), (1, -0.4), (-1, 0.1)]).unwrap();
        let t = build_truncation(&a, &box1(6));
        let interior = t.matrix().row(3).iter().map(|v| v.abs()).sum::<f64>();
        assert_relative_eq!(interior, 1.5, max_relative = 1e-15);
        assert_relative_eq!(row_sum_norm(t.matrix()), 1.5, max_relative = 1e-15);
    }

    #[test]
    fn neumann_bound_examples() {
        assert_eq!(neumann_inverse_bound(&ConvolutionVector::delta(1).unwrap()).unwrap(), 1.0);
        let a = ConvolutionVector::one_dim(&[(0, 1.0), (1, 0.25), (-1, -0.25)]).unwrap();
        assert_relative_eq!(neumann_inverse_bound(&a).unwrap(), 2.0);
        assert!(matches!(
            neumann_inverse_bound(&ConvolutionVector::step(1).unwrap()),
            Err(Error::NotCertifiable { .. })
        ));
        let unnormalized = ConvolutionVector::one_dim(&[(0, 2.0)]).unwrap();
        assert!(neumann_inverse_bound(&unnormalized).is_err());
    }

    #[test]
    fn inverse_examples() {
        let id = TruncatedToeplitz::on_sites(&ConvolutionVector::delta(1).unwrap(), vec![s1(0), s1(1), s1(2)]);
        assert_eq!(invert_truncation(&id).unwrap(), DMatrix::identity(3, 3));

        let a = ConvolutionVector::step(1).unwrap();
        let t = TruncatedToeplitz::on_sites(&a, vec![s1(0), s1(1)]);
        let b = invert_truncation(&t).unwrap();
        assert_eq!(b, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]));

        let t = build_truncation(&a, &box1(5));
        let b = invert_truncation(&t).unwrap();
        let n = t.len();
        let ones = DMatrix::from_fn(n, n, |r, c| if c <= r { 1.0 } else { 0.0 });
        assert!((b - ones).amax() < 1e-12);
    }

    #[test]
    fn singular_truncation_is_reported() {
        // α = δ_0 + δ_1 + δ_2 style vectors can be singular on short intervals;
        // a crafted 2x2 case: α_0 = 1, α_1 = 1, α_{-1} = 1 on two sites gives [[1,1],[1,1]].
        let a = ConvolutionVector::one_dim(&[(0, 1.0), (1, 1.0), (-1, 1.0)]).unwrap();
        let t = TruncatedToeplitz::on_sites(&a, vec![s1(0), s1(1)]);
        assert!(matches!(invert_truncation(&t), Err(Error::SingularTruncation { size: 2 })));
    }

    #[test]
    fn step_inverse_examples() {
        let b = step_inverse_on_sites(&[s1(0), s1(1)]).unwrap();
        assert_eq!(b, DMatrix::from_row_slice(2, 2, &[1, 0, 1, 1]));
        assert_eq!(step_inverse_on_sites(&[s1(4)]).unwrap(), DMatrix::from_element(1, 1, 1));
        assert!(step_inverse_on_sites(&[s1(0), s1(2)]).is_err());

        let geometry = BoxGeometry::new(2, 2, BoundaryCondition::Periodic).unwrap();
        let b = closed_form_step_inverse(&geometry).unwrap();
        let a = build_truncation(&ConvolutionVector::step(2).unwrap(), &geometry)
            .to_integer()
            .unwrap();
        let n = a.nrows();
        assert_eq!(a * b, DMatrix::<i64>::identity(n, n));
    }

    #[test]
    fn column_sum_examples() {
        let id = DMatrix::<f64>::identity(4, 4);
        assert_eq!(column_abs_sum(&id, 2).unwrap(), 1.0);
        assert!(column_abs_sum(&id, 4).is_err());

        let geometry = box1(6);
        let b = closed_form_step_inverse(&geometry).unwrap().map(|v| v as f64);
        assert_eq!(column_abs_sum(&b, 0).unwrap(), b.nrows() as f64);

        let a = ConvolutionVector::one_dim(&[(0, 1.0), (1, -0.3), (-1, 0.2)]).unwrap();
        let b = invert_truncation(&build_truncation(&a, &box1(10))).unwrap();
        for j in 0..b.ncols() {
            assert!(column_abs_sum(&b, j).unwrap() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn growth_probe_examples() {
        let t = norm_growth_probe(&ConvolutionVector::delta(1).unwrap(), &[4, 8, 16]).unwrap();
        assert!(t.rows.iter().all(|r| r.inverse_norm == 1.0));
        assert_eq!(t.exponent, 0.0);

        let t = norm_growth_probe(&ConvolutionVector::step(1).unwrap(), &[4, 8, 16]).unwrap();
        for r in &t.rows {
            assert_relative_eq!(r.inverse_norm, (r.side + 1) as f64, max_relative = 1e-12);
        }
        assert!((t.exponent - 1.0).abs() < 1e-9);

        let a = ConvolutionVector::one_dim(&[(0, 1.0), (1, -0.5)]).unwrap();
        let t = norm_growth_probe(&a, &[4, 8, 16, 32]).unwrap();
        assert!(t.rows.iter().all(|r| r.inverse_norm <= 2.0 + 1e-12));
        assert!(t.exponent.abs() < 0.1);
    }

    #[test]
    fn json_roundtrip_and_schema_errors() {
        let a = ConvolutionVector::new(2, [(Site::ORIGIN, 1.0), (Site::new(&[0, -1]).unwrap(), 0.25)]).unwrap();
        let back = ConvolutionVector::from_json(&a.to_json()).unwrap();
        assert_eq!(a, back);
        let parsed = ConvolutionVector::from_json(r#"{"d":1,"entries":[{"k":[0],"alpha":1.0},{"k":[1],"alpha":-1.0}]}"#).unwrap();
        assert_eq!(parsed, ConvolutionVector::step(1).unwrap());
        assert!(ConvolutionVector::from_json(r#"{"d":1,"entries":[{"k":[0,1],"alpha":1.0}]}"#).is_err());
        assert!(ConvolutionVector::from_json(r#"{"d":1,"entries":[{"k":[0],"alpha":0.0}]}"#).is_err());
    }
}
