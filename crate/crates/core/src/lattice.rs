//! Integer lattice sites and finite boxes `{0, …, l-1}^d`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 3;

/// A point of `Z^d` for `d <= 3`. Unused trailing coordinates are zero, so the
/// derived ordering is lexicographic on the meaningful coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Site([i64; MAX_DIM]);

impl Site {
    pub const ORIGIN: Site = Site([0; MAX_DIM]);

    /// Builds a site from at most [`MAX_DIM`] coordinates.
    pub fn new(coords: &[i64]) -> Result<Self> {
        if coords.len() > MAX_DIM {
            return Err(Error::InvalidGeometry(format!(
                "site has {} coordinates, at most {MAX_DIM} supported",
                coords.len()
            )));
        }
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Site(c))
    }

    /// Unit vector along `axis`.
    pub fn unit(axis: usize) -> Self {
        let mut c = [0; MAX_DIM];
        c[axis] = 1;
        Site(c)
    }

    pub fn coord(&self, axis: usize) -> i64 {
        self.0[axis]
    }

    pub fn with_coord(&self, axis: usize, value: i64) -> Site {
        let mut c = self.0;
        c[axis] = value;
        Site(c)
    }

    pub fn coords(&self, dim: usize) -> &[i64] {
        &self.0[..dim]
    }

    pub fn is_origin(&self) -> bool {
        self.0 == [0; MAX_DIM]
    }

    /// Checks that every coordinate beyond `dim` is zero.
    pub fn fits_dim(&self, dim: usize) -> bool {
        self.0[dim..].iter().all(|&c| c == 0)
    }

    /// Max-norm distance.
    pub fn sup_distance(&self, other: &Site) -> i64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or(0)
    }

    /// Packs the coordinates into a single word (21 zig-zag bits per axis).
    /// Injective for coordinates in `(-2^20, 2^20)`.
    pub fn packed(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &c| {
            let zz = ((c << 1) ^ (c >> 63)) as u64;
            (acc << 21) | (zz & ((1 << 21) - 1))
        })
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl Add for Site {
    type Output = Site;
    fn add(self, rhs: Site) -> Site {
        Site(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Site {
    type Output = Site;
    fn sub(self, rhs: Site) -> Site {
        Site(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for Site {
    type Output = Site;
    fn neg(self) -> Site {
        Site(self.0.map(|c| -c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Periodic,
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryCondition::Periodic => "periodic",
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The box `{0, …, l-1}^d` with a boundary condition for the kinetic term.
/// Sites are enumerated in lexicographic order, first coordinate most
/// significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoxGeometry {
    dim: usize,
    side: usize,
    bc: BoundaryCondition,
}

impl BoxGeometry {
    pub fn new(dim: usize, side: usize, bc: BoundaryCondition) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGeometry(format!(
                "dimension {dim} not in 1..={MAX_DIM}"
            )));
        }
        if side == 0 {
            return Err(Error::InvalidGeometry("side length must be >= 1".into()));
        }
        if side >= 1 << 20 {
            return Err(Error::InvalidGeometry(format!("side length {side} too large")));
        }
        Ok(BoxGeometry { dim, side, bc })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn with_bc(&self, bc: BoundaryCondition) -> Self {
        BoxGeometry { bc, ..*self }
    }

    /// `l^d`.
    pub fn volume(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn contains(&self, site: &Site) -> bool {
        site.fits_dim(self.dim)
            && site.coords(self.dim).iter().all(|&c| c >= 0 && (c as usize) < self.side)
    }

    /// Lexicographic index of `site`, if it lies in the box.
    pub fn index_of(&self, site: &Site) -> Option<usize> {
        if !self.contains(site) {
            return None;
        }
        Some(
            site.coords(self.dim)
                .iter()
                .fold(0usize, |acc, &c| acc * self.side + c as usize),
        )
    }

    pub fn site_at(&self, mut index: usize) -> Site {
        let mut c = [0i64; MAX_DIM];
        for axis in (0..self.dim).rev() {
            c[axis] = (index % self.side) as i64;
            index /= self.side;
        }
        Site(c)
    }

    /// All sites of the box in lexicographic order.
    pub fn sites(&self) -> Vec<Site> {
        (0..self.volume()).map(|i| self.site_at(i)).collect()
    }

    /// Neighbours of site `index` along each axis and direction, resolved
    /// under the boundary condition. Periodic wrapping may repeat a neighbour
    /// (side 2) or return the site itself (side 1); Dirichlet and Neumann
    /// drop neighbours outside the box.
    pub fn neighbors(&self, index: usize) -> Vec<usize> {
        let site = self.site_at(index);
        let l = self.side as i64;
        let mut out = Vec::with_capacity(2 * self.dim);
        for axis in 0..self.dim {
            for step in [-1i64, 1] {
                let mut c = site.0;
                c[axis] += step;
                match self.bc {
                    BoundaryCondition::Periodic => {
                        c[axis] = c[axis].rem_euclid(l);
                        out.push(self.index_of(&Site(c)).expect("wrapped site in box"));
                    }
                    BoundaryCondition::Dirichlet | BoundaryCondition::Neumann => {
                        if let Some(j) = self.index_of(&Site(c)) {
                            out.push(j);
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip_and_order() {
        let b = BoxGeometry::new(3, 4, BoundaryCondition::Periodic).unwrap();
        let sites = b.sites();
        assert_eq!(sites.len(), 64);
        for (i, s) in sites.iter().enumerate() {
            assert_eq!(b.index_of(s), Some(i));
        }
        assert!(sites.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn neighbor_counts() {
        let per = BoxGeometry::new(2, 3, BoundaryCondition::Periodic).unwrap();
        let neu = per.with_bc(BoundaryCondition::Neumann);
        assert_eq!(per.neighbors(0).len(), 4);
        assert_eq!(neu.neighbors(0).len(), 2);
        assert_eq!(neu.neighbors(4).len(), 4);
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(BoxGeometry::new(0, 3, BoundaryCondition::Periodic).is_err());
        assert!(BoxGeometry::new(4, 3, BoundaryCondition::Periodic).is_err());
        assert!(Site::new(&[1, 2, 3, 4]).is_err());
    }

    #[test]
    fn packed_is_injective_on_small_coords() {
        let mut seen = std::collections::HashSet::new();
        for x in -3..=3 {
            for y in -3..=3 {
                assert!(seen.insert(Site::new(&[x, y]).unwrap().packed()));
            }
        }
    }
}
