//! Boxes, uniform cell grids and cell-sampled functions.
//!
//! A grid function is interpreted as piecewise constant on closed cells, so
//! every integral over the domain is a weighted sum and every superlevel set
//! is a union of cells.

use crate::error::{Error, Result};
use crate::real::{count, Real};

/// Maximum dimension supported by the grid code.
pub const MAX_DIM: usize = 3;

/// An axis-aligned box in R^N, N ∈ {1, 2, 3}, split into a uniform cell grid.
///
/// Cells are stored row-major: the last axis varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain<T> {
    dim: usize,
    lower: [T; MAX_DIM],
    upper: [T; MAX_DIM],
    cells: [usize; MAX_DIM],
    spacing: [T; MAX_DIM],
}

impl<T: Real> Domain<T> {
    pub const DEFAULT_CELL_CAP: usize = 1 << 20;

    pub fn new(lower: &[T], upper: &[T], cells: &[usize]) -> Result<Self> {
        Self::with_cap(lower, upper, cells, Self::DEFAULT_CELL_CAP)
    }

    pub fn with_cap(lower: &[T], upper: &[T], cells: &[usize], cap: usize) -> Result<Self> {
        let dim = lower.len();
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidDomain(format!("dimension {dim} not in 1..=3")));
        }
        if upper.len() != dim || cells.len() != dim {
            return Err(Error::InvalidDomain("axis counts disagree".into()));
        }
        let mut dom = Domain {
            dim,
            lower: [T::zero(); MAX_DIM],
            upper: [T::one(); MAX_DIM],
            cells: [1; MAX_DIM],
            spacing: [T::one(); MAX_DIM],
        };
        let mut total: usize = 1;
        for a in 0..dim {
            if !(lower[a].is_finite() && upper[a].is_finite()) || upper[a] <= lower[a] {
                return Err(Error::InvalidDomain(format!("axis {a}: need lower < upper")));
            }
            if cells[a] == 0 {
                return Err(Error::InvalidDomain(format!("axis {a}: zero cells")));
            }
            total = total.saturating_mul(cells[a]);
            dom.lower[a] = lower[a];
            dom.upper[a] = upper[a];
            dom.cells[a] = cells[a];
            dom.spacing[a] = (upper[a] - lower[a]) / count::<T>(cells[a]);
            if dom.spacing[a] <= T::zero() {
                return Err(Error::InvalidDomain(format!("axis {a}: degenerate spacing")));
            }
        }
        if total > cap {
            return Err(Error::CellCap { cells: total, cap });
        }
        Ok(dom)
    }

    /// The box `[lo, hi]^dim` with `m` cells per axis.
    pub fn cube(dim: usize, lo: T, hi: T, m: usize) -> Result<Self> {
        let lower = vec![lo; dim];
        let upper = vec![hi; dim];
        let cells = vec![m; dim];
        Self::new(&lower, &upper, &cells)
    }

    /// The unit box `[0, 1]^dim`, the canonical Ω.
    pub fn unit_box(dim: usize, m: usize) -> Result<Self> {
        Self::cube(dim, T::zero(), T::one(), m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> &[T] {
        &self.lower[..self.dim]
    }

    pub fn upper(&self) -> &[T] {
        &self.upper[..self.dim]
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells[..self.dim]
    }

    pub fn spacing(&self) -> &[T] {
        &self.spacing[..self.dim]
    }

    pub fn min_spacing(&self) -> T {
        self.spacing().iter().copied().fold(T::infinity(), T::min)
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_axis().iter().product()
    }

    pub fn cell_measure(&self) -> T {
        self.spacing().iter().copied().fold(T::one(), |a, b| a * b)
    }

    /// Lebesgue measure |Ω|.
    pub fn volume(&self) -> T {
        (0..self.dim).fold(T::one(), |acc, a| acc * (self.upper[a] - self.lower[a]))
    }

    /// Diameter of the box.
    pub fn diameter(&self) -> T {
        (0..self.dim)
            .map(|a| {
                let d = self.upper[a] - self.lower[a];
                d * d
            })
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Largest distance between two cell centres.
    pub fn center_diameter(&self) -> T {
        (0..self.dim)
            .map(|a| {
                let d = self.spacing[a] * count::<T>(self.cells[a] - 1);
                d * d
            })
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    #[inline]
    pub fn flat_index(&self, multi: &[usize; MAX_DIM]) -> usize {
        let mut idx = 0;
        for a in 0..self.dim {
            idx = idx * self.cells[a] + multi[a];
        }
        idx
    }

    #[inline]
    pub fn multi_index(&self, mut idx: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        for a in (0..self.dim).rev() {
            out[a] = idx % self.cells[a];
            idx /= self.cells[a];
        }
        out
    }

    /// Centre of a cell given its multi-index.
    #[inline]
    pub fn center_of(&self, multi: &[usize; MAX_DIM]) -> [T; MAX_DIM] {
        let half = T::from_f64(0.5).unwrap();
        let mut c = [T::zero(); MAX_DIM];
        for a in 0..self.dim {
            c[a] = self.lower[a] + (count::<T>(multi[a]) + half) * self.spacing[a];
        }
        c
    }

    pub fn center(&self, idx: usize) -> [T; MAX_DIM] {
        self.center_of(&self.multi_index(idx))
    }

    /// Closed extent `(lo, hi)` of a cell.
    pub fn cell_bounds(&self, idx: usize) -> ([T; MAX_DIM], [T; MAX_DIM]) {
        let m = self.multi_index(idx);
        let mut lo = [T::zero(); MAX_DIM];
        let mut hi = [T::zero(); MAX_DIM];
        for a in 0..self.dim {
            lo[a] = self.lower[a] + count::<T>(m[a]) * self.spacing[a];
            hi[a] = lo[a] + self.spacing[a];
        }
        (lo, hi)
    }

    pub fn contains_point(&self, x: &[T]) -> bool {
        x.len() == self.dim && (0..self.dim).all(|a| x[a] >= self.lower[a] && x[a] <= self.upper[a])
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self == other
    }
}

/// Real values sampled at cell centres of a [`Domain`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T> {
    domain: Domain<T>,
    values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(domain: Domain<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != domain.cell_count() {
            return Err(Error::InvalidDomain(format!(
                "expected {} values, got {}",
                domain.cell_count(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(GridFunction { domain, values })
    }

    pub fn zeros(domain: Domain<T>) -> Self {
        let n = domain.cell_count();
        GridFunction {
            domain,
            values: vec![T::zero(); n],
        }
    }

    /// Samples `f` at every cell centre.
    pub fn from_fn<F>(domain: Domain<T>, f: F) -> Result<Self>
    where
        F: Fn(&[T]) -> T,
    {
        let dim = domain.dim();
        let values = (0..domain.cell_count())
            .map(|i| {
                let c = domain.center(i);
                f(&c[..dim])
            })
            .collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn cell_measure(&self) -> T {
        self.domain.cell_measure()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.domain.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn abs(&self) -> Self {
        GridFunction {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        GridFunction {
            domain: self.domain.clone(),
            values: self.values.iter().map(|&v| v * s).collect(),
        }
    }

    /// Linear combination `a·self + b·other` on a shared grid.
    pub fn axpby(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if !self.domain.same_grid(&other.domain) {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Self::new(self.domain.clone(), values)
    }

    /// Cellwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !self.domain.same_grid(&other.domain) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| x * y).collect();
        Self::new(self.domain.clone(), values)
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn l1_norm(&self) -> T {
        self.values.iter().map(|v| v.abs()).sum::<T>() * self.cell_measure()
    }

    /// `(∫|f|^s)^{1/s}` for finite `s ≥ 1`.
    pub fn lebesgue_norm(&self, s: T) -> T {
        let sum: T = self.values.iter().map(|v| v.abs().powf(s)).sum();
        (sum * self.cell_measure()).powf(s.recip())
    }

    /// Measure of the support.
    pub fn support_measure(&self) -> T {
        count::<T>(self.values.iter().filter(|v| !v.is_zero()).count()) * self.cell_measure()
    }
}

/// A set of grid cells, stored as sorted flat indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CellSet<T> {
    domain: Domain<T>,
    members: Vec<usize>,
}

impl<T: Real> CellSet<T> {
    /// Builds a set from arbitrary indices; out-of-range indices are rejected.
    pub fn new(domain: Domain<T>, mut members: Vec<usize>) -> Result<Self> {
        let n = domain.cell_count();
        if let Some(&bad) = members.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidDomain(format!("cell index {bad} out of range")));
        }
        members.sort_unstable();
        members.dedup();
        Ok(CellSet { domain, members })
    }

    pub fn empty(domain: Domain<T>) -> Self {
        CellSet {
            domain,
            members: Vec::new(),
        }
    }

    pub fn full(domain: Domain<T>) -> Self {
        let members = (0..domain.cell_count()).collect();
        CellSet { domain, members }
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.members.binary_search(&idx).is_ok()
    }

    pub fn measure(&self) -> T {
        count::<T>(self.members.len()) * self.domain.cell_measure()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.members.iter().all(|&i| other.contains(i))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if !self.domain.same_grid(&other.domain) {
            return Err(Error::GridMismatch);
        }
        let mut m = self.members.clone();
        m.extend_from_slice(&other.members);
        Self::new(self.domain.clone(), m)
    }
}

/// Cells where `|f| > t`.
///
/// A negative threshold selects every cell.
pub fn level_set<T: Real>(f: &GridFunction<T>, t: T) -> CellSet<T> {
    let members = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > t)
        .map(|(i, _)| i)
        .collect();
    CellSet {
        domain: f.domain().clone(),
        members,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square(m: usize) -> Domain<f64> {
        Domain::cube(2, -1.0, 1.0, m).unwrap()
    }

    #[test]
    fn domain_geometry() {
        let d = square(4);
        assert_eq!(d.cell_count(), 16);
        assert_eq!(d.cell_measure(), 0.25);
        assert_eq!(d.volume(), 4.0);
        assert_eq!(d.center(0)[..2], [-0.75, -0.75]);
        assert_eq!(d.center(1)[..2], [-0.75, -0.25]);
        for i in 0..16 {
            assert_eq!(d.flat_index(&d.multi_index(i)), i);
        }
    }

    #[test]
    fn domain_rejections() {
        assert!(Domain::<f64>::new(&[0.0], &[0.0], &[4]).is_err());
        assert!(Domain::<f64>::new(&[0.0; 4], &[1.0; 4], &[2; 4]).is_err());
        assert!(Domain::<f64>::new(&[0.0, 0.0], &[1.0, 1.0], &[0, 3]).is_err());
        assert!(matches!(
            Domain::<f64>::new(&[0.0, 0.0], &[1.0, 1.0], &[2048, 1024]),
            Err(Error::CellCap { .. })
        ));
    }

    #[test]
    fn non_finite_rejected() {
        let d = square(2);
        assert!(matches!(
            GridFunction::new(d, vec![0.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinite(1))
        ));
    }

    #[test]
    fn level_set_of_zero_is_empty() {
        let f = GridFunction::zeros(square(8));
        assert!(level_set(&f, 1.0).is_empty());
    }

    #[test]
    fn level_set_of_two_level_indicator() {
        let f = GridFunction::from_fn(square(32), |x| {
            if x[0] * x[0] + x[1] * x[1] <= 0.25 {
                2.0
            } else {
                0.0
            }
        })
        .unwrap();
        let ball: Vec<usize> = (0..f.len()).filter(|&i| f.values()[i] == 2.0).collect();
        assert!(!ball.is_empty());
        assert_eq!(level_set(&f, 1.0).members(), &ball[..]);
        assert!(level_set(&f, 3.0).is_empty());
    }

    #[test]
    fn level_set_at_zero_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = square(16);
        let vals: Vec<f64> = (0..256)
            .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(-1.0..1.0) })
            .collect();
        let f = GridFunction::new(d, vals.clone()).unwrap();
        let s = level_set(&f, 0.0);
        let brute = vals.iter().filter(|v| **v != 0.0).count();
        assert_eq!(s.len(), brute);
        assert_eq!(s.measure(), brute as f64 * f.cell_measure());
    }

    #[test]
    fn level_sets_are_nested() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = square(16);
        let f = GridFunction::new(d, (0..256).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
        for k in 0..20 {
            let t1 = 0.1 * k as f64;
            let t2 = t1 + 0.05;
            assert!(level_set(&f, t2).is_subset(&level_set(&f, t1)));
        }
    }
}
