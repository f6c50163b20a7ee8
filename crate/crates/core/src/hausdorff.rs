//! Upper bounds for the Hausdorff content `H^β_∞` of cell sets, the
//! weak-type estimate for fractional maximal functions, and Choquet
//! integrals against the content.
//!
//! Candidate covers come from a dyadic tree over the cell grid. Every tree
//! block can be covered by the ball circumscribing it; a block's cost is the
//! cheaper of that ball and the sum of its children's costs, which yields
//! the best cover within the dyadic family. The uniform covers (every
//! occupied block of one level) and the minimal ball enclosing the whole set
//! are tracked as well, and the estimate is the cheapest of all candidates.
//! Insertion updates one root-to-leaf path, so nested sets (level sets at
//! decreasing thresholds) are handled incrementally.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{window, Result};
use crate::grid::{CellSet, Domain, GridFunction, MAX_DIM};
use crate::potentials::{default_radii, fractional_maximal};
use crate::real::{count, lit, log_space, to_f64, Real};
use crate::report::Report;
use crate::special::unit_ball_volume;

// block balls are inflated so rounding never leaves a corner outside
const INFLATE: f64 = 1e-12;
const SHUFFLE_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ball<T> {
    pub center: Vec<T>,
    pub radius: T,
}

impl<T: Real> Ball<T> {
    fn contains(&self, p: &[T]) -> bool {
        dist(&self.center, p) <= self.radius
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverKind {
    Empty,
    /// Every occupied block of one dyadic level.
    Level { level: usize },
    /// Best mixture of dyadic blocks.
    Dyadic,
    /// A single ball around the whole set.
    Enclosing,
}

/// A ball cover of a cell set with its content `Σ ω_β r_i^β`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverEstimate<T> {
    pub beta: T,
    pub kind: CoverKind,
    pub balls: Vec<Ball<T>>,
    pub value: T,
}

impl<T: Real> CoverEstimate<T> {
    /// True when every corner of every member cell lies in some ball, so the
    /// balls cover the closed cells.
    pub fn covers(&self, set: &CellSet<T>) -> bool {
        let d = set.domain();
        set.members().iter().all(|&idx| {
            let corners = cell_corners(d, idx);
            self.balls
                .iter()
                .any(|b| corners.iter().all(|c| b.contains(&c[..d.dim()])))
        })
    }
}

fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .fold(T::zero(), |s, v| s + v)
        .sqrt()
}

fn cell_corners<T: Real>(d: &Domain<T>, idx: usize) -> Vec<[T; MAX_DIM]> {
    let (lo, hi) = d.cell_bounds(idx);
    (0..1usize << d.dim())
        .map(|mask| {
            let mut c = [T::zero(); MAX_DIM];
            for a in 0..d.dim() {
                c[a] = if mask >> a & 1 == 1 { hi[a] } else { lo[a] };
            }
            c
        })
        .collect()
}

struct Level<T> {
    shape: [usize; MAX_DIM],
    ball: Vec<T>,
    dp: Vec<T>,
    occupied: Vec<bool>,
    occupied_cost: T,
}

/// Incremental content estimator for a growing cell set.
pub struct ContentEstimator<T> {
    domain: Domain<T>,
    beta: T,
    omega_beta: T,
    levels: Vec<Level<T>>,
    members: Vec<bool>,
    size: usize,
    /// Per line along the last axis: smallest and largest occupied index.
    lines: Vec<Option<(usize, usize)>>,
    enclosing: Option<Ball<T>>,
    enclosing_stale: bool,
}

impl<T: Real> ContentEstimator<T> {
    pub fn new(domain: &Domain<T>, beta: T) -> Result<Self> {
        if !(beta > T::zero() && beta <= count::<T>(domain.dim())) {
            return Err(window("beta", to_f64(beta), "(0, N]"));
        }
        let omega_beta = unit_ball_volume(beta);
        let mut m = [1usize; MAX_DIM];
        m[..domain.dim()].copy_from_slice(domain.cells_per_axis());
        let mut levels = Vec::new();
        let mut k = 0;
        loop {
            let side = 1usize << k;
            let shape = [m[0].div_ceil(side), m[1].div_ceil(side), m[2].div_ceil(side)];
            let n = shape[0] * shape[1] * shape[2];
            let mut ball = Vec::with_capacity(n);
            for node in 0..n {
                let r = block_ball(domain, &m, k, &shape, node).radius;
                ball.push(omega_beta * r.powf(beta));
            }
            levels.push(Level {
                shape,
                ball,
                dp: vec![T::zero(); n],
                occupied: vec![false; n],
                occupied_cost: T::zero(),
            });
            if n == 1 {
                break;
            }
            k += 1;
        }
        let line_count = domain.cell_count() / m[domain.dim() - 1];
        Ok(ContentEstimator {
            domain: domain.clone(),
            beta,
            omega_beta,
            levels,
            members: vec![false; domain.cell_count()],
            size: 0,
            lines: vec![None; line_count],
            enclosing: None,
            enclosing_stale: false,
        })
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Adds a cell; inserting a member twice is a no-op.
    pub fn insert(&mut self, idx: usize) {
        if self.members[idx] {
            return;
        }
        self.members[idx] = true;
        self.size += 1;
        let d = &self.domain;
        let multi = d.multi_index(idx);

        let last = d.dim() - 1;
        let line = idx / d.cells_per_axis()[last];
        let pos = multi[last];
        self.lines[line] = Some(match self.lines[line] {
            None => (pos, pos),
            Some((lo, hi)) => (lo.min(pos), hi.max(pos)),
        });
        if let Some(b) = &self.enclosing {
            let inside = cell_corners(d, idx).iter().all(|c| b.contains(&c[..d.dim()]));
            if !inside {
                self.enclosing_stale = true;
            }
        } else {
            self.enclosing_stale = true;
        }

        let mut node_multi = multi;
        for k in 0..self.levels.len() {
            let node = flat(&self.levels[k].shape, &node_multi);
            let level = &mut self.levels[k];
            if !level.occupied[node] {
                level.occupied[node] = true;
                level.occupied_cost = level.occupied_cost + level.ball[node];
            }
            let dp = if k == 0 {
                level.ball[node]
            } else {
                let children = self.children_dp(k, &node_multi);
                self.levels[k].ball[node].min(children)
            };
            self.levels[k].dp[node] = dp;
            for a in node_multi.iter_mut() {
                *a /= 2;
            }
        }
    }

    pub fn insert_set(&mut self, set: &CellSet<T>) {
        for &i in set.members() {
            self.insert(i);
        }
    }

    fn children_dp(&self, k: usize, node: &[usize; MAX_DIM]) -> T {
        let below = &self.levels[k - 1];
        let mut sum = T::zero();
        for mask in 0..1usize << MAX_DIM {
            let mut c = [0; MAX_DIM];
            let mut ok = true;
            for a in 0..MAX_DIM {
                c[a] = 2 * node[a] + (mask >> a & 1);
                if c[a] >= below.shape[a] {
                    ok = false;
                }
            }
            if ok {
                sum = sum + below.dp[flat(&below.shape, &c)];
            }
        }
        sum
    }

    fn refresh_enclosing(&mut self) {
        if !self.enclosing_stale {
            return;
        }
        self.enclosing_stale = false;
        if self.size == 0 {
            self.enclosing = None;
            return;
        }
        let d = &self.domain;
        let last = d.dim() - 1;
        let m_last = d.cells_per_axis()[last];
        let mut points: Vec<[T; MAX_DIM]> = Vec::new();
        for (line, ext) in self.lines.iter().enumerate() {
            if let Some((lo, hi)) = ext {
                points.extend(cell_corners(d, line * m_last + lo));
                if hi != lo {
                    points.extend(cell_corners(d, line * m_last + hi));
                }
            }
        }
        self.enclosing = Some(enclosing_ball(&points, d.dim()));
    }

    fn root_dp(&self) -> T {
        self.levels.last().unwrap().dp[0]
    }

    fn candidates(&mut self) -> (CoverKind, T) {
        if self.size == 0 {
            return (CoverKind::Empty, T::zero());
        }
        self.refresh_enclosing();
        let mut best = (CoverKind::Level { level: 0 }, self.levels[0].occupied_cost);
        for (k, level) in self.levels.iter().enumerate().skip(1) {
            if level.occupied_cost < best.1 {
                best = (CoverKind::Level { level: k }, level.occupied_cost);
            }
        }
        if self.root_dp() < best.1 {
            best = (CoverKind::Dyadic, self.root_dp());
        }
        let enc = self.enclosing.as_ref().unwrap();
        let enc_cost = self.omega_beta * enc.radius.powf(self.beta);
        if enc_cost < best.1 {
            best = (CoverKind::Enclosing, enc_cost);
        }
        best
    }

    /// Content upper bound of the current set.
    pub fn value(&mut self) -> T {
        self.candidates().1
    }

    /// The cheapest dyadic-family value, which is subadditive and monotone.
    pub fn dyadic_value(&self) -> T {
        if self.size == 0 {
            T::zero()
        } else {
            self.root_dp()
        }
    }

    /// Cost of the minimal enclosing ball alone.
    pub fn enclosing_value(&mut self) -> T {
        self.refresh_enclosing();
        self.enclosing
            .as_ref()
            .map(|b| self.omega_beta * b.radius.powf(self.beta))
            .unwrap_or(T::zero())
    }

    /// The winning cover with its balls.
    pub fn estimate(&mut self) -> CoverEstimate<T> {
        let (kind, value) = self.candidates();
        let balls = match kind {
            CoverKind::Empty => Vec::new(),
            CoverKind::Enclosing => vec![self.enclosing.clone().unwrap()],
            CoverKind::Level { level } => {
                let l = &self.levels[level];
                (0..l.occupied.len())
                    .filter(|&n| l.occupied[n])
                    .map(|n| self.node_ball(level, n))
                    .collect()
            }
            CoverKind::Dyadic => {
                let mut out = Vec::new();
                self.collect_dyadic(self.levels.len() - 1, [0; MAX_DIM], &mut out);
                out
            }
        };
        CoverEstimate {
            beta: self.beta,
            kind,
            balls,
            value,
        }
    }

    fn node_ball(&self, k: usize, node: usize) -> Ball<T> {
        let mut m = [1usize; MAX_DIM];
        m[..self.domain.dim()].copy_from_slice(self.domain.cells_per_axis());
        block_ball(&self.domain, &m, k, &self.levels[k].shape, node)
    }

    fn collect_dyadic(&self, k: usize, node: [usize; MAX_DIM], out: &mut Vec<Ball<T>>) {
        let level = &self.levels[k];
        let n = flat(&level.shape, &node);
        if !level.occupied[n] {
            return;
        }
        if k == 0 || level.dp[n] >= level.ball[n] {
            out.push(self.node_ball(k, n));
            return;
        }
        let below = &self.levels[k - 1];
        for mask in 0..1usize << MAX_DIM {
            let mut c = [0; MAX_DIM];
            let mut ok = true;
            for a in 0..MAX_DIM {
                c[a] = 2 * node[a] + (mask >> a & 1);
                ok &= c[a] < below.shape[a];
            }
            if ok {
                self.collect_dyadic(k - 1, c, out);
            }
        }
    }
}

#[inline]
fn flat(shape: &[usize; MAX_DIM], m: &[usize; MAX_DIM]) -> usize {
    (m[0] * shape[1] + m[1]) * shape[2] + m[2]
}

/// Ball circumscribing the block of level `k` (side `2^k` cells, clipped to
/// the grid) with flat index `node`.
fn block_ball<T: Real>(d: &Domain<T>, m: &[usize; MAX_DIM], k: usize, shape: &[usize; MAX_DIM], node: usize) -> Ball<T> {
    let nm = [node / (shape[1] * shape[2]), (node / shape[2]) % shape[1], node % shape[2]];
    let side = 1usize << k;
    let mut center = Vec::with_capacity(d.dim());
    let mut r2 = T::zero();
    for a in 0..d.dim() {
        let i0 = nm[a] * side;
        let i1 = ((nm[a] + 1) * side).min(m[a]);
        let h = d.spacing()[a];
        let lo = d.lower()[a] + count::<T>(i0) * h;
        let hi = d.lower()[a] + count::<T>(i1) * h;
        center.push((lo + hi) * lit::<T>(0.5));
        let half = (hi - lo) * lit::<T>(0.5);
        r2 = r2 + half * half;
    }
    Ball {
        center,
        radius: r2.sqrt() * (T::one() + lit::<T>(INFLATE)),
    }
}

/// Smallest ball through the support points, in their affine hull.
fn circumball<T: Real>(support: &[[T; MAX_DIM]], dim: usize) -> Option<Ball<T>> {
    let p0 = support[0];
    let k = support.len() - 1;
    if k == 0 {
        return Some(Ball {
            center: p0[..dim].to_vec(),
            radius: T::zero(),
        });
    }
    // centre = p0 + Σ λ_j v_j with 2 v_i·v_j λ_j = |v_i|²
    let v: Vec<Vec<T>> = support[1..]
        .iter()
        .map(|p| (0..dim).map(|a| p[a] - p0[a]).collect())
        .collect();
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y);
    let mut mat: Vec<Vec<T>> = (0..k)
        .map(|i| {
            let mut row: Vec<T> = (0..k).map(|j| lit::<T>(2.0) * dot(&v[i], &v[j])).collect();
            row.push(dot(&v[i], &v[i]));
            row
        })
        .collect();
    let scale = mat.iter().flatten().fold(T::zero(), |s, x| s.max(x.abs()));
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| mat[a][col].abs().partial_cmp(&mat[b][col].abs()).unwrap())?;
        if mat[piv][col].abs() <= scale * lit::<T>(1e-12) {
            return None;
        }
        mat.swap(col, piv);
        for row in 0..k {
            if row != col {
                let f = mat[row][col] / mat[col][col];
                for c in col..=k {
                    let sub = f * mat[col][c];
                    mat[row][c] = mat[row][c] - sub;
                }
            }
        }
    }
    let mut center: Vec<T> = p0[..dim].to_vec();
    for j in 0..k {
        let lambda = mat[j][k] / mat[j][j];
        for a in 0..dim {
            center[a] = center[a] + lambda * v[j][a];
        }
    }
    let radius = dist(&center, &p0[..dim]);
    Some(Ball { center, radius })
}

/// Ball for a support set; degenerate (affinely dependent) sets fall back to
/// the ball on their farthest pair, widened to hold every support point.
fn support_ball<T: Real>(support: &[[T; MAX_DIM]], dim: usize) -> Ball<T> {
    if let Some(b) = circumball(support, dim) {
        return b;
    }
    let mut best = (0, 0, T::zero());
    for i in 0..support.len() {
        for j in i + 1..support.len() {
            let dij = dist(&support[i][..dim], &support[j][..dim]);
            if dij > best.2 {
                best = (i, j, dij);
            }
        }
    }
    let center: Vec<T> = (0..dim)
        .map(|a| (support[best.0][a] + support[best.1][a]) * lit::<T>(0.5))
        .collect();
    let radius = support
        .iter()
        .map(|p| dist(&center, &p[..dim]))
        .fold(T::zero(), T::max);
    Ball { center, radius }
}

fn welzl<T: Real>(points: &[[T; MAX_DIM]], n: usize, support: &mut Vec<[T; MAX_DIM]>, dim: usize) -> Ball<T> {
    let mut ball = if support.is_empty() {
        Ball {
            center: points[0][..dim].to_vec(),
            radius: T::zero(),
        }
    } else {
        support_ball(support, dim)
    };
    if support.len() == dim + 1 {
        return ball;
    }
    let slack = T::one() + lit::<T>(1e-12);
    for i in 0..n {
        if dist(&ball.center, &points[i][..dim]) > ball.radius * slack {
            support.push(points[i]);
            ball = welzl(points, i, support, dim);
            support.pop();
        }
    }
    ball
}

/// Minimal enclosing ball (Welzl's algorithm on a fixed-seed shuffle). The
/// returned radius is the exact largest distance from the centre, so the
/// ball always contains every point.
fn enclosing_ball<T: Real>(points: &[[T; MAX_DIM]], dim: usize) -> Ball<T> {
    let mut pts = points.to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(SHUFFLE_SEED));
    let mut ball = welzl(&pts, pts.len(), &mut Vec::new(), dim);
    if ball.center.iter().any(|c| !c.is_finite()) {
        // bounding-box centre as a last resort
        ball.center = (0..dim)
            .map(|a| {
                let lo = pts.iter().map(|p| p[a]).fold(T::infinity(), T::min);
                let hi = pts.iter().map(|p| p[a]).fold(T::neg_infinity(), T::max);
                (lo + hi) * lit::<T>(0.5)
            })
            .collect();
    }
    ball.radius = pts
        .iter()
        .map(|p| dist(&ball.center, &p[..dim]))
        .fold(T::zero(), T::max);
    ball
}

/// Certified upper bound for `H^β_∞(set)`.
pub fn content_upper<T: Real>(set: &CellSet<T>, beta: T) -> Result<CoverEstimate<T>> {
    let mut est = ContentEstimator::new(set.domain(), beta)?;
    est.insert_set(set);
    Ok(est.estimate())
}

/// `ω_{N-γ} 5^{N-γ} / |B(0,1)|`.
pub fn fkr_constant<T: Real>(dim: usize, gamma: T) -> T {
    let n = count::<T>(dim);
    unit_ball_volume(n - gamma) * lit::<T>(5.0).powf(n - gamma) / unit_ball_volume(n)
}

/// Checks `H^{N-γ}_∞({M_γ f > t}) <= C₅ ‖f‖₁ / t` at every `t` of `ts`
/// (default: 64 log-spaced points spanning the range of `M_γ f`).
pub fn weak_type_check<T: Real>(f: &GridFunction<T>, gamma: T, ts: Option<&[T]>) -> Result<Report> {
    let d = f.domain();
    let n = count::<T>(d.dim());
    if !(gamma >= T::zero() && gamma < n) {
        return Err(window("gamma", to_f64(gamma), "[0, N)"));
    }
    let min = f.values().iter().copied().fold(T::infinity(), T::min);
    if min < T::zero() {
        return Err(window("min f", to_f64(min), "[0, inf)"));
    }
    let maximal = fractional_maximal(f, gamma, &default_radii(d))?;
    let c5 = fkr_constant(d.dim(), gamma);
    let mass = f.l1_norm();
    let mut ts: Vec<T> = match ts {
        Some(ts) => ts.to_vec(),
        None => {
            let lo = maximal.values().iter().copied().fold(T::infinity(), T::min);
            let hi = maximal.values().iter().copied().fold(T::zero(), T::max);
            if hi.is_zero() {
                vec![T::one()]
            } else {
                log_space(lo.max(hi * lit::<T>(1e-6)) * lit::<T>(0.5), hi, 64)
            }
        }
    };
    ts.retain(|t| *t > T::zero());
    ts.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let mut order: Vec<usize> = (0..d.cell_count()).collect();
    order.sort_by(|&a, &b| maximal.values()[b].partial_cmp(&maximal.values()[a]).unwrap().then(a.cmp(&b)));
    let mut est = ContentEstimator::new(d, n - gamma)?;
    let mut next = 0;
    let mut report = Report::new("H^{N-g}({M_g f > t}) <= C5 |f|_1 / t", 1e-12)
        .param("gamma", to_f64(gamma))
        .param("c5", to_f64(c5));
    for &t in &ts {
        while next < order.len() && maximal.values()[order[next]] > t {
            est.insert(order[next]);
            next += 1;
        }
        report.record(to_f64(t), to_f64(est.value()), to_f64(c5 * mass / t));
    }
    Ok(report)
}

/// `∫_0^∞ content({g > t}) dt`, summed exactly over the distinct values of
/// `g`: between consecutive values the level set does not change.
pub fn choquet_integral<T: Real>(g: &GridFunction<T>, beta: T) -> Result<T> {
    let d = g.domain();
    let min = g.values().iter().copied().fold(T::infinity(), T::min);
    if min < T::zero() {
        return Err(window("min g", to_f64(min), "[0, inf)"));
    }
    let mut order: Vec<usize> = (0..d.cell_count()).filter(|&i| g.values()[i] > T::zero()).collect();
    order.sort_by(|&a, &b| g.values()[b].partial_cmp(&g.values()[a]).unwrap().then(a.cmp(&b)));
    let mut est = ContentEstimator::new(d, beta)?;
    let mut total = T::zero();
    let mut i = 0;
    while i < order.len() {
        let v = g.values()[order[i]];
        while i < order.len() && g.values()[order[i]] == v {
            est.insert(order[i]);
            i += 1;
        }
        let below = if i < order.len() { g.values()[order[i]] } else { T::zero() };
        total = total + (v - below) * est.value();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, TestFunctionSpec};
    use crate::grid::level_set;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn disc(d: &Domain<f64>, r: f64) -> GridFunction<f64> {
        generate(
            &TestFunctionSpec::BallIndicator {
                center: vec![0.0, 0.0],
                radius: r,
                height: 1.0,
            },
            d,
        )
        .unwrap()
    }

    #[test]
    fn empty_set_has_zero_content() {
        let d = Domain::unit_box(2, 8).unwrap();
        let est = content_upper(&CellSet::empty(d), 1.5).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.balls.is_empty());
        assert_eq!(est.kind, CoverKind::Empty);
    }

    #[test]
    fn disc_within_one_enclosing_ball() {
        let d = Domain::cube(2, -1.0, 1.0, 64).unwrap();
        let h = 2.0 / 64.0;
        let r = 0.5;
        let set = level_set(&disc(&d, r), 0.5);
        for beta in [0.5, 1.0, 2.0] {
            let est = content_upper(&set, beta).unwrap();
            assert!(est.covers(&set));
            let bound = unit_ball_volume(beta) * ((1.0 + 2.0 * h / r) * r).powf(beta);
            assert!(est.value <= bound, "beta {beta}: {} > {bound}", est.value);
        }
    }

    #[test]
    fn single_cell_cost() {
        let d = Domain::unit_box(2, 4).unwrap();
        let set = CellSet::new(d, vec![5]).unwrap();
        let est = content_upper(&set, 2.0).unwrap();
        // circumscribed disc of a 1/4 square: π (√2/8)²
        assert_relative_eq!(est.value, PI / 32.0, max_relative = 1e-10);
        assert!(est.covers(&set));
    }

    #[test]
    fn lebesgue_comparability() {
        let d = Domain::unit_box(2, 32).unwrap();
        for seed in 0..10 {
            let f = generate(
                &TestFunctionSpec::Noise {
                    seed,
                    low: 0.0,
                    high: 1.0,
                    density: 0.3,
                },
                &d,
            )
            .unwrap();
            let set = level_set(&f, 0.0);
            let est = content_upper(&set, 2.0).unwrap();
            let ratio = est.value / set.measure();
            assert!((1.0..=25.0).contains(&ratio), "{ratio}");
            assert!(est.covers(&set));
        }
    }

    #[test]
    fn every_cover_kind_is_valid() {
        let d = Domain::new(&[0.0, 0.0], &[1.0, 0.6], &[13, 7]).unwrap();
        let f = generate(
            &TestFunctionSpec::Bumps {
                count: 3,
                seed: 8,
                min_width: 0.1,
                max_width: 0.3,
                amplitude: (0.5, 1.0),
                signed: false,
            },
            &d,
        )
        .unwrap();
        let set = level_set(&f, 0.1);
        let mut est = ContentEstimator::new(&d, 1.0).unwrap();
        est.insert_set(&set);
        let best = est.estimate();
        assert!(best.covers(&set));
        assert!(best.value <= est.dyadic_value());
        assert!(best.value <= est.enclosing_value());
        let mut balls = Vec::new();
        est.collect_dyadic(est.levels.len() - 1, [0; MAX_DIM], &mut balls);
        let dyadic = CoverEstimate {
            beta: 1.0,
            kind: CoverKind::Dyadic,
            value: balls.iter().map(|b| 2.0 * b.radius).sum(),
            balls,
        };
        assert!(dyadic.covers(&set));
        assert_relative_eq!(dyadic.value, est.dyadic_value(), max_relative = 1e-12);
    }

    #[test]
    fn incremental_matches_batch() {
        let d = Domain::unit_box(2, 16).unwrap();
        let f = generate(
            &TestFunctionSpec::Noise {
                seed: 2,
                low: 0.0,
                high: 1.0,
                density: 1.0,
            },
            &d,
        )
        .unwrap();
        let mut est = ContentEstimator::new(&d, 1.0).unwrap();
        for t in [0.9, 0.7, 0.4, 0.1] {
            let set = level_set(&f, t);
            est.insert_set(&set);
            assert_relative_eq!(est.value(), content_upper(&set, 1.0).unwrap().value, max_relative = 1e-12);
        }
    }

    #[test]
    fn enclosing_ball_of_square_corners() {
        let pts = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.5, 0.5, 0.0],
            [0.5, 0.0, 0.0],
        ];
        let b = enclosing_ball(&pts, 2);
        assert_relative_eq!(b.radius, 0.5f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(b.center[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn enclosing_ball_3d_and_1d() {
        let pts = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0], [2.0, 2.0, 2.0]];
        let b = enclosing_ball(&pts, 3);
        assert_relative_eq!(b.radius, 3f64.sqrt(), max_relative = 1e-12);
        let line = [[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [1.0, 0.0, 0.0]];
        assert_relative_eq!(enclosing_ball(&line, 1).radius, 1.5, max_relative = 1e-12);
    }

    #[test]
    fn fkr_constant_value() {
        assert_relative_eq!(fkr_constant(2, 1.0_f64), 10.0 / PI, max_relative = 1e-13);
        assert_relative_eq!(fkr_constant(2, 0.0_f64), 25.0, max_relative = 1e-13);
    }

    #[test]
    fn weak_type_for_spike_and_zero() {
        let d = Domain::unit_box(2, 24).unwrap();
        let mut v = vec![0.0; 24 * 24];
        v[12 * 24 + 12] = 1.0 / d.cell_measure();
        let spike = GridFunction::new(d.clone(), v).unwrap();
        let r = weak_type_check(&spike, 1.0, None).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.samples, 64);
        let z = weak_type_check(&GridFunction::zeros(d.clone()), 1.0, None).unwrap();
        assert!(z.holds);
        let neg = spike.scale(-1.0);
        assert!(weak_type_check(&neg, 1.0, None).is_err());
    }

    #[test]
    fn choquet_layer_cake() {
        let d = Domain::cube(2, -1.0, 1.0, 16).unwrap();
        let ball = disc(&d, 0.5);
        let content = content_upper(&level_set(&ball, 0.0), 1.0).unwrap().value;
        assert_relative_eq!(choquet_integral(&ball.scale(3.0), 1.0).unwrap(), 3.0 * content, max_relative = 1e-12);
        assert_eq!(choquet_integral(&GridFunction::zeros(d.clone()), 1.0).unwrap(), 0.0);

        // two levels: 2 on the small disc, 1 on the annulus
        let small = disc(&d, 0.3);
        let big = disc(&d, 0.7);
        let g = small.axpby(1.0, &big, 1.0).unwrap();
        let c_small = content_upper(&level_set(&small, 0.0), 1.0).unwrap().value;
        let c_big = content_upper(&level_set(&big, 0.0), 1.0).unwrap().value;
        assert_relative_eq!(choquet_integral(&g, 1.0).unwrap(), c_small + c_big, max_relative = 1e-12);
    }
}
