//! Rearrangement calculus for grid functions.
//!
//! A grid function takes finitely many values, so its decreasing
//! rearrangement `f*` is a right-open step function and every Lorentz
//! functional reduces to a finite sum of piecewise integrals. The tilde
//! quasi-norm `|||f|||_{p,q}` is evaluated in closed form; the norm
//! `‖f‖_{p,q}`, built on the maximal average `f**`, integrates a rational
//! function of `t` on each piece by adaptive quadrature and treats the first
//! piece and the unbounded tail analytically.

use std::cmp::Ordering;
use std::io::Write;

use crate::error::{window, Error, Result};
use crate::grid::GridFunction;
use crate::quadrature;
use crate::real::{count, e_pow_inv_e, lit, to_f64, Real};

/// Relative tolerance for per-piece quadrature of `f**`-based norms.
pub const NORM_QUAD_TOL: f64 = 1e-13;

/// Second Lorentz exponent; `Infinite` selects the weak (sup) variant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Exponent<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Exponent::Finite(q) => Some(q),
            Exponent::Infinite => None,
        }
    }

    /// `1/q`, zero for `q = ∞`.
    pub fn recip(&self) -> T {
        match *self {
            Exponent::Finite(q) => q.recip(),
            Exponent::Infinite => T::zero(),
        }
    }

    /// Hölder conjugate `q/(q-1)`; `1 ↦ ∞`, `∞ ↦ 1`.
    pub fn conjugate(&self) -> Exponent<T> {
        match *self {
            Exponent::Infinite => Exponent::Finite(T::one()),
            Exponent::Finite(q) if q == T::one() => Exponent::Infinite,
            Exponent::Finite(q) => Exponent::Finite(q / (q - T::one())),
        }
    }

    pub fn from_f64(q: f64) -> Self {
        if q.is_infinite() {
            Exponent::Infinite
        } else {
            Exponent::Finite(lit(q))
        }
    }

    pub fn to_f64(&self) -> f64 {
        match *self {
            Exponent::Finite(q) => to_f64(q),
            Exponent::Infinite => f64::INFINITY,
        }
    }
}

impl<T: Real> serde::Serialize for Exponent<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(q) => q.serialize(s),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Exponent pair `(p, q)` of a Lorentz space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzParams<T> {
    p: T,
    q: Exponent<T>,
}

impl<T: Real> LorentzParams<T> {
    /// `p ∈ [1, ∞)`, `q ∈ (0, ∞]`. Individual operations narrow the window.
    pub fn new(p: T, q: Exponent<T>) -> Result<Self> {
        if !(p.is_finite() && p >= T::one()) {
            return Err(window("p", to_f64(p), "[1, inf)"));
        }
        if let Exponent::Finite(qv) = q {
            if !(qv.is_finite() && qv > T::zero()) {
                return Err(window("q", to_f64(qv), "(0, inf]"));
            }
        }
        Ok(LorentzParams { p, q })
    }

    pub fn finite(p: T, q: T) -> Result<Self> {
        Self::new(p, Exponent::Finite(q))
    }

    pub fn weak(p: T) -> Result<Self> {
        Self::new(p, Exponent::Infinite)
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn q(&self) -> Exponent<T> {
        self.q
    }

    /// `p' = p/(p-1)`, `None` at `p = 1`.
    pub fn p_conjugate(&self) -> Option<T> {
        (self.p > T::one()).then(|| self.p / (self.p - T::one()))
    }

    pub fn q_conjugate(&self) -> Exponent<T> {
        self.q.conjugate()
    }

    /// `δ_p = N/p - α`.
    pub fn delta(&self, dim: usize, alpha: T) -> T {
        count::<T>(dim) / self.p - alpha
    }
}

/// Nonincreasing, nonnegative, right-open step function on `(0, ∞)`.
///
/// Takes the value `levels[i]` on `[breakpoints[i], breakpoints[i+1])` and
/// zero beyond the last breakpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction<T> {
    breakpoints: Vec<T>,
    levels: Vec<T>,
}

impl<T: Real> StepFunction<T> {
    pub fn new(breakpoints: Vec<T>, levels: Vec<T>) -> Result<Self> {
        if breakpoints.len() != levels.len() + 1 {
            return Err(Error::InvalidStep("need one more breakpoint than levels".into()));
        }
        if breakpoints[0] != T::zero() {
            return Err(Error::InvalidStep("first breakpoint must be 0".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidStep("breakpoints must increase strictly".into()));
        }
        if levels.iter().any(|v| !(v.is_finite() && *v >= T::zero())) {
            return Err(Error::InvalidStep("levels must be finite and nonnegative".into()));
        }
        if levels.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidStep("levels must be nonincreasing".into()));
        }
        Ok(StepFunction { breakpoints, levels })
    }

    pub fn zero() -> Self {
        StepFunction {
            breakpoints: vec![T::zero()],
            levels: Vec::new(),
        }
    }

    /// `height · χ_{[0, a)}`.
    pub fn indicator(a: T, height: T) -> Result<Self> {
        Self::new(vec![T::zero(), a], vec![height])
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn piece_count(&self) -> usize {
        self.levels.len()
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(|v| v.is_zero())
    }

    /// Right end of the support.
    pub fn support(&self) -> T {
        *self.breakpoints.last().unwrap()
    }

    pub fn eval(&self, x: T) -> T {
        if x < T::zero() {
            return self.levels.first().copied().unwrap_or(T::zero());
        }
        // number of breakpoints <= x, minus the leading zero
        let i = self.breakpoints.partition_point(|&b| b <= x);
        if i == 0 || i > self.levels.len() {
            T::zero()
        } else {
            self.levels[i - 1]
        }
    }

    /// Prefix integrals `A_i = ∫_0^{b_i}`.
    pub fn prefix_integrals(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.breakpoints.len());
        let mut acc = T::zero();
        out.push(acc);
        for (i, &v) in self.levels.iter().enumerate() {
            acc = acc + v * (self.breakpoints[i + 1] - self.breakpoints[i]);
            out.push(acc);
        }
        out
    }

    /// `∫_0^∞`.
    pub fn integral(&self) -> T {
        *self.prefix_integrals().last().unwrap()
    }

    /// `∫_0^∞ g(t)^s dt` for `s > 0`.
    pub fn power_integral(&self, s: T) -> T {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, &v)| v.powf(s) * (self.breakpoints[i + 1] - self.breakpoints[i]))
            .sum()
    }

    /// Measure of `{g > y}`.
    pub fn distribution(&self, y: T) -> T {
        // levels are nonincreasing, so {g > y} is an initial segment
        let n = self.levels.partition_point(|&v| v > y);
        self.breakpoints[n]
    }

    pub fn scale(&self, s: T) -> Result<Self> {
        let s = s.abs();
        if s.is_zero() {
            return Ok(Self::zero());
        }
        Self::new(self.breakpoints.clone(), self.levels.iter().map(|&v| v * s).collect())
    }

    /// Pointwise product of two nonincreasing steps, itself nonincreasing.
    pub fn product(&self, other: &Self) -> Self {
        let end = self.support().min(other.support());
        let mut cuts: Vec<T> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .filter(|&b| b <= end)
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        cuts.dedup();
        let levels = cuts
            .windows(2)
            .map(|w| self.eval(w[0]) * other.eval(w[0]))
            .collect();
        StepFunction {
            breakpoints: cuts,
            levels,
        }
    }

    pub fn averaged(&self) -> AveragedRearrangement<T> {
        averaged_rearrangement(self)
    }

    /// `|||g|||_{p,q}` in closed form.
    ///
    /// On a piece `[b_{i-1}, b_i)` of value `v_i`, `∫ (t^{1/p} v_i)^q dt/t`
    /// equals `v_i^q (p/q)(b_i^{q/p} - b_{i-1}^{q/p})`. For `q = ∞` the
    /// supremum of `t^{1/p} v_i` over the piece is its right-end limit.
    pub fn quasinorm(&self, params: &LorentzParams<T>) -> T {
        let p = params.p();
        match params.q() {
            Exponent::Infinite => self
                .levels
                .iter()
                .enumerate()
                .map(|(i, &v)| v * self.breakpoints[i + 1].powf(p.recip()))
                .fold(T::zero(), T::max),
            Exponent::Finite(q) => {
                let e = q / p;
                let sum: T = self
                    .levels
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        v.powf(q) * (self.breakpoints[i + 1].powf(e) - self.breakpoints[i].powf(e))
                    })
                    .sum();
                (sum * p / q).powf(q.recip())
            }
        }
    }

    /// `‖g‖_{p,q} = (∫ (t^{1/p} g**(t))^q dt/t)^{1/q}`.
    ///
    /// Requires `p > 1` when `q < ∞`; `p = 1` is accepted in the weak case,
    /// where `‖g‖_{1,∞}` is the total integral.
    pub fn norm(&self, params: &LorentzParams<T>) -> Result<T> {
        let p = params.p();
        if let Exponent::Finite(q) = params.q() {
            if p <= T::one() {
                return Err(window("p", to_f64(p), "(1, inf) for finite q"));
            }
            if q < T::one() {
                return Err(window("q", to_f64(q), "[1, inf]"));
            }
        }
        if self.levels.is_empty() {
            return Ok(T::zero());
        }
        let prefix = self.prefix_integrals();
        let b = &self.breakpoints;
        let k = self.levels.len();
        match params.q() {
            Exponent::Infinite => {
                // On a piece, t^{1/p} g**(t) = c t^{1/p-1} + v t^{1/p} with
                // c = A_{i-1} - v b_{i-1} >= 0. Its derivative changes sign at
                // most once, from negative to positive, so the maximum over a
                // closed piece sits at an endpoint. On the tail the value
                // A_k t^{1/p-1} is nonincreasing. The endpoint values are
                // b_i^{1/p-1} A_i.
                let expo = p.recip() - T::one();
                Ok((1..=k)
                    .map(|i| b[i].powf(expo) * prefix[i])
                    .fold(T::zero(), T::max))
            }
            Exponent::Finite(q) => {
                let e = q / p;
                let v0 = self.levels[0];
                // g** is constant on the first piece
                let mut sum = v0.powf(q) * (p / q) * b[1].powf(e);
                let expo = p.recip() - T::one();
                let tol = lit::<T>(NORM_QUAD_TOL);
                for j in 1..k {
                    let (a_j, v, b_j) = (prefix[j], self.levels[j], b[j]);
                    let integrand = |u: T| {
                        let t = u.exp();
                        let mass = a_j + v * (t - b_j);
                        (mass * t.powf(expo)).powf(q)
                    };
                    sum = sum + quadrature::integrate(integrand, b_j.ln(), b[j + 1].ln(), tol, T::zero());
                }
                // tail: g** = A_k / t beyond the support
                let a_k = prefix[k];
                sum = sum + a_k.powf(q) * b[k].powf(e - q) / (q - e);
                Ok(sum.powf(q.recip()))
            }
        }
    }

    /// Writes `left,right,level` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "left,right,level")?;
        for (i, v) in self.levels.iter().enumerate() {
            writeln!(w, "{:e},{:e},{:e}", self.breakpoints[i], self.breakpoints[i + 1], v)?;
        }
        Ok(())
    }
}

/// The maximal average `f**(x) = (1/x)∫_0^x f*`, stored piecewise.
///
/// On the piece `[b_{i-1}, b_i)` it equals `(A_{i-1} + v_i (x - b_{i-1}))/x`,
/// and `A_k / x` past the support.
#[derive(Clone, Debug)]
pub struct AveragedRearrangement<T> {
    breakpoints: Vec<T>,
    levels: Vec<T>,
    prefix: Vec<T>,
}

impl<T: Real> AveragedRearrangement<T> {
    /// `x·f**(x) = ∫_0^x f*`.
    pub fn cumulative(&self, x: T) -> T {
        if x <= T::zero() {
            return T::zero();
        }
        let i = self.breakpoints.partition_point(|&b| b <= x);
        if i > self.levels.len() {
            return *self.prefix.last().unwrap();
        }
        let j = i - 1;
        self.prefix[j] + self.levels[j] * (x - self.breakpoints[j])
    }

    pub fn eval(&self, x: T) -> T {
        if x <= T::zero() {
            return self.levels.first().copied().unwrap_or(T::zero());
        }
        self.cumulative(x) / x
    }

    /// `(A_{i-1}, v_i, b_{i-1})` for piece `i` (0-based).
    pub fn piece(&self, i: usize) -> (T, T, T) {
        (self.prefix[i], self.levels[i], self.breakpoints[i])
    }

    pub fn total(&self) -> T {
        *self.prefix.last().unwrap()
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }
}

pub fn averaged_rearrangement<T: Real>(fstar: &StepFunction<T>) -> AveragedRearrangement<T> {
    AveragedRearrangement {
        breakpoints: fstar.breakpoints.clone(),
        levels: fstar.levels.clone(),
        prefix: fstar.prefix_integrals(),
    }
}

/// `m(f, y) = |{|f| > y}|`.
pub fn distribution<T: Real>(f: &GridFunction<T>, y: T) -> T {
    let n = f.values().iter().filter(|v| v.abs() > y).count();
    count::<T>(n) * f.cell_measure()
}

fn sorted_magnitudes<T: Real>(f: &GridFunction<T>) -> Vec<(T, usize)> {
    let mut mags: Vec<(T, usize)> = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (v.abs(), i))
        .collect();
    // ties by cell index; the rearrangement itself does not depend on it
    mags.sort_unstable_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
    mags
}

/// `f*`: the values `|f|` sorted nonincreasingly, each cell carried on an
/// interval of length `cell_measure`; equal values are merged into one piece.
pub fn decreasing_rearrangement<T: Real>(f: &GridFunction<T>) -> StepFunction<T> {
    let mags = sorted_magnitudes(f);
    let mu = f.cell_measure();
    let mut breakpoints = vec![T::zero()];
    let mut levels = Vec::new();
    let mut i = 0;
    while i < mags.len() {
        let v = mags[i].0;
        let mut j = i;
        while j < mags.len() && mags[j].0 == v {
            j += 1;
        }
        levels.push(v);
        breakpoints.push(count::<T>(j) * mu);
        i = j;
    }
    StepFunction { breakpoints, levels }
}

/// `|||f|||_{p,q}` from the rearrangement, in closed form.
pub fn lorentz_quasinorm<T: Real>(f: &GridFunction<T>, params: &LorentzParams<T>) -> T {
    decreasing_rearrangement(f).quasinorm(params)
}

/// `‖f‖_{p,q}` through `f**`.
pub fn lorentz_norm<T: Real>(f: &GridFunction<T>, params: &LorentzParams<T>) -> Result<T> {
    decreasing_rearrangement(f).norm(params)
}

/// `p^{1/q} (∫ (t m(f,t)^{1/p})^q dt/t)^{1/q}`, or `sup_t t m(f,t)^{1/p}`.
///
/// `m(f, ·)` is constant on `[v_{i+1}, v_i)` between consecutive distinct
/// values, so the `t`-integral is the finite sum
/// `Σ m_i^{q/p} (v_i^q - v_{i+1}^q)/q`.
pub fn distribution_form_quasinorm<T: Real>(f: &GridFunction<T>, params: &LorentzParams<T>) -> T {
    let mags = sorted_magnitudes(f);
    let mu = f.cell_measure();
    let p = params.p();
    // (value, measure of {|f| >= value}) for each distinct value, descending
    let mut steps: Vec<(T, T)> = Vec::new();
    for (n, &(v, _)) in mags.iter().enumerate() {
        match steps.last_mut() {
            Some(last) if last.0 == v => last.1 = count::<T>(n + 1) * mu,
            _ => steps.push((v, count::<T>(n + 1) * mu)),
        }
    }
    match params.q() {
        Exponent::Infinite => steps
            .iter()
            .map(|&(v, m)| v * m.powf(p.recip()))
            .fold(T::zero(), T::max),
        Exponent::Finite(q) => {
            let e = q / p;
            let mut sum = T::zero();
            for (i, &(v, m)) in steps.iter().enumerate() {
                let next = steps.get(i + 1).map_or(T::zero(), |s| s.0);
                sum = sum + m.powf(e) * (v.powf(q) - next.powf(q));
            }
            (p * sum / q).powf(q.recip())
        }
    }
}

/// Normalizes `f` to unit `‖·‖_{p,q}` norm.
pub fn normalize_unit_lorentz<T: Real>(f: &GridFunction<T>, params: &LorentzParams<T>) -> Result<GridFunction<T>> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let n = lorentz_norm(f, params)?;
    Ok(f.scale(n.recip()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

/// Compares `(∫ [x^{1/p} ⨍_0^x g]^q dx/x)^{1/q}` with `p/(p-1)` times
/// `(∫ [x^{1/p} g(x)]^q dx/x)^{1/q}` for a nonincreasing step `g`.
pub fn hardy_check<T: Real>(g: &StepFunction<T>, p: T, q: T) -> Result<HardyReport<T>> {
    if !(p > T::one()) {
        return Err(window("p", to_f64(p), "(1, inf)"));
    }
    if !(q >= T::one() && q.is_finite()) {
        return Err(window("q", to_f64(q), "[1, inf)"));
    }
    let params = LorentzParams::finite(p, q)?;
    let lhs = g.norm(&params)?;
    let rhs = p / (p - T::one()) * g.quasinorm(&params);
    Ok(HardyReport {
        lhs,
        rhs,
        holds: lhs <= rhs * (T::one() + lit(1e-9)),
    })
}

/// Embedding constant `(q̃/p)^{1/q̃ - 1/q}` between `L^{p,q̃}` and `L^{p,q}`.
pub fn calderon_factor<T: Real>(p: T, q_tilde: T, q: Exponent<T>) -> T {
    (q_tilde / p).powf(q_tilde.recip() - q.recip())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalderonReport<T> {
    /// `‖f‖_{p,q}`
    pub lhs: T,
    /// `p' (q̃/p)^{1/q̃-1/q} ‖f‖_{p,q̃}`
    pub rhs: T,
    pub factor: T,
    /// `factor <= e^{1/e}`
    pub factor_bounded: bool,
    pub holds: bool,
}

pub fn calderon_compare<T: Real>(f: &GridFunction<T>, p: T, q: Exponent<T>, q_tilde: T) -> Result<CalderonReport<T>> {
    if !(q_tilde >= T::one()) || q.finite().is_some_and(|qv| qv < q_tilde) {
        return Err(window("q_tilde", to_f64(q_tilde), "[1, q]"));
    }
    let fstar = decreasing_rearrangement(f);
    let strong = LorentzParams::new(p, q)?;
    let pc = strong
        .p_conjugate()
        .ok_or_else(|| window("p", to_f64(p), "(1, inf)"))?;
    let lhs = fstar.norm(&strong)?;
    let factor = calderon_factor(p, q_tilde, q);
    let rhs = pc * factor * fstar.norm(&LorentzParams::finite(p, q_tilde)?)?;
    Ok(CalderonReport {
        lhs,
        rhs,
        factor,
        factor_bounded: factor <= e_pow_inv_e::<T>() * (T::one() + lit(1e-12)),
        holds: lhs <= rhs * (T::one() + lit(1e-9)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Domain;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(vals: Vec<f64>, measure: f64) -> GridFunction<f64> {
        let d = Domain::new(&[0.0], &[measure * vals.len() as f64], &[vals.len()]).unwrap();
        GridFunction::new(d, vals).unwrap()
    }

    fn random_step(rng: &mut ChaCha8Rng) -> StepFunction<f64> {
        let k = rng.gen_range(1..12);
        let mut b = vec![0.0];
        let mut l = Vec::new();
        let mut level: f64 = rng.gen_range(0.5..5.0);
        for _ in 0..k {
            b.push(b.last().unwrap() + rng.gen_range(0.01..1.0));
            l.push(level);
            level *= rng.gen_range(0.1..1.0);
        }
        StepFunction::new(b, l).unwrap()
    }

    #[test]
    fn sorting_example() {
        let f = line(vec![3.0, 1.0, 2.0], 0.1);
        let s = decreasing_rearrangement(&f);
        assert_eq!(s.levels(), &[3.0, 2.0, 1.0]);
        assert_relative_eq!(s.breakpoints()[1], 0.1);
        assert_relative_eq!(s.breakpoints()[2], 0.2);
        assert_relative_eq!(s.breakpoints()[3], 0.3, max_relative = 1e-15);
    }

    #[test]
    fn indicator_rearranges_to_interval() {
        let f = line(vec![0.0, 1.0, 1.0, 0.0, 1.0], 0.25);
        let s = decreasing_rearrangement(&f);
        assert_eq!(s.levels(), &[1.0]);
        assert_eq!(s.breakpoints(), &[0.0, 0.75]);
    }

    #[test]
    fn step_validation() {
        assert!(StepFunction::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0, 2.0], vec![1.0, 2.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0, 1.0], vec![2.0, 1.0]).is_err());
        assert!(StepFunction::new(vec![0.5, 1.0], vec![1.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![-1.0]).is_err());
    }

    #[test]
    fn distribution_examples() {
        let f = line(vec![2.0, 2.0, 0.0, 0.0], 0.25);
        assert_relative_eq!(distribution(&f, 1.0), 0.5);
        assert_eq!(distribution(&f, 2.0), 0.0);
        let z = line(vec![0.0; 4], 0.25);
        assert_eq!(distribution(&z, 0.0), 0.0);
    }

    #[test]
    fn equimeasurable_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vals: Vec<f64> = (0..500).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let f = line(vals.clone(), 0.01);
        let s = decreasing_rearrangement(&f);
        let direct: f64 = vals.iter().map(|v| v * v).sum::<f64>() * 0.01;
        assert_relative_eq!(s.power_integral(2.0), direct, max_relative = 1e-12);
        for k in 0..60 {
            let y = 0.05 * k as f64;
            assert_eq!(s.distribution(y), distribution(&f, y));
        }
    }

    #[test]
    fn averaged_indicator_closed_form() {
        let s = StepFunction::indicator(0.3, 1.0).unwrap();
        let a = s.averaged();
        for k in 1..100 {
            let x = 0.01 * k as f64;
            assert_relative_eq!(a.eval(x), (0.3 / x).min(1.0), max_relative = 1e-14);
        }
        let c = StepFunction::indicator(2.0, 5.0).unwrap().averaged();
        assert_relative_eq!(c.eval(1.3), 5.0);
        assert_relative_eq!(c.eval(2.0), 5.0);
    }

    #[test]
    fn averaged_matches_trapezoid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let s = random_step(&mut rng);
            let a = s.averaged();
            let x_max = s.support() * 1.5;
            // cumulative trapezoid on a grid containing every breakpoint: exact
            // for a step function
            let mut nodes: Vec<f64> = (0..=2000).map(|i| x_max * i as f64 / 2000.0).collect();
            for &b in s.breakpoints() {
                nodes.push(b);
                nodes.push(b * (1.0 - 1e-15));
            }
            nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut cum = 0.0;
            for w in nodes.windows(2) {
                let (x0, x1) = (w[0], w[1]);
                if x1 <= x0 {
                    continue;
                }
                let mid = 0.5 * (x0 + x1);
                cum += s.eval(mid) * (x1 - x0);
                if x1 > 0.0 {
                    let rel = (a.eval(x1) - cum / x1).abs() / (cum / x1).max(1e-300);
                    assert!(rel < 1e-10, "rel {rel}");
                }
            }
        }
    }

    #[test]
    fn averaged_dominates_and_decreases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let s = random_step(&mut rng);
            let a = s.averaged();
            let mut prev = f64::INFINITY;
            for k in 1..400 {
                let x = s.support() * 1.2 * k as f64 / 400.0;
                let v = a.eval(x);
                assert!(v >= s.eval(x) * (1.0 - 1e-14));
                assert!(v <= prev * (1.0 + 1e-14));
                prev = v;
            }
        }
    }

    #[test]
    fn quasinorm_of_indicator() {
        for &(p, q, a) in &[(2.0f64, 2.0f64, 1.0f64), (1.5, 1.0, 0.3), (3.0, 4.0, 2.5), (4.0, 1.5, 0.01)] {
            let s = StepFunction::indicator(a, 1.0).unwrap();
            let want = (p / q as f64).powf(1.0 / q) * a.powf(1.0 / p);
            assert_relative_eq!(s.quasinorm(&LorentzParams::finite(p, q).unwrap()), want, max_relative = 1e-14);
            assert_relative_eq!(s.quasinorm(&LorentzParams::weak(p).unwrap()), a.powf(1.0 / p), max_relative = 1e-14);
        }
        let s = StepFunction::indicator(1.0, 1.0).unwrap();
        assert_relative_eq!(s.quasinorm(&LorentzParams::finite(2.0, 2.0).unwrap()), 1.0);
        assert_eq!(StepFunction::<f64>::zero().quasinorm(&LorentzParams::finite(2.0, 2.0).unwrap()), 0.0);
    }

    #[test]
    fn weak_norm_of_indicator() {
        for &(p, a) in &[(2.0, 0.5), (1.5, 3.0), (1.0, 0.25)] {
            let s = StepFunction::indicator(a, 1.0).unwrap();
            let n = s.norm(&LorentzParams::weak(p).unwrap()).unwrap();
            assert_relative_eq!(n, f64::powf(a, 1.0 / p), max_relative = 1e-14);
        }
    }

    #[test]
    fn p_one_weak_is_l1() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let vals: Vec<f64> = (0..200).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = line(vals, 0.02);
        let n = lorentz_norm(&f, &LorentzParams::weak(1.0).unwrap()).unwrap();
        assert_relative_eq!(n, f.l1_norm(), max_relative = 1e-12);
        // and the sup of f** is the sup norm
        assert_relative_eq!(decreasing_rearrangement(&f).averaged().eval(1e-9), f.sup_norm(), max_relative = 1e-12);
    }

    #[test]
    fn norm_rejects_p_one_finite_q() {
        let s = StepFunction::indicator(1.0, 1.0).unwrap();
        assert!(s.norm(&LorentzParams::finite(1.0, 2.0).unwrap()).is_err());
    }

    /// Dense composite-Simpson oracle in `u = ln t` for `‖g‖_{p,q}`.
    fn norm_oracle(s: &StepFunction<f64>, p: f64, q: f64) -> f64 {
        let a = s.averaged();
        let lo = (s.breakpoints()[1] * 1e-12).ln();
        let hi = (s.support() * 1e12).ln();
        let mut nodes = vec![lo];
        for &b in &s.breakpoints()[1..] {
            nodes.push(b.ln());
        }
        nodes.push(hi);
        let g = |u: f64| {
            let t = u.exp();
            (t.powf(1.0 / p) * a.eval(t)).powf(q)
        };
        let mut total = 0.0;
        for w in nodes.windows(2) {
            let n = 4000;
            let h = (w[1] - w[0]) / n as f64;
            let mut acc = g(w[0]) + g(w[1]);
            for i in 1..n {
                let x = w[0] + h * i as f64;
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(x);
            }
            total += acc * h / 3.0;
        }
        // analytic remainders outside [lo, hi]
        let t_lo = lo.exp();
        let t_hi = hi.exp();
        total += s.levels()[0].powf(q) * p / q * t_lo.powf(q / p);
        total += a.total().powf(q) * t_hi.powf(q / p - q) / (q - q / p);
        total.powf(1.0 / q)
    }

    #[test]
    fn norm_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..15 {
            let s = random_step(&mut rng);
            for &(p, q) in &[(2.0, 2.0), (1.5, 1.0), (3.0, 2.5)] {
                let got = s.norm(&LorentzParams::finite(p, q).unwrap()).unwrap();
                let want = norm_oracle(&s, p, q);
                assert_relative_eq!(got, want, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn hardy_indicator_closed_form() {
        let g = StepFunction::indicator(1.0, 1.0).unwrap();
        let r = hardy_check(&g, 2.0, 2.0).unwrap();
        assert_relative_eq!(r.lhs, 2f64.sqrt(), max_relative = 1e-10);
        assert_relative_eq!(r.rhs, 2.0, max_relative = 1e-10);
        assert!(r.holds);
        let z = hardy_check(&StepFunction::<f64>::zero(), 2.0, 2.0).unwrap();
        assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
        assert!(z.holds);
    }

    #[test]
    fn distribution_form_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let vals: Vec<f64> = (0..300)
            .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(-2.0..2.0) })
            .collect();
        let f = line(vals, 0.01);
        for &(p, q) in &[(1.0, 1.0), (2.0, 2.0), (1.5, 0.5), (3.0, 7.0)] {
            let params = LorentzParams::finite(p, q).unwrap();
            assert_relative_eq!(
                distribution_form_quasinorm(&f, &params),
                lorentz_quasinorm(&f, &params),
                max_relative = 1e-9
            );
        }
        let weak = LorentzParams::weak(2.0).unwrap();
        assert_relative_eq!(distribution_form_quasinorm(&f, &weak), lorentz_quasinorm(&f, &weak), max_relative = 1e-12);
    }

    #[test]
    fn distribution_form_indicator() {
        let f = line(vec![1.0, 1.0, 0.0, 0.0], 0.25);
        let (p, q) = (3.0, 2.0);
        let want = (p / q as f64).powf(1.0 / q) * 0.5f64.powf(1.0 / p);
        let got = distribution_form_quasinorm(&f, &LorentzParams::finite(p, q).unwrap());
        assert_relative_eq!(got, want, max_relative = 1e-14);
    }

    #[test]
    fn normalization() {
        let f = line(vec![2.0, 2.0, 0.0, 0.0], 0.25);
        let params = LorentzParams::finite(2.0, 2.0).unwrap();
        let g = normalize_unit_lorentz(&f, &params).unwrap();
        assert_relative_eq!(lorentz_norm(&g, &params).unwrap(), 1.0, max_relative = 1e-12);
        assert!(matches!(
            normalize_unit_lorentz(&line(vec![0.0; 4], 0.25), &params),
            Err(Error::ZeroFunction)
        ));
    }

    #[test]
    fn calderon_equal_exponents() {
        let f = line(vec![1.0, 0.5, 0.25, 0.0], 0.25);
        let r = calderon_compare(&f, 2.0, Exponent::Finite(2.0), 2.0).unwrap();
        assert_eq!(r.factor, 1.0);
        assert!(r.holds && r.factor_bounded);
        assert!(calderon_compare(&f, 2.0, Exponent::Finite(2.0), 3.0).is_err());
    }

    #[test]
    fn calderon_factor_sweep_bounded() {
        let bound = (1.0 / std::f64::consts::E).exp();
        let mut worst: f64 = 0.0;
        for ip in 0..40 {
            let p = 1.05 + 0.25 * ip as f64;
            for iq in 0..200 {
                let qt = 1.0 + 0.1 * iq as f64;
                for &q in &[Exponent::Finite(qt), Exponent::Finite(qt * 2.0), Exponent::Infinite] {
                    worst = worst.max(calderon_factor(p, qt, q));
                }
            }
        }
        assert!(worst <= bound, "{worst}");
    }

    #[test]
    fn f32_rearrangement() {
        let d = Domain::<f32>::new(&[0.0], &[1.0], &[4]).unwrap();
        let f = GridFunction::new(d, vec![0.5, -2.0, 1.0, 0.0]).unwrap();
        let s = decreasing_rearrangement(&f);
        assert_eq!(s.levels(), &[2.0, 1.0, 0.5]);
        let params = LorentzParams::finite(2.0f32, 2.0).unwrap();
        let q = s.quasinorm(&params);
        assert!((q - f.lebesgue_norm(2.0)).abs() < 1e-6);
    }

    #[test]
    fn step_product_merges_breakpoints() {
        let a = StepFunction::new(vec![0.0, 1.0, 3.0], vec![2.0, 1.0]).unwrap();
        let b = StepFunction::new(vec![0.0, 2.0, 4.0], vec![5.0, 1.0]).unwrap();
        let c = a.product(&b);
        assert_eq!(c.breakpoints(), &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(c.levels(), &[10.0, 5.0, 1.0]);
        assert_eq!(a.product(&StepFunction::zero()), StepFunction::zero());
    }
}
