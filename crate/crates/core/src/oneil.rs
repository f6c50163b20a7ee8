//! O'Neil product operators: pointwise products and discrete convolution,
//! with the rearrangement inequalities they satisfy.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{window, Error, Result};
use crate::grid::{GridFunction, MAX_DIM};
use crate::real::{e_pow_inv_e, lit, log_space, to_f64, Real};
use crate::rearrangement::{decreasing_rearrangement, Exponent, LorentzParams, StepFunction};
use crate::report::Report;

/// Relative slack for the rearrangement inequalities.
pub const SLACK: f64 = 1e-9;
/// Relative slack for the product-operator axioms.
pub const AXIOM_SLACK: f64 = 1e-10;
/// Default number of log-spaced sample points.
pub const DEFAULT_SAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductKind {
    Pointwise,
    Convolution,
}

/// `h = P(f, g)` together with its inputs. Construction checks the three
/// `L¹`/`L^∞` axioms and refuses instances that break them.
#[derive(Clone, Debug)]
pub struct ProductInstance<T> {
    kind: ProductKind,
    f: GridFunction<T>,
    g: GridFunction<T>,
    h: GridFunction<T>,
}

impl<T: Real> ProductInstance<T> {
    pub fn pointwise(f: GridFunction<T>, g: GridFunction<T>) -> Result<Self> {
        let h = f.mul(&g)?;
        Self::checked(ProductKind::Pointwise, f, g, h)
    }

    /// Convolution on the grid. The axioms only hold when `|Ω| <= 1`; larger
    /// boxes are rejected through the axiom check.
    pub fn convolution(f: GridFunction<T>, g: GridFunction<T>) -> Result<Self> {
        let h = convolve(&f, &g)?;
        Self::checked(ProductKind::Convolution, f, g, h)
    }

    fn checked(kind: ProductKind, f: GridFunction<T>, g: GridFunction<T>, h: GridFunction<T>) -> Result<Self> {
        check_axioms(&f, &g, &h)?;
        Ok(ProductInstance { kind, f, g, h })
    }

    pub fn kind(&self) -> ProductKind {
        self.kind
    }

    pub fn f(&self) -> &GridFunction<T> {
        &self.f
    }

    pub fn g(&self) -> &GridFunction<T> {
        &self.g
    }

    pub fn h(&self) -> &GridFunction<T> {
        &self.h
    }
}

fn check_axioms<T: Real>(f: &GridFunction<T>, g: &GridFunction<T>, h: &GridFunction<T>) -> Result<()> {
    let tol = T::one() + lit::<T>(AXIOM_SLACK);
    let (fi, gi, hi) = (f.sup_norm(), g.sup_norm(), h.sup_norm());
    let (f1, g1, h1) = (f.l1_norm(), g.l1_norm(), h.l1_norm());
    if hi > fi * gi * tol {
        return Err(Error::ProductAxiom(format!("‖h‖∞ = {hi} > ‖f‖∞‖g‖∞ = {}", fi * gi)));
    }
    if h1 > f1 * gi * tol {
        return Err(Error::ProductAxiom(format!("‖h‖₁ = {h1} > ‖f‖₁‖g‖∞ = {}", f1 * gi)));
    }
    if h1 > fi * g1 * tol {
        return Err(Error::ProductAxiom(format!("‖h‖₁ = {h1} > ‖f‖∞‖g‖₁ = {}", fi * g1)));
    }
    Ok(())
}

/// `h[i] = Σ_{j <= i} f[j] g[i - j] · μ` with multi-indices compared
/// componentwise: the convolution of the two piecewise-constant functions,
/// translated so the box corner is the origin, restricted to the box.
///
/// Direct summation in a fixed order, parallel over output cells.
pub fn convolve<T: Real>(f: &GridFunction<T>, g: &GridFunction<T>) -> Result<GridFunction<T>> {
    let d = f.domain();
    if !d.same_grid(g.domain()) {
        return Err(Error::GridMismatch);
    }
    let mut m = [1usize; MAX_DIM];
    m[..d.dim()].copy_from_slice(d.cells_per_axis());
    let mu = d.cell_measure();
    let (fv, gv) = (f.values(), g.values());
    let at = |a: usize, b: usize, c: usize| (a * m[1] + b) * m[2] + c;
    let values: Vec<T> = (0..d.cell_count())
        .into_par_iter()
        .map(|i| {
            let (i0, i1, i2) = (i / (m[1] * m[2]), (i / m[2]) % m[1], i % m[2]);
            let mut acc = T::zero();
            for j0 in 0..=i0 {
                for j1 in 0..=i1 {
                    for j2 in 0..=i2 {
                        let a = fv[at(j0, j1, j2)];
                        if !a.is_zero() {
                            acc = acc + a * gv[at(i0 - j0, i1 - j1, i2 - j2)];
                        }
                    }
                }
            }
            acc * mu
        })
        .collect();
    GridFunction::new(d.clone(), values)
}

/// Log-spaced points on `[lo, hi]` merged with every breakpoint of the given
/// step functions that falls inside that range.
pub fn sample_points<T: Real>(lo: T, hi: T, n: usize, steps: &[&StepFunction<T>]) -> Vec<T> {
    let mut xs = if lo >= hi { vec![hi] } else { log_space(lo, hi, n) };
    for s in steps {
        xs.extend(s.breakpoints().iter().copied().filter(|&x| x >= lo && x <= hi && x > T::zero()));
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    xs
}

/// Default sample set for an instance: `[μ, |Ω|]` plus the breakpoints of
/// `f*`, `g*` and `h*`.
pub fn default_samples<T: Real>(inst: &ProductInstance<T>) -> Vec<T> {
    let d = inst.h.domain();
    let (fs, gs, hs) = (
        decreasing_rearrangement(&inst.f),
        decreasing_rearrangement(&inst.g),
        decreasing_rearrangement(&inst.h),
    );
    sample_points(d.cell_measure(), d.volume(), DEFAULT_SAMPLES, &[&fs, &gs, &hs])
}

fn kind_name(kind: ProductKind) -> &'static str {
    match kind {
        ProductKind::Pointwise => "pointwise",
        ProductKind::Convolution => "convolution",
    }
}

/// `x h**(x) <= ∫_0^x f* g*` at every sample `x`.
pub fn verify_lemma15<T: Real>(inst: &ProductInstance<T>, xs: &[T]) -> Report {
    let hs = decreasing_rearrangement(&inst.h).averaged();
    let fg = decreasing_rearrangement(&inst.f)
        .product(&decreasing_rearrangement(&inst.g))
        .averaged();
    let mut report = Report::new("x h**(x) <= int_0^x f* g*", SLACK).param("kind", kind_name(inst.kind));
    for &x in xs {
        report.record(to_f64(x), to_f64(hs.cumulative(x)), to_f64(fg.cumulative(x)));
    }
    report
}

/// Exponents for the Lorentz Hölder inequality: `1/p = 1/p₁ + 1/p₂` with
/// `p > 1`, and `1/q <= 1/q₁ + 1/q₂` with `q >= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderExponents<T> {
    pub p1: T,
    pub q1: Exponent<T>,
    pub p2: T,
    pub q2: Exponent<T>,
    pub p: T,
    pub q: Exponent<T>,
}

impl<T: Real> HolderExponents<T> {
    pub fn new(p1: T, q1: Exponent<T>, p2: T, q2: Exponent<T>, q: Exponent<T>) -> Result<Self> {
        for (name, v) in [("p1", p1), ("p2", p2)] {
            if !(v >= T::one() && v.is_finite()) {
                return Err(window(name, to_f64(v), "[1, inf)"));
            }
        }
        let inv_p = p1.recip() + p2.recip();
        if !(inv_p < T::one()) {
            return Err(window("1/p1 + 1/p2", to_f64(inv_p), "(0, 1)"));
        }
        if q.finite().is_some_and(|qv| qv < T::one()) {
            return Err(window("q", q.to_f64(), "[1, inf]"));
        }
        let tol = lit::<T>(1e-12);
        if q.recip() > q1.recip() + q2.recip() + tol {
            return Err(window("1/q", to_f64(q.recip()), "[0, 1/q1 + 1/q2]"));
        }
        Ok(HolderExponents {
            p1,
            q1,
            p2,
            q2,
            p: inv_p.recip(),
            q,
        })
    }

    /// Picks `1/q = 1/q₁ + 1/q₂`, raised to `q = 1` when that sum exceeds one.
    pub fn natural(p1: T, q1: Exponent<T>, p2: T, q2: Exponent<T>) -> Result<Self> {
        let s = q1.recip() + q2.recip();
        let q = if s.is_zero() {
            Exponent::Infinite
        } else {
            Exponent::Finite(s.recip().max(T::one()))
        };
        Self::new(p1, q1, p2, q2, q)
    }
}

/// `‖fg‖_{p,q} <= e^{1/e} p' |||f|||_{p₁,q₁} |||g|||_{p₂,q₂}`.
pub fn verify_holder<T: Real>(f: &GridFunction<T>, g: &GridFunction<T>, e: &HolderExponents<T>) -> Result<Report> {
    let h = f.mul(g)?;
    let target = LorentzParams::new(e.p, e.q)?;
    let pc = target.p_conjugate().ok_or_else(|| window("p", to_f64(e.p), "(1, inf)"))?;
    let lhs = decreasing_rearrangement(&h).norm(&target)?;
    let nf = decreasing_rearrangement(f).quasinorm(&LorentzParams::new(e.p1, e.q1)?);
    let ng = decreasing_rearrangement(g).quasinorm(&LorentzParams::new(e.p2, e.q2)?);
    let rhs = e_pow_inv_e::<T>() * pc * nf * ng;
    let mut report = Report::new("|fg|_{p,q} <= e^{1/e} p' |||f|||_{p1,q1} |||g|||_{p2,q2}", SLACK)
        .param("p1", to_f64(e.p1))
        .param("q1", e.q1.to_f64())
        .param("p2", to_f64(e.p2))
        .param("q2", e.q2.to_f64())
        .param("p", to_f64(e.p))
        .param("q", e.q.to_f64());
    report.record(to_f64(e.p), to_f64(lhs), to_f64(rhs));
    Ok(report)
}

/// `‖fg‖₁ <= e^{1/e} |||f|||_{p₁,q₁} |||g|||_{p₂,q₂}` for `1/p₁ + 1/p₂ = 1`,
/// `1/q₁ + 1/q₂ >= 1`.
pub fn verify_holder_l1<T: Real>(
    f: &GridFunction<T>,
    g: &GridFunction<T>,
    p1: T,
    q1: Exponent<T>,
    p2: T,
    q2: Exponent<T>,
) -> Result<Report> {
    let tol = lit::<T>(1e-12);
    if (p1.recip() + p2.recip() - T::one()).abs() > tol {
        return Err(window("1/p1 + 1/p2", to_f64(p1.recip() + p2.recip()), "{1}"));
    }
    if q1.recip() + q2.recip() < T::one() - tol {
        return Err(window("1/q1 + 1/q2", to_f64(q1.recip() + q2.recip()), "[1, inf)"));
    }
    let lhs = f.mul(g)?.l1_norm();
    let nf = decreasing_rearrangement(f).quasinorm(&LorentzParams::new(p1, q1)?);
    let ng = decreasing_rearrangement(g).quasinorm(&LorentzParams::new(p2, q2)?);
    let rhs = e_pow_inv_e::<T>() * nf * ng;
    let mut report = Report::new("|fg|_1 <= e^{1/e} |||f|||_{p1,q1} |||g|||_{p2,q2}", SLACK)
        .param("p1", to_f64(p1))
        .param("q1", q1.to_f64())
        .param("p2", to_f64(p2))
        .param("q2", q2.to_f64());
    report.record(1.0, to_f64(lhs), to_f64(rhs));
    Ok(report)
}

/// The two bounds on `h**` for `|f| <= a` supported on a set of measure at
/// most `x`.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma14Report {
    /// `h**(t) <= a g**(t)`
    pub local: Report,
    /// `h**(t) <= a (x/t) g**(x)`
    pub spread: Report,
}

impl Lemma14Report {
    pub fn holds(&self) -> bool {
        self.local.holds && self.spread.holds
    }
}

pub fn verify_lemma14<T: Real>(inst: &ProductInstance<T>, a: T, x: T, ts: &[T]) -> Result<Lemma14Report> {
    let sup = inst.f.sup_norm();
    if sup > a {
        return Err(window("sup |f|", to_f64(sup), "[0, a]"));
    }
    let supp = inst.f.support_measure();
    if supp > x {
        return Err(window("|supp f|", to_f64(supp), "[0, x]"));
    }
    let hs = decreasing_rearrangement(&inst.h).averaged();
    let gs = decreasing_rearrangement(&inst.g).averaged();
    let kind = kind_name(inst.kind);
    let mut local = Report::new("h**(t) <= a g**(t)", SLACK)
        .param("kind", kind)
        .param("a", to_f64(a));
    let mut spread = Report::new("h**(t) <= a (x/t) g**(x)", SLACK)
        .param("kind", kind)
        .param("a", to_f64(a))
        .param("x", to_f64(x));
    let gx = gs.eval(x);
    for &t in ts.iter().filter(|&&t| t > T::zero()) {
        let ht = hs.eval(t);
        local.record(to_f64(t), to_f64(ht), to_f64(a * gs.eval(t)));
        spread.record(to_f64(t), to_f64(ht), to_f64(a * x / t * gx));
    }
    Ok(Lemma14Report { local, spread })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, TestFunctionSpec};
    use crate::grid::Domain;
    use approx::assert_relative_eq;

    fn unit(m: usize) -> Domain<f64> {
        Domain::unit_box(2, m).unwrap()
    }

    fn noise(d: &Domain<f64>, seed: u64, density: f64) -> GridFunction<f64> {
        generate(
            &TestFunctionSpec::Noise {
                seed,
                low: 0.0,
                high: 1.0,
                density,
            },
            d,
        )
        .unwrap()
    }

    /// Plain quadruple loop, no parallelism or skipping.
    fn convolve_oracle(f: &GridFunction<f64>, g: &GridFunction<f64>) -> Vec<f64> {
        let d = f.domain();
        let m = d.cells_per_axis().to_vec();
        let mut out = vec![0.0; d.cell_count()];
        for i0 in 0..m[0] {
            for i1 in 0..m[1] {
                let mut s = 0.0;
                for j0 in 0..=i0 {
                    for j1 in 0..=i1 {
                        s += f.values()[j0 * m[1] + j1] * g.values()[(i0 - j0) * m[1] + (i1 - j1)];
                    }
                }
                out[i0 * m[1] + i1] = s * d.cell_measure();
            }
        }
        out
    }

    #[test]
    fn convolution_matches_double_sum() {
        let d = unit(12);
        let (f, g) = (noise(&d, 1, 0.6), noise(&d, 2, 0.8));
        let h = convolve(&f, &g).unwrap();
        for (a, b) in h.values().iter().zip(convolve_oracle(&f, &g)) {
            assert_relative_eq!(*a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn fubini_when_nothing_is_truncated() {
        // supports in the lower half along each axis, so every i - j fits
        let d = unit(16);
        let lower = |seed| {
            let n = noise(&d, seed, 1.0);
            let v = n
                .values()
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let m = d.multi_index(k);
                    if m[0] < 8 && m[1] < 8 {
                        v
                    } else {
                        0.0
                    }
                })
                .collect();
            GridFunction::new(d.clone(), v).unwrap()
        };
        let (f, g) = (lower(5), lower(6));
        let h = convolve(&f, &g).unwrap();
        assert_relative_eq!(h.l1_norm(), f.l1_norm() * g.l1_norm(), max_relative = 1e-10);
    }

    #[test]
    fn point_mass_reproduces_g() {
        let d = unit(8);
        let mut fv = vec![0.0; 64];
        fv[0] = 1.0 / d.cell_measure();
        let f = GridFunction::new(d.clone(), fv).unwrap();
        let g = noise(&d, 9, 1.0);
        let h = convolve(&f, &g).unwrap();
        for (a, b) in h.values().iter().zip(g.values()) {
            assert_relative_eq!(*a, *b, max_relative = 1e-12);
        }
        let zero = convolve(&GridFunction::zeros(d.clone()), &g).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn convolution_on_large_box_breaks_axioms() {
        let d = Domain::cube(2, -1.0, 1.0, 8).unwrap();
        let one = GridFunction::from_fn(d, |_| 1.0).unwrap();
        assert!(matches!(
            ProductInstance::convolution(one.clone(), one),
            Err(Error::ProductAxiom(_))
        ));
    }

    #[test]
    fn lemma15_indicators_closed_form() {
        // χ_E χ_F = χ_{E∩F}: x h**(x) = min(x, |E∩F|) and ∫_0^x f*g* = min(x, |E|, |F|)
        let d = unit(10);
        let f = GridFunction::from_fn(d.clone(), |x| if x[0] < 0.6 { 1.0 } else { 0.0 }).unwrap();
        let g = GridFunction::from_fn(d.clone(), |x| if x[1] < 0.3 { 1.0 } else { 0.0 }).unwrap();
        let inst = ProductInstance::pointwise(f, g).unwrap();
        let xs = default_samples(&inst);
        let r = verify_lemma15(&inst, &xs);
        assert!(r.holds);
        let hs = decreasing_rearrangement(inst.h()).averaged();
        assert_relative_eq!(hs.cumulative(1.0), 0.18, max_relative = 1e-12);
        let fg = decreasing_rearrangement(inst.f())
            .product(&decreasing_rearrangement(inst.g()))
            .averaged();
        assert_relative_eq!(fg.cumulative(1.0), 0.3, max_relative = 1e-12);
    }

    #[test]
    fn lemma15_and_lemma14_on_convolutions() {
        let d = unit(10);
        for seed in 0..5 {
            let f = noise(&d, 100 + seed, 0.2);
            let g = noise(&d, 200 + seed, 0.7);
            let inst = ProductInstance::convolution(f.clone(), g).unwrap();
            assert!(verify_lemma15(&inst, &default_samples(&inst)).holds);
            let r = verify_lemma14(&inst, f.sup_norm(), f.support_measure(), &default_samples(&inst)).unwrap();
            assert!(r.holds(), "{r:?}");
        }
    }

    #[test]
    fn lemma14_rejects_violated_hypotheses() {
        let d = unit(4);
        let f = noise(&d, 1, 1.0);
        let inst = ProductInstance::pointwise(f.clone(), f.clone()).unwrap();
        assert!(verify_lemma14(&inst, 0.5 * f.sup_norm(), 1.0, &[0.5]).is_err());
        assert!(verify_lemma14(&inst, f.sup_norm(), 0.5, &[0.5]).is_err());
    }

    #[test]
    fn holder_indicator_closed_form() {
        // χ_E² = χ_E; with a = |E|: ‖χ_E‖_{p,q} = (p' p/q)^{1/q} a^{1/p}
        // and |||χ_E|||_{2p,2q} = (p/q)^{1/(2q)} a^{1/(2p)}
        let d = unit(10);
        let f = GridFunction::from_fn(d, |x| if x[0] < 0.4 { 1.0 } else { 0.0 }).unwrap();
        let (p, q) = (2.0, 2.0);
        let e = HolderExponents::natural(2.0 * p, Exponent::Finite(2.0 * q), 2.0 * p, Exponent::Finite(2.0 * q)).unwrap();
        assert_relative_eq!(e.p, p, max_relative = 1e-14);
        let r = verify_holder(&f, &f, &e).unwrap();
        let a: f64 = 0.4;
        let pc = p / (p - 1.0);
        let lhs = (pc * p / q).powf(1.0 / q) * a.powf(1.0 / p);
        let rhs = std::f64::consts::E.recip().exp() * pc * (p / q).powf(1.0 / q) * a.powf(1.0 / p);
        assert!(r.holds);
        assert_relative_eq!(r.worst_ratio, lhs / rhs, max_relative = 1e-9);
    }

    #[test]
    fn holder_l1_and_window_errors() {
        let d = unit(8);
        let f = noise(&d, 3, 0.5);
        let r = verify_holder_l1(&f, &f, 2.0, Exponent::Finite(2.0), 2.0, Exponent::Finite(2.0)).unwrap();
        assert!(r.holds);
        assert!(verify_holder_l1(&f, &f, 2.0, Exponent::Finite(2.0), 3.0, Exponent::Finite(2.0)).is_err());
        assert!(verify_holder_l1(&f, &f, 2.0, Exponent::Finite(4.0), 2.0, Exponent::Finite(4.0)).is_err());
        assert!(HolderExponents::natural(1.5, Exponent::Finite(1.0), 2.0, Exponent::Finite(1.0)).is_err());
        let z = GridFunction::zeros(d);
        let r = verify_holder_l1(&z, &f, 2.0, Exponent::Finite(2.0), 2.0, Exponent::Finite(2.0)).unwrap();
        assert_eq!(r.worst_ratio, 0.0);
    }
}
