//! The constant chain of the exponential decay theorems, level-set decay
//! experiments and their least-squares fits.

use serde::Serialize;

use crate::error::{window, Error, Result};
use crate::generate::{generate, TestFunctionSpec};
use crate::grid::{CellSet, Domain, GridFunction};
use crate::hausdorff::{choquet_integral, content_upper, fkr_constant, ContentEstimator};
use crate::potentials::{hedberg_constants, riesz_potential, RieszParams};
use crate::real::{count, e_pow_inv_e, lit, log_space, to_f64, Real};
use crate::rearrangement::{lorentz_norm, normalize_unit_lorentz, Exponent, LorentzParams};
use crate::report::Report;

/// Relative tolerance on the unit-norm precondition.
pub const NORM_TOL: f64 = 1e-9;
/// Slack allowed when comparing measured content against the bound.
pub const DECAY_SLACK: f64 = 1e-9;
/// Share of the nonzero-content samples (largest `t`) used by [`DecayFit`].
pub const TAIL_FRACTION: f64 = 0.5;
/// Points per segment of the default `t` grid.
pub const T_GRID_POINTS: usize = 64;

/// Every constant of the decay argument for one parameter choice.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct ConstantChain<T> {
    pub dim: usize,
    pub alpha: T,
    pub beta: T,
    pub q: Exponent<T>,
    pub q_conjugate: T,
    /// `|Ω|`
    pub volume: T,
    /// Upper estimate of `H^β_∞(Ω)`.
    pub content_omega: T,
    pub epsilon: T,
    pub r: T,
    pub p0: T,
    pub delta_p0: T,
    pub gamma_alpha: T,
    pub c1: T,
    pub c1_prime: T,
    pub c2: T,
    pub c3: T,
    pub c4: T,
    pub c5: T,
    pub c6: T,
    pub t0: T,
    pub c: T,
    pub big_c: T,
    /// `N / (N - α)`
    pub rescale: T,
    /// `c (N - α) / N`
    pub c_bar: T,
    /// `c ((N - α) / N)^{q'}`, what the rescaling argument actually yields.
    pub c_bar_derived: T,
}

impl<T: Real> ConstantChain<T> {
    /// `δ_p = N/p - α`.
    pub fn delta_p(&self, p: T) -> T {
        count::<T>(self.dim) / p - self.alpha
    }

    /// `C₁ δ_p^{-1/q'}`, at least 1 for every `p ∈ [p₀, N/α)`.
    pub fn c1_bound(&self, p: T) -> T {
        self.c1 * self.delta_p(p).powf(-self.q_conjugate.recip())
    }

    /// `C e^{-c t^{q'}}`.
    pub fn bound(&self, t: T) -> T {
        self.big_c * (-self.c * t.powf(self.q_conjugate)).exp()
    }

    /// `C e^{-c̄ t^{q'}}`.
    pub fn bound_bar(&self, t: T) -> T {
        self.big_c * (-self.c_bar * t.powf(self.q_conjugate)).exp()
    }

    /// Right side of the exponential-integrability bound,
    /// `H^β_∞(Ω) + C / (c/c' - 1)`.
    pub fn corollary_rhs(&self, c_prime: T) -> T {
        self.content_omega + self.big_c / (self.c / c_prime - T::one())
    }
}

/// The pair `(ε, r)` with `N - β = r(α - ε)`, `ε ∈ (0, α]`, `r ∈ (1, N/α)`.
pub fn choose_eps_r<T: Real>(dim: usize, alpha: T, beta: T) -> Result<(T, T)> {
    let n = count::<T>(dim);
    if !(alpha > T::zero() && alpha < n) {
        return Err(window("alpha", to_f64(alpha), "(0, N)"));
    }
    if !(beta > T::zero() && beta <= n) {
        return Err(window("beta", to_f64(beta), "(0, N]"));
    }
    let r = (T::one().max((n - beta) / alpha) + n / alpha) / lit(2.0);
    let eps = alpha - (n - beta) / r;
    Ok((eps, r))
}

/// Builds the chain from its inputs; `content_omega` is an estimate of
/// `H^β_∞(Ω)` (see [`constants_for_domain`]).
pub fn compute_constants<T: Real>(
    dim: usize,
    alpha: T,
    beta: T,
    q: Exponent<T>,
    volume: T,
    content_omega: T,
) -> Result<ConstantChain<T>> {
    let riesz = RieszParams::new(dim, alpha)?;
    let (epsilon, r) = choose_eps_r(dim, alpha, beta)?;
    let q_conjugate = match q {
        Exponent::Infinite => T::one(),
        Exponent::Finite(q) if q > T::one() && q.is_finite() => q / (q - T::one()),
        Exponent::Finite(q) => return Err(window("q", to_f64(q), "(1, inf]")),
    };
    if !(volume > T::zero() && volume.is_finite()) {
        return Err(window("volume", to_f64(volume), "(0, inf)"));
    }
    if !(content_omega > T::zero() && content_omega.is_finite()) {
        return Err(window("content_omega", to_f64(content_omega), "(0, inf)"));
    }
    let n = count::<T>(dim);
    let one = T::one();
    let inv_q = q_conjugate.recip();
    let e_e = e_pow_inv_e::<T>();

    let p0 = (n / alpha + one) / lit(2.0);
    let delta_p0 = n / p0 - alpha;
    let c1 = (e_e * (n + alpha) / (n - alpha) * volume.max(one) * (n / q_conjugate).powf(inv_q))
        .max(delta_p0.powf(inv_q));

    // Lebesgue bound at s = r: 1/s = α/N + 1/ρ and |||χ_Ω|||_{ρ,1} = ρ|Ω|^{1/ρ}
    let s = r;
    let rho = (s.recip() - alpha / n).recip();
    let c1_prime = e_e * s / (s - one) * rho * volume.powf(rho.recip());

    let (c2, c3, c4) = hedberg_constants(&riesz, epsilon);
    let c5 = fkr_constant(dim, n - beta);
    let c6 = c5 * c1_prime.powf(r);
    let t0 = c4 * c1 * delta_p0.powf(-inv_q) / (-one).exp();
    let c = epsilon * r * ((-one).exp() / (c1 * c4)).powf(q_conjugate);
    let big_c = c6.max(content_omega * (c * t0.powf(q_conjugate)).exp());
    let rescale = n / (n - alpha);
    Ok(ConstantChain {
        dim,
        alpha,
        beta,
        q,
        q_conjugate,
        volume,
        content_omega,
        epsilon,
        r,
        p0,
        delta_p0,
        gamma_alpha: riesz.gamma_alpha(),
        c1,
        c1_prime,
        c2,
        c3,
        c4,
        c5,
        c6,
        t0,
        c,
        big_c,
        rescale,
        c_bar: c / rescale,
        c_bar_derived: c * rescale.recip().powf(q_conjugate),
    })
}

/// [`compute_constants`] with `|Ω|` and `H^β_∞(Ω)` taken from the grid box.
pub fn constants_for_domain<T: Real>(domain: &Domain<T>, alpha: T, beta: T, q: Exponent<T>) -> Result<ConstantChain<T>> {
    let content = content_upper(&CellSet::full(domain.clone()), beta)?.value;
    compute_constants(domain.dim(), alpha, beta, q, domain.volume(), content)
}

/// Solves `C₄ C₁ δ^{-1/q'} / t = e^{-1}` for `δ`; only meaningful for `t ≥ t₀`.
pub fn solve_delta<T: Real>(t: T, chain: &ConstantChain<T>) -> Result<T> {
    if !(t >= chain.t0) {
        return Err(Error::BelowThreshold {
            t: to_f64(t),
            t0: to_f64(chain.t0),
        });
    }
    Ok((T::E() * chain.c4 * chain.c1 / t).powf(chain.q_conjugate))
}

/// Log-spaced thresholds: one segment from `t₀/4` up to `max(t_max, t₀)`
/// and one over `[t_max/64, t_max]` where the level sets are nonempty.
pub fn default_t_grid<T: Real>(t0: T, t_max: T) -> Vec<T> {
    let mut ts = log_space(t0 / lit(4.0), t0.max(t_max), T_GRID_POINTS);
    if t_max > T::zero() && t_max.is_finite() {
        ts.extend(log_space(t_max / lit(64.0), t_max, T_GRID_POINTS));
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();
    ts
}

/// Content and Lebesgue measure of `{|u| > t}` for each `t`, in input order.
pub fn level_contents<T: Real>(u: &GridFunction<T>, beta: T, ts: &[T]) -> Result<Vec<(T, T)>> {
    let d = u.domain();
    let vals = u.values();
    let mut order: Vec<usize> = (0..d.cell_count()).collect();
    order.sort_by(|&a, &b| vals[b].abs().partial_cmp(&vals[a].abs()).unwrap().then(a.cmp(&b)));
    let mut by_t: Vec<usize> = (0..ts.len()).collect();
    by_t.sort_by(|&a, &b| ts[b].partial_cmp(&ts[a]).unwrap());
    let mut est = ContentEstimator::new(d, beta)?;
    let mut out = vec![(T::zero(), T::zero()); ts.len()];
    let mut next = 0;
    for k in by_t {
        while next < order.len() && vals[order[next]].abs() > ts[k] {
            est.insert(order[next]);
            next += 1;
        }
        out[k] = (est.value(), count::<T>(est.len()) * d.cell_measure());
    }
    Ok(out)
}

/// Least-squares summary of measured decay.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit<T> {
    /// Fraction of the nonzero-content samples used, by largest `t`.
    pub tail_fraction: f64,
    pub window: (T, T),
    pub points: usize,
    /// From `log content ≈ log C_emp - c_emp t^{q'}`.
    pub c_emp: T,
    pub big_c_emp: T,
    /// Slope of `log(-log(content / H^β_∞(Ω)))` against `log t`.
    pub exponent_emp: Option<T>,
}

fn ols<T: Real>(xs: &[T], ys: &[T]) -> Option<(T, T)> {
    let n = count::<T>(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    if xs.len() < 2 || !(sxx > T::zero()) {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

impl<T: Real> DecayFit<T> {
    /// Fits `(t, content)` samples; `None` with fewer than two usable points.
    pub fn fit(samples: &[(T, T)], q_conjugate: T, content_omega: T, tail_fraction: f64) -> Option<Self> {
        let mut nonzero: Vec<(T, T)> = samples.iter().copied().filter(|s| s.1 > T::zero()).collect();
        nonzero.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        nonzero.dedup_by(|a, b| a.0 == b.0);
        let keep = ((nonzero.len() as f64) * tail_fraction).ceil() as usize;
        let tail = &nonzero[nonzero.len() - keep.min(nonzero.len())..];
        let xs: Vec<T> = tail.iter().map(|s| s.0.powf(q_conjugate)).collect();
        let ys: Vec<T> = tail.iter().map(|s| s.1.ln()).collect();
        let (slope, icpt) = ols(&xs, &ys)?;

        let below: Vec<&(T, T)> = tail.iter().filter(|s| s.1 < content_omega).collect();
        let lx: Vec<T> = below.iter().map(|s| s.0.ln()).collect();
        let ly: Vec<T> = below.iter().map(|s| (-(s.1 / content_omega).ln()).ln()).collect();
        let exponent_emp = ols(&lx, &ly).map(|(s, _)| s);
        Some(DecayFit {
            tail_fraction,
            window: (tail[0].0, tail[tail.len() - 1].0),
            points: tail.len(),
            c_emp: -slope,
            big_c_emp: icpt.exp(),
            exponent_emp,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecaySample<T> {
    pub t: T,
    pub content: T,
    pub measure: T,
    pub bound: T,
}

/// Outcome of one level-set decay experiment.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct DecayReport<T> {
    pub chain: ConstantChain<T>,
    pub norm: T,
    pub samples: Vec<DecaySample<T>>,
    pub check: Report,
    pub fit: Option<DecayFit<T>>,
}

impl<T: Real> DecayReport<T> {
    pub fn holds(&self) -> bool {
        self.check.holds
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,content,measure,bound")?;
        for s in &self.samples {
            writeln!(w, "{:e},{:e},{:e},{:e}", s.t, s.content, s.measure, s.bound)?;
        }
        Ok(())
    }
}

fn check_unit(norm: f64) -> Result<()> {
    if norm > 1.0 + NORM_TOL {
        return Err(Error::NormTooLarge { norm });
    }
    Ok(())
}

fn decay_experiment<T: Real>(
    u: &GridFunction<T>,
    chain: ConstantChain<T>,
    norm: T,
    ts: Option<&[T]>,
    name: &str,
    bound: impl Fn(&ConstantChain<T>, T) -> T,
) -> Result<DecayReport<T>> {
    let ts = match ts {
        Some(ts) => ts.to_vec(),
        None => default_t_grid(chain.t0, u.sup_norm()),
    };
    let levels = level_contents(u, chain.beta, &ts)?;
    let mut check = Report::new(name, DECAY_SLACK)
        .param("dim", chain.dim)
        .param("alpha", to_f64(chain.alpha))
        .param("beta", to_f64(chain.beta))
        .param("q", chain.q.to_f64())
        .param("norm", to_f64(norm));
    let mut samples = Vec::with_capacity(ts.len());
    for (&t, &(content, measure)) in ts.iter().zip(&levels) {
        let b = bound(&chain, t);
        check.record(to_f64(t), to_f64(content), to_f64(b));
        samples.push(DecaySample {
            t,
            content,
            measure,
            bound: b,
        });
    }
    let pairs: Vec<(T, T)> = samples.iter().map(|s| (s.t, s.content)).collect();
    let fit = DecayFit::fit(&pairs, chain.q_conjugate, chain.content_omega, TAIL_FRACTION);
    Ok(DecayReport {
        chain,
        norm,
        samples,
        check,
        fit,
    })
}

/// Checks `H^β_∞({|I_α f| > t}) <= C e^{-c t^{q'}}` for `‖f‖_{N/α,q} <= 1`.
///
/// `ts` defaults to [`default_t_grid`].
pub fn verify_main2<T: Real>(
    f: &GridFunction<T>,
    alpha: T,
    beta: T,
    q: Exponent<T>,
    ts: Option<&[T]>,
) -> Result<DecayReport<T>> {
    let d = f.domain();
    let chain = constants_for_domain(d, alpha, beta, q)?;
    let norm = lorentz_norm(f, &LorentzParams::new(count::<T>(d.dim()) / alpha, q)?)?;
    check_unit(to_f64(norm))?;
    let u = riesz_potential(f, &RieszParams::new(d.dim(), alpha)?)?;
    decay_experiment(&u, chain, norm, ts, "H^b({|I_a f| > t}) <= C exp(-c t^q')", ConstantChain::bound)
}

/// The Lebesgue-norm variant: `f` with `‖f‖_{N/α} <= 1`.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct Main1Report<T> {
    pub lebesgue_norm: T,
    /// `‖f‖_{N/α,N/α}`, at most `N/(N-α)` times the Lebesgue norm.
    pub lorentz_norm: T,
    pub inflation_ok: bool,
    /// The rescaled function `(N-α)/N · f` run through [`verify_main2`].
    pub scaled: DecayReport<T>,
    /// Content of `{|I_α f| > t}` against `C e^{-c̄ t^{q'}}`.
    pub content: DecayReport<T>,
    /// Lebesgue measure against the same bound, when `β = N`.
    pub measure: Option<Report>,
}

impl<T: Real> Main1Report<T> {
    pub fn holds(&self) -> bool {
        self.inflation_ok
            && self.scaled.holds()
            && self.content.holds()
            && self.measure.as_ref().map_or(true, |m| m.holds)
    }
}

pub fn verify_main1_main<T: Real>(f: &GridFunction<T>, alpha: T, beta: T, ts: Option<&[T]>) -> Result<Main1Report<T>> {
    let d = f.domain();
    let n = count::<T>(d.dim());
    let s = n / alpha;
    let lebesgue_norm = f.lebesgue_norm(s);
    check_unit(to_f64(lebesgue_norm))?;
    let q = Exponent::Finite(s);
    let lorentz = lorentz_norm(f, &LorentzParams::new(s, q)?)?;
    let factor = n / (n - alpha);
    let inflation_ok = to_f64(lorentz) <= to_f64(factor * lebesgue_norm) * (1.0 + NORM_TOL);
    let scaled = verify_main2(&f.scale(factor.recip()), alpha, beta, q, ts)?;

    let u = riesz_potential(f, &RieszParams::new(d.dim(), alpha)?)?;
    let content = decay_experiment(
        &u,
        scaled.chain.clone(),
        lorentz,
        ts,
        "H^b({|I_a f| > t}) <= C exp(-c_bar t^q')",
        ConstantChain::bound_bar,
    )?;
    let measure = (beta == n).then(|| {
        let mut r = Report::new("|{|I_a f| > t}| <= C exp(-c_bar t^q')", DECAY_SLACK);
        for s in &content.samples {
            r.record(to_f64(s.t), to_f64(s.measure), to_f64(s.bound));
        }
        r
    });
    Ok(Main1Report {
        lebesgue_norm,
        lorentz_norm: lorentz,
        inflation_ok,
        scaled,
        content,
        measure,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct CorollaryReport<T> {
    pub chain: ConstantChain<T>,
    pub c_prime: T,
    /// Choquet integral of `exp(c'|I_α f|^{q'})`.
    pub lhs: T,
    pub rhs: T,
    pub check: Report,
}

/// Checks `∫_Ω exp(c'|I_α f|^{q'}) dH^β_∞ <= H^β_∞(Ω) + C/(c/c' - 1)`.
pub fn verify_corollary<T: Real>(
    f: &GridFunction<T>,
    alpha: T,
    beta: T,
    q: Exponent<T>,
    c_prime: T,
) -> Result<CorollaryReport<T>> {
    let d = f.domain();
    let chain = constants_for_domain(d, alpha, beta, q)?;
    if !(c_prime > T::zero() && c_prime < chain.c) {
        return Err(window("c'", to_f64(c_prime), "(0, c)"));
    }
    let norm = lorentz_norm(f, &LorentzParams::new(count::<T>(d.dim()) / alpha, q)?)?;
    check_unit(to_f64(norm))?;
    let u = riesz_potential(f, &RieszParams::new(d.dim(), alpha)?)?;
    let g = u.map(|v| (c_prime * v.abs().powf(chain.q_conjugate)).exp())?;
    let lhs = choquet_integral(&g, beta)?;
    let rhs = chain.corollary_rhs(c_prime);
    let mut check = Report::new("int exp(c'|I_a f|^q') dH^b <= H^b(Omega) + C/(c/c' - 1)", DECAY_SLACK)
        .param("beta", to_f64(beta))
        .param("q", q.to_f64())
        .param("c_prime", to_f64(c_prime));
    check.record(to_f64(c_prime), to_f64(lhs), to_f64(rhs));
    Ok(CorollaryReport {
        chain,
        c_prime,
        lhs,
        rhs,
        check,
    })
}

/// The near-extremal family `|x - x₀|^{-α} χ_{λ<|x-x₀|<R}` at several `λ`,
/// each normalized in `L^{N/α,q}`, run on one shared `t` grid.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct EnvelopeReport<T> {
    pub lambdas: Vec<T>,
    pub members: Vec<DecayReport<T>>,
    /// Largest content over the family at each `t`.
    pub envelope: Vec<(T, T)>,
    pub fit: Option<DecayFit<T>>,
}

impl<T: Real> EnvelopeReport<T> {
    pub fn holds(&self) -> bool {
        self.members.iter().all(|m| m.holds())
    }
}

/// Runs the near-extremal family centred in `domain` with outer radius
/// half the shortest side. `lambdas` defaults to `2^{-k}` from `R/2` down to
/// the cell size.
pub fn near_extremal_envelope<T: Real>(
    domain: &Domain<T>,
    alpha: T,
    beta: T,
    q: Exponent<T>,
    lambdas: Option<&[T]>,
) -> Result<EnvelopeReport<T>> {
    let dim = domain.dim();
    let center: Vec<f64> = (0..dim)
        .map(|a| to_f64((domain.lower()[a] + domain.upper()[a]) / lit(2.0)))
        .collect();
    let outer = (0..dim)
        .map(|a| to_f64(domain.upper()[a] - domain.lower()[a]))
        .fold(f64::INFINITY, f64::min)
        / 2.0;
    let lambdas: Vec<T> = match lambdas {
        Some(l) => l.to_vec(),
        None => {
            let h = to_f64(domain.min_spacing());
            let mut l = Vec::new();
            let mut lam = outer / 2.0;
            while lam >= h {
                l.push(lit(lam));
                lam /= 2.0;
            }
            l
        }
    };
    let params = LorentzParams::new(count::<T>(dim) / alpha, q)?;
    let riesz = RieszParams::new(dim, alpha)?;
    let chain = constants_for_domain(domain, alpha, beta, q)?;
    let mut potentials = Vec::with_capacity(lambdas.len());
    for &lam in &lambdas {
        let spec = TestFunctionSpec::near_extremal(center.clone(), to_f64(alpha), to_f64(lam), outer);
        let f = normalize_unit_lorentz(&generate(&spec, domain)?, &params)?;
        let norm = lorentz_norm(&f, &params)?;
        potentials.push((norm, riesz_potential(&f, &riesz)?));
    }
    let t_max = potentials.iter().map(|(_, u)| u.sup_norm()).fold(T::zero(), T::max);
    let ts = default_t_grid(chain.t0, t_max);
    let mut members = Vec::with_capacity(lambdas.len());
    for (norm, u) in &potentials {
        check_unit(to_f64(*norm))?;
        members.push(decay_experiment(
            u,
            chain.clone(),
            *norm,
            Some(&ts),
            "H^b({|I_a f| > t}) <= C exp(-c t^q')",
            ConstantChain::bound,
        )?);
    }
    let envelope: Vec<(T, T)> = ts
        .iter()
        .enumerate()
        .map(|(k, &t)| (t, members.iter().map(|m| m.samples[k].content).fold(T::zero(), T::max)))
        .collect();
    let fit = DecayFit::fit(&envelope, chain.q_conjugate, chain.content_omega, TAIL_FRACTION);
    Ok(EnvelopeReport {
        lambdas,
        members,
        envelope,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::HedbergParams;
    use approx::assert_relative_eq;

    fn chain(beta: f64, q: Exponent<f64>) -> ConstantChain<f64> {
        compute_constants(2, 1.0, beta, q, 1.0, 1.0).unwrap()
    }

    #[test]
    fn eps_r_examples() {
        let (e, r) = choose_eps_r(2, 1.0, 1.0).unwrap();
        assert_relative_eq!(r, 1.5);
        assert_relative_eq!(e, 1.0 / 3.0, epsilon = 1e-15);
        let (e, r) = choose_eps_r(2, 1.0, 2.0).unwrap();
        assert_eq!((e, r), (1.0, 1.5));
        assert!(choose_eps_r(2, 2.0, 1.0).is_err());
        assert!(choose_eps_r(2, 1.0, 0.0).is_err());
    }

    #[test]
    fn chain_basics() {
        let ch = chain(2.0, Exponent::Finite(2.0));
        assert_eq!(ch.p0, 1.5);
        assert_relative_eq!(ch.delta_p0, 1.0 / 3.0, epsilon = 1e-15);
        assert!(ch.c1 >= ch.delta_p0.powf(0.5));
        assert_relative_eq!(ch.c5, 25.0, epsilon = 1e-12);
        // c t0^{q'} = εr/δ_{p0}
        assert_relative_eq!(ch.c * ch.t0.powf(2.0), 1.5 / ch.delta_p0, epsilon = 1e-12);
        assert_relative_eq!(solve_delta(ch.t0, &ch).unwrap(), ch.delta_p0, epsilon = 1e-12);
        assert!(matches!(solve_delta(ch.t0 / 2.0, &ch), Err(Error::BelowThreshold { .. })));
        let t1 = std::f64::consts::E * ch.c4 * ch.c1;
        if t1 >= ch.t0 {
            assert_relative_eq!(solve_delta(t1, &ch).unwrap(), 1.0, epsilon = 1e-12);
        }
        assert!(compute_constants(2, 1.0, 2.0, Exponent::Finite(1.0), 1.0, 1.0).is_err());
    }

    #[test]
    fn c4_independent_of_p() {
        let ch = chain(2.0, Exponent::Finite(2.0));
        let riesz = RieszParams::new(2, 1.0).unwrap();
        for p in [1.5, 1.8, 1.95] {
            let h = HedbergParams::new(&riesz, ch.epsilon, p).unwrap();
            assert_eq!(h.c4, ch.c4);
        }
    }

    #[test]
    fn delta_halves_geometrically() {
        let ch = chain(1.0, Exponent::Finite(4.0));
        let t = ch.t0 * 3.0;
        let ratio = solve_delta(2.0 * t, &ch).unwrap() / solve_delta(t, &ch).unwrap();
        assert_relative_eq!(ratio, 2f64.powf(-ch.q_conjugate), epsilon = 1e-12);
        let ch = chain(1.0, Exponent::Infinite);
        assert_eq!(ch.q_conjugate, 1.0);
    }

    #[test]
    fn fit_recovers_exact_decay() {
        let samples: Vec<(f64, f64)> = (1..=20)
            .map(|k| {
                let t = k as f64 * 0.1;
                (t, 0.5 * (-3.0 * t * t).exp())
            })
            .collect();
        let fit = DecayFit::fit(&samples, 2.0, 0.5, 0.5).unwrap();
        assert_eq!(fit.points, 10);
        assert_relative_eq!(fit.c_emp, 3.0, epsilon = 1e-9);
        assert_relative_eq!(fit.big_c_emp, 0.5, epsilon = 1e-9);
        assert_relative_eq!(fit.exponent_emp.unwrap(), 2.0, epsilon = 1e-9);
        assert!(DecayFit::fit(&[(1.0, 0.0), (2.0, 1.0)], 2.0, 1.0, 0.5).is_none());
    }

    #[test]
    fn zero_function_holds_trivially() {
        let d = Domain::unit_box(2, 16).unwrap();
        let f = GridFunction::zeros(d);
        let rep = verify_main2(&f, 1.0, 2.0, Exponent::Finite(2.0), None).unwrap();
        assert!(rep.holds());
        assert!(rep.samples.iter().all(|s| s.content == 0.0));
        let cor = verify_corollary(&f, 1.0, 2.0, Exponent::Finite(2.0), rep.chain.c / 2.0).unwrap();
        assert_relative_eq!(cor.lhs, rep.chain.content_omega, epsilon = 1e-12);
        assert!(cor.check.holds);
    }

    #[test]
    fn rejects_large_norm_and_bad_c_prime() {
        let d = Domain::unit_box(2, 16).unwrap();
        let f = GridFunction::from_fn(d, |_| 10.0).unwrap();
        assert!(matches!(
            verify_main2(&f, 1.0, 2.0, Exponent::Finite(2.0), None),
            Err(Error::NormTooLarge { .. })
        ));
        let z = GridFunction::zeros(Domain::unit_box(2, 8).unwrap());
        let ch = constants_for_domain(z.domain(), 1.0, 2.0, Exponent::Finite(2.0)).unwrap();
        assert!(verify_corollary(&z, 1.0, 2.0, Exponent::Finite(2.0), ch.c).is_err());
    }

    #[test]
    fn ball_indicator_main1() {
        let d = Domain::unit_box(2, 32).unwrap();
        let spec = TestFunctionSpec::BallIndicator {
            center: vec![0.5, 0.5],
            radius: 0.25,
            height: 1.0,
        };
        let f = generate::<f64>(&spec, &d).unwrap();
        let f = f.scale(f.lebesgue_norm(2.0).recip());
        let rep = verify_main1_main(&f, 1.0, 2.0, None).unwrap();
        assert!(rep.holds());
        assert!(rep.measure.is_some());
        assert!(rep.lorentz_norm <= 2.0 * rep.lebesgue_norm * (1.0 + 1e-9));
        for s in &rep.content.samples {
            assert!(s.measure <= s.content * (1.0 + 1e-12));
        }
    }
}
