//! Test-function generators sampled at cell centres.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Domain, GridFunction, MAX_DIM};
use crate::real::{lit, to_f64, Real};

/// Default height at which singular radial profiles are cut off.
pub const DEFAULT_CAP: f64 = 1e3;

fn default_cap() -> f64 {
    DEFAULT_CAP
}

fn default_amplitude() -> (f64, f64) {
    (0.2, 1.0)
}

fn default_density() -> f64 {
    1.0
}

fn default_height() -> f64 {
    1.0
}

/// Description of a test function; serializable so experiment configs can
/// name them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunctionSpec {
    /// `height · χ_{B(center, radius)}` (cell centres with `|x - c| <= r`).
    BallIndicator {
        center: Vec<f64>,
        radius: f64,
        #[serde(default = "default_height")]
        height: f64,
    },
    /// `min(|x - c|^{-exponent}, cap)` on the shell `inner < |x - c| < outer`.
    RadialPower {
        center: Vec<f64>,
        exponent: f64,
        #[serde(default = "default_cap")]
        cap: f64,
        #[serde(default)]
        inner: f64,
        #[serde(default)]
        outer: Option<f64>,
    },
    /// `log(1/|x - c|)` clipped to `[-cap, cap]`.
    LogKernel {
        center: Vec<f64>,
        #[serde(default = "default_cap")]
        cap: f64,
    },
    /// Sum of `count` smooth compactly supported bumps
    /// `a·exp(1 - 1/(1 - (r/w)^2))` with random centres, widths and heights.
    Bumps {
        count: usize,
        seed: u64,
        min_width: f64,
        max_width: f64,
        #[serde(default = "default_amplitude")]
        amplitude: (f64, f64),
        #[serde(default)]
        signed: bool,
    },
    /// I.i.d. uniform values on `[low, high)`; each cell is nonzero with
    /// probability `density`.
    Noise {
        seed: u64,
        low: f64,
        high: f64,
        #[serde(default = "default_density")]
        density: f64,
    },
}

impl TestFunctionSpec {
    /// The profile `|x - c|^{-α} χ_{λ < |x - c| < outer}` that saturates the
    /// weak critical space as `λ → 0`.
    pub fn near_extremal(center: Vec<f64>, alpha: f64, lambda: f64, outer: f64) -> Self {
        TestFunctionSpec::RadialPower {
            center,
            exponent: alpha,
            cap: DEFAULT_CAP,
            inner: lambda,
            outer: Some(outer),
        }
    }

    /// True when every sampled value is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        match self {
            TestFunctionSpec::BallIndicator { height, .. } => *height >= 0.0,
            TestFunctionSpec::RadialPower { .. } => true,
            TestFunctionSpec::LogKernel { .. } => false,
            TestFunctionSpec::Bumps { signed, amplitude, .. } => !*signed && amplitude.0 >= 0.0,
            TestFunctionSpec::Noise { low, .. } => *low >= 0.0,
        }
    }
}

fn check_center<T: Real>(center: &[f64], domain: &Domain<T>) -> Result<[T; MAX_DIM]> {
    if center.len() != domain.dim() {
        return Err(Error::InvalidSpec(format!(
            "center has {} coordinates, domain has dimension {}",
            center.len(),
            domain.dim()
        )));
    }
    let c: Vec<T> = center.iter().map(|&x| lit::<T>(x)).collect();
    if !domain.contains_point(&c) {
        return Err(Error::InvalidSpec(format!("center {center:?} outside the domain")));
    }
    let mut out = [T::zero(); MAX_DIM];
    out[..c.len()].copy_from_slice(&c);
    Ok(out)
}

fn check_radius<T: Real>(r: f64, name: &str, domain: &Domain<T>) -> Result<()> {
    if !(r.is_finite() && r > 0.0) || r > to_f64(domain.diameter()) {
        return Err(Error::InvalidSpec(format!("{name} {r} must lie in (0, diam Ω]")));
    }
    Ok(())
}

#[inline]
fn dist<T: Real>(x: &[T], c: &[T; MAX_DIM]) -> T {
    x.iter()
        .zip(c)
        .map(|(&a, &b)| (a - b) * (a - b))
        .fold(T::zero(), |s, v| s + v)
        .sqrt()
}

/// Samples `spec` on `domain`.
pub fn generate<T: Real>(spec: &TestFunctionSpec, domain: &Domain<T>) -> Result<GridFunction<T>> {
    let domain = domain.clone();
    match spec {
        TestFunctionSpec::BallIndicator { center, radius, height } => {
            let c = check_center(center, &domain)?;
            check_radius(*radius, "radius", &domain)?;
            if !height.is_finite() {
                return Err(Error::InvalidSpec("height must be finite".into()));
            }
            let (r, h) = (lit::<T>(*radius), lit::<T>(*height));
            GridFunction::from_fn(domain, |x| if dist(x, &c) <= r { h } else { T::zero() })
        }
        TestFunctionSpec::RadialPower {
            center,
            exponent,
            cap,
            inner,
            outer,
        } => {
            let c = check_center(center, &domain)?;
            if !(exponent.is_finite() && *exponent >= 0.0) {
                return Err(Error::InvalidSpec("exponent must be finite and >= 0".into()));
            }
            if !(cap.is_finite() && *cap > 0.0) {
                return Err(Error::InvalidSpec("cap must be positive".into()));
            }
            if !(inner.is_finite() && *inner >= 0.0) {
                return Err(Error::InvalidSpec("inner radius must be >= 0".into()));
            }
            if let Some(o) = outer {
                check_radius(*o, "outer radius", &domain)?;
                if o <= inner {
                    return Err(Error::InvalidSpec("outer radius must exceed inner".into()));
                }
            }
            let s = lit::<T>(*exponent);
            let cap = lit::<T>(*cap);
            let inner = lit::<T>(*inner);
            let outer = outer.map(lit::<T>).unwrap_or(T::infinity());
            GridFunction::from_fn(domain, |x| {
                let r = dist(x, &c);
                if (inner > T::zero() && r <= inner) || r >= outer {
                    T::zero()
                } else if r.is_zero() {
                    cap
                } else {
                    r.powf(-s).min(cap)
                }
            })
        }
        TestFunctionSpec::LogKernel { center, cap } => {
            let c = check_center(center, &domain)?;
            if !(cap.is_finite() && *cap > 0.0) {
                return Err(Error::InvalidSpec("cap must be positive".into()));
            }
            let cap = lit::<T>(*cap);
            GridFunction::from_fn(domain, |x| {
                let r = dist(x, &c);
                if r.is_zero() {
                    cap
                } else {
                    (-r.ln()).max(-cap).min(cap)
                }
            })
        }
        TestFunctionSpec::Bumps {
            count,
            seed,
            min_width,
            max_width,
            amplitude,
            signed,
        } => {
            if *count == 0 {
                return Err(Error::InvalidSpec("need at least one bump".into()));
            }
            if !(*min_width > 0.0 && min_width <= max_width && max_width.is_finite()) {
                return Err(Error::InvalidSpec("need 0 < min_width <= max_width".into()));
            }
            if !(amplitude.0 <= amplitude.1 && amplitude.0.is_finite() && amplitude.1.is_finite()) {
                return Err(Error::InvalidSpec("amplitude range must be ordered".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let dim = domain.dim();
            let bumps: Vec<([T; MAX_DIM], T, T)> = (0..*count)
                .map(|_| {
                    let mut c = [T::zero(); MAX_DIM];
                    for (a, ca) in c.iter_mut().enumerate().take(dim) {
                        let lo = to_f64(domain.lower()[a]);
                        let hi = to_f64(domain.upper()[a]);
                        *ca = lit(rng.gen_range(lo..hi));
                    }
                    let w = if min_width < max_width {
                        rng.gen_range(*min_width..*max_width)
                    } else {
                        *min_width
                    };
                    let mut a = if amplitude.0 < amplitude.1 {
                        rng.gen_range(amplitude.0..amplitude.1)
                    } else {
                        amplitude.0
                    };
                    if *signed && rng.gen_bool(0.5) {
                        a = -a;
                    }
                    (c, lit::<T>(w), lit::<T>(a))
                })
                .collect();
            GridFunction::from_fn(domain, |x| {
                bumps
                    .iter()
                    .map(|(c, w, a)| {
                        let s = dist(x, c) / *w;
                        if s < T::one() {
                            *a * (T::one() - (T::one() - s * s).recip()).exp()
                        } else {
                            T::zero()
                        }
                    })
                    .fold(T::zero(), |acc, v| acc + v)
            })
        }
        TestFunctionSpec::Noise {
            seed,
            low,
            high,
            density,
        } => {
            if !(low < high && low.is_finite() && high.is_finite()) {
                return Err(Error::InvalidSpec("need low < high".into()));
            }
            if !(*density > 0.0 && *density <= 1.0) {
                return Err(Error::InvalidSpec("density must lie in (0, 1]".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let values = (0..domain.cell_count())
                .map(|_| {
                    let keep = *density >= 1.0 || rng.gen_bool(*density);
                    let v = rng.gen_range(*low..*high);
                    if keep {
                        lit::<T>(v)
                    } else {
                        T::zero()
                    }
                })
                .collect();
            GridFunction::new(domain, values)
        }
    }
}
