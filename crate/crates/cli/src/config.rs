//! Experiment configuration, read from TOML. Every section is optional.
//!
//! ```toml
//! [domain]
//! dim = 2
//! lower = [0.0, 0.0]
//! upper = [1.0, 1.0]
//! cells = 64
//!
//! [[functions]]
//! kind = "ball_indicator"
//! center = [0.5, 0.5]
//! radius = 0.25
//!
//! [[functions]]
//! kind = "noise"
//! seed = 7
//! low = 0.0
//! high = 1.0
//!
//! [params]
//! alpha = 1.0
//! beta = [1.0, 2.0]
//! q = [2.0, 4.0, "inf"]
//!
//! [tgrid]
//! lo = 0.01
//! hi = 2.0
//! points = 64
//!
//! [output]
//! dir = "out"
//! plot = true
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use critdecay::{Domain, Exponent, GridFunction, TestFunctionSpec};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainConfig,
    pub functions: Vec<TestFunctionSpec>,
    /// A saved grid (see `critdecay::io`) used instead of `functions`.
    pub grid_file: Option<PathBuf>,
    pub params: ParamConfig,
    pub tgrid: Option<TGridConfig>,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    pub dim: usize,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    pub cells: usize,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig {
            dim: 2,
            lower: None,
            upper: None,
            cells: 32,
        }
    }
}

/// A second Lorentz exponent: a number or `"inf"`.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum QValue {
    Num(f64),
    Word(Infinity),
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
pub enum Infinity {
    #[serde(rename = "inf")]
    Inf,
}

impl QValue {
    pub fn exponent(self) -> Exponent<f64> {
        match self {
            QValue::Num(q) => Exponent::from_f64(q),
            QValue::Word(_) => Exponent::Infinite,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamConfig {
    pub alpha: f64,
    pub beta: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<QValue>,
    /// Order of the fractional maximal function for `maximal` and `weak-type`.
    pub gamma: f64,
    /// Truncation radius for `verify truncated-kernel`.
    pub radius: f64,
}

impl Default for ParamConfig {
    fn default() -> Self {
        ParamConfig {
            alpha: 1.0,
            beta: vec![1.0, 2.0],
            p: vec![1.5, 2.0, 3.0],
            q: vec![QValue::Num(2.0), QValue::Num(4.0), QValue::Word(Infinity::Inf)],
            gamma: 1.0,
            radius: 0.25,
        }
    }
}

impl ParamConfig {
    pub fn qs(&self) -> Vec<Exponent<f64>> {
        self.q.iter().map(|q| q.exponent()).collect()
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TGridConfig {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    64
}

impl TGridConfig {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.lo > 0.0 && self.hi >= self.lo && self.points > 0) {
            bail!("tgrid needs 0 < lo <= hi and points > 0");
        }
        Ok(critdecay::real::log_space(self.lo, self.hi, self.points))
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative agreement required between the truncated-kernel closed form
    /// and its grid value.
    pub kernel_rel: f64,
    /// Relative agreement required between the two quasi-norm formulas.
    pub equivalence_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            kernel_rel: 0.02,
            equivalence_rel: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// Also write a matplotlib script next to the CSV files.
    pub plot: bool,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("malformed config {}", path.display()))
    }

    pub fn domain(&self) -> Result<Domain<f64>> {
        let d = &self.domain;
        let lower = d.lower.clone().unwrap_or_else(|| vec![0.0; d.dim]);
        let upper = d.upper.clone().unwrap_or_else(|| vec![1.0; d.dim]);
        Ok(Domain::new(&lower, &upper, &vec![d.cells; d.dim])?)
    }

    /// The configured functions, or a small default suite when none are given.
    pub fn specs(&self, domain: &Domain<f64>) -> Vec<TestFunctionSpec> {
        if !self.functions.is_empty() {
            return self.functions.clone();
        }
        let dim = domain.dim();
        let mid: Vec<f64> = (0..dim).map(|a| 0.5 * (domain.lower()[a] + domain.upper()[a])).collect();
        let side = (0..dim)
            .map(|a| domain.upper()[a] - domain.lower()[a])
            .fold(f64::INFINITY, f64::min);
        vec![
            TestFunctionSpec::BallIndicator {
                center: mid.clone(),
                radius: side / 4.0,
                height: 1.0,
            },
            TestFunctionSpec::Bumps {
                count: 3,
                seed: 1,
                min_width: side / 10.0,
                max_width: side / 3.0,
                amplitude: (0.2, 1.0),
                signed: true,
            },
            TestFunctionSpec::Noise {
                seed: 2,
                low: 0.0,
                high: 1.0,
                density: 0.3,
            },
            TestFunctionSpec::near_extremal(mid, self.params.alpha, side / 16.0, side / 2.0),
        ]
    }

    /// Functions to run, labelled for report files.
    pub fn functions(&self) -> Result<(Domain<f64>, Vec<(String, GridFunction<f64>)>)> {
        if let Some(path) = &self.grid_file {
            let f: GridFunction<f64> =
                critdecay::io::load_grid(path).with_context(|| format!("loading grid {}", path.display()))?;
            return Ok((f.domain().clone(), vec![("grid".into(), f)]));
        }
        let domain = self.domain()?;
        let mut out = Vec::new();
        for (k, spec) in self.specs(&domain).iter().enumerate() {
            let f = critdecay::generate(spec, &domain).with_context(|| format!("function {k}"))?;
            out.push((format!("f{k}"), f));
        }
        Ok((domain, out))
    }
}
