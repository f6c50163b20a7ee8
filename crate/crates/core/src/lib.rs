//! Numerical tools for exponential level-set decay of Riesz potentials of
//! functions in critical Lorentz spaces.
//!
//! Everything operates on functions sampled on a uniform grid over a box in
//! dimension 1 to 3 and is generic over the scalar type (`f32` or `f64`).
//! The `*F64` / `*F32` aliases below fix the scalar.
//!
//! ```
//! use critdecay::{Domain, GridFunction, LorentzParams, lorentz_norm};
//!
//! let d = Domain::<f64>::unit_box(2, 8).unwrap();
//! let f = GridFunction::from_fn(d, |x| x[0] + x[1]).unwrap();
//! let n = lorentz_norm(&f, &LorentzParams::finite(2.0, 2.0).unwrap()).unwrap();
//! assert!(n > 0.0);
//! ```

pub mod decay;
pub mod error;
pub mod generate;
pub mod grid;
pub mod hausdorff;
pub mod io;
pub mod oneil;
pub mod potentials;
pub mod quadrature;
pub mod real;
pub mod report;
pub mod rearrangement;
pub mod special;

pub use decay::{
    choose_eps_r, compute_constants, constants_for_domain, near_extremal_envelope, solve_delta, verify_corollary,
    verify_main1_main, verify_main2, ConstantChain, DecayFit, DecayReport,
};
pub use error::{Error, Result};
pub use generate::{generate, TestFunctionSpec};
pub use grid::{level_set, CellSet, Domain, GridFunction};
pub use hausdorff::{choquet_integral, content_upper, fkr_constant, weak_type_check, ContentEstimator, CoverEstimate};
pub use potentials::{
    fractional_maximal, hedberg_bound_check, riesz_potential, HedbergParams, RieszParams,
};
pub use real::Real;
pub use rearrangement::{
    decreasing_rearrangement, distribution, lorentz_norm, lorentz_quasinorm, Exponent, LorentzParams, StepFunction,
};
pub use report::Report;

pub type DomainF64 = Domain<f64>;
pub type DomainF32 = Domain<f32>;
pub type GridFunctionF64 = GridFunction<f64>;
pub type GridFunctionF32 = GridFunction<f32>;
pub type StepFunctionF64 = StepFunction<f64>;
pub type StepFunctionF32 = StepFunction<f32>;
pub type ConstantChainF64 = ConstantChain<f64>;
pub type ConstantChainF32 = ConstantChain<f32>;
