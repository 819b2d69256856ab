//! Transient probe response of a Lambda-type emitter whose upper transition
//! decays into a reservoir with an inverse square-root density of modes at
//! its band edge.
//!
//! Two independent routes compute the excited-state amplitude `b1(t)`:
//! [`closedform`] evaluates the analytic inverse Laplace transform built from
//! the roots of a quintic, and [`volterra`] integrates the weakly singular
//! integro-differential equation directly. Everything is in units of the
//! reservoir coupling `beta`.

pub mod analysis;
pub mod closedform;
pub mod error;
pub mod kernels;
pub mod params;
pub mod polyroots;
pub mod quad;
pub mod specfun;
pub mod volterra;

pub use closedform::{
    build_root_system, eval_b1, eval_susceptibility, solve_closed_form, steady_state_value,
    AmplitudeTrace, Method, RootSystem, SusceptibilityTrace,
};
pub use error::{Error, Result};
pub use kernels::KernelSpec;
pub use params::{DerivedParams, SystemParams, TimeGrid};
pub use polyroots::{build_quintic, find_roots, ComplexPolynomial, RootList};
pub use volterra::{Mode, Scheme, SolverConfig};
