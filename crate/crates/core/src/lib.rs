//! Multivariate operator means of positive semidefinite matrices.
//!
//! Two-variable Kubo–Ando means (`∇_r`, `#_r`, `!_r`, custom representing
//! functions) are combined by the ALM iteration into three-variable means, and
//! recursively into means of any number of arguments. The crate also provides
//! the Perron machinery that predicts the limit weights, the Thompson metric,
//! and a registry of seeded property checks.
//!
//! ```
//! use alm_means::{alm_compute, validate_triple, AlmConfig, SpdMatrix, TwoVarMean};
//!
//! let g = TwoVarMean::geometric(0.5).unwrap();
//! let triple = validate_triple(g.clone(), g.clone(), g).unwrap();
//! let s = |x: f64| SpdMatrix::scalar(x).unwrap();
//! let out = alm_compute(&triple, &s(2.0), &s(3.0), &s(6.0), &AlmConfig::default()).unwrap();
//! assert!((out.limit.matrix()[0] - 36f64.cbrt()).abs() < 1e-12);
//! ```

// `!(x <= tol)` is used on purpose so that NaN counts as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alm;
pub mod cli;
pub mod error;
pub mod io;
pub mod kubo_ando;
pub mod linalg;
pub mod metrics;
pub mod stochastic;
pub mod verify;

pub use alm::{
    alm_compute, alm_compute_n, alm_step, build_alm_multimean, estimate_weight_vector,
    ordered_convergence_run, validate_triple, AlmConfig, AlmOutcome, MeanTriple, MultiMean,
    StopReason,
};
pub use error::{Error, Result};
pub use kubo_ando::{make_mean, MeanKind, MeanSpec, SpecKind, TwoVarMean};
pub use linalg::{SpdMatrix, SpectralDecomposition};
pub use metrics::{gauge_r, spectral_radius, thompson, ThompsonDistance};
pub use stochastic::{closed_form_p3, gamma_from_multimeans, perron_vector, StochasticProfile};
