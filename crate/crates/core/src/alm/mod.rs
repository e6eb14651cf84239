//! The ALM iteration and the multivariate means it produces.
//!
//! Three operators are averaged cyclically, `(A, B, C) ↦ (B σ₁ C, C σ₂ A, A σ₃ B)`,
//! and more generally `n+1` operators are fed through `n+1` means of arity `n`
//! in cyclic order. Under the convergence hypotheses (every mean non-trivial
//! and affinely dominated; all arithmetic, or at most one not strictly
//! concave) the iterates share a common limit and the aggregate `Σ pₖ Aₖ`
//! decreases to it in the Loewner order, with `p` the Perron vector of the
//! weight matrix.

mod config;
mod engine;
mod multi;
mod ordered;
mod triple;

pub use config::{AlmConfig, DEFAULT_EPS_RELATIVE};
pub use engine::{alm_compute_n, AlmOutcome, DistanceGauge, LadderRung, StopReason, TraceRecord};
pub use multi::{estimate_weight_vector, MultiFlags, MultiMean, DEFAULT_WEIGHT_STEP};
pub use ordered::{ordered_convergence_run, OrderedTrace};
pub use triple::{
    alm_compute, alm_step, build_alm_multimean, validate_triple, MeanTriple, Validity,
};
