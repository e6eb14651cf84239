use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default regularization shift relative to the mean normalized trace of the inputs.
pub const DEFAULT_EPS_RELATIVE: f64 = 1e-10;

/// Stopping rule, iteration cap and regularization ladder of one ALM run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlmConfig {
    /// Stop once the largest pairwise Thompson distance among iterates is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// First (largest) rung of the ε-ladder used for semidefinite inputs.
    /// `None` means `1e-10 ·` the mean of `tr(Aₖ)/dim`.
    pub eps_shift: Option<f64>,
    /// Ratio between consecutive rungs.
    pub eps_ladder_factor: f64,
    pub eps_ladder_len: usize,
    /// Record a trace entry every this many iterations.
    pub trace_every: usize,
    /// Iterate even when a closed form is available.
    pub force_iterate: bool,
    /// Run even when the convergence hypotheses fail.
    pub unsafe_allow: bool,
}

impl Default for AlmConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 10_000,
            eps_shift: None,
            eps_ladder_factor: 0.1,
            eps_ladder_len: 4,
            trace_every: 1,
            force_iterate: false,
            unsafe_allow: false,
        }
    }
}

impl AlmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::ParameterError(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::ParameterError("max_iter must be at least 1".into()));
        }
        if let Some(e) = self.eps_shift {
            if !(e >= 0.0) {
                return Err(Error::ParameterError(format!(
                    "eps_shift must be >= 0, got {e}"
                )));
            }
        }
        if !(self.eps_ladder_factor > 0.0 && self.eps_ladder_factor < 1.0) {
            return Err(Error::ParameterError(format!(
                "eps_ladder_factor must lie in (0, 1), got {}",
                self.eps_ladder_factor
            )));
        }
        if self.eps_ladder_len < 1 {
            return Err(Error::ParameterError(
                "eps_ladder_len must be at least 1".into(),
            ));
        }
        if self.trace_every < 1 {
            return Err(Error::ParameterError(
                "trace_every must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Copy used for nested evaluations: same tolerances, no trace.
    pub(crate) fn nested(&self) -> AlmConfig {
        AlmConfig {
            trace_every: usize::MAX,
            ..self.clone()
        }
    }
}
