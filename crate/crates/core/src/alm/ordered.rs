use super::config::AlmConfig;
use super::engine::{classify, run_observed, AlmOutcome};
use super::multi::MultiMean;
use crate::error::{Error, Result};
use crate::linalg::{loewner_margin, SpdMatrix};
use crate::stochastic::gamma_from_multimeans;

/// Relative slack for the ordering precondition.
const ORDER_SLACK: f64 = 1e-12;

/// Diagnostics of a run on Loewner-ordered inputs.
#[derive(Debug, Clone)]
pub struct OrderedTrace {
    /// Largest amount by which the alternating order pattern failed, in
    /// absolute eigenvalue units (0 when it held at every step).
    pub pattern_violation: f64,
    /// `‖A⁽⁰⁾ₘ − S‖_F` for every step `m`.
    pub residuals: Vec<f64>,
    /// `max_k ‖A⁽ᵏ⁾ₘ − S‖_F` for every step `m`.
    pub max_residuals: Vec<f64>,
    pub outcome: AlmOutcome,
}

/// `min_k λ_min(A⁽ᵏ⁾ − A⁽ᵏ⁺¹⁾)` (decreasing) or its mirror (increasing).
fn order_margin(ops: &[SpdMatrix], decreasing: bool) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for w in ops.windows(2) {
        let m = if decreasing {
            loewner_margin(&w[1], &w[0])?
        } else {
            loewner_margin(&w[0], &w[1])?
        };
        worst = worst.min(m);
    }
    Ok(worst)
}

/// Runs the recursion with one permutation-invariant mean on
/// `A⁽⁰⁾ ≥ … ≥ A⁽ⁿ⁾`, checking that even steps keep this order and odd steps
/// reverse it, and recording the distance of each iterate to the limit.
pub fn ordered_convergence_run(
    m: &MultiMean,
    operators: &[SpdMatrix],
    cfg: &AlmConfig,
) -> Result<OrderedTrace> {
    cfg.validate()?;
    if !m.flags().permutation_invariant {
        return Err(Error::PreconditionError(format!(
            "{} is not permutation invariant",
            m.label()
        )));
    }
    let size = m.arity() + 1;
    if operators.len() != size {
        return Err(Error::DimensionMismatch {
            expected: size,
            found: operators.len(),
        });
    }
    for x in &operators[1..] {
        operators[0].check_same_dim(x)?;
    }
    let scale = operators
        .iter()
        .map(SpdMatrix::operator_norm)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if order_margin(operators, true)? < -ORDER_SLACK * scale {
        return Err(Error::PreconditionError(
            "operators are not Loewner-ordered decreasingly".into(),
        ));
    }
    let means = vec![m.clone(); size];
    let weights: Vec<Vec<f64>> = means.iter().map(|x| x.weights().to_vec()).collect();
    let profile = gamma_from_multimeans(&weights)?;
    let validity = classify(&means)?;

    let mut history: Vec<Vec<SpdMatrix>> = Vec::new();
    let mut worst = 0.0_f64;
    let run_cfg = AlmConfig {
        force_iterate: true,
        ..cfg.clone()
    };
    let outcome = run_observed(
        &means,
        &profile,
        validity,
        operators,
        &run_cfg,
        &mut |step, ops| {
            worst = worst.max(-order_margin(ops, step % 2 == 0)?);
            history.push(ops.to_vec());
            Ok(())
        },
    )?;
    let limit = outcome.limit.matrix();
    let residuals = history
        .iter()
        .map(|ops| (ops[0].matrix() - limit).norm())
        .collect();
    let max_residuals = history
        .iter()
        .map(|ops| {
            ops.iter()
                .map(|x| (x.matrix() - limit).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(OrderedTrace {
        pattern_violation: worst,
        residuals,
        max_residuals,
        outcome,
    })
}
