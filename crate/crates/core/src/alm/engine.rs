use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::config::{AlmConfig, DEFAULT_EPS_RELATIVE};
use super::multi::MultiMean;
use super::triple::Validity;
use crate::error::{Error, Result};
use crate::kubo_ando::MeanKind;
use crate::linalg::{min_eigenvalue, weighted_sum, SpdMatrix, DEFINITE_RATIO};
use crate::metrics::thompson;
use crate::stochastic::{gamma_from_multimeans, profile_unchecked, StochasticProfile};

/// Relative Frobenius floor (per unit dimension) for runs on regularized
/// semidefinite inputs, whose conditioning rules out the Thompson gauge.
const LADDER_FLOOR_PER_DIM: f64 = 256.0 * f64::EPSILON;

/// Stopping threshold for one ladder rung: `ε_mach·dim·max(256, √κ)` with `κ`
/// the worst condition number among the shifted inputs. Rounding in the
/// square-root factors of the two-variable evaluation grows like `√κ`, and the
/// iteration stagnates at that level; stopping there is safe because the
/// aggregate decreases towards the limit from above.
fn rung_tol(cfg_tol: f64, shifted: &[SpdMatrix]) -> Result<f64> {
    let mut kappa = 1.0_f64;
    for m in shifted {
        kappa = kappa.max(m.max_eigenvalue()? / m.min_eigenvalue()?.max(f64::MIN_POSITIVE));
    }
    let dim = shifted[0].dim() as f64;
    Ok(cfg_tol.max(LADDER_FLOOR_PER_DIM * dim).max(f64::EPSILON * dim * kappa.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    Converged,
    MaxIter,
    ClosedForm,
}

/// How the pairwise spread of the iterates is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DistanceGauge {
    /// Largest pairwise Thompson distance.
    Thompson,
    /// Largest pairwise `‖Aᵢ − Aⱼ‖_F / ‖Sₙ‖_F`.
    RelativeFrobenius,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Largest pairwise distance among the iterates.
    pub max_distance: f64,
    /// `⟨x, Sₙ x⟩` for the normalized all-ones probe `x`.
    pub s_probe: f64,
    /// `‖Sₙ − Sₙ₊₁‖_F`, absent on the final record.
    pub s_step_frobenius: Option<f64>,
    /// `λ_min(Sₙ − Sₙ₊₁)`, absent on the final record.
    pub s_step_min_eig: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct LadderRung {
    pub eps: f64,
    pub iterations: usize,
    pub limit: SpdMatrix,
}

/// Result of an ALM run.
#[derive(Debug, Clone)]
pub struct AlmOutcome {
    /// The aggregate `Sₙ = Σ pₖ Aₙ⁽ᵏ⁾` at the stopping index.
    pub limit: SpdMatrix,
    pub p: Vec<f64>,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub final_distance: f64,
    pub gauge: DistanceGauge,
    pub trace: Vec<TraceRecord>,
    /// Most negative `λ_min(Sₙ − Sₙ₊₁)` seen (0 when none was negative).
    pub s_monotone_violation: f64,
    /// `‖S₀‖` (spectral norm), the scale the violation is judged against.
    pub s0_norm: f64,
    pub spectral_gap: f64,
    /// One entry per ε-rung when the inputs were semidefinite, largest ε first.
    pub ladder: Vec<LadderRung>,
    /// The individual sequences `A⁽ᵏ⁾` at the stopping index (empty for closed forms).
    pub iterates: Vec<SpdMatrix>,
}

pub(crate) struct RunState {
    pub ops: Vec<SpdMatrix>,
    pub limit: SpdMatrix,
    pub iterations: usize,
    pub converged: bool,
    pub final_distance: f64,
    pub trace: Vec<TraceRecord>,
    pub violation: f64,
    pub s0_norm: f64,
}

pub(crate) type Observer<'a> = dyn FnMut(usize, &[SpdMatrix]) -> Result<()> + 'a;

fn max_pairwise(ops: &[SpdMatrix], gauge: DistanceGauge, scale: f64) -> Result<f64> {
    let mut d = 0.0_f64;
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let dij = match gauge {
                DistanceGauge::Thompson => thompson(&ops[i], &ops[j])?.value(),
                DistanceGauge::RelativeFrobenius => {
                    (ops[i].matrix() - ops[j].matrix()).norm() / scale.max(f64::MIN_POSITIVE)
                }
            };
            d = d.max(dij);
        }
    }
    Ok(d)
}

/// One cyclic step: `A⁽ᵏ⁾ ← Mₖ(A⁽ᵏ⁺¹⁾, …, A⁽ᵏ⁺ⁿ⁾)`, indices mod `n+1`.
pub(crate) fn cyclic_step(
    means: &[MultiMean],
    ops: &[SpdMatrix],
    cfg: &AlmConfig,
) -> Result<Vec<SpdMatrix>> {
    let size = ops.len();
    (0..size)
        .map(|k| {
            let args: Vec<SpdMatrix> = (1..size).map(|i| ops[(k + i) % size].clone()).collect();
            means[k].evaluate(&args, cfg)
        })
        .collect()
}

/// Iterates until the pairwise spread is at most `tol` or `cfg.max_iter` steps.
pub(crate) fn run_iteration(
    means: &[MultiMean],
    init: Vec<SpdMatrix>,
    p: &[f64],
    cfg: &AlmConfig,
    gauge: DistanceGauge,
    tol: f64,
    observer: &mut Observer<'_>,
) -> Result<RunState> {
    let dim = init[0].dim();
    let probe = DVector::from_element(dim, 1.0 / (dim as f64).sqrt());
    let inner_cfg = cfg.nested();
    let mut ops = init;
    let mut s = weighted_sum(p, &ops)?;
    let s0_norm = s.operator_norm()?;
    let mut violation = 0.0_f64;
    let mut trace = Vec::new();
    let mut it = 0;
    loop {
        observer(it, &ops)?;
        let dist = max_pairwise(&ops, gauge, s.frobenius())?;
        let done = dist <= tol;
        if done || it >= cfg.max_iter {
            trace.push(TraceRecord {
                iteration: it,
                max_distance: dist,
                s_probe: s.quadratic_form(&probe),
                s_step_frobenius: None,
                s_step_min_eig: None,
            });
            log::debug!("ALM stop at {it}: distance {dist:e} (tol {tol:e})");
            return Ok(RunState {
                ops,
                limit: s,
                iterations: it,
                converged: done,
                final_distance: dist,
                trace,
                violation,
                s0_norm,
            });
        }
        let next = cyclic_step(means, &ops, &inner_cfg)?;
        let s_next = weighted_sum(p, &next)?;
        let diff = s.matrix() - s_next.matrix();
        let step_min = min_eigenvalue(&diff)?;
        violation = violation.min(step_min);
        if it % cfg.trace_every == 0 {
            trace.push(TraceRecord {
                iteration: it,
                max_distance: dist,
                s_probe: s.quadratic_form(&probe),
                s_step_frobenius: Some(diff.norm()),
                s_step_min_eig: Some(step_min),
            });
        }
        ops = next;
        s = s_next;
        it += 1;
    }
}

fn check_operators(ops: &[SpdMatrix], count: usize) -> Result<()> {
    if ops.len() != count {
        return Err(Error::DimensionMismatch {
            expected: count,
            found: ops.len(),
        });
    }
    for m in &ops[1..] {
        ops[0].check_same_dim(m)?;
    }
    Ok(())
}

/// Classifies `n+1` means against the convergence hypotheses.
pub(crate) fn classify(means: &[MultiMean]) -> Result<Validity> {
    if let Some(k) = means.iter().position(|m| m.flags().is_trivial) {
        return Err(Error::InvalidTriple(format!("mean {k} is trivial")));
    }
    if means.iter().all(|m| m.flags().is_arithmetic) {
        return Ok(Validity::AllArithmetic);
    }
    let loose: Vec<usize> = means
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.flags().strictly_concave)
        .map(|(k, _)| k)
        .collect();
    if loose.len() <= 1 {
        Ok(Validity::AtMostOneArithmetic)
    } else {
        Err(Error::HypothesisViolation { indices: loose })
    }
}

/// The `(n+1)`-variable ALM mean of `operators` under means `M₀ … Mₙ`.
pub fn alm_compute_n(
    means: &[MultiMean],
    operators: &[SpdMatrix],
    cfg: &AlmConfig,
) -> Result<AlmOutcome> {
    cfg.validate()?;
    let size = means.len();
    if size < 3 {
        return Err(Error::ParameterError(format!(
            "need at least three means, got {size}"
        )));
    }
    let n = size - 1;
    if let Some(k) = means.iter().position(|m| m.arity() != n) {
        return Err(Error::ParameterError(format!(
            "mean {k} has arity {}, expected {n}",
            means[k].arity()
        )));
    }
    check_operators(operators, size)?;
    let weights: Vec<Vec<f64>> = means.iter().map(|m| m.weights().to_vec()).collect();
    let (profile, validity) = if cfg.unsafe_allow {
        let validity = match classify(means) {
            Ok(v) if weights.iter().all(|w| w.iter().all(|&x| x > 0.0)) => v,
            _ => Validity::Unverified,
        };
        (profile_unchecked(&weights)?, validity)
    } else {
        let profile = gamma_from_multimeans(&weights)?;
        (profile, classify(means)?)
    };
    run_validated(means, &profile, validity, operators, cfg)
}

fn closed_form(p: &[f64], limit: SpdMatrix, profile: &StochasticProfile) -> Result<AlmOutcome> {
    let s0_norm = limit.operator_norm()?;
    Ok(AlmOutcome {
        limit,
        p: p.to_vec(),
        iterations: 0,
        stop_reason: StopReason::ClosedForm,
        final_distance: 0.0,
        gauge: DistanceGauge::Thompson,
        trace: Vec::new(),
        s_monotone_violation: 0.0,
        s0_norm,
        spectral_gap: profile.spectral_gap,
        ladder: Vec::new(),
        iterates: Vec::new(),
    })
}

/// Runs the recursion for means that already passed validation.
pub(crate) fn run_validated(
    means: &[MultiMean],
    profile: &StochasticProfile,
    validity: Validity,
    operators: &[SpdMatrix],
    cfg: &AlmConfig,
) -> Result<AlmOutcome> {
    run_observed(means, profile, validity, operators, cfg, &mut |_, _| Ok(()))
}

/// Orthonormal basis of the joint range of the operators (the range of their
/// sum), or `None` when that range is the whole space.
fn common_range(operators: &[SpdMatrix]) -> Result<Option<DMatrix<f64>>> {
    let dim = operators[0].dim();
    let sum = operators
        .iter()
        .fold(DMatrix::zeros(dim, dim), |acc, m| acc + m.matrix());
    let sum = SpdMatrix::from_computed(sum);
    let dec = sum.spectral()?;
    let cutoff = DEFINITE_RATIO * dec.max_eigenvalue().max(0.0);
    let keep: Vec<usize> = (0..dim).filter(|&i| dec.eigenvalues[i] > cutoff).collect();
    if keep.len() == dim {
        return Ok(None);
    }
    Ok(Some(dec.eigenvectors.select_columns(&keep)))
}

/// Operators sharing a kernel: every mean acts blockwise on `range ⊕ kernel`
/// and vanishes on the kernel, so the run happens on the compressions `VᵀXV`
/// and the result is embedded back as `V S Vᵀ`. This is the `ε → 0` limit the
/// ladder approximates, computed without the ill-conditioning of the shift.
fn run_on_range(
    v: &DMatrix<f64>,
    means: &[MultiMean],
    profile: &StochasticProfile,
    validity: Validity,
    operators: &[SpdMatrix],
    cfg: &AlmConfig,
    observer: &mut Observer<'_>,
) -> Result<AlmOutcome> {
    let dim = operators[0].dim();
    if v.ncols() == 0 {
        let zero = SpdMatrix::from_computed(DMatrix::zeros(dim, dim));
        return closed_form(&profile.p, zero, profile);
    }
    let expand = |m: &SpdMatrix| SpdMatrix::from_computed(v * m.matrix() * v.transpose());
    let compressed: Vec<SpdMatrix> = operators
        .iter()
        .map(|m| SpdMatrix::from_computed(v.transpose() * m.matrix() * v))
        .collect();
    let mut lifted_observer = |it: usize, ops: &[SpdMatrix]| {
        let full: Vec<SpdMatrix> = ops.iter().map(expand).collect();
        observer(it, &full)
    };
    let lift = |mut o: AlmOutcome| {
        o.limit = expand(&o.limit);
        o.iterates = o.iterates.iter().map(expand).collect();
        for rung in &mut o.ladder {
            rung.limit = expand(&rung.limit);
        }
        o
    };
    match run_observed(means, profile, validity, &compressed, cfg, &mut lifted_observer) {
        Ok(o) => Ok(lift(o)),
        Err(Error::NonConverged(o)) => Err(Error::NonConverged(Box::new(lift(*o)))),
        Err(e) => Err(e),
    }
}

pub(crate) fn run_observed(
    means: &[MultiMean],
    profile: &StochasticProfile,
    validity: Validity,
    operators: &[SpdMatrix],
    cfg: &AlmConfig,
    observer: &mut Observer<'_>,
) -> Result<AlmOutcome> {
    if !operators.iter().all(SpdMatrix::is_definite) {
        if let Some(v) = common_range(operators)? {
            return run_on_range(&v, means, profile, validity, operators, cfg, observer);
        }
    }
    let p = &profile.p;
    if !cfg.force_iterate {
        // every mean returns A on (A, …, A)
        if operators.iter().all(|m| m.matrix() == operators[0].matrix()) {
            return closed_form(p, operators[0].clone(), profile);
        }
        if validity == Validity::AllArithmetic {
            return closed_form(p, weighted_sum(p, operators)?, profile);
        }
        let all_harmonic = validity != Validity::Unverified
            && means.iter().all(|m| {
                m.as_two_var()
                    .is_some_and(|s| s.kind() == MeanKind::Harmonic)
            });
        if all_harmonic && operators.iter().all(SpdMatrix::is_definite) {
            let inverses = operators
                .iter()
                .map(SpdMatrix::inverse)
                .collect::<Result<Vec<_>>>()?;
            return closed_form(p, weighted_sum(p, &inverses)?.inverse()?, profile);
        }
    }

    let finish = |state: RunState, gauge, ladder: Vec<LadderRung>| {
        let outcome = AlmOutcome {
            limit: state.limit,
            p: p.clone(),
            iterations: state.iterations,
            stop_reason: if state.converged {
                StopReason::Converged
            } else {
                StopReason::MaxIter
            },
            final_distance: state.final_distance,
            gauge,
            trace: state.trace,
            s_monotone_violation: state.violation,
            s0_norm: state.s0_norm,
            spectral_gap: profile.spectral_gap,
            ladder,
            iterates: state.ops,
        };
        if state.converged {
            Ok(outcome)
        } else {
            Err(Error::NonConverged(Box::new(outcome)))
        }
    };

    if operators.iter().all(SpdMatrix::is_definite) {
        let state = run_iteration(
            means,
            operators.to_vec(),
            p,
            cfg,
            DistanceGauge::Thompson,
            cfg.tol,
            observer,
        )?;
        return finish(state, DistanceGauge::Thompson, Vec::new());
    }

    // semidefinite input without a common kernel: regularize along a decreasing ladder of shifts
    let dim = operators[0].dim();
    let eps0 = match cfg.eps_shift {
        Some(e) => e,
        None => {
            let mean_trace = operators
                .iter()
                .map(|m| m.trace() / dim as f64)
                .sum::<f64>()
                / operators.len() as f64;
            DEFAULT_EPS_RELATIVE * mean_trace
        }
    };
    if !(eps0 > 0.0) {
        return Err(Error::SingularInput);
    }
    let mut ladder = Vec::with_capacity(cfg.eps_ladder_len);
    let mut last = None;
    for j in 0..cfg.eps_ladder_len {
        let eps = eps0 * cfg.eps_ladder_factor.powi(j as i32);
        let shifted: Vec<SpdMatrix> = operators.iter().map(|m| m.shifted(eps)).collect();
        let tol = rung_tol(cfg.tol, &shifted)?;
        let state = run_iteration(
            means,
            shifted,
            p,
            cfg,
            DistanceGauge::RelativeFrobenius,
            tol,
            observer,
        )?;
        log::debug!("ladder rung eps = {eps:e}: {} iterations", state.iterations);
        ladder.push(LadderRung {
            eps,
            iterations: state.iterations,
            limit: state.limit.clone(),
        });
        let converged = state.converged;
        last = Some(state);
        if !converged {
            break;
        }
    }
    finish(last.unwrap(), DistanceGauge::RelativeFrobenius, ladder)
}
