use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::config::AlmConfig;
use super::engine::{classify, run_validated};
use super::triple::Validity;
use crate::error::{Error, Result};
use crate::kubo_ando::TwoVarMean;
use crate::linalg::{weighted_sum, SpdMatrix};
use crate::stochastic::{gamma_from_multimeans, StochasticProfile};

/// Default central-difference step of [`estimate_weight_vector`].
pub const DEFAULT_WEIGHT_STEP: f64 = 1e-5;
/// Weight vectors must sum to 1 within this.
const WEIGHT_SUM_TOL: f64 = 1e-12;

type MatrixFn = Arc<dyn Fn(&[SpdMatrix], &AlmConfig) -> Result<SpdMatrix> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MultiFlags {
    /// Every weight is strictly positive.
    pub affinely_dominated: bool,
    pub strictly_concave: bool,
    pub is_arithmetic: bool,
    pub permutation_invariant: bool,
    /// The mean returns one of its arguments.
    pub is_trivial: bool,
}

#[derive(Clone)]
enum Kind {
    TwoVar(TwoVarMean),
    Arithmetic,
    Alm(Arc<Tower>),
    Custom(MatrixFn),
}

struct Tower {
    means: Vec<MultiMean>,
    profile: StochasticProfile,
    validity: Validity,
}

/// An `n`-variable operator mean with its weight vector and classification.
#[derive(Clone)]
pub struct MultiMean {
    arity: usize,
    weights: Vec<f64>,
    flags: MultiFlags,
    kind: Kind,
    label: String,
}

impl fmt::Debug for MultiMean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiMean")
            .field("label", &self.label)
            .field("weights", &self.weights)
            .field("flags", &self.flags)
            .finish()
    }
}

impl fmt::Display for MultiMean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.len() < 2 {
        return Err(Error::ParameterError(
            "a mean needs at least two arguments".into(),
        ));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::ParameterError(format!(
            "negative weight in {weights:?}"
        )));
    }
    let s: f64 = weights.iter().sum();
    if (s - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::ParameterError(format!("weights sum to {s}, not 1")));
    }
    Ok(())
}

fn one_hot(weights: &[f64]) -> bool {
    weights.iter().filter(|&&w| w != 0.0).count() == 1
}

impl MultiMean {
    /// A Kubo–Ando mean viewed as a two-variable mean with weights `(1−r, r)`.
    pub fn two_var(sigma: TwoVarMean) -> MultiMean {
        let r = sigma.weight();
        let flags = MultiFlags {
            affinely_dominated: r > 0.0 && r < 1.0,
            strictly_concave: sigma.is_strictly_concave(),
            is_arithmetic: sigma.is_arithmetic(),
            permutation_invariant: sigma.is_symmetric(),
            is_trivial: sigma.is_trivial(),
        };
        MultiMean {
            arity: 2,
            weights: vec![1.0 - r, r],
            flags,
            label: sigma.label().to_string(),
            kind: Kind::TwoVar(sigma),
        }
    }

    /// `Σ wᵢ Aᵢ`. Zero weights are allowed; such a mean is not affinely dominated.
    pub fn arithmetic(weights: Vec<f64>) -> Result<MultiMean> {
        check_weights(&weights)?;
        let first = weights[0];
        let flags = MultiFlags {
            affinely_dominated: weights.iter().all(|&w| w > 0.0),
            strictly_concave: false,
            is_arithmetic: true,
            permutation_invariant: weights.iter().all(|&w| w == first),
            is_trivial: one_hot(&weights),
        };
        Ok(MultiMean {
            arity: weights.len(),
            label: format!("arithmetic{weights:?}"),
            weights,
            flags,
            kind: Kind::Arithmetic,
        })
    }

    /// A user-supplied mean. The caller vouches for the declared weights and
    /// flags; `is_arithmetic` is derived from nothing and therefore always false.
    pub fn custom<F>(
        label: &str,
        weights: Vec<f64>,
        strictly_concave: bool,
        permutation_invariant: bool,
        f: F,
    ) -> Result<MultiMean>
    where
        F: Fn(&[SpdMatrix], &AlmConfig) -> Result<SpdMatrix> + Send + Sync + 'static,
    {
        check_weights(&weights)?;
        let flags = MultiFlags {
            affinely_dominated: weights.iter().all(|&w| w > 0.0),
            strictly_concave,
            is_arithmetic: false,
            permutation_invariant,
            is_trivial: false,
        };
        Ok(MultiMean {
            arity: weights.len(),
            weights,
            flags,
            kind: Kind::Custom(Arc::new(f)),
            label: label.to_string(),
        })
    }

    /// The `(n+1)`-variable ALM mean generated by `n+1` means of arity `n`.
    pub fn alm_tower(means: Vec<MultiMean>) -> Result<MultiMean> {
        let size = means.len();
        if size < 3 {
            return Err(Error::ParameterError(format!(
                "need at least three means, got {size}"
            )));
        }
        if let Some(k) = means.iter().position(|m| m.arity != size - 1) {
            return Err(Error::ParameterError(format!(
                "mean {k} has arity {}, expected {}",
                means[k].arity,
                size - 1
            )));
        }
        let weights: Vec<Vec<f64>> = means.iter().map(|m| m.weights.clone()).collect();
        let profile = gamma_from_multimeans(&weights)?;
        let validity = classify(&means)?;
        Ok(Self::tower_from_parts(means, profile, validity))
    }

    pub(crate) fn tower_from_parts(
        means: Vec<MultiMean>,
        profile: StochasticProfile,
        validity: Validity,
    ) -> MultiMean {
        let symmetric =
            means[0].flags.permutation_invariant && means.iter().all(|m| m.same_as(&means[0]));
        let flags = MultiFlags {
            affinely_dominated: profile.p.iter().all(|&x| x > 0.0),
            strictly_concave: validity == Validity::AtMostOneArithmetic,
            is_arithmetic: validity == Validity::AllArithmetic,
            permutation_invariant: symmetric,
            is_trivial: false,
        };
        let label = format!(
            "alm({})",
            means
                .iter()
                .map(|m| m.label.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        );
        MultiMean {
            arity: means.len(),
            weights: profile.p.clone(),
            flags,
            kind: Kind::Alm(Arc::new(Tower {
                means,
                profile,
                validity,
            })),
            label,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn flags(&self) -> MultiFlags {
        self.flags
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The underlying Kubo–Ando mean, for two-variable means built by [`MultiMean::two_var`].
    pub fn as_two_var(&self) -> Option<&TwoVarMean> {
        match &self.kind {
            Kind::TwoVar(s) => Some(s),
            _ => None,
        }
    }

    /// The generating means, for means built by [`MultiMean::alm_tower`].
    pub fn components(&self) -> Option<&[MultiMean]> {
        match &self.kind {
            Kind::Alm(t) => Some(&t.means),
            _ => None,
        }
    }

    /// Structural identity: same construction with the same parameters.
    pub fn same_as(&self, other: &MultiMean) -> bool {
        match (&self.kind, &other.kind) {
            (Kind::TwoVar(a), Kind::TwoVar(b)) => a.same_as(b),
            (Kind::Arithmetic, Kind::Arithmetic) => self.weights == other.weights,
            (Kind::Alm(a), Kind::Alm(b)) => {
                a.means.len() == b.means.len()
                    && a.means.iter().zip(&b.means).all(|(x, y)| x.same_as(y))
            }
            (Kind::Custom(a), Kind::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    pub fn evaluate(&self, operators: &[SpdMatrix], cfg: &AlmConfig) -> Result<SpdMatrix> {
        if operators.len() != self.arity {
            return Err(Error::DimensionMismatch {
                expected: self.arity,
                found: operators.len(),
            });
        }
        for m in &operators[1..] {
            operators[0].check_same_dim(m)?;
        }
        match &self.kind {
            Kind::TwoVar(s) => s.evaluate_either(&operators[0], &operators[1]),
            Kind::Arithmetic => weighted_sum(&self.weights, operators),
            Kind::Alm(t) => {
                Ok(run_validated(&t.means, &t.profile, t.validity, operators, cfg)?.limit)
            }
            Kind::Custom(f) => f(operators, cfg),
        }
    }

    /// Evaluation on positive scalars.
    pub fn scalar(&self, values: &[f64], cfg: &AlmConfig) -> Result<f64> {
        let ops = values
            .iter()
            .map(|&v| SpdMatrix::scalar(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.evaluate(&ops, cfg)?.matrix()[(0, 0)])
    }
}

/// Weights `r_j = ∂M/∂a_j(1, …, 1)` by central differences with step `h`.
pub fn estimate_weight_vector(m: &MultiMean, h: f64, cfg: &AlmConfig) -> Result<Vec<f64>> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::ParameterError(format!(
            "step {h} must lie in (0, 1)"
        )));
    }
    let mut out = Vec::with_capacity(m.arity());
    for j in 0..m.arity() {
        let mut up = vec![1.0; m.arity()];
        let mut down = up.clone();
        up[j] += h;
        down[j] -= h;
        out.push((m.scalar(&up, cfg)? - m.scalar(&down, cfg)?) / (2.0 * h));
    }
    let s: f64 = out.iter().sum();
    if (s - 1.0).abs() > 1e-3 {
        return Err(Error::WeightEstimationFailure(s));
    }
    if (s - 1.0).abs() > 1e-4 {
        log::warn!("estimated weights of {} sum to {s}", m.label());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_weights_recovered() {
        let m = MultiMean::arithmetic(vec![0.25, 0.25, 0.5]).unwrap();
        let w = estimate_weight_vector(&m, DEFAULT_WEIGHT_STEP, &AlmConfig::default()).unwrap();
        for (a, b) in w.iter().zip([0.25, 0.25, 0.5]) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(m.flags().affinely_dominated && m.flags().is_arithmetic);
    }

    #[test]
    fn zero_weight_is_not_dominated() {
        let m = MultiMean::arithmetic(vec![0.0, 0.5, 0.5]).unwrap();
        assert!(!m.flags().affinely_dominated);
        assert!(MultiMean::arithmetic(vec![0.5, 0.4]).is_err());
        assert!(
            MultiMean::arithmetic(vec![1.0, 0.0])
                .unwrap()
                .flags()
                .is_trivial
        );
    }

    #[test]
    fn arity_mismatch() {
        let m = MultiMean::two_var(TwoVarMean::geometric(0.5).unwrap());
        let i = SpdMatrix::identity(2);
        assert!(matches!(
            m.evaluate(&[i.clone(), i.clone(), i], &AlmConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
