use serde::Serialize;

use super::config::AlmConfig;
use super::engine::{run_validated, AlmOutcome};
use super::multi::MultiMean;
use crate::error::{Error, Result};
use crate::kubo_ando::TwoVarMean;
use crate::linalg::SpdMatrix;
use crate::stochastic::{profile_unchecked, StochasticProfile};

/// Which convergence hypothesis a set of means satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Validity {
    AllArithmetic,
    /// At most one member is not strictly concave (for two-variable means:
    /// at most one is arithmetic).
    AtMostOneArithmetic,
    /// Not checked; only reachable through `unsafe_allow`.
    Unverified,
}

/// Three Kubo–Ando means `(σ₁, σ₂, σ₃)` with their aggregate weights.
#[derive(Debug, Clone)]
pub struct MeanTriple {
    sigmas: [TwoVarMean; 3],
    profile: StochasticProfile,
    validity: Validity,
}

fn weights_of(sigmas: &[TwoVarMean; 3]) -> Vec<Vec<f64>> {
    sigmas
        .iter()
        .map(|s| vec![1.0 - s.weight(), s.weight()])
        .collect()
}

/// Checks the convergence hypotheses and computes `p`.
pub fn validate_triple(s1: TwoVarMean, s2: TwoVarMean, s3: TwoVarMean) -> Result<MeanTriple> {
    let sigmas = [s1, s2, s3];
    if let Some(k) = sigmas.iter().position(TwoVarMean::is_trivial) {
        return Err(Error::InvalidTriple(format!(
            "σ{} = {} is trivial",
            k + 1,
            sigmas[k]
        )));
    }
    let arithmetic: Vec<usize> = (0..3).filter(|&k| sigmas[k].is_arithmetic()).collect();
    let validity = match arithmetic.len() {
        3 => Validity::AllArithmetic,
        0 | 1 => Validity::AtMostOneArithmetic,
        _ => {
            return Err(Error::HypothesisViolation {
                indices: arithmetic,
            })
        }
    };
    let profile = profile_unchecked(&weights_of(&sigmas))?;
    Ok(MeanTriple {
        sigmas,
        profile,
        validity,
    })
}

impl MeanTriple {
    /// A triple that skips the hypothesis checks; runs require `unsafe_allow`.
    pub fn unchecked(s1: TwoVarMean, s2: TwoVarMean, s3: TwoVarMean) -> Result<MeanTriple> {
        let sigmas = [s1, s2, s3];
        let profile = profile_unchecked(&weights_of(&sigmas))?;
        Ok(MeanTriple {
            sigmas,
            profile,
            validity: Validity::Unverified,
        })
    }

    pub fn sigmas(&self) -> &[TwoVarMean; 3] {
        &self.sigmas
    }

    pub fn p(&self) -> [f64; 3] {
        [self.profile.p[0], self.profile.p[1], self.profile.p[2]]
    }

    pub fn profile(&self) -> &StochasticProfile {
        &self.profile
    }

    pub fn validity(&self) -> Validity {
        self.validity
    }

    fn means(&self) -> Vec<MultiMean> {
        self.sigmas
            .iter()
            .cloned()
            .map(MultiMean::two_var)
            .collect()
    }
}

/// `(B σ₁ C, C σ₂ A, A σ₃ B)`, each mean evaluated with shift `eps`.
pub fn alm_step(
    triple: &MeanTriple,
    a: &SpdMatrix,
    b: &SpdMatrix,
    c: &SpdMatrix,
    eps: f64,
) -> Result<(SpdMatrix, SpdMatrix, SpdMatrix)> {
    let [s1, s2, s3] = &triple.sigmas;
    Ok((
        s1.evaluate(b, c, eps)?,
        s2.evaluate(c, a, eps)?,
        s3.evaluate(a, b, eps)?,
    ))
}

/// The three-variable ALM mean `M_{σ₁,σ₂,σ₃}(A, B, C)`.
pub fn alm_compute(
    triple: &MeanTriple,
    a: &SpdMatrix,
    b: &SpdMatrix,
    c: &SpdMatrix,
    cfg: &AlmConfig,
) -> Result<AlmOutcome> {
    cfg.validate()?;
    if triple.validity == Validity::Unverified && !cfg.unsafe_allow {
        return Err(Error::ParameterError(
            "unchecked triple requires unsafe_allow".into(),
        ));
    }
    a.check_same_dim(b)?;
    a.check_same_dim(c)?;
    let ops = [a.clone(), b.clone(), c.clone()];
    run_validated(&triple.means(), &triple.profile, triple.validity, &ops, cfg)
}

/// The induced three-variable mean as a [`MultiMean`], weights `p`.
pub fn build_alm_multimean(triple: &MeanTriple) -> Result<MultiMean> {
    if triple.validity == Validity::Unverified {
        return Err(Error::ParameterError(
            "cannot build a mean from an unchecked triple".into(),
        ));
    }
    Ok(MultiMean::tower_from_parts(
        triple.means(),
        triple.profile.clone(),
        triple.validity,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alm::StopReason;

    fn g(r: f64) -> TwoVarMean {
        TwoVarMean::geometric(r).unwrap()
    }
    fn ar(r: f64) -> TwoVarMean {
        TwoVarMean::arithmetic(r).unwrap()
    }
    fn h(r: f64) -> TwoVarMean {
        TwoVarMean::harmonic(r).unwrap()
    }
    fn s(x: f64) -> SpdMatrix {
        SpdMatrix::scalar(x).unwrap()
    }

    #[test]
    fn validation_examples() {
        let t = validate_triple(g(0.5), g(0.5), g(0.5)).unwrap();
        for p in t.p() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        let t = validate_triple(ar(0.5), ar(1.0 / 3.0), ar(0.25)).unwrap();
        assert_eq!(t.validity(), Validity::AllArithmetic);
        let p = t.p();
        for (x, y) in p.iter().zip([4.0 / 11.0, 3.0 / 11.0, 4.0 / 11.0]) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(matches!(
            validate_triple(ar(0.5), ar(0.5), g(0.5)),
            Err(Error::HypothesisViolation { .. })
        ));
        assert!(matches!(
            validate_triple(TwoVarMean::left_trivial(), g(0.5), g(0.5)),
            Err(Error::InvalidTriple(_))
        ));
    }

    #[test]
    fn step_examples() {
        let t = validate_triple(ar(0.5), ar(0.5), ar(0.5)).unwrap();
        let (a, b, c) = alm_step(&t, &s(2.0), &s(4.0), &s(6.0), 0.0).unwrap();
        assert_eq!(
            [a.matrix()[0], b.matrix()[0], c.matrix()[0]],
            [5.0, 4.0, 3.0]
        );
        let t = validate_triple(g(0.5), g(0.5), g(0.5)).unwrap();
        let (a, b, c) = alm_step(&t, &s(1.0), &s(4.0), &s(16.0), 0.0).unwrap();
        for (x, y) in [a, b, c].iter().zip([8.0, 4.0, 2.0]) {
            assert!((x.matrix()[0] - y).abs() < 1e-13);
        }
        let i = SpdMatrix::identity(3);
        let (a, b, c) = alm_step(&t, &i, &i, &i, 0.0).unwrap();
        assert!(a == i && b == i && c == i);
    }

    #[test]
    fn compute_examples() {
        let cfg = AlmConfig::default();
        let t = validate_triple(ar(0.5), ar(0.5), ar(0.5)).unwrap();
        let out = alm_compute(&t, &s(2.0), &s(3.0), &s(6.0), &cfg).unwrap();
        assert_eq!(out.stop_reason, StopReason::ClosedForm);
        assert!((out.limit.matrix()[0] - 11.0 / 3.0).abs() < 1e-14);

        let t = validate_triple(g(0.5), g(0.5), g(0.5)).unwrap();
        let d = |x: f64| SpdMatrix::from_diagonal(&[x, x]).unwrap();
        let out = alm_compute(&t, &d(2.0), &d(3.0), &d(6.0), &cfg).unwrap();
        assert_eq!(out.stop_reason, StopReason::Converged);
        assert!((out.limit.matrix()[(0, 0)] - 36f64.cbrt()).abs() < 1e-12);

        let t = validate_triple(h(0.5), h(0.5), h(0.5)).unwrap();
        let out = alm_compute(&t, &s(2.0), &s(3.0), &s(6.0), &cfg).unwrap();
        assert!((out.limit.matrix()[0] - 3.0).abs() < 1e-14);
        let forced = AlmConfig {
            force_iterate: true,
            ..cfg.clone()
        };
        let out = alm_compute(&t, &s(2.0), &s(3.0), &s(6.0), &forced).unwrap();
        assert!((out.limit.matrix()[0] - 3.0).abs() < 1e-11);

        let i = SpdMatrix::identity(3);
        let t = validate_triple(g(0.3), h(0.6), ar(0.5)).unwrap();
        let out = alm_compute(&t, &i, &i, &i, &cfg).unwrap();
        assert_eq!(out.limit, i);
    }

    #[test]
    fn multimean_flags() {
        let m = build_alm_multimean(&validate_triple(g(0.5), g(0.5), g(0.5)).unwrap()).unwrap();
        assert!(m.flags().strictly_concave && m.flags().permutation_invariant);
        let m = build_alm_multimean(&validate_triple(ar(0.5), ar(0.5), ar(0.5)).unwrap()).unwrap();
        assert!(m.flags().is_arithmetic && !m.flags().strictly_concave);
        let cfg = AlmConfig::default();
        let m = build_alm_multimean(&validate_triple(g(0.5), g(0.3), h(0.7)).unwrap()).unwrap();
        for a in [0.1, 1.0, 7.5] {
            assert!((m.scalar(&[a, a, a], &cfg).unwrap() - a).abs() < 1e-12 * a);
        }
    }
}
