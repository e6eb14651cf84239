//! Checks on the ALM iteration and the means it induces.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use super::core_checks::random_symmetric_invertible;
use super::sample::*;
use super::{fro_dist, leq_excess, mat, mats, PropertyCheck, Trial};
use crate::alm::{
    alm_compute, alm_compute_n, ordered_convergence_run, validate_triple, AlmConfig, MeanTriple,
    MultiMean,
};
use crate::error::{Error, Result};
use crate::io::{to_json, JobResult, MatrixInput, MeanDescriptor, MeanJobSpec};
use crate::kubo_ando::TwoVarMean;
use crate::linalg::{congruence, weighted_sum, SpdMatrix};
use crate::metrics::thompson;
use crate::stochastic::{cyclic_averaging_6, profile_unchecked};

pub(super) fn checks() -> Vec<PropertyCheck> {
    vec![
        PropertyCheck {
            name: "alm.s_monotone",
            statement: "λ_min(Sₙ − Sₙ₊₁) ≥ −1e-9·‖S₀‖ at every step, dims {1,2,4,8}",
            covers: &["alm.s_monotone"],
            trials: 200,
            fixed_trials: false,
            slack: 1e-9,
            trial: s_monotone,
        },
        PropertyCheck {
            name: "alm.common_limit",
            statement: "final spread ≤ tol and |⟨x,(Aᵢ−Aⱼ)x⟩| ≤ 10·tol·‖S‖ for 10 unit probes (excess in units of the bound)",
            covers: &["alm.common_limit"],
            trials: 100,
            fixed_trials: false,
            slack: 1.0,
            trial: common_limit,
        },
        PropertyCheck {
            name: "axiom.monotonicity",
            statement: "X ≤ X' entrywise in the triple ⇒ λ_min(M(X') − M(X)) ≥ −1e-8",
            covers: &["alm.axiom_monotonicity"],
            trials: 100,
            fixed_trials: false,
            slack: 1e-8,
            trial: axiom_monotonicity,
        },
        PropertyCheck {
            name: "axiom.transformer",
            statement: "λ_min(M(TAT,TBT,TCT) − T M(A,B,C) T) ≥ −1e-8 for PSD T of any rank, nonzero spectrum in [1/2, 2]",
            covers: &["alm.axiom_transformer"],
            trials: 100,
            fixed_trials: false,
            slack: 1e-8,
            trial: axiom_transformer,
        },
        PropertyCheck {
            name: "axiom.congruence",
            statement: "‖M(TAT,TBT,TCT) − T M(A,B,C) T‖_F ≤ 1e-8 for invertible symmetric T",
            covers: &["alm.axiom_congruence"],
            trials: 100,
            fixed_trials: false,
            slack: 1e-8,
            trial: axiom_congruence,
        },
        PropertyCheck {
            name: "axiom.downward",
            statement: "ε-ladder limits on semidefinite inputs are Loewner-decreasing, slack 1e-9·‖M‖ (4 rungs)",
            covers: &["alm.downward_continuity"],
            trials: 50,
            fixed_trials: false,
            slack: 1e-9,
            trial: axiom_downward,
        },
        PropertyCheck {
            name: "axiom.normalization",
            statement: "M(I,I,I) = I bit for bit, dims 1–8, several triples",
            covers: &["alm.axiom_normalization"],
            trials: 1,
            fixed_trials: true,
            slack: 0.0,
            trial: axiom_normalization,
        },
        PropertyCheck {
            name: "alm.sandwich",
            statement: "(Σ pₖXₖ⁻¹)⁻¹ ≤ M ≤ Σ pₖXₖ with slack 1e-9",
            covers: &["alm.sandwich"],
            trials: 100,
            fixed_trials: false,
            slack: 1e-9,
            trial: sandwich,
        },
        PropertyCheck {
            name: "alm.mean_order",
            statement: "σₖ ≤ σₖ' on the grid ⇒ λ_min(M' − M) ≥ −1e-9",
            covers: &["alm.mean_order"],
            trials: 100,
            fixed_trials: false,
            slack: 1e-9,
            trial: mean_order,
        },
        PropertyCheck {
            name: "alm.norm_perturbation",
            statement: "‖M − M'‖ ≤ (M/m)·max‖X − X'‖ + 1e-8 for mI ≤ X, X' ≤ MI",
            covers: &["alm.norm_perturbation"],
            trials: 200,
            fixed_trials: false,
            slack: 1e-8,
            trial: norm_perturbation,
        },
        PropertyCheck {
            name: "alm.scalar_strict_concavity",
            statement: "M(a,b,c) = Σ p a within 1e-10 (relative) only when a = b = c, scalar grid",
            covers: &["alm.scalar_strict_concavity"],
            trials: 50,
            fixed_trials: false,
            slack: 0.0,
            trial: scalar_strict_concavity,
        },
        PropertyCheck {
            name: "alm.uniform_arithmetic",
            statement: "all-arithmetic iteration: every sequence reaches Σ pₖXₖ, relative 1e-10",
            covers: &[],
            trials: 100,
            fixed_trials: false,
            slack: 1e-10,
            trial: uniform_arithmetic,
        },
        PropertyCheck {
            name: "oracle.geometric_commuting",
            statement: "commuting inputs: ‖M_{#,#,#}(A,B,C) − A^{p₁}B^{p₂}C^{p₃}‖_F ≤ 1e-8",
            covers: &[],
            trials: 100,
            fixed_trials: false,
            slack: 1e-8,
            trial: geometric_commuting,
        },
        PropertyCheck {
            name: "oracle.harmonic",
            statement: "iterated ‖M_{!,!,!}(A,B,C) − (Σ pₖXₖ⁻¹)⁻¹‖_F ≤ 1e-8",
            covers: &[],
            trials: 100,
            fixed_trials: false,
            slack: 1e-8,
            trial: harmonic_oracle,
        },
        PropertyCheck {
            name: "alm.joint_homogeneity",
            statement: "‖M_#(αA,βB,γC) − α^{p₁}β^{p₂}γ^{p₃}M_#(A,B,C)‖_F ≤ 1e-8, α,β,γ ∈ [0.1,10]",
            covers: &[],
            trials: 100,
            fixed_trials: false,
            slack: 1e-8,
            trial: joint_homogeneity,
        },
        PropertyCheck {
            name: "alm.matrix_adjoint",
            statement: "‖M_{σ*}(A⁻¹,B⁻¹,C⁻¹)⁻¹ − M_σ(A,B,C)‖_F ≤ 1e-7, σₖ ∈ {∇_r, #_r, !_r}",
            covers: &[],
            trials: 100,
            fixed_trials: false,
            slack: 1e-7,
            trial: matrix_adjoint,
        },
        PropertyCheck {
            name: "alm.self_adjoint",
            statement: "‖M_{#,#,#}(A⁻¹,B⁻¹,C⁻¹)⁻¹ − M_{#,#,#}(A,B,C)‖_F ≤ 1e-7, dim ≤ 6",
            covers: &[],
            trials: 100,
            fixed_trials: false,
            slack: 1e-7,
            trial: self_adjoint,
        },
        PropertyCheck {
            name: "verify.self_adjoint_chain",
            statement: "λA ≥ μB ≥ C: ordered identity, rescaling, general identity, each within 1e-7 Thompson; spectra in [0.1, 10]",
            covers: &["verify.self_adjoint_chain"],
            trials: 50,
            fixed_trials: false,
            slack: 1e-7,
            trial: self_adjoint_chain,
        },
        PropertyCheck {
            name: "alm.upward_continuity",
            statement: "Xₖ ↑ X ⇒ M_{#,#,#}(Xₖ) ↑ with slack 1e-9 and ‖M(Xₖ) − M(X)‖ within the norm bound",
            covers: &[],
            trials: 50,
            fixed_trials: false,
            slack: 1e-9,
            trial: upward_continuity,
        },
        PropertyCheck {
            name: "alm.ordered_interleaving",
            statement: "A ≥ B ≥ C, symmetric σ: pattern violation ≤ 1e-9 and final ‖Aₘ − S‖_F ≤ 1e-8 (excess in units of each bound)",
            covers: &[],
            trials: 100,
            fixed_trials: false,
            slack: 1.0,
            trial: ordered_interleaving,
        },
        PropertyCheck {
            name: "counterexample.not_dominated",
            statement: "six arithmetic 5-means with zero weights: rejected, and an unchecked run keeps spread ≥ 1e-3 over steps 100–200",
            covers: &[],
            trials: 20,
            fixed_trials: false,
            slack: 0.0,
            trial: not_dominated,
        },
        PropertyCheck {
            name: "counterexample.nonprimitive",
            statement: "the zero-weight construction has Γ = shift₃ ⊗ ½J₂, flagged non-primitive with zero gap",
            covers: &[],
            trials: 1,
            fixed_trials: true,
            slack: 0.0,
            trial: nonprimitive_profile,
        },
        PropertyCheck {
            name: "io.determinism",
            statement: "the same job run twice serializes to identical bytes",
            covers: &["io.determinism"],
            trials: 20,
            fixed_trials: false,
            slack: 0.0,
            trial: io_determinism,
        },
        PropertyCheck {
            name: "io.round_trip",
            statement: "the emitted limit parses back to the bitwise-identical matrix",
            covers: &["io.round_trip"],
            trials: 50,
            fixed_trials: false,
            slack: 0.0,
            trial: io_round_trip,
        },
    ]
}

fn forced() -> AlmConfig {
    AlmConfig {
        force_iterate: true,
        ..AlmConfig::default()
    }
}

fn geo(r: f64) -> TwoVarMean {
    TwoVarMean::geometric(r).expect("weight in (0, 1)")
}
fn har(r: f64) -> TwoVarMean {
    TwoVarMean::harmonic(r).expect("weight in (0, 1)")
}
fn ari(r: f64) -> TwoVarMean {
    TwoVarMean::arithmetic(r).expect("weight in (0, 1)")
}

fn mixed_triple(rng: &mut SeededRng) -> Result<MeanTriple> {
    let [a, b, c] = mixed_means(rng);
    validate_triple(a, b, c)
}

fn labels(t: &MeanTriple) -> Value {
    json!(t.sigmas().iter().map(|s| s.label().to_string()).collect::<Vec<_>>())
}

fn run(t: &MeanTriple, x: &[SpdMatrix; 3], cfg: &AlmConfig) -> Result<SpdMatrix> {
    Ok(alm_compute(t, &x[0], &x[1], &x[2], cfg)?.limit)
}

fn small_dim(rng: &mut SeededRng) -> usize {
    rng.random_range(1..=6)
}

fn unit_probe(rng: &mut SeededRng, dim: usize) -> DVector<f64> {
    let x = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let n = x.norm();
    x / n
}

fn arithmetic_part(p: &[f64], x: &[SpdMatrix]) -> Result<SpdMatrix> {
    weighted_sum(p, x)
}

fn harmonic_part(p: &[f64], x: &[SpdMatrix]) -> Result<SpdMatrix> {
    let inv = x.iter().map(SpdMatrix::inverse).collect::<Result<Vec<_>>>()?;
    weighted_sum(p, &inv)?.inverse()
}

fn s_monotone(rng: &mut SeededRng) -> Result<Trial> {
    let dim = [1, 2, 4, 8][rng.random_range(0..4)];
    let t = match rng.random_range(0..4) {
        0 => validate_triple(geo(0.5), geo(0.5), geo(0.5))?,
        1 => validate_triple(geo(1.0 / 3.0), har(0.5), geo(2.0 / 3.0))?,
        2 => validate_triple(ari(0.5), har(0.5), geo(0.5))?,
        _ => mixed_triple(rng)?,
    };
    let x = random_triple(rng, dim);
    let o = alm_compute(&t, &x[0], &x[1], &x[2], &forced())?;
    Ok(Trial::new(
        (-o.s_monotone_violation / o.s0_norm).max(0.0),
        json!({"means": labels(&t), "inputs": mats(&x), "iterations": o.iterations}),
    ))
}

fn common_limit(rng: &mut SeededRng) -> Result<Trial> {
    let dim = rng.random_range(1..=8);
    let t = mixed_triple(rng)?;
    let x = random_triple(rng, dim);
    let cfg = forced();
    let o = alm_compute(&t, &x[0], &x[1], &x[2], &cfg)?;
    let bound = 10.0 * cfg.tol * o.limit.operator_norm()?;
    let mut probe = 0.0_f64;
    for _ in 0..10 {
        let v = unit_probe(rng, dim);
        for i in 0..3 {
            for j in i + 1..3 {
                let d = o.iterates[i].quadratic_form(&v) - o.iterates[j].quadratic_form(&v);
                probe = probe.max(d.abs());
            }
        }
    }
    Ok(Trial::new(
        (o.final_distance / cfg.tol).max(probe / bound),
        json!({"means": labels(&t), "inputs": mats(&x), "final_distance": o.final_distance}),
    ))
}

fn axiom_monotonicity(rng: &mut SeededRng) -> Result<Trial> {
    let dim = small_dim(rng);
    let t = mixed_triple(rng)?;
    let pairs = [0, 1, 2].map(|_| loewner_pair(rng, dim));
    let lo = [0, 1, 2].map(|k| pairs[k].0.clone());
    let hi = [0, 1, 2].map(|k| pairs[k].1.clone());
    let cfg = AlmConfig::default();
    let excess = leq_excess(&run(&t, &lo, &cfg)?, &run(&t, &hi, &cfg)?)?;
    Ok(Trial::new(
        excess,
        json!({"means": labels(&t), "lower": mats(&lo), "upper": mats(&hi)}),
    ))
}

fn axiom_transformer(rng: &mut SeededRng) -> Result<Trial> {
    let dim = small_dim(rng);
    let t = mixed_triple(rng)?;
    let x = random_triple(rng, dim);
    let rank = rng.random_range(1..=dim);
    let tm = random_psd_spectrum(rng, dim, rank, 0.5, 2.0);
    let cfg = AlmConfig::default();
    let inner = congruence(tm.matrix(), &run(&t, &x, &cfg)?)?;
    let moved = x.clone().map(|m| congruence(tm.matrix(), &m));
    let moved = [moved[0].clone()?, moved[1].clone()?, moved[2].clone()?];
    // rank-deficient T gives semidefinite inputs, handled by the ε-ladder
    let outer = run(&t, &moved, &cfg)?;
    Ok(Trial::new(
        leq_excess(&inner, &outer)?,
        json!({"means": labels(&t), "inputs": mats(&x), "t": mat(&tm)}),
    ))
}

fn axiom_congruence(rng: &mut SeededRng) -> Result<Trial> {
    let dim = small_dim(rng);
    let t = mixed_triple(rng)?;
    let x = random_triple(rng, dim);
    let s = random_symmetric_invertible(rng, dim, 0.5, 2.0);
    let cfg = AlmConfig::default();
    let inner = congruence(&s, &run(&t, &x, &cfg)?)?;
    let moved = [
        congruence(&s, &x[0])?,
        congruence(&s, &x[1])?,
        congruence(&s, &x[2])?,
    ];
    let outer = run(&t, &moved, &cfg)?;
    Ok(Trial::new(
        fro_dist(&inner, &outer),
        json!({"means": labels(&t), "inputs": mats(&x)}),
    ))
}

fn axiom_downward(rng: &mut SeededRng) -> Result<Trial> {
    let dim = rng.random_range(2..=5);
    let t = mixed_triple(rng)?;
    let mut x = random_triple(rng, dim);
    let k = rng.random_range(0..3);
    let rank = rng.random_range(1..dim);
    let sc = scale(rng);
    x[k] = random_psd(rng, dim, rank, sc);
    let norm = x
        .iter()
        .map(SpdMatrix::operator_norm)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let cfg = AlmConfig {
        eps_shift: Some(1e-3 * norm),
        ..AlmConfig::default()
    };
    let o = alm_compute(&t, &x[0], &x[1], &x[2], &cfg)?;
    let mut excess = 0.0_f64;
    for w in o.ladder.windows(2) {
        let rel = leq_excess(&w[1].limit, &w[0].limit)? / w[0].limit.operator_norm()?;
        excess = excess.max(rel);
    }
    if o.ladder.len() != cfg.eps_ladder_len {
        excess = f64::INFINITY;
    }
    Ok(Trial::new(
        excess,
        json!({"means": labels(&t), "inputs": mats(&x), "eps": o.ladder.iter().map(|r| r.eps).collect::<Vec<_>>()}),
    ))
}

fn axiom_normalization(_: &mut SeededRng) -> Result<Trial> {
    let triples = [
        validate_triple(geo(0.5), geo(0.5), geo(0.5))?,
        validate_triple(geo(0.3), har(0.6), ari(0.5))?,
        validate_triple(ari(0.5), ari(1.0 / 3.0), ari(0.25))?,
        validate_triple(har(0.2), har(0.7), har(0.4))?,
    ];
    let mut excess = 0.0_f64;
    for t in &triples {
        for dim in 1..=8 {
            let i = SpdMatrix::identity(dim);
            let m = run(t, &[i.clone(), i.clone(), i.clone()], &AlmConfig::default())?;
            excess = excess.max(fro_dist(&m, &i));
        }
    }
    Ok(Trial::new(excess, json!({"dims": "1..=8"})))
}

fn sandwich(rng: &mut SeededRng) -> Result<Trial> {
    let dim = small_dim(rng);
    let t = mixed_triple(rng)?;
    let x = random_triple(rng, dim);
    let m = run(&t, &x, &AlmConfig::default())?;
    let p = t.p();
    let lo = leq_excess(&harmonic_part(&p, &x)?, &m)?;
    let hi = leq_excess(&m, &arithmetic_part(&p, &x)?)?;
    Ok(Trial::new(
        lo.max(hi),
        json!({"means": labels(&t), "inputs": mats(&x)}),
    ))
}

/// `!_r ≤ #_r ≤ ∇_r` at level 0, 1, 2.
fn at_level(level: usize, r: f64) -> TwoVarMean {
    match level {
        0 => har(r),
        1 => geo(r),
        _ => ari(r),
    }
}

fn mean_order(rng: &mut SeededRng) -> Result<Trial> {
    let dim = small_dim(rng);
    let rs = [weight(rng), weight(rng), weight(rng)];
    let lo_levels = [0, 1, 2].map(|_| rng.random_range(0..2usize));
    let arith_slot = rng.random_range(0..4usize);
    let hi_levels = [0, 1, 2].map(|k| {
        if k == arith_slot {
            2
        } else {
            lo_levels[k].max(rng.random_range(0..2))
        }
    });
    let lo = validate_triple(
        at_level(lo_levels[0], rs[0]),
        at_level(lo_levels[1], rs[1]),
        at_level(lo_levels[2], rs[2]),
    )?;
    let hi = validate_triple(
        at_level(hi_levels[0], rs[0]),
        at_level(hi_levels[1], rs[1]),
        at_level(hi_levels[2], rs[2]),
    )?;
    if !(0..3).all(|k| lo.sigmas()[k].pointwise_leq(&hi.sigmas()[k])) {
        return Err(Error::PreconditionError("mean pair is not ordered".into()));
    }
    let x = random_triple(rng, dim);
    let cfg = AlmConfig::default();
    let excess = leq_excess(&run(&lo, &x, &cfg)?, &run(&hi, &x, &cfg)?)?;
    Ok(Trial::new(
        excess,
        json!({"lower": labels(&lo), "upper": labels(&hi), "inputs": mats(&x)}),
    ))
}

fn norm_perturbation(rng: &mut SeededRng) -> Result<Trial> {
    let dim = small_dim(rng);
    let t = mixed_triple(rng)?;
    let x = random_triple(rng, dim);
    let delta = log_uniform(rng, 1e-4, 0.5);
    let mut y = Vec::with_capacity(3);
    for m in &x {
        let e = random_symmetric_invertible(rng, dim, 0.1, 1.0);
        let e = &e * (delta * m.min_eigenvalue()? / e.norm());
        y.push(SpdMatrix::new(m.matrix() + e)?);
    }
    let y = [y[0].clone(), y[1].clone(), y[2].clone()];
    let all: Vec<&SpdMatrix> = x.iter().chain(&y).collect();
    let lo = all
        .iter()
        .map(|m| m.min_eigenvalue())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let hi = all
        .iter()
        .map(|m| m.max_eigenvalue())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut dev = 0.0_f64;
    for k in 0..3 {
        dev = dev.max(crate::linalg::symmetric_operator_norm(
            &(x[k].matrix() - y[k].matrix()),
        )?);
    }
    let cfg = AlmConfig::default();
    let diff = run(&t, &x, &cfg)?.matrix() - run(&t, &y, &cfg)?.matrix();
    let lhs = crate::linalg::symmetric_operator_norm(&diff)?;
    let rhs = hi / lo * dev;
    Ok(Trial::new(
        (lhs - rhs).max(0.0),
        json!({"means": labels(&t), "inputs": mats(&x), "perturbed": mats(&y)}),
    ))
}

fn scalar_strict_concavity(rng: &mut SeededRng) -> Result<Trial> {
    // at least one non-arithmetic member, so the induced mean is strictly concave
    let t = loop {
        let t = mixed_triple(rng)?;
        if t.sigmas().iter().any(|s| !s.is_arithmetic()) {
            break t;
        }
    };
    let p = t.p();
    let grid = [0.25, 0.5, 1.0, 2.0, 4.0];
    let cfg = AlmConfig::default();
    let mut bad = Vec::new();
    for &a in &grid {
        for &b in &grid {
            for &c in &grid {
                let x = [a, b, c].map(|v| SpdMatrix::scalar(v).expect("positive"));
                let m = run(&t, &x, &cfg)?.matrix()[(0, 0)];
                let arith = p[0] * a + p[1] * b + p[2] * c;
                let equal = (arith - m).abs() <= 1e-10 * arith;
                let same = (a - b).abs() <= 1e-6 && (b - c).abs() <= 1e-6;
                if equal && !same {
                    bad.push([a, b, c]);
                }
            }
        }
    }
    Ok(Trial::flag(
        bad.is_empty(),
        json!({"means": labels(&t), "equality_at": bad}),
    ))
}

fn uniform_arithmetic(rng: &mut SeededRng) -> Result<Trial> {
    let dim = rng.random_range(1..=8);
    let t = validate_triple(ari(weight(rng)), ari(weight(rng)), ari(weight(rng)))?;
    let x = random_triple(rng, dim);
    let o = alm_compute(&t, &x[0], &x[1], &x[2], &forced())?;
    let target = arithmetic_part(&t.p(), &x)?;
    let scale = target.frobenius();
    let mut worst = fro_dist(&o.limit, &target) / scale;
    for it in &o.iterates {
        worst = worst.max(fro_dist(it, &target) / scale);
    }
    Ok(Trial::new(worst, json!({"means": labels(&t), "inputs": mats(&x)})))
}

fn geometric_commuting(rng: &mut SeededRng) -> Result<Trial> {
    let dim = rng.random_range(1..=8);
    let rs = [weight(rng), weight(rng), weight(rng)];
    let t = validate_triple(geo(rs[0]), geo(rs[1]), geo(rs[2]))?;
    let q = random_orthogonal(rng, dim);
    let spectra = [0, 1, 2].map(|_| spectrum(rng, dim));
    let x = [0, 1, 2].map(|k| with_basis(&q, &spectra[k]));
    let p = t.p();
    let oracle: Vec<f64> = (0..dim)
        .map(|i| (0..3).map(|k| spectra[k][i].powf(p[k])).product())
        .collect();
    let expected = with_basis(&q, &oracle);
    let got = run(&t, &x, &AlmConfig::default())?;
    Ok(Trial::new(
        fro_dist(&got, &expected),
        json!({"r": rs, "inputs": mats(&x)}),
    ))
}

fn harmonic_oracle(rng: &mut SeededRng) -> Result<Trial> {
    let dim = rng.random_range(1..=8);
    let t = validate_triple(har(weight(rng)), har(weight(rng)), har(weight(rng)))?;
    let x = random_triple(rng, dim);
    let got = run(&t, &x, &forced())?;
    let expected = harmonic_part(&t.p(), &x)?;
    Ok(Trial::new(
        fro_dist(&got, &expected),
        json!({"means": labels(&t), "inputs": mats(&x)}),
    ))
}

fn joint_homogeneity(rng: &mut SeededRng) -> Result<Trial> {
    let dim = small_dim(rng);
    let rs = [weight(rng), weight(rng), weight(rng)];
    let t = validate_triple(geo(rs[0]), geo(rs[1]), geo(rs[2]))?;
    let x = random_triple(rng, dim);
    let c = [scale(rng), scale(rng), scale(rng)];
    let cfg = AlmConfig::default();
    let m = run(&t, &x, &cfg)?;
    let scaled = [x[0].scaled(c[0]), x[1].scaled(c[1]), x[2].scaled(c[2])];
    let p = t.p();
    let factor = c[0].powf(p[0]) * c[1].powf(p[1]) * c[2].powf(p[2]);
    Ok(Trial::new(
        fro_dist(&run(&t, &scaled, &cfg)?, &m.scaled(factor)),
        json!({"r": rs, "coefficients": c, "inputs": mats(&x)}),
    ))
}

fn inverses(x: &[SpdMatrix; 3]) -> Result<[SpdMatrix; 3]> {
    Ok([x[0].inverse()?, x[1].inverse()?, x[2].inverse()?])
}

fn matrix_adjoint(rng: &mut SeededRng) -> Result<Trial> {
    let dim = small_dim(rng);
    // at most one ∇ and at most one ! so both the triple and its adjoint are valid
    let mut kinds = [1usize, 1, 1];
    let slots = [rng.random_range(0..3usize), rng.random_range(0..3usize)];
    kinds[slots[0]] = 2;
    if slots[1] != slots[0] {
        kinds[slots[1]] = 0;
    }
    let rs = [weight(rng), weight(rng), weight(rng)];
    let sig = [0, 1, 2].map(|k| at_level(kinds[k], rs[k]));
    let adj = [0, 1, 2].map(|k| sig[k].adjoint());
    let t = validate_triple(sig[0].clone(), sig[1].clone(), sig[2].clone())?;
    let ta = validate_triple(adj[0].clone()?, adj[1].clone()?, adj[2].clone()?)?;
    let x = random_triple(rng, dim);
    let cfg = AlmConfig::default();
    let direct = run(&t, &x, &cfg)?;
    let via = run(&ta, &inverses(&x)?, &cfg)?.inverse()?;
    Ok(Trial::new(
        fro_dist(&direct, &via),
        json!({"means": labels(&t), "inputs": mats(&x)}),
    ))
}

fn self_adjoint(rng: &mut SeededRng) -> Result<Trial> {
    let dim = small_dim(rng);
    let t = validate_triple(geo(0.5), geo(0.5), geo(0.5))?;
    let x = random_triple(rng, dim);
    let cfg = AlmConfig::default();
    let direct = run(&t, &x, &cfg)?;
    let via = run(&t, &inverses(&x)?, &cfg)?.inverse()?;
    Ok(Trial::new(fro_dist(&direct, &via), json!({"inputs": mats(&x)})))
}

/// Smallest `c` with `c·Y ≥ X`, i.e. `ρ(Y^{-1/2} X Y^{-1/2})`.
fn dominating_factor(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    crate::metrics::spectral_radius_of_quotient(y, x)
}

fn self_adjoint_chain(rng: &mut SeededRng) -> Result<Trial> {
    let dim = small_dim(rng);
    let t = validate_triple(geo(0.5), geo(0.5), geo(0.5))?;
    // the ordering factors multiply the inputs' condition numbers, so the
    // spectra are kept in [0.1, 10] to leave the chain measurable at 1e-7
    let [a, b, c] = [0, 1, 2].map(|_| random_spd_in(rng, dim, 0.1, 10.0));
    let mu = dominating_factor(&c, &b)? * 1.01;
    let lambda = dominating_factor(&b.scaled(mu), &a)? * 1.01;
    let ordered = [a.scaled(lambda), b.scaled(mu), c.clone()];
    let pre = leq_excess(&ordered[1], &ordered[0])?.max(leq_excess(&ordered[2], &ordered[1])?);
    if pre > 0.0 {
        return Err(Error::PreconditionError(format!(
            "scaled inputs not ordered (excess {pre:e})"
        )));
    }
    let cfg = AlmConfig::default();
    let m_ord = run(&t, &ordered, &cfg)?;
    let m_ord_adj = run(&t, &inverses(&ordered)?, &cfg)?.inverse()?;
    let step1 = thompson(&m_ord, &m_ord_adj)?.value();
    let x = [a, b, c];
    let m = run(&t, &x, &cfg)?;
    let unscale = (lambda * mu).powf(-1.0 / 3.0);
    let step2 = thompson(&m_ord_adj.scaled(unscale), &m)?.value();
    let m_adj = run(&t, &inverses(&x)?, &cfg)?.inverse()?;
    let step3 = thompson(&m_adj, &m)?.value();
    Ok(Trial::new(
        step1.max(step2).max(step3),
        json!({"inputs": mats(&x), "lambda": lambda, "mu": mu, "steps": [step1, step2, step3]}),
    ))
}

fn upward_continuity(rng: &mut SeededRng) -> Result<Trial> {
    let dim = small_dim(rng);
    let t = validate_triple(geo(0.5), geo(0.5), geo(0.5))?;
    let x = random_triple(rng, dim);
    let mut gaps = Vec::with_capacity(3);
    for m in &x {
        let rank = rng.random_range(1..=dim);
        gaps.push(random_psd(rng, dim, rank, 0.5 * m.min_eigenvalue()?));
    }
    let cfg = AlmConfig::default();
    let m_lim = run(&t, &x, &cfg)?;
    let (lo, hi) = (
        x.iter()
            .map(|m| m.min_eigenvalue())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min)
            * 0.5,
        x.iter()
            .map(|m| m.max_eigenvalue())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max),
    );
    let scale = m_lim.operator_norm()?;
    let mut excess = 0.0_f64;
    let mut prev: Option<SpdMatrix> = None;
    for k in 0..8 {
        let tk = 0.5_f64.powi(k);
        let xk = [0, 1, 2].map(|i| SpdMatrix::new(x[i].matrix() - gaps[i].matrix() * tk));
        let xk = [xk[0].clone()?, xk[1].clone()?, xk[2].clone()?];
        let mk = run(&t, &xk, &cfg)?;
        if let Some(p) = &prev {
            excess = excess.max(leq_excess(p, &mk)? / scale);
        }
        excess = excess.max(leq_excess(&mk, &m_lim)? / scale);
        let dev = gaps
            .iter()
            .map(|g| g.operator_norm().map(|n| n * tk))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let dist = crate::linalg::symmetric_operator_norm(&(m_lim.matrix() - mk.matrix()))?;
        excess = excess.max((dist - hi / lo * dev).max(0.0) / scale);
        prev = Some(mk);
    }
    Ok(Trial::new(excess, json!({"inputs": mats(&x), "gaps": mats(&gaps)})))
}

fn ordered_interleaving(rng: &mut SeededRng) -> Result<Trial> {
    let dim = small_dim(rng);
    let sigma = match rng.random_range(0..3) {
        0 => geo(0.5),
        1 => har(0.5),
        _ => ari(0.5),
    };
    let m = MultiMean::two_var(sigma.clone());
    let x = ordered_triple(rng, dim);
    let tr = ordered_convergence_run(&m, &x, &AlmConfig::default())?;
    let last = tr.max_residuals.last().copied().unwrap_or(0.0);
    Ok(Trial::new(
        (tr.pattern_violation / 1e-9).max(last / 1e-8),
        json!({"sigma": sigma.label(), "inputs": mats(&x), "pattern_violation": tr.pattern_violation, "final_residual": last}),
    ))
}

/// Weights of the six 5-variable means in the non-dominated construction.
pub(crate) fn not_dominated_weights() -> Vec<Vec<f64>> {
    (0..6)
        .map(|k| {
            if k % 2 == 0 {
                vec![0.0, 0.5, 0.5, 0.0, 0.0]
            } else {
                vec![0.5, 0.5, 0.0, 0.0, 0.0]
            }
        })
        .collect()
}

fn not_dominated(rng: &mut SeededRng) -> Result<Trial> {
    const FLOOR: f64 = 1e-3;
    let means = not_dominated_weights()
        .into_iter()
        .map(MultiMean::arithmetic)
        .collect::<Result<Vec<_>>>()?;
    let dim = rng.random_range(1..=4);
    let ops: Vec<SpdMatrix> = (0..6).map(|_| random_spd(rng, dim)).collect();
    let rejected = matches!(
        alm_compute_n(&means, &ops, &AlmConfig::default()),
        Err(Error::NotAffinelyDominated { .. })
    );
    let cfg = AlmConfig {
        unsafe_allow: true,
        max_iter: 200,
        ..AlmConfig::default()
    };
    let (non_converged, floor) = match alm_compute_n(&means, &ops, &cfg) {
        Err(Error::NonConverged(o)) => {
            let floor = o
                .trace
                .iter()
                .filter(|r| r.iteration >= 100)
                .map(|r| r.max_distance)
                .fold(f64::INFINITY, f64::min);
            (true, floor)
        }
        _ => (false, 0.0),
    };
    Ok(Trial::flag(
        rejected && non_converged && floor >= FLOOR,
        json!({"inputs": mats(&ops), "rejected": rejected, "non_converged": non_converged, "distance_floor": floor}),
    ))
}

fn nonprimitive_profile(_: &mut SeededRng) -> Result<Trial> {
    let profile = profile_unchecked(&not_dominated_weights())?;
    let same = profile.gamma == cyclic_averaging_6();
    Ok(Trial::flag(
        same && !profile.primitive && profile.spectral_gap.abs() < 1e-12,
        json!({"primitive": profile.primitive, "spectral_gap": profile.spectral_gap, "matches_shift_x_averaging": same}),
    ))
}

fn random_job(rng: &mut SeededRng) -> Result<MeanJobSpec> {
    let dim = small_dim(rng);
    let t = mixed_triple(rng)?;
    let means = t
        .sigmas()
        .iter()
        .map(|s| s.to_spec().map(MeanDescriptor::Builtin))
        .collect::<Result<Vec<_>>>()?;
    let matrices = random_triple(rng, dim)
        .iter()
        .map(|m| MatrixInput::from_matrix(m.matrix()))
        .collect();
    Ok(MeanJobSpec {
        arity: Some(2),
        means,
        matrices,
        config: AlmConfig::default(),
    })
}

fn io_determinism(rng: &mut SeededRng) -> Result<Trial> {
    let job = random_job(rng)?;
    let text = serde_json::to_string(&job)?;
    let first = to_json(&JobResult::from_outcome(&MeanJobSpec::from_json(&text)?.run()?, true))?;
    let second = to_json(&JobResult::from_outcome(&MeanJobSpec::from_json(&text)?.run()?, true))?;
    Ok(Trial::flag(first == second, json!({"job": text})))
}

fn io_round_trip(rng: &mut SeededRng) -> Result<Trial> {
    let job = random_job(rng)?;
    let out = job.run()?;
    let text = to_json(&JobResult::from_outcome(&out, false))?;
    let parsed: Value = serde_json::from_str(&text)?;
    let back: MatrixInput = serde_json::from_value(parsed["limit"].clone())?;
    let back = back.to_dense()?;
    let same = back.shape() == out.limit.matrix().shape()
        && back
            .iter()
            .zip(out.limit.matrix().iter())
            .all(|(x, y)| x.to_bits() == y.to_bits());
    Ok(Trial::flag(same, json!({"output": text})))
}
