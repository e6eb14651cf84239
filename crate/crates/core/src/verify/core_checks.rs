//! Checks for the linear-algebra, two-variable-mean, stochastic and metric layers.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde_json::json;

use super::sample::*;
use super::{leq_excess, mat, PropertyCheck, Trial};
use crate::alm::{alm_compute, validate_triple, AlmConfig};
use crate::error::{Error, Result};
use crate::kubo_ando::{log_grid, scalar_mean_inequality_margin, TwoVarMean};
use crate::linalg::{
    apply_spectral_function, congruence, loewner_leq, SpdMatrix, RECONSTRUCTION_CONSTANT,
};
use crate::metrics::{gauge_r, geodesic_gauge_sides, thompson};
use crate::stochastic::{
    check_primitive, closed_form_p3, cyclic_averaging_6, cyclic_gamma, cyclic_shift, gamma3,
    matrix_power, perron_vector,
};

pub(super) fn checks() -> Vec<PropertyCheck> {
    vec![
        PropertyCheck {
            name: "linalg.spectral_identity",
            statement: "‖Q id(Λ) Qᵀ − A‖_F ≤ 64·dim·ε·‖A‖_F (excess normalized to that bound)",
            covers: &["linalg.spectral_identity"],
            trials: 100,
            fixed_trials: false,
            slack: 1.0,
            trial: spectral_identity,
        },
        PropertyCheck {
            name: "linalg.sqrt_squared",
            statement: "‖(A^{1/2})² − A‖_F / ‖A‖_F ≤ 1e-10, dim ≤ 16",
            covers: &["linalg.sqrt_squared"],
            trials: 100,
            fixed_trials: false,
            slack: 1e-10,
            trial: sqrt_squared,
        },
        PropertyCheck {
            name: "linalg.congruence_inverse",
            statement: "‖S(S⁻¹AS⁻¹)S − A‖_F / ‖A‖_F ≤ 1e-10, S symmetric invertible",
            covers: &["linalg.congruence_inverse"],
            trials: 100,
            fixed_trials: false,
            slack: 1e-10,
            trial: congruence_inverse,
        },
        PropertyCheck {
            name: "linalg.loewner_order",
            statement: "Loewner ≤ on diagonal triples: reflexive, antisymmetric, transitive, entrywise",
            covers: &["linalg.loewner_partial_order"],
            trials: 200,
            fixed_trials: false,
            slack: 0.0,
            trial: loewner_order,
        },
        PropertyCheck {
            name: "kubo.monotonicity",
            statement: "A ≤ C, B ≤ D ⇒ λ_min(CσD − AσB) ≥ −1e-10",
            covers: &["kubo.monotonicity"],
            trials: 200,
            fixed_trials: false,
            slack: 1e-10,
            trial: kubo_monotonicity,
        },
        PropertyCheck {
            name: "kubo.transformer",
            statement: "λ_min((TAT)σ(TBT) − T(AσB)T) ≥ −1e-8 for PSD T of any rank (nonzero spectrum in [1/2, 2]), A, B spectra in [0.1, 10]",
            covers: &["kubo.transformer"],
            trials: 200,
            fixed_trials: false,
            slack: 1e-8,
            trial: kubo_transformer,
        },
        PropertyCheck {
            name: "kubo.strict_concavity",
            statement: "α ≠ β on the grid ⇒ (1−r)α + rβ − ασβ > 0 for non-arithmetic σ",
            covers: &["kubo.strict_concavity"],
            trials: 100,
            fixed_trials: false,
            slack: 0.0,
            trial: kubo_strict_concavity,
        },
        PropertyCheck {
            name: "kubo.adjoint_involution",
            statement: "f_{σ**} = f_σ on the 64-point grid, relative 1e-12",
            covers: &["kubo.adjoint_involution"],
            trials: 50,
            fixed_trials: false,
            slack: 1e-12,
            trial: adjoint_involution,
        },
        PropertyCheck {
            name: "kubo.transpose_involution",
            statement: "f_{σ°°} = f_σ on the 64-point grid, relative 1e-12",
            covers: &["kubo.transpose_involution"],
            trials: 50,
            fixed_trials: false,
            slack: 1e-12,
            trial: transpose_involution,
        },
        PropertyCheck {
            name: "kubo.commuting_diagonal",
            statement: "‖AσB − Q diag(aᵢ σ bᵢ) Qᵀ‖_F / ‖·‖_F ≤ 1e-10 for A, B diagonal in Q, spectra in [0.1, 10]",
            covers: &["kubo.commuting_diagonal"],
            trials: 100,
            fixed_trials: false,
            slack: 1e-10,
            trial: commuting_diagonal,
        },
        PropertyCheck {
            name: "kubo.transfer_scalar",
            statement: "⟨(AσB)x,x⟩ ≤ ⟨Ax,x⟩ σ ⟨Bx,x⟩ + 1e-10",
            covers: &[],
            trials: 200,
            fixed_trials: false,
            slack: 1e-10,
            trial: transfer_scalar,
        },
        PropertyCheck {
            name: "stochastic.power_convergence",
            statement: "max |Γ^200 − 1pᵀ| ≤ 1e-8 for random primitive 3×3 and 5×5 Γ",
            covers: &["stochastic.power_convergence"],
            trials: 100,
            fixed_trials: false,
            slack: 1e-8,
            trial: power_convergence,
        },
        PropertyCheck {
            name: "stochastic.closed_form",
            statement: "max |closed-form p − eigen-solved p| ≤ 1e-12 on a 10×10×10 grid",
            covers: &["stochastic.closed_form_agreement"],
            trials: 1,
            fixed_trials: true,
            slack: 1e-12,
            trial: closed_form_grid,
        },
        PropertyCheck {
            name: "stochastic.cyclic_relabeling",
            statement: "p(r₂,r₃,r₁) = (p₂,p₃,p₁)(r₁,r₂,r₃) within 1e-12 on the grid",
            covers: &["stochastic.cyclic_relabeling"],
            trials: 1,
            fixed_trials: true,
            slack: 1e-12,
            trial: cyclic_relabeling,
        },
        PropertyCheck {
            name: "stochastic.nonprimitive_non_cauchy",
            statement: "min_{m ≤ 200} ‖Γ^{m+1} − Γ^m‖_F ≥ 0.1 and flagged non-primitive, for periodic Γ",
            covers: &["stochastic.nonprimitive_non_cauchy"],
            trials: 1,
            fixed_trials: true,
            slack: 0.0,
            trial: non_cauchy,
        },
        PropertyCheck {
            name: "metrics.exp_thompson_gauge",
            statement: "|exp d_T(X,Y) − R(X,Y)| / R(X,Y) ≤ 1e-12",
            covers: &["metrics.exp_thompson_gauge"],
            trials: 200,
            fixed_trials: false,
            slack: 1e-12,
            trial: exp_thompson_gauge,
        },
        PropertyCheck {
            name: "metrics.thompson_congruence",
            statement: "|d_T(SAS,SBS) − d_T(A,B)| ≤ 1e-10, S symmetric with |spectrum| in [1/2, 2]",
            covers: &["metrics.thompson_congruence"],
            trials: 200,
            fixed_trials: false,
            slack: 1e-10,
            trial: thompson_congruence,
        },
        PropertyCheck {
            name: "metrics.thompson_scaling",
            statement: "|d_T(λA,λB) − d_T(A,B)| and |d_T(A,λA) − |log λ|| ≤ 1e-10",
            covers: &["metrics.thompson_scaling"],
            trials: 200,
            fixed_trials: false,
            slack: 1e-10,
            trial: thompson_scaling,
        },
        PropertyCheck {
            name: "metrics.lipschitz",
            statement: "d_T(M(A,B,C), M(A',B',C')) ≤ p₁d_T(A,A') + p₂d_T(B,B') + p₃d_T(C,C') + 1e-8, geometric triples",
            covers: &["metrics.lipschitz"],
            trials: 500,
            fixed_trials: false,
            slack: 1e-8,
            trial: lipschitz,
        },
        PropertyCheck {
            name: "metrics.distance_bound",
            statement: "d_T(M_{#_r×3}, M_{#_s×3}) ≤ |r−s|(p₁d_T(B,C) + p₂d_T(C,A) + p₃d_T(A,B)) + 1e-8",
            covers: &["metrics.distance_bound"],
            trials: 500,
            fixed_trials: false,
            slack: 1e-8,
            trial: distance_bound,
        },
        PropertyCheck {
            name: "metrics.geodesic_gauge",
            statement: "R(X#_rY, X#_sY) ≤ R(X,Y)^{|r−s|}, multiplicative slack 1 + 1e-10, spectra in [0.1, 10]",
            covers: &[],
            trials: 1000,
            fixed_trials: false,
            slack: 1e-10,
            trial: geodesic_gauge,
        },
    ]
}

fn rel_err(x: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    (x - reference).norm() / reference.norm().max(f64::MIN_POSITIVE)
}

/// The logarithmic mean, `f(t) = (t − 1)/log t`, as a custom representing function.
pub(crate) fn logarithmic_mean() -> TwoVarMean {
    TwoVarMean::custom(
        "logarithmic",
        |t: f64| {
            let u = t - 1.0;
            if u.abs() < 1e-4 {
                // series of u / log(1+u)
                1.0 + u / 2.0 - u * u / 12.0 + u * u * u / 24.0
            } else if t == 0.0 {
                0.0
            } else {
                u / t.ln()
            }
        },
        0.5,
        false,
    )
    .expect("the logarithmic mean is an operator mean")
}

/// A random non-trivial mean: arithmetic, geometric, harmonic or logarithmic.
fn random_mean(rng: &mut SeededRng, allow_arithmetic: bool) -> TwoVarMean {
    let r = weight(rng);
    let pick = rng.random_range(if allow_arithmetic { 0..4 } else { 1..4 });
    match pick {
        0 => TwoVarMean::arithmetic(r).unwrap(),
        1 => TwoVarMean::geometric(r).unwrap(),
        2 => TwoVarMean::harmonic(r).unwrap(),
        _ => logarithmic_mean(),
    }
}

pub(super) fn random_symmetric_invertible(rng: &mut SeededRng, dim: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let q = random_orthogonal(rng, dim);
    let d: Vec<f64> = (0..dim)
        .map(|_| {
            let v = log_uniform(rng, lo, hi);
            if rng.random_bool(0.5) {
                v
            } else {
                -v
            }
        })
        .collect();
    &q * DMatrix::from_diagonal(&DVector::from_vec(d)) * q.transpose()
}

fn spectral_identity(rng: &mut SeededRng) -> Result<Trial> {
    let dim = rng.random_range(1..=16);
    let a = random_spd(rng, dim);
    let out = apply_spectral_function(&a, |x| x, Some(0.0))?;
    let bound = RECONSTRUCTION_CONSTANT * dim as f64 * f64::EPSILON;
    Ok(Trial::new(rel_err(&out, a.matrix()) / bound, json!({"a": mat(&a)})))
}

fn sqrt_squared(rng: &mut SeededRng) -> Result<Trial> {
    let dim = rng.random_range(1..=16);
    let a = random_spd(rng, dim);
    let s = apply_spectral_function(&a, f64::sqrt, Some(0.0))?;
    Ok(Trial::new(rel_err(&(&s * &s), a.matrix()), json!({"a": mat(&a)})))
}

fn congruence_inverse(rng: &mut SeededRng) -> Result<Trial> {
    let dim = rng.random_range(1..=8);
    let a = random_spd(rng, dim);
    let s = random_symmetric_invertible(rng, dim, 0.1, 10.0);
    let s_inv = s
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::DomainError("S is singular".into()))?;
    let back = congruence(&s, &congruence(&s_inv, &a)?)?;
    Ok(Trial::new(
        rel_err(back.matrix(), a.matrix()),
        json!({"a": mat(&a), "s": s.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>()}),
    ))
}

fn loewner_order(rng: &mut SeededRng) -> Result<Trial> {
    let dim = rng.random_range(1..=4);
    // small integer entries make comparable pairs common
    let diags: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..dim).map(|_| rng.random_range(1..=3) as f64).collect())
        .collect();
    let ms: Vec<SpdMatrix> = diags
        .iter()
        .map(|d| SpdMatrix::from_diagonal(d))
        .collect::<Result<_>>()?;
    let leq = |i: usize, j: usize| loewner_leq(&ms[i], &ms[j], 0.0);
    let mut violations = 0;
    for i in 0..3 {
        violations += usize::from(!leq(i, i)?);
        for j in 0..3 {
            let entrywise = diags[i].iter().zip(&diags[j]).all(|(x, y)| x <= y);
            violations += usize::from(leq(i, j)? != entrywise);
            if leq(i, j)? && leq(j, i)? && ms[i] != ms[j] {
                violations += 1;
            }
            for k in 0..3 {
                if leq(i, j)? && leq(j, k)? && !leq(i, k)? {
                    violations += 1;
                }
            }
        }
    }
    Ok(Trial::new(violations as f64, json!({"diagonals": diags})))
}

fn kubo_monotonicity(rng: &mut SeededRng) -> Result<Trial> {
    let sigma = random_mean(rng, true);
    let dim = rng.random_range(1..=6);
    let (a, c, b, d) = if rng.random_bool(0.5) {
        let draw = |rng: &mut SeededRng| -> Vec<f64> {
            (0..dim).map(|_| log_uniform(rng, SPECTRUM_LOW, SPECTRUM_HIGH)).collect()
        };
        let (x, y) = (draw(rng), draw(rng));
        let up = |rng: &mut SeededRng, v: &[f64]| -> Vec<f64> {
            v.iter().map(|&t| t + rng.random_range(0.0..2.0) * t).collect()
        };
        let (xu, yu) = (up(rng, &x), up(rng, &y));
        (
            SpdMatrix::from_diagonal(&x)?,
            SpdMatrix::from_diagonal(&xu)?,
            SpdMatrix::from_diagonal(&y)?,
            SpdMatrix::from_diagonal(&yu)?,
        )
    } else {
        let (a, c) = loewner_pair(rng, dim);
        let (b, d) = loewner_pair(rng, dim);
        (a, c, b, d)
    };
    let lo = sigma.evaluate(&a, &b, 0.0)?;
    let hi = sigma.evaluate(&c, &d, 0.0)?;
    Ok(Trial::new(
        leq_excess(&lo, &hi)?,
        json!({"sigma": sigma.label(), "a": mat(&a), "b": mat(&b), "c": mat(&c), "d": mat(&d)}),
    ))
}

fn kubo_transformer(rng: &mut SeededRng) -> Result<Trial> {
    let sigma = random_mean(rng, true);
    let dim = rng.random_range(1..=6);
    let a = random_spd_in(rng, dim, 0.1, 10.0);
    let b = random_spd_in(rng, dim, 0.1, 10.0);
    let rank = rng.random_range(1..=dim);
    let t = random_psd_spectrum(rng, dim, rank, 0.5, 2.0);
    let ta = congruence(t.matrix(), &a)?;
    let tb = congruence(t.matrix(), &b)?;
    let lhs = congruence(t.matrix(), &sigma.evaluate(&a, &b, 0.0)?)?;
    // a singular T makes TAT singular; any ε > 0 only enlarges the right side
    let eps = if rank < dim {
        1e-12 * ta.operator_norm()?.max(tb.operator_norm()?)
    } else {
        0.0
    };
    let rhs = sigma.evaluate(&ta, &tb, eps)?;
    Ok(Trial::new(
        leq_excess(&lhs, &rhs)?,
        json!({"sigma": sigma.label(), "a": mat(&a), "b": mat(&b), "t": mat(&t)}),
    ))
}

fn kubo_strict_concavity(rng: &mut SeededRng) -> Result<Trial> {
    let sigma = random_mean(rng, false);
    let r = sigma.weight();
    let mut grid = log_grid();
    grid.push(0.0);
    let mut worst = f64::INFINITY;
    let mut at = (0.0, 0.0);
    for _ in 0..64 {
        let i = rng.random_range(0..grid.len());
        let j = rng.random_range(0..grid.len());
        if i == j {
            continue;
        }
        let (x, y) = (grid[i], grid[j]);
        let arith = (1.0 - r) * x + r * y;
        let margin = (arith - sigma.scalar(x, y)) / arith;
        if margin < worst {
            worst = margin;
            at = (x, y);
        }
    }
    Ok(Trial::flag(
        worst > 0.0,
        json!({"sigma": sigma.label(), "min_relative_margin": worst, "at": [at.0, at.1]}),
    ))
}

fn grid_mismatch(f: &TwoVarMean, g: &TwoVarMean) -> f64 {
    log_grid()
        .into_iter()
        .map(|t| {
            let (a, b) = (f.f(t), g.f(t));
            (a - b).abs() / a.abs().max(b.abs()).max(1.0)
        })
        .fold(0.0, f64::max)
}

fn adjoint_involution(rng: &mut SeededRng) -> Result<Trial> {
    let sigma = random_mean(rng, true);
    let back = sigma.adjoint()?.adjoint()?;
    Ok(Trial::new(grid_mismatch(&sigma, &back), json!({"sigma": sigma.label()})))
}

fn transpose_involution(rng: &mut SeededRng) -> Result<Trial> {
    let sigma = match rng.random_range(0..6) {
        0 => TwoVarMean::left_trivial(),
        1 => TwoVarMean::right_trivial(),
        _ => random_mean(rng, true),
    };
    let back = sigma.transpose().transpose();
    Ok(Trial::new(grid_mismatch(&sigma, &back), json!({"sigma": sigma.label()})))
}

fn commuting_diagonal(rng: &mut SeededRng) -> Result<Trial> {
    let sigma = random_mean(rng, true);
    let dim = rng.random_range(1..=8);
    let q = random_orthogonal(rng, dim);
    let la: Vec<f64> = (0..dim).map(|_| log_uniform(rng, 0.1, 10.0)).collect();
    let lb: Vec<f64> = (0..dim).map(|_| log_uniform(rng, 0.1, 10.0)).collect();
    let a = with_basis(&q, &la);
    let b = with_basis(&q, &lb);
    let scalar: Vec<f64> = la.iter().zip(&lb).map(|(&x, &y)| sigma.scalar(x, y)).collect();
    let expected = with_basis(&q, &scalar);
    let got = sigma.evaluate(&a, &b, 0.0)?;
    Ok(Trial::new(
        rel_err(got.matrix(), expected.matrix()),
        json!({"sigma": sigma.label(), "a": mat(&a), "b": mat(&b)}),
    ))
}

fn transfer_scalar(rng: &mut SeededRng) -> Result<Trial> {
    let sigma = random_mean(rng, true);
    let dim = rng.random_range(1..=6);
    let a = random_spd(rng, dim);
    let b = random_spd(rng, dim);
    let x = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    let x = &x / x.norm();
    let margin = scalar_mean_inequality_margin(&sigma, &a, &b, &x)?;
    Ok(Trial::new(
        (-margin).max(0.0),
        json!({"sigma": sigma.label(), "a": mat(&a), "b": mat(&b), "x": x.as_slice()}),
    ))
}

fn power_convergence(rng: &mut SeededRng) -> Result<Trial> {
    let gamma = if rng.random_bool(0.5) {
        gamma3(weight(rng), weight(rng), weight(rng))?
    } else {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|_| {
                let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.05..1.0)).collect();
                let s: f64 = raw.iter().sum();
                raw.iter().map(|x| x / s).collect()
            })
            .collect();
        cyclic_gamma(&rows)?
    };
    let p = perron_vector(&gamma)?;
    let g = matrix_power(&gamma, 200);
    let mut worst = 0.0_f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            worst = worst.max((g[(i, j)] - p[j]).abs());
        }
    }
    let rows: Vec<Vec<f64>> = gamma.row_iter().map(|r| r.iter().copied().collect()).collect();
    Ok(Trial::new(worst, json!({"gamma": rows, "p": p})))
}

fn grid_weights() -> Vec<f64> {
    (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect()
}

fn closed_form_grid(_: &mut SeededRng) -> Result<Trial> {
    let mut worst = 0.0_f64;
    let mut at = [0.0; 3];
    for &r1 in &grid_weights() {
        for &r2 in &grid_weights() {
            for &r3 in &grid_weights() {
                let c = closed_form_p3(r1, r2, r3)?;
                let e = perron_vector(&gamma3(r1, r2, r3)?)?;
                let d = (0..3).map(|k| (c[k] - e[k]).abs()).fold(0.0, f64::max);
                if d > worst {
                    worst = d;
                    at = [r1, r2, r3];
                }
            }
        }
    }
    Ok(Trial::new(worst, json!({"worst_at": at})))
}

fn cyclic_relabeling(_: &mut SeededRng) -> Result<Trial> {
    let mut worst = 0.0_f64;
    let mut at = [0.0; 3];
    for &r1 in &grid_weights() {
        for &r2 in &grid_weights() {
            for &r3 in &grid_weights() {
                let p = perron_vector(&gamma3(r1, r2, r3)?)?;
                let q = perron_vector(&gamma3(r2, r3, r1)?)?;
                let d = (0..3).map(|k| (q[k] - p[(k + 1) % 3]).abs()).fold(0.0, f64::max);
                if d > worst {
                    worst = d;
                    at = [r1, r2, r3];
                }
            }
        }
    }
    Ok(Trial::new(worst, json!({"worst_at": at})))
}

fn non_cauchy(_: &mut SeededRng) -> Result<Trial> {
    const FLOOR: f64 = 0.1;
    let flip = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let cases = [
        ("shift3", cyclic_shift(3)),
        ("shift4", cyclic_shift(4)),
        ("flip2", flip),
        ("shift3_x_avg2", cyclic_averaging_6()),
    ];
    let mut excess = 0.0_f64;
    let mut report = Vec::new();
    for (label, g) in cases {
        let prim = check_primitive(&g)?.primitive;
        let mut pow = g.clone();
        let mut min_step = f64::INFINITY;
        for _ in 0..200 {
            let next = &pow * &g;
            min_step = min_step.min((&next - &pow).norm());
            pow = next;
        }
        excess = excess.max((FLOOR - min_step).max(0.0)).max(if prim { 1.0 } else { 0.0 });
        report.push(json!({"gamma": label, "primitive": prim, "min_step": min_step}));
    }
    Ok(Trial::new(excess, json!(report)))
}

fn definite_pair(rng: &mut SeededRng) -> (SpdMatrix, SpdMatrix) {
    let dim = rng.random_range(1..=6);
    (random_spd(rng, dim), random_spd(rng, dim))
}

fn exp_thompson_gauge(rng: &mut SeededRng) -> Result<Trial> {
    let (x, y) = definite_pair(rng);
    let d = thompson(&x, &y)?.value();
    let r = gauge_r(&x, &y)?;
    Ok(Trial::new((d.exp() - r).abs() / r, json!({"x": mat(&x), "y": mat(&y)})))
}

fn thompson_congruence(rng: &mut SeededRng) -> Result<Trial> {
    let (a, b) = definite_pair(rng);
    let s = random_symmetric_invertible(rng, a.dim(), 0.5, 2.0);
    let d0 = thompson(&a, &b)?.value();
    let d1 = thompson(&congruence(&s, &a)?, &congruence(&s, &b)?)?.value();
    Ok(Trial::new((d1 - d0).abs(), json!({"a": mat(&a), "b": mat(&b)})))
}

fn thompson_scaling(rng: &mut SeededRng) -> Result<Trial> {
    let (a, b) = definite_pair(rng);
    let lambda = log_uniform(rng, 1e-3, 1e3);
    let d0 = thompson(&a, &b)?.value();
    let d1 = thompson(&a.scaled(lambda), &b.scaled(lambda))?.value();
    let d2 = thompson(&a, &a.scaled(lambda))?.value();
    Ok(Trial::new(
        (d1 - d0).abs().max((d2 - lambda.ln().abs()).abs()),
        json!({"a": mat(&a), "b": mat(&b), "lambda": lambda}),
    ))
}

fn lipschitz(rng: &mut SeededRng) -> Result<Trial> {
    let dim = rng.random_range(1..=4);
    let rs = [weight(rng), weight(rng), weight(rng)];
    let t = validate_triple(
        TwoVarMean::geometric(rs[0])?,
        TwoVarMean::geometric(rs[1])?,
        TwoVarMean::geometric(rs[2])?,
    )?;
    let x = random_triple(rng, dim);
    let y = random_triple(rng, dim);
    let cfg = AlmConfig::default();
    let m = alm_compute(&t, &x[0], &x[1], &x[2], &cfg)?.limit;
    let m2 = alm_compute(&t, &y[0], &y[1], &y[2], &cfg)?.limit;
    let lhs = thompson(&m, &m2)?.value();
    let p = t.p();
    let mut rhs = 0.0;
    for k in 0..3 {
        rhs += p[k] * thompson(&x[k], &y[k])?.value();
    }
    Ok(Trial::new(
        (lhs - rhs).max(0.0),
        json!({"r": rs, "inputs": super::mats(&x), "perturbed": super::mats(&y)}),
    ))
}

fn distance_bound(rng: &mut SeededRng) -> Result<Trial> {
    let dim = rng.random_range(1..=4);
    let (r, s) = if rng.random_bool(0.25) {
        (0.5, 2.0 / 3.0)
    } else {
        (weight(rng), weight(rng))
    };
    let tri = |w: f64| -> Result<_> {
        validate_triple(
            TwoVarMean::geometric(w)?,
            TwoVarMean::geometric(w)?,
            TwoVarMean::geometric(w)?,
        )
    };
    let (t, t2) = (tri(r)?, tri(s)?);
    let [a, b, c] = random_triple(rng, dim);
    let cfg = AlmConfig::default();
    let m = alm_compute(&t, &a, &b, &c, &cfg)?.limit;
    let m2 = alm_compute(&t2, &a, &b, &c, &cfg)?.limit;
    let p = t.p();
    let rhs = (r - s).abs()
        * (p[0] * thompson(&b, &c)?.value()
            + p[1] * thompson(&c, &a)?.value()
            + p[2] * thompson(&a, &b)?.value());
    let lhs = thompson(&m, &m2)?.value();
    Ok(Trial::new(
        (lhs - rhs).max(0.0),
        json!({"r": r, "s": s, "inputs": super::mats(&[a, b, c])}),
    ))
}

fn geodesic_gauge(rng: &mut SeededRng) -> Result<Trial> {
    let x = random_spd_in(rng, 3, 0.1, 10.0);
    let y = random_spd_in(rng, 3, 0.1, 10.0);
    let (r, s) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
    let (lhs, rhs) = geodesic_gauge_sides(&x, &y, r, s)?;
    Ok(Trial::new(
        (lhs / rhs - 1.0).max(0.0),
        json!({"x": mat(&x), "y": mat(&y), "r": r, "s": s}),
    ))
}
