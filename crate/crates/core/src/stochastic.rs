//! Row-stochastic weight matrices and their left Perron vectors.
//!
//! The weight matrix of an ALM recursion has a zero diagonal; row `k` holds the
//! weights mean `k` puts on the other operators. Its left Perron vector `p`
//! (with `pΓ = p`) gives the weights of the monotone aggregate.

use nalgebra::{Complex, DMatrix, DVector, Schur};
use serde::Serialize;

use crate::error::{Error, Result};

/// Row sums must equal 1 to this tolerance.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Power-iteration fallback stopping tolerance.
pub const POWER_TOL: f64 = 1e-14;
/// Power-iteration fallback iteration cap.
pub const POWER_CAP: usize = 1_000_000;
/// Iteration cap of the real Schur decomposition.
const SCHUR_CAP: usize = 100_000;

#[derive(Debug, Clone, Serialize)]
pub struct StochasticProfile {
    #[serde(serialize_with = "crate::io::serialize_matrix")]
    pub gamma: DMatrix<f64>,
    pub p: Vec<f64>,
    pub primitive: bool,
    pub spectral_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Primitivity {
    pub primitive: bool,
    pub spectral_gap: f64,
}

fn check_open_unit(rs: &[f64]) -> Result<()> {
    for (i, &r) in rs.iter().enumerate() {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::ParameterError(format!(
                "weight r{} = {r} must lie in (0, 1)",
                i + 1
            )));
        }
    }
    Ok(())
}

/// The 3×3 matrix `[[0, 1−r₁, r₁], [r₂, 0, 1−r₂], [1−r₃, r₃, 0]]`.
pub fn gamma3(r1: f64, r2: f64, r3: f64) -> Result<DMatrix<f64>> {
    check_open_unit(&[r1, r2, r3])?;
    Ok(DMatrix::from_row_slice(
        3,
        3,
        &[0.0, 1.0 - r1, r1, r2, 0.0, 1.0 - r2, 1.0 - r3, r3, 0.0],
    ))
}

/// Weight matrix, Perron vector and primitivity for three two-variable means.
pub fn gamma_from_weights_3(r1: f64, r2: f64, r3: f64) -> Result<StochasticProfile> {
    let gamma = gamma3(r1, r2, r3)?;
    let p = perron_vector(&gamma)?;
    let prim = check_primitive(&gamma)?;
    Ok(StochasticProfile {
        gamma,
        p,
        primitive: prim.primitive,
        spectral_gap: prim.spectral_gap,
    })
}

/// Closed-form Perron vector of [`gamma3`].
pub fn closed_form_p3(r1: f64, r2: f64, r3: f64) -> Result<[f64; 3]> {
    check_open_unit(&[r1, r2, r3])?;
    let n1 = (1.0 - r3) + r2 * r3;
    let n2 = (1.0 - r1) + r3 * r1;
    let n3 = (1.0 - r2) + r1 * r2;
    let d = n1 + n2 + n3;
    Ok([n1 / d, n2 / d, n3 / d])
}

/// Cyclic weight matrix: `Γ[k][(k+i) mod (n+1)] = r_i^{(k)}`, zero diagonal.
///
/// Does not validate positivity; see [`gamma_from_multimeans`].
pub fn cyclic_gamma(weights: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let size = weights.len();
    if size < 2 {
        return Err(Error::ParameterError("need at least two means".into()));
    }
    let n = size - 1;
    let mut gamma = DMatrix::zeros(size, size);
    for (k, row) in weights.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        for (i, &w) in row.iter().enumerate() {
            gamma[(k, (k + i + 1) % size)] = w;
        }
    }
    Ok(gamma)
}

/// Profile of the `(n+1)`-mean recursion from the means' weight vectors.
///
/// Every weight must be strictly positive (the means are affinely dominated)
/// and every vector must sum to 1. For three means the closed form is used for
/// `p`, so the two-variable and general engines agree exactly.
pub fn gamma_from_multimeans(weights: &[Vec<f64>]) -> Result<StochasticProfile> {
    for (k, row) in weights.iter().enumerate() {
        if row.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::NotAffinelyDominated {
                index: k,
                weights: row.clone(),
            });
        }
    }
    let profile = profile_unchecked(weights)?;
    if !profile.primitive {
        return Err(Error::NonPrimitive(profile.spectral_gap));
    }
    Ok(profile)
}

/// Like [`gamma_from_multimeans`] but accepts zero weights and non-primitive
/// matrices; used for exploratory runs outside the convergence hypotheses.
pub fn profile_unchecked(weights: &[Vec<f64>]) -> Result<StochasticProfile> {
    for (k, row) in weights.iter().enumerate() {
        if row.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::ParameterError(format!(
                "mean {k} has a negative weight: {row:?}"
            )));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > ROW_SUM_TOL * 10.0 {
            return Err(Error::ParameterError(format!(
                "weights of mean {k} sum to {s}, not 1"
            )));
        }
    }
    let gamma = cyclic_gamma(weights)?;
    let p = if gamma.nrows() == 3 && weights.iter().all(|r| r.iter().all(|&w| w > 0.0)) {
        // row k of the 3×3 matrix is (.., 1 − r_{k+1}, r_{k+1}) in cyclic order
        closed_form_p3(gamma[(0, 2)], gamma[(1, 0)], gamma[(2, 1)])?.to_vec()
    } else {
        perron_vector(&gamma)?
    };
    let prim = check_primitive(&gamma)?;
    Ok(StochasticProfile {
        gamma,
        p,
        primitive: prim.primitive,
        spectral_gap: prim.spectral_gap,
    })
}

fn check_row_stochastic(gamma: &DMatrix<f64>) -> Result<()> {
    if !gamma.is_square() || gamma.nrows() == 0 {
        return Err(Error::ParameterError("weight matrix must be square".into()));
    }
    for (i, row) in gamma.row_iter().enumerate() {
        if row.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::ParameterError(format!(
                "row {i} has a negative entry"
            )));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-10 {
            return Err(Error::ParameterError(format!("row {i} sums to {s}")));
        }
    }
    Ok(())
}

/// Left eigenvector of `Γ` for eigenvalue 1, normalized to sum 1.
///
/// Solves `(Γᵀ − I)p = 0` with the normalization row appended (least squares
/// via Householder QR). Falls back to power iteration on the lazy chain `(Γ + I)/2`,
/// which has the same stationary vector but no periodicity.
pub fn perron_vector(gamma: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_row_stochastic(gamma)?;
    let n = gamma.nrows();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let m = gamma.transpose() - DMatrix::identity(n, n);
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max().max(1.0);
    let nullity = sv.iter().filter(|&&s| s <= 1e-10 * smax).count();
    if nullity > 1 {
        return Err(Error::DegeneratePerron(nullity));
    }

    let mut aug = DMatrix::zeros(n + 1, n);
    aug.view_mut((0, 0), (n, n)).copy_from(&m);
    aug.row_mut(n).fill(1.0);
    let mut rhs = DVector::zeros(n + 1);
    rhs[n] = 1.0;
    // Householder least squares; nalgebra's SVD solve loses about five digits here
    let qr = aug.qr();
    let solved = qr
        .r()
        .solve_upper_triangular(&(qr.q().transpose() * rhs))
        .map(|v| v.iter().copied().collect::<Vec<f64>>());

    let p = match solved {
        Some(p) if is_stationary(gamma, &p) => p,
        _ => power_iteration(gamma)?,
    };
    Ok(normalize_probability(p))
}

fn is_stationary(gamma: &DMatrix<f64>, p: &[f64]) -> bool {
    let v = DVector::from_column_slice(p);
    let res = (gamma.transpose() * &v - &v).amax();
    res <= 1e-10 && p.iter().all(|&x| x >= -1e-12)
}

fn power_iteration(gamma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = gamma.nrows();
    let lazy_t = (gamma + DMatrix::identity(n, n)).transpose() * 0.5;
    let mut v = DVector::from_element(n, 1.0 / n as f64);
    for _ in 0..POWER_CAP {
        let next = &lazy_t * &v;
        let delta = (&next - &v).amax();
        v = next;
        if delta <= POWER_TOL {
            return Ok(v.iter().copied().collect());
        }
    }
    Err(Error::DegeneratePerron(0))
}

fn normalize_probability(p: Vec<f64>) -> Vec<f64> {
    let clipped: Vec<f64> = p.into_iter().map(|x| x.max(0.0)).collect();
    let s: f64 = clipped.iter().sum();
    clipped.into_iter().map(|x| x / s).collect()
}

/// Eigenvalues of a general real square matrix.
///
/// Permutation matrices can stall the shifted QR iteration; on failure the
/// spectrum of `(Γ + I)/2` is computed instead and mapped back by `λ = 2μ − 1`.
pub fn eigenvalues(gamma: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let schur = |m: DMatrix<f64>| {
        Schur::try_new(m, f64::EPSILON, SCHUR_CAP).map(|s| s.complex_eigenvalues())
    };
    if let Some(ev) = schur(gamma.clone()) {
        return Ok(ev.iter().copied().collect());
    }
    let n = gamma.nrows();
    let lazy = (gamma + DMatrix::identity(n, n)) * 0.5;
    let ev = schur(lazy).ok_or(Error::EigenFailure(SCHUR_CAP))?;
    Ok(ev.iter().map(|&z| z * 2.0 - Complex::new(1.0, 0.0)).collect())
}

/// Wielandt: a nonnegative `n×n` matrix is primitive iff the zero pattern of
/// `Γ^{(n−1)²+1}` is empty. Evaluated exactly on the boolean pattern.
fn wielandt_primitive(gamma: &DMatrix<f64>) -> bool {
    let n = gamma.nrows();
    let mut pattern = gamma.map(|x| x > 0.0);
    let bound = (n - 1) * (n - 1) + 1;
    let mut power = 1;
    // once positive, every higher power stays positive, so squaring past the bound suffices
    while power < bound {
        let prev = pattern.clone();
        pattern = DMatrix::from_fn(n, n, |i, j| (0..n).any(|k| prev[(i, k)] && prev[(k, j)]));
        power *= 2;
    }
    pattern.iter().all(|&b| b)
}

/// Whether `Γ^m` converges to a rank-one matrix, and the gap `1 − |λ₂|`.
///
/// Primitivity is decided combinatorially from the zero pattern (Wielandt's bound), so
/// it never depends on eigenvalue rounding; the gap is informational.
pub fn check_primitive(gamma: &DMatrix<f64>) -> Result<Primitivity> {
    check_row_stochastic(gamma)?;
    let n = gamma.nrows();
    if n == 1 {
        return Ok(Primitivity {
            primitive: true,
            spectral_gap: 1.0,
        });
    }
    let ev = eigenvalues(gamma)?;
    let mut moduli: Vec<f64> = ev.iter().map(|z| z.norm()).collect();
    // drop the Perron eigenvalue 1 (the one closest to it)
    let perron = ev
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - 1.0).norm().total_cmp(&(b.1 - 1.0).norm()))
        .map(|(i, _)| i)
        .unwrap();
    moduli.remove(perron);
    let second = moduli.iter().copied().fold(0.0, f64::max);
    Ok(Primitivity {
        primitive: wielandt_primitive(gamma),
        spectral_gap: (1.0 - second).max(0.0),
    })
}

/// `Γ^m` by repeated squaring.
pub fn matrix_power(gamma: &DMatrix<f64>, m: u32) -> DMatrix<f64> {
    let n = gamma.nrows();
    let mut result = DMatrix::identity(n, n);
    let mut base = gamma.clone();
    let mut e = m;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    result
}

/// The `n×n` cyclic shift permutation matrix (`e_i ↦ e_{i+1}`).
pub fn cyclic_shift(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, (i + 1) % n)] = 1.0;
    }
    m
}

/// The 6×6 matrix `shift₃ ⊗ ½J₂`, whose powers never converge.
pub fn cyclic_averaging_6() -> DMatrix<f64> {
    cyclic_shift(3).kronecker(&DMatrix::from_element(2, 2, 0.5))
}
