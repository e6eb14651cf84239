//! Dense symmetric linear algebra on the positive cone.
//!
//! Every matrix in the library is a real symmetric `DMatrix<f64>`. [`SpdMatrix`]
//! carries the certificate that the matrix is positive (semi)definite together
//! with a lazily computed, cached eigendecomposition, which is what spectral
//! functions, square roots and inverses are built from.

use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative asymmetry `‖M − Mᵀ‖_F / ‖M‖_F` above which construction is rejected.
pub const ASYMMETRY_TOL: f64 = 1e-8;

/// A matrix is definite when `λ_min > DEFINITE_RATIO · λ_max`.
pub const DEFINITE_RATIO: f64 = 1e-12;

/// Negative eigenvalues down to `−NEGATIVE_TOL · max|λ|` are accepted as rounding noise.
pub const NEGATIVE_TOL: f64 = 1e-10;

/// Iteration cap handed to the symmetric QR eigensolver.
pub const EIGEN_ITERATION_CAP: usize = 10_000;

/// Constant `c` in the reconstruction bound `‖QΛQᵀ − A‖_F ≤ c · n · ε · ‖A‖_F`.
pub const RECONSTRUCTION_CONSTANT: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
///
/// Column `i` of `eigenvectors` belongs to `eigenvalues[i]`; each column has its
/// first non-negligible component positive so the decomposition is reproducible.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Q diag(values) Qᵀ`, symmetrized.
    pub fn compose(&self, values: &[f64]) -> DMatrix<f64> {
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (j, v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*v);
        }
        symmetrize(&(scaled * q.transpose()))
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.compose(self.eigenvalues.as_slice())
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Only the lower triangle is trusted by the underlying solver, so callers pass
/// symmetrized input.
pub fn spectral_decompose(a: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: DVector::zeros(0),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::DomainError("matrix has non-finite entries".into()));
    }
    if n == 1 {
        return Ok(SpectralDecomposition {
            eigenvalues: DVector::from_element(1, a[(0, 0)]),
            eigenvectors: DMatrix::identity(1, 1),
        });
    }
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, EIGEN_ITERATION_CAP)
        .ok_or(Error::EigenFailure(EIGEN_ITERATION_CAP))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
        // sign convention: first component that is not rounding noise is positive
        if let Some(lead) = col.iter().copied().find(|x| x.abs() > 1e-12) {
            if lead < 0.0 {
                col.neg_mut();
            }
        }
        eigenvectors.set_column(dst, &col);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `(M + Mᵀ) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    Ok(spectral_decompose(&symmetrize(m))?.min_eigenvalue())
}

/// Applies `f` to the spectrum of an arbitrary symmetric matrix.
pub fn map_symmetric(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
    let dec = spectral_decompose(&symmetrize(m))?;
    let values: Vec<f64> = dec.eigenvalues.iter().map(|&l| f(l)).collect();
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::DomainError(format!(
            "function is not finite at eigenvalue {:e}",
            dec.eigenvalues[bad]
        )));
    }
    Ok(dec.compose(&values))
}

/// A real symmetric positive (semi)definite matrix.
///
/// Construction through [`SpdMatrix::new`] symmetrizes, rejects asymmetric or
/// indefinite input and certifies definiteness from the smallest eigenvalue.
/// The eigendecomposition is computed once and shared between clones.
#[derive(Clone)]
pub struct SpdMatrix {
    data: DMatrix<f64>,
    asymmetry: f64,
    spectral: Arc<OnceLock<std::result::Result<SpectralDecomposition, Error>>>,
}

impl fmt::Debug for SpdMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpdMatrix")
            .field("dim", &self.dim())
            .field("data", &self.data)
            .finish()
    }
}

impl PartialEq for SpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}

impl SpdMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::ParameterError("empty matrix".into()));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::DomainError("matrix has non-finite entries".into()));
        }
        let scale = m.norm();
        let asym = (&m - m.transpose()).norm();
        let rel = if scale > 0.0 { asym / scale } else { 0.0 };
        if rel > ASYMMETRY_TOL {
            return Err(Error::NotSymmetric(rel));
        }
        let out = Self {
            data: symmetrize(&m),
            asymmetry: asym,
            spectral: Arc::default(),
        };
        let dec = out.spectral()?;
        let lmin = dec.min_eigenvalue();
        let mag = dec
            .eigenvalues
            .iter()
            .fold(0.0_f64, |acc, &l| acc.max(l.abs()));
        if lmin < -NEGATIVE_TOL * mag {
            return Err(Error::NotPositive(lmin));
        }
        Ok(out)
    }

    /// Wraps a matrix computed by the library from positive inputs; only symmetrizes.
    pub(crate) fn from_computed(m: DMatrix<f64>) -> Self {
        Self {
            data: symmetrize(&m),
            asymmetry: 0.0,
            spectral: Arc::default(),
        }
    }

    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_computed(DMatrix::identity(dim, dim))
    }

    /// A 1×1 matrix.
    pub fn scalar(x: f64) -> Result<Self> {
        Self::new(DMatrix::from_element(1, 1, x))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    /// Frobenius norm of the antisymmetric part removed at construction.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn spectral(&self) -> Result<&SpectralDecomposition> {
        self.spectral
            .get_or_init(|| spectral_decompose(&self.data))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn definiteness(&self) -> Result<Definiteness> {
        let dec = self.spectral()?;
        if dec.min_eigenvalue() > DEFINITE_RATIO * dec.max_eigenvalue() {
            Ok(Definiteness::PositiveDefinite)
        } else {
            Ok(Definiteness::PositiveSemidefinite)
        }
    }

    pub fn is_definite(&self) -> bool {
        matches!(self.definiteness(), Ok(Definiteness::PositiveDefinite))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.spectral()?.min_eigenvalue())
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(self.spectral()?.max_eigenvalue())
    }

    pub fn trace(&self) -> f64 {
        self.data.trace()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.norm()
    }

    /// Spectral norm, which for a positive matrix is its largest eigenvalue.
    pub fn operator_norm(&self) -> Result<f64> {
        Ok(self.max_eigenvalue()?.max(0.0))
    }

    /// `A + εI`.
    pub fn shifted(&self, eps: f64) -> SpdMatrix {
        if eps == 0.0 {
            return self.clone();
        }
        let n = self.dim();
        Self::from_computed(&self.data + DMatrix::identity(n, n) * eps)
    }

    /// `λA` for `λ ≥ 0`.
    pub fn scaled(&self, lambda: f64) -> SpdMatrix {
        Self::from_computed(&self.data * lambda)
    }

    /// Inverse of a definite matrix via its spectrum.
    pub fn inverse(&self) -> Result<SpdMatrix> {
        if !self.is_definite() {
            return Err(Error::SingularInput);
        }
        let m = apply_spectral_function(self, |t| 1.0 / t, None)?;
        Ok(Self::from_computed(m))
    }

    /// `⟨Ax, x⟩`.
    pub fn quadratic_form(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.data * x))
    }

    pub(crate) fn check_same_dim(&self, other: &SpdMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// `Q f(Λ) Qᵀ` for a positive semidefinite `A`.
///
/// Eigenvalues that are zero up to the definiteness threshold are mapped to
/// `at_zero`; when `at_zero` is `None` such eigenvalues are a domain error.
pub fn apply_spectral_function(
    a: &SpdMatrix,
    f: impl Fn(f64) -> f64,
    at_zero: Option<f64>,
) -> Result<DMatrix<f64>> {
    let dec = a.spectral()?;
    let cutoff = DEFINITE_RATIO * dec.max_eigenvalue().max(0.0);
    let mut values = Vec::with_capacity(dec.dim());
    for &l in dec.eigenvalues.iter() {
        let v = if l <= cutoff {
            match at_zero {
                Some(z) => z,
                None => {
                    return Err(Error::DomainError(format!(
                        "function has no value at eigenvalue {l:e}"
                    )))
                }
            }
        } else {
            f(l)
        };
        if !v.is_finite() {
            return Err(Error::DomainError(format!(
                "function is not finite at eigenvalue {l:e}"
            )));
        }
        values.push(v);
    }
    Ok(dec.compose(&values))
}

/// `S A S` for symmetric `S`.
pub fn congruence(s: &DMatrix<f64>, a: &SpdMatrix) -> Result<SpdMatrix> {
    if s.nrows() != a.dim() || s.ncols() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: s.nrows(),
        });
    }
    Ok(SpdMatrix::from_computed(s * a.matrix() * s))
}

/// `A ≤ B` in the Loewner order: `λ_min(B − A) ≥ −slack`.
pub fn loewner_leq(a: &SpdMatrix, b: &SpdMatrix, slack: f64) -> Result<bool> {
    Ok(loewner_margin(a, b)? >= -slack)
}

/// `λ_min(B − A)`; non-negative exactly when `A ≤ B`.
pub fn loewner_margin(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    a.check_same_dim(b)?;
    min_eigenvalue(&(b.matrix() - a.matrix()))
}

/// Weighted sum `Σ wₖ Aₖ`.
pub fn weighted_sum(weights: &[f64], mats: &[SpdMatrix]) -> Result<SpdMatrix> {
    let first = mats
        .first()
        .ok_or_else(|| Error::ParameterError("no matrices".into()))?;
    if weights.len() != mats.len() {
        return Err(Error::DimensionMismatch {
            expected: mats.len(),
            found: weights.len(),
        });
    }
    let n = first.dim();
    let mut acc = DMatrix::zeros(n, n);
    for (w, m) in weights.iter().zip(mats) {
        first.check_same_dim(m)?;
        acc += m.matrix() * *w;
    }
    Ok(SpdMatrix::from_computed(acc))
}

/// Spectral (operator) norm of a symmetric matrix.
pub fn symmetric_operator_norm(m: &DMatrix<f64>) -> Result<f64> {
    let dec = spectral_decompose(&symmetrize(m))?;
    Ok(dec.min_eigenvalue().abs().max(dec.max_eigenvalue().abs()))
}
