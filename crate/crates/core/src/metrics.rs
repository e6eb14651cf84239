//! Thompson metric and spectral-radius gauges on the positive-definite cone.

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kubo_ando::TwoVarMean;
use crate::linalg::{spectral_decompose, symmetrize, SpdMatrix};
use crate::stochastic::eigenvalues;

/// Thompson distance, in log units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct ThompsonDistance(pub f64);

impl ThompsonDistance {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for ThompsonDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn require_definite(a: &SpdMatrix, which: &str) -> Result<()> {
    if !a.is_definite() {
        return Err(Error::DomainError(format!(
            "{which} argument is not positive definite"
        )));
    }
    Ok(())
}

/// Eigenvalues `μ` of `A^{-1/2}(B − A)A^{-1/2}`; the spectrum of `A⁻¹B` is `1 + μ`.
fn relative_spectrum(a: &SpdMatrix, b: &SpdMatrix) -> Result<Vec<f64>> {
    a.check_same_dim(b)?;
    let dec = a.spectral()?;
    let inv_half = dec.compose(
        &dec.eigenvalues
            .iter()
            .map(|&l| 1.0 / l.sqrt())
            .collect::<Vec<_>>(),
    );
    let y = symmetrize(&(&inv_half * (b.matrix() - a.matrix()) * &inv_half));
    Ok(spectral_decompose(&y)?
        .eigenvalues
        .iter()
        .copied()
        .collect())
}

/// `max μ` over the spectrum of `A^{-1/2}(B − A)A^{-1/2}`, so `ρ(A⁻¹B) = 1 + max μ`.
///
/// Only the top eigenvalue is used: it carries relative accuracy, whereas a
/// small `1 + μ` can lose all of it to cancellation.
fn top_relative(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    let top = relative_spectrum(a, b)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if top <= -1.0 {
        return Err(Error::DomainError("quotient has no positive eigenvalue".into()));
    }
    Ok(top)
}

/// `d_T(A, B) = ‖log(A^{-1/2} B A^{-1/2})‖ = max{log ρ(A⁻¹B), log ρ(B⁻¹A)}`.
pub fn thompson(a: &SpdMatrix, b: &SpdMatrix) -> Result<ThompsonDistance> {
    require_definite(a, "first")?;
    require_definite(b, "second")?;
    let d = top_relative(a, b)?.ln_1p().max(top_relative(b, a)?.ln_1p());
    Ok(ThompsonDistance(d.max(0.0)))
}

/// Largest eigenvalue modulus of a general square matrix.
pub fn spectral_radius(x: &DMatrix<f64>) -> Result<f64> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: x.ncols(),
        });
    }
    if x.nrows() == 0 {
        return Ok(0.0);
    }
    if x == &x.transpose() {
        let dec = spectral_decompose(x)?;
        return Ok(dec.min_eigenvalue().abs().max(dec.max_eigenvalue().abs()));
    }
    Ok(eigenvalues(x)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// `ρ(A⁻¹B)` for definite `A`, `B`, through the similar matrix `A^{-1/2}BA^{-1/2}`.
pub fn spectral_radius_of_quotient(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    require_definite(a, "first")?;
    let top = relative_spectrum(a, b)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((1.0 + top).max(0.0))
}

/// `R(X, Y) = max{ρ(X⁻¹Y), ρ(XY⁻¹)}`, equal to `exp d_T(X, Y)`.
pub fn gauge_r(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    require_definite(y, "second")?;
    // ρ(XY⁻¹) = ρ(Y⁻¹X)
    Ok(spectral_radius_of_quotient(x, y)?.max(spectral_radius_of_quotient(y, x)?))
}

/// `R(X #_r Y, X #_s Y) ≤ R(X, Y)^{|r−s|}` with multiplicative slack `1 + 1e−10`.
pub fn geodesic_gauge_bound_check(x: &SpdMatrix, y: &SpdMatrix, r: f64, s: f64) -> Result<bool> {
    let (lhs, rhs) = geodesic_gauge_sides(x, y, r, s)?;
    Ok(lhs <= rhs * (1.0 + 1e-10))
}

/// Both sides of the geodesic gauge bound, `(R(X#_rY, X#_sY), R(X,Y)^{|r−s|})`.
pub fn geodesic_gauge_sides(x: &SpdMatrix, y: &SpdMatrix, r: f64, s: f64) -> Result<(f64, f64)> {
    let xr = TwoVarMean::geometric(r)?.evaluate(x, y, 0.0)?;
    let xs = TwoVarMean::geometric(s)?.evaluate(x, y, 0.0)?;
    let lhs = gauge_r(&xr, &xs)?;
    let rhs = gauge_r(x, y)?.powf((r - s).abs());
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diagonal(d).unwrap()
    }

    #[test]
    fn thompson_examples() {
        let a = SpdMatrix::from_row_slice(2, &[2.0, 0.3, 0.3, 1.0]).unwrap();
        assert_eq!(thompson(&a, &a).unwrap().value(), 0.0);
        let i = SpdMatrix::identity(3);
        let d = thompson(&i, &i.scaled(2.0)).unwrap().value();
        assert!((d - 2f64.ln()).abs() < 1e-15);
        let d = thompson(&diag(&[1.0, 4.0]), &diag(&[2.0, 2.0]))
            .unwrap()
            .value();
        assert!((d - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn thompson_rejects_semidefinite() {
        let s = diag(&[1.0, 0.0]);
        assert!(matches!(
            thompson(&s, &SpdMatrix::identity(2)),
            Err(Error::DomainError(_))
        ));
        assert!(matches!(
            thompson(&SpdMatrix::identity(2), &s),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn spectral_radius_examples() {
        assert_eq!(spectral_radius(&DMatrix::identity(3, 3)).unwrap(), 1.0);
        assert_eq!(
            spectral_radius(&(DMatrix::identity(2, 2) * 2.0)).unwrap(),
            2.0
        );
        let r = spectral_radius_of_quotient(&diag(&[1.0, 4.0]), &diag(&[2.0, 2.0])).unwrap();
        assert!((r - 2.0).abs() < 1e-15);
        // non-symmetric route
        let nonsym = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 0.5, 0.0]);
        assert!((spectral_radius(&nonsym).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauge_examples() {
        let x = SpdMatrix::from_row_slice(2, &[2.0, 0.3, 0.3, 1.0]).unwrap();
        assert!((gauge_r(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let i = SpdMatrix::identity(2);
        assert!((gauge_r(&i, &i.scaled(2.0)).unwrap() - 2.0).abs() < 1e-15);
        assert!((gauge_r(&diag(&[1.0, 4.0]), &diag(&[2.0, 2.0])).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn geodesic_gauge_examples() {
        let x = SpdMatrix::from_row_slice(2, &[2.0, 0.3, 0.3, 1.0]).unwrap();
        let y = SpdMatrix::from_row_slice(2, &[1.0, -0.2, -0.2, 3.0]).unwrap();
        let (l, r) = geodesic_gauge_sides(&x, &y, 0.4, 0.4).unwrap();
        assert!((l - 1.0).abs() < 1e-12 && r == 1.0);
        let (a, b) = (diag(&[1.0, 4.0]), diag(&[2.0, 2.0]));
        let (l, r) = geodesic_gauge_sides(&a, &b, 1.0, 0.0).unwrap();
        assert!((l - r).abs() < 1e-12);
        assert!(geodesic_gauge_bound_check(&x, &y, 0.7, 0.2).unwrap());
    }
}
