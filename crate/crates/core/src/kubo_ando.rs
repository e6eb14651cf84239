//! Two-variable operator means.
//!
//! A mean is determined by its representing function `f` (with `f(1) = 1`) via
//! `A σ B = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}`. Built-in kinds are the
//! weighted arithmetic `∇_r`, geometric `#_r` and harmonic `!_r` means and the
//! two trivial projections; anything else is a custom function handle.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{spectral_decompose, symmetrize, SpdMatrix};

/// Number of log-spaced sample points used for every grid check.
pub const GRID_POINTS: usize = 64;
/// Grid spans `[10^-GRID_DECADES, 10^GRID_DECADES]`.
pub const GRID_DECADES: f64 = 4.0;
/// Pointwise agreement tolerance (relative to `max(1, |f|)`) for equality of means.
pub const GRID_EQ_TOL: f64 = 1e-12;
/// Finite-difference step for the numeric weight.
pub const WEIGHT_STEP: f64 = 1e-6;
/// Declared and numeric weight must agree to this tolerance.
pub const WEIGHT_TOL: f64 = 1e-6;
/// Right limit `f(0⁺)` of custom functions is approximated at this point.
pub const ZERO_PROBE: f64 = 1e-14;

/// The 64-point log-spaced grid the function checks run on.
pub fn log_grid() -> Vec<f64> {
    (0..GRID_POINTS)
        .map(|i| {
            let s = -GRID_DECADES + 2.0 * GRID_DECADES * i as f64 / (GRID_POINTS - 1) as f64;
            10f64.powf(s)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanKind {
    Arithmetic,
    Geometric,
    Harmonic,
    LeftTrivial,
    RightTrivial,
    Custom,
}

/// Serializable description of a built-in mean, `{"kind": "geometric", "r": 0.5}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanSpec {
    pub kind: SpecKind,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecKind {
    Arithmetic,
    Geometric,
    Harmonic,
}

impl From<SpecKind> for MeanKind {
    fn from(k: SpecKind) -> Self {
        match k {
            SpecKind::Arithmetic => MeanKind::Arithmetic,
            SpecKind::Geometric => MeanKind::Geometric,
            SpecKind::Harmonic => MeanKind::Harmonic,
        }
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeanFlags {
    pub is_trivial: bool,
    pub is_arithmetic: bool,
    pub is_symmetric: bool,
}

/// A Kubo–Ando mean: representing function, weight and classification flags.
#[derive(Clone)]
pub struct TwoVarMean {
    kind: MeanKind,
    weight: f64,
    custom: Option<ScalarFn>,
    at_zero: f64,
    transpose_at_zero: f64,
    flags: MeanFlags,
    label: String,
}

impl fmt::Debug for TwoVarMean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoVarMean")
            .field("label", &self.label)
            .field("weight", &self.weight)
            .field("flags", &self.flags)
            .finish()
    }
}

impl fmt::Display for TwoVarMean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn check_r(r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::ParameterError(format!(
            "weight r = {r} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Builds `∇_r`, `#_r` or `!_r`. `r = 0` and `r = 1` give the trivial means.
pub fn make_mean(kind: SpecKind, r: f64) -> Result<TwoVarMean> {
    check_r(r)?;
    if r == 0.0 {
        return Ok(TwoVarMean::left_trivial());
    }
    if r == 1.0 {
        return Ok(TwoVarMean::right_trivial());
    }
    let (label, at_zero, transpose_at_zero, symmetric) = match kind {
        SpecKind::Arithmetic => (format!("arithmetic({r})"), 1.0 - r, r, r == 0.5),
        SpecKind::Geometric => (format!("geometric({r})"), 0.0, 0.0, r == 0.5),
        SpecKind::Harmonic => (format!("harmonic({r})"), 0.0, 0.0, r == 0.5),
    };
    Ok(TwoVarMean {
        kind: kind.into(),
        weight: r,
        custom: None,
        at_zero,
        transpose_at_zero,
        flags: MeanFlags {
            is_trivial: false,
            is_arithmetic: kind == SpecKind::Arithmetic,
            is_symmetric: symmetric,
        },
        label,
    })
}

impl TwoVarMean {
    pub fn arithmetic(r: f64) -> Result<Self> {
        make_mean(SpecKind::Arithmetic, r)
    }

    pub fn geometric(r: f64) -> Result<Self> {
        make_mean(SpecKind::Geometric, r)
    }

    pub fn harmonic(r: f64) -> Result<Self> {
        make_mean(SpecKind::Harmonic, r)
    }

    /// `A l B = A`.
    pub fn left_trivial() -> Self {
        Self::trivial(MeanKind::LeftTrivial)
    }

    /// `A r B = B`.
    pub fn right_trivial() -> Self {
        Self::trivial(MeanKind::RightTrivial)
    }

    fn trivial(kind: MeanKind) -> Self {
        let left = kind == MeanKind::LeftTrivial;
        TwoVarMean {
            kind,
            weight: if left { 0.0 } else { 1.0 },
            custom: None,
            at_zero: if left { 1.0 } else { 0.0 },
            transpose_at_zero: if left { 0.0 } else { 1.0 },
            flags: MeanFlags {
                is_trivial: true,
                is_arithmetic: false,
                is_symmetric: false,
            },
            label: if left { "left".into() } else { "right".into() },
        }
    }

    /// A mean given by an arbitrary representing function.
    ///
    /// Operator monotonicity cannot be verified; the function is only checked to
    /// be normalized, nondecreasing and concave on the sample grid, its numeric
    /// derivative at 1 must match `weight`, and `is_arithmetic` must agree with
    /// whether `f` is the line `(1 − w) + w t` on the grid.
    pub fn custom<F>(label: &str, f: F, weight: f64, is_arithmetic: bool) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let f: ScalarFn = Arc::new(f);
        Self::from_handle(label.to_string(), f, weight, Some(is_arithmetic))
    }

    fn from_handle(
        label: String,
        f: ScalarFn,
        weight: f64,
        declared_arithmetic: Option<bool>,
    ) -> Result<Self> {
        if !(weight > 0.0 && weight < 1.0) {
            return Err(Error::ParameterError(format!(
                "custom mean weight {weight} must lie in (0, 1)"
            )));
        }
        let one = f(1.0);
        if (one - 1.0).abs() > GRID_EQ_TOL {
            return Err(Error::InconsistentMean(format!("f(1) = {one}, expected 1")));
        }
        let grid = log_grid();
        let values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InconsistentMean(
                "representing function must be finite and non-negative".into(),
            ));
        }
        for w in values.windows(2) {
            if w[1] < w[0] - GRID_EQ_TOL * w[0].abs().max(1.0) {
                return Err(Error::InconsistentMean(
                    "function is not nondecreasing".into(),
                ));
            }
        }
        for i in 1..grid.len() - 1 {
            let (t0, t1, t2) = (grid[i - 1], grid[i], grid[i + 1]);
            let chord = values[i - 1] + (values[i + 1] - values[i - 1]) * (t1 - t0) / (t2 - t0);
            if values[i] < chord - 1e-10 * chord.abs().max(1.0) {
                return Err(Error::InconsistentMean(format!(
                    "function is not concave near t = {t1:e}"
                )));
            }
        }
        let linear = grid
            .iter()
            .zip(&values)
            .all(|(&t, &v)| close_rel(v, (1.0 - weight) + weight * t));
        if let Some(declared) = declared_arithmetic {
            if declared != linear {
                return Err(Error::InconsistentMean(format!(
                    "declared is_arithmetic = {declared} but the function {} the line (1 - w) + w t",
                    if linear { "equals" } else { "differs from" }
                )));
            }
        }
        let numeric = (f(1.0 + WEIGHT_STEP) - f(1.0 - WEIGHT_STEP)) / (2.0 * WEIGHT_STEP);
        if (numeric - weight).abs() > WEIGHT_TOL {
            return Err(Error::InconsistentMean(format!(
                "declared weight {weight} but f'(1) ≈ {numeric}"
            )));
        }
        let symmetric = grid
            .iter()
            .zip(&values)
            .all(|(&t, &v)| close_rel(v, t * f(1.0 / t)));
        let at_zero = f(ZERO_PROBE);
        let transpose_at_zero = ZERO_PROBE * f(1.0 / ZERO_PROBE);
        Ok(TwoVarMean {
            kind: MeanKind::Custom,
            weight,
            custom: Some(f),
            at_zero,
            transpose_at_zero,
            flags: MeanFlags {
                is_trivial: false,
                is_arithmetic: linear,
                is_symmetric: symmetric,
            },
            label,
        })
    }

    pub fn kind(&self) -> MeanKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Declared weight; `0` for `l` and `1` for `r`.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn flags(&self) -> MeanFlags {
        self.flags
    }

    pub fn is_trivial(&self) -> bool {
        self.flags.is_trivial
    }

    pub fn is_arithmetic(&self) -> bool {
        self.flags.is_arithmetic
    }

    pub fn is_symmetric(&self) -> bool {
        self.flags.is_symmetric
    }

    /// Non-trivial and not arithmetic.
    pub fn is_strictly_concave(&self) -> bool {
        !self.flags.is_trivial && !self.flags.is_arithmetic
    }

    /// Representing function `f(t) = 1 σ t`.
    pub fn f(&self, t: f64) -> f64 {
        let r = self.weight;
        match self.kind {
            MeanKind::Arithmetic => (1.0 - r) + r * t,
            MeanKind::Geometric => t.powf(r),
            MeanKind::Harmonic => t / (r + (1.0 - r) * t),
            MeanKind::LeftTrivial => 1.0,
            MeanKind::RightTrivial => t,
            MeanKind::Custom => (self.custom.as_ref().unwrap())(t),
        }
    }

    /// `f(1 + μ) − 1`, computed without cancellation for the built-in kinds.
    pub fn f_minus_one(&self, mu: f64) -> f64 {
        if mu <= -1.0 {
            return self.at_zero - 1.0;
        }
        let r = self.weight;
        match self.kind {
            MeanKind::Arithmetic => r * mu,
            MeanKind::Geometric => (r * mu.ln_1p()).exp_m1(),
            MeanKind::Harmonic => r * mu / (1.0 + (1.0 - r) * mu),
            MeanKind::LeftTrivial => 0.0,
            MeanKind::RightTrivial => mu,
            MeanKind::Custom => self.f(1.0 + mu) - 1.0,
        }
    }

    /// `f(0⁺)`.
    pub fn f_at_zero(&self) -> f64 {
        self.at_zero
    }

    /// Scalar mean `a σ b` for `a, b ≥ 0`.
    pub fn scalar(&self, a: f64, b: f64) -> f64 {
        if a > 0.0 {
            match self.kind {
                MeanKind::Arithmetic => (1.0 - self.weight) * a + self.weight * b,
                _ => a * self.f(b / a),
            }
        } else {
            b * self.transpose_at_zero
        }
    }

    /// `(A+εI) σ (B+εI)`.
    ///
    /// Computed as `A' + A'^{1/2} g(A'^{-1/2}(B − A)A'^{-1/2}) A'^{1/2}` with
    /// `g(μ) = f(1+μ) − 1`, which is the defining formula rewritten so that
    /// nearly equal arguments do not lose precision.
    pub fn evaluate(&self, a: &SpdMatrix, b: &SpdMatrix, eps: f64) -> Result<SpdMatrix> {
        a.check_same_dim(b)?;
        if !(eps >= 0.0) {
            return Err(Error::ParameterError(format!("negative shift {eps}")));
        }
        match self.kind {
            MeanKind::LeftTrivial => return Ok(a.shifted(eps)),
            MeanKind::RightTrivial => return Ok(b.shifted(eps)),
            MeanKind::Arithmetic => {
                let r = self.weight;
                let m = a.matrix() * (1.0 - r) + b.matrix() * r;
                return Ok(SpdMatrix::from_computed(m).shifted(eps));
            }
            _ => {}
        }
        let n = a.dim();
        let dec = a.spectral()?;
        let shifted: Vec<f64> = dec.eigenvalues.iter().map(|&l| l.max(0.0) + eps).collect();
        let lmax = shifted.iter().copied().fold(0.0, f64::max);
        let lmin = shifted.iter().copied().fold(f64::INFINITY, f64::min);
        if !(lmin > singular_floor(n) * lmax) {
            return Err(Error::SingularInput);
        }
        let half = dec.compose(&shifted.iter().map(|l| l.sqrt()).collect::<Vec<_>>());
        let inv_half = dec.compose(&shifted.iter().map(|l| 1.0 / l.sqrt()).collect::<Vec<_>>());
        let diff = b.matrix() - a.matrix();
        let y = symmetrize(&(&inv_half * diff * &inv_half));
        let ydec = spectral_decompose(&y)?;
        let g: Vec<f64> = ydec
            .eigenvalues
            .iter()
            .map(|&mu| self.f_minus_one(mu))
            .collect();
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::DomainError(format!(
                "representing function of {} is not finite on the spectrum",
                self.label
            )));
        }
        let w = ydec.compose(&g);
        let a_shift = a.matrix() + DMatrix::identity(n, n) * eps;
        Ok(SpdMatrix::from_computed(a_shift + &half * w * &half))
    }

    /// Unshifted [`evaluate`](Self::evaluate) that falls back to `B σ° A` when
    /// only the first argument is numerically singular. Both forms agree on
    /// definite inputs; the fallback keeps ill-conditioned iterates usable.
    pub(crate) fn evaluate_either(&self, a: &SpdMatrix, b: &SpdMatrix) -> Result<SpdMatrix> {
        match self.evaluate(a, b, 0.0) {
            Err(Error::SingularInput) => self.transpose().evaluate(b, a, 0.0),
            r => r,
        }
    }

    /// Transpose `f°(t) = t f(1/t)`, i.e. `A σ° B = B σ A`.
    pub fn transpose(&self) -> TwoVarMean {
        let r = self.weight;
        match self.kind {
            MeanKind::LeftTrivial => Self::right_trivial(),
            MeanKind::RightTrivial => Self::left_trivial(),
            MeanKind::Arithmetic => make_mean(SpecKind::Arithmetic, 1.0 - r).unwrap(),
            MeanKind::Geometric => make_mean(SpecKind::Geometric, 1.0 - r).unwrap(),
            MeanKind::Harmonic => make_mean(SpecKind::Harmonic, 1.0 - r).unwrap(),
            MeanKind::Custom => {
                let f = self.custom.clone().unwrap();
                let g: ScalarFn = Arc::new(move |t: f64| t * f(1.0 / t));
                let mut out = self.clone();
                out.custom = Some(g);
                out.weight = 1.0 - r;
                std::mem::swap(&mut out.at_zero, &mut out.transpose_at_zero);
                out.label = format!("transpose({})", self.label);
                out
            }
        }
    }

    /// Adjoint `f*(t) = 1 / f(1/t)`, so that `A⁻¹ σ* B⁻¹ = (A σ B)⁻¹`.
    pub fn adjoint(&self) -> Result<TwoVarMean> {
        let r = self.weight;
        match self.kind {
            MeanKind::LeftTrivial | MeanKind::RightTrivial => {
                Err(Error::Unsupported("adjoint of a trivial mean".into()))
            }
            MeanKind::Geometric => make_mean(SpecKind::Geometric, r),
            MeanKind::Arithmetic => make_mean(SpecKind::Harmonic, r),
            MeanKind::Harmonic => make_mean(SpecKind::Arithmetic, r),
            MeanKind::Custom => {
                let f = self.custom.clone().unwrap();
                let g: ScalarFn = Arc::new(move |t: f64| 1.0 / f(1.0 / t));
                let mut out = self.clone();
                out.at_zero = g(ZERO_PROBE);
                out.transpose_at_zero = ZERO_PROBE * g(1.0 / ZERO_PROBE);
                out.flags.is_arithmetic = log_grid()
                    .iter()
                    .all(|&t| close_rel(g(t), (1.0 - r) + r * t));
                out.custom = Some(g);
                out.label = format!("adjoint({})", self.label);
                Ok(out)
            }
        }
    }

    /// Numeric weight `f'(1)` by central differences, checked against the declared one.
    pub fn weight_of(&self) -> Result<f64> {
        if self.is_trivial() {
            return Err(Error::Unsupported("weight of a trivial mean".into()));
        }
        let h = WEIGHT_STEP;
        let numeric = (self.f(1.0 + h) - self.f(1.0 - h)) / (2.0 * h);
        if (numeric - self.weight).abs() > WEIGHT_TOL {
            return Err(Error::InconsistentMean(format!(
                "declared weight {} but f'(1) ≈ {numeric}",
                self.weight
            )));
        }
        Ok(numeric)
    }

    /// Representing functions agree on the grid.
    pub fn same_as(&self, other: &TwoVarMean) -> bool {
        log_grid().iter().all(|&t| close_rel(self.f(t), other.f(t)))
    }

    /// `σ ≤ σ'` pointwise on the grid (slack [`GRID_EQ_TOL`]).
    pub fn pointwise_leq(&self, other: &TwoVarMean) -> bool {
        log_grid()
            .iter()
            .all(|&t| self.f(t) <= other.f(t) + GRID_EQ_TOL * other.f(t).abs().max(1.0))
    }

    pub fn to_spec(&self) -> Result<MeanSpec> {
        let kind = match self.kind {
            MeanKind::Arithmetic => SpecKind::Arithmetic,
            MeanKind::Geometric => SpecKind::Geometric,
            MeanKind::Harmonic => SpecKind::Harmonic,
            MeanKind::LeftTrivial => {
                return Ok(MeanSpec {
                    kind: SpecKind::Arithmetic,
                    r: 0.0,
                })
            }
            MeanKind::RightTrivial => {
                return Ok(MeanSpec {
                    kind: SpecKind::Arithmetic,
                    r: 1.0,
                })
            }
            MeanKind::Custom => {
                return Err(Error::Unsupported(
                    "custom means are not serializable".into(),
                ))
            }
        };
        Ok(MeanSpec {
            kind,
            r: self.weight,
        })
    }

    pub fn from_spec(spec: &MeanSpec) -> Result<TwoVarMean> {
        make_mean(spec.kind, spec.r)
    }
}

fn close_rel(a: f64, b: f64) -> bool {
    (a - b).abs() <= GRID_EQ_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Relative eigenvalue floor below which a matrix cannot be inverted reliably.
pub(crate) fn singular_floor(n: usize) -> f64 {
    4.0 * n.max(1) as f64 * f64::EPSILON
}

/// `⟨(AσB)x, x⟩ ≤ ⟨Ax,x⟩ σ ⟨Bx,x⟩ + 1e−10`.
pub fn scalar_mean_inequality_check(
    sigma: &TwoVarMean,
    a: &SpdMatrix,
    b: &SpdMatrix,
    x: &DVector<f64>,
) -> Result<bool> {
    Ok(scalar_mean_inequality_margin(sigma, a, b, x)? >= -1e-10)
}

/// `⟨Ax,x⟩ σ ⟨Bx,x⟩ − ⟨(AσB)x, x⟩`.
pub fn scalar_mean_inequality_margin(
    sigma: &TwoVarMean,
    a: &SpdMatrix,
    b: &SpdMatrix,
    x: &DVector<f64>,
) -> Result<f64> {
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: x.len(),
        });
    }
    if x.norm() == 0.0 {
        return Err(Error::ParameterError("probe vector must be nonzero".into()));
    }
    let m = sigma.evaluate(a, b, 0.0)?;
    let lhs = m.quadratic_form(x);
    let rhs = sigma.scalar(a.quadratic_form(x), b.quadratic_form(x));
    Ok(rhs - lhs)
}
