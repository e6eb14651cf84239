//! Seeded generators of test inputs.
//!
//! Random definite matrices are `QΛQᵀ` with `Q` the orthogonal factor of a
//! Gaussian matrix and `Λ` log-uniform in `[10⁻², 10²]`, so condition numbers
//! stay below `10⁴`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kubo_ando::TwoVarMean;
use crate::linalg::SpdMatrix;

pub type SeededRng = ChaCha8Rng;

pub const SPECTRUM_LOW: f64 = 1e-2;
pub const SPECTRUM_HIGH: f64 = 1e2;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian, signs fixed by `R`).
pub fn random_orthogonal(rng: &mut SeededRng, dim: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, dim, dim).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn log_uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

pub fn spectrum(rng: &mut SeededRng, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|_| log_uniform(rng, SPECTRUM_LOW, SPECTRUM_HIGH))
        .collect()
}

pub fn with_basis(q: &DMatrix<f64>, values: &[f64]) -> SpdMatrix {
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values));
    let m = q * d * q.transpose();
    SpdMatrix::new((&m + m.transpose()) * 0.5).expect("QΛQᵀ with Λ > 0 is definite")
}

pub fn random_spd(rng: &mut SeededRng, dim: usize) -> SpdMatrix {
    let q = random_orthogonal(rng, dim);
    let values = spectrum(rng, dim);
    with_basis(&q, &values)
}

/// Definite matrix with spectrum log-uniform in `[lo, hi]`.
pub fn random_spd_in(rng: &mut SeededRng, dim: usize, lo: f64, hi: f64) -> SpdMatrix {
    let q = random_orthogonal(rng, dim);
    let values: Vec<f64> = (0..dim).map(|_| log_uniform(rng, lo, hi)).collect();
    with_basis(&q, &values)
}

/// Positive semidefinite matrix of the given rank, `GGᵀ` with `G` Gaussian `dim × rank`,
/// scaled to unit spectral norm times `scale`.
pub fn random_psd(rng: &mut SeededRng, dim: usize, rank: usize, scale: f64) -> SpdMatrix {
    let g = gaussian_matrix(rng, dim, rank);
    let m = &g * g.transpose();
    let norm = m.norm().max(f64::MIN_POSITIVE);
    let m = m * (scale / norm);
    SpdMatrix::new((&m + m.transpose()) * 0.5).expect("GGᵀ is semidefinite")
}

/// Positive semidefinite matrix of the given rank whose nonzero eigenvalues
/// are log-uniform in `[lo, hi]`, in a Haar-random basis.
pub fn random_psd_spectrum(rng: &mut SeededRng, dim: usize, rank: usize, lo: f64, hi: f64) -> SpdMatrix {
    let q = random_orthogonal(rng, dim);
    let values: Vec<f64> = (0..dim)
        .map(|i| if i < rank { log_uniform(rng, lo, hi) } else { 0.0 })
        .collect();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&values));
    let m = &q * d * q.transpose();
    SpdMatrix::new((&m + m.transpose()) * 0.5).expect("QΛQᵀ with Λ ≥ 0 is semidefinite")
}

/// Three matrices sharing one eigenbasis.
pub fn commuting_triple(rng: &mut SeededRng, dim: usize) -> [SpdMatrix; 3] {
    let q = random_orthogonal(rng, dim);
    [0, 1, 2].map(|_| {
        let values = spectrum(rng, dim);
        with_basis(&q, &values)
    })
}

/// `A ≤ B`, built as `B = A + P` with `P` positive semidefinite.
pub fn loewner_pair(rng: &mut SeededRng, dim: usize) -> (SpdMatrix, SpdMatrix) {
    let a = random_spd(rng, dim);
    let rank = rng.random_range(1..=dim);
    let scale = log_uniform(rng, 1e-2, 1e1);
    let p = random_psd(rng, dim, rank, scale);
    let b = SpdMatrix::new(a.matrix() + p.matrix()).expect("sum of semidefinite matrices");
    (a, b)
}

/// `A ≥ B ≥ C`, built by adding semidefinite increments to a random `C`.
pub fn ordered_triple(rng: &mut SeededRng, dim: usize) -> [SpdMatrix; 3] {
    let c = random_spd(rng, dim);
    let step = |rng: &mut SeededRng, base: &SpdMatrix| {
        let rank = rng.random_range(1..=dim);
        let scale = log_uniform(rng, 1e-1, 1e1);
        let p = random_psd(rng, dim, rank, scale);
        SpdMatrix::new(base.matrix() + p.matrix()).expect("sum of semidefinite matrices")
    };
    let b = step(rng, &c);
    let a = step(rng, &b);
    [a, b, c]
}

pub fn random_triple(rng: &mut SeededRng, dim: usize) -> [SpdMatrix; 3] {
    [0, 1, 2].map(|_| random_spd(rng, dim))
}

/// Weight in `[0.1, 0.9]`.
pub fn weight(rng: &mut SeededRng) -> f64 {
    rng.random_range(0.1..=0.9)
}

/// Scale factor log-uniform in `[0.1, 10]`.
pub fn scale(rng: &mut SeededRng) -> f64 {
    log_uniform(rng, 0.1, 10.0)
}

/// A mean triple meeting the convergence hypotheses: at most one arithmetic
/// member, the others geometric or harmonic with random weights.
pub fn mixed_means(rng: &mut SeededRng) -> [TwoVarMean; 3] {
    let arithmetic_slot = if rng.random_bool(0.5) {
        Some(rng.random_range(0..3))
    } else {
        None
    };
    let mut out = Vec::with_capacity(3);
    for k in 0..3 {
        let r = weight(rng);
        let m = if Some(k) == arithmetic_slot {
            TwoVarMean::arithmetic(r)
        } else if rng.random_bool(0.5) {
            TwoVarMean::geometric(r)
        } else {
            TwoVarMean::harmonic(r)
        };
        out.push(m.expect("weight in (0, 1)"));
    }
    [out[0].clone(), out[1].clone(), out[2].clone()]
}
