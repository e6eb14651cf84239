//! Invariants of the public API as randomized properties.

use alm_means::io::{to_json, MatrixInput};
use alm_means::linalg::loewner_margin;
use alm_means::stochastic::gamma_from_weights_3;
use alm_means::{
    alm_compute, closed_form_p3, gauge_r, thompson, validate_triple, AlmConfig, MeanTriple,
    SpdMatrix, TwoVarMean,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

/// `G Gᵀ + c I` with bounded entries: condition number stays below ~100.
fn spd(dim: usize) -> impl Strategy<Value = SpdMatrix> {
    (prop::collection::vec(-1.0f64..1.0, dim * dim), 0.1f64..1.0).prop_map(move |(g, c)| {
        let g = DMatrix::from_row_slice(dim, dim, &g);
        SpdMatrix::new(&g * g.transpose() + DMatrix::identity(dim, dim) * c).unwrap()
    })
}

/// Strictly diagonally dominant, hence invertible.
fn invertible(dim: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim * dim).prop_map(move |g| {
        DMatrix::from_row_slice(dim, dim, &g) + DMatrix::identity(dim, dim) * (dim as f64 + 1.0)
    })
}

fn pair() -> impl Strategy<Value = (SpdMatrix, SpdMatrix)> {
    (1usize..=3).prop_flat_map(|d| (spd(d), spd(d)))
}

fn triple() -> impl Strategy<Value = (SpdMatrix, SpdMatrix, SpdMatrix)> {
    (1usize..=3).prop_flat_map(|d| (spd(d), spd(d), spd(d)))
}

fn two_var() -> impl Strategy<Value = TwoVarMean> {
    (0usize..3, 0.05f64..0.95).prop_map(|(k, r)| match k {
        0 => TwoVarMean::arithmetic(r).unwrap(),
        1 => TwoVarMean::geometric(r).unwrap(),
        _ => TwoVarMean::harmonic(r).unwrap(),
    })
}

/// Triples that satisfy the convergence hypotheses: at most one arithmetic member.
fn mean_triple() -> impl Strategy<Value = MeanTriple> {
    (two_var(), 0.05f64..0.95, 0.05f64..0.95, any::<bool>()).prop_map(|(s1, r2, r3, harm)| {
        let s2 = TwoVarMean::geometric(r2).unwrap();
        let s3 = if harm {
            TwoVarMean::harmonic(r3).unwrap()
        } else {
            TwoVarMean::geometric(r3).unwrap()
        };
        validate_triple(s1, s2, s3).unwrap()
    })
}

fn max_abs_diff(a: &SpdMatrix, b: &SpdMatrix) -> f64 {
    (a.matrix() - b.matrix()).amax()
}

fn d(a: &SpdMatrix, b: &SpdMatrix) -> f64 {
    thompson(a, b).unwrap().value()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn thompson_is_a_symmetric_metric((a, b, c) in triple()) {
        prop_assert_eq!(d(&a, &a), 0.0);
        let ab = d(&a, &b);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - d(&b, &a)).abs() <= 1e-12 * (1.0 + ab));
        prop_assert!(d(&a, &c) <= ab + d(&b, &c) + 1e-12);
    }

    #[test]
    fn thompson_matches_the_gauge((a, b) in pair()) {
        let r = gauge_r(&a, &b).unwrap();
        prop_assert!((d(&a, &b).exp() - r).abs() <= 1e-12 * r);
    }

    #[test]
    fn thompson_is_congruence_and_inversion_invariant(
        (a, b, s) in (1usize..=3).prop_flat_map(|n| (spd(n), spd(n), invertible(n)))
    ) {
        let base = d(&a, &b);
        let t = |x: &SpdMatrix| SpdMatrix::new(&s * x.matrix() * s.transpose()).unwrap();
        prop_assert!((d(&t(&a), &t(&b)) - base).abs() <= 1e-10 * (1.0 + base));
        let inv = d(&a.inverse().unwrap(), &b.inverse().unwrap());
        prop_assert!((inv - base).abs() <= 1e-10 * (1.0 + base));
    }

    #[test]
    fn means_fix_the_diagonal(sigma in two_var(), a in (1usize..=3).prop_flat_map(spd)) {
        let m = sigma.evaluate(&a, &a, 0.0).unwrap();
        prop_assert!(max_abs_diff(&m, &a) <= 1e-12 * a.operator_norm().unwrap());
    }

    #[test]
    fn scalar_means_lie_between_arguments(sigma in two_var(), x in 1e-3f64..1e3, y in 1e-3f64..1e3) {
        let m = sigma.scalar(x, y);
        prop_assert!(m >= x.min(y) * (1.0 - 1e-14) && m <= x.max(y) * (1.0 + 1e-14));
    }

    #[test]
    fn transpose_swaps_arguments(sigma in two_var(), (a, b) in pair()) {
        let lhs = sigma.transpose().evaluate(&a, &b, 0.0).unwrap();
        let rhs = sigma.evaluate(&b, &a, 0.0).unwrap();
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-10 * (1.0 + rhs.operator_norm().unwrap()));
    }

    #[test]
    fn harmonic_geometric_arithmetic_are_ordered(r in 0.05f64..0.95, (a, b) in pair()) {
        let h = TwoVarMean::harmonic(r).unwrap().evaluate(&a, &b, 0.0).unwrap();
        let g = TwoVarMean::geometric(r).unwrap().evaluate(&a, &b, 0.0).unwrap();
        let m = TwoVarMean::arithmetic(r).unwrap().evaluate(&a, &b, 0.0).unwrap();
        prop_assert!(loewner_margin(&h, &g).unwrap() >= -1e-10);
        prop_assert!(loewner_margin(&g, &m).unwrap() >= -1e-10);
    }

    #[test]
    fn perron_vector_is_stationary(r1 in 0.01f64..0.99, r2 in 0.01f64..0.99, r3 in 0.01f64..0.99) {
        let prof = gamma_from_weights_3(r1, r2, r3).unwrap();
        prop_assert!(prof.primitive);
        prop_assert!((prof.p.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
        prop_assert!(prof.p.iter().all(|&x| x > 0.0));
        let p = nalgebra::RowDVector::from_row_slice(&prof.p);
        prop_assert!((&p * &prof.gamma - &p).amax() <= 1e-14);
        let closed = closed_form_p3(r1, r2, r3).unwrap();
        for (x, y) in prof.p.iter().zip(closed) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn alm_mean_is_normalized_and_homogeneous(t in mean_triple(), a in (1usize..=3).prop_flat_map(spd), c in 0.1f64..10.0) {
        let cfg = AlmConfig::default();
        let m = alm_compute(&t, &a, &a, &a, &cfg).unwrap().limit;
        prop_assert!(max_abs_diff(&m, &a) <= 1e-10 * a.operator_norm().unwrap());
        let ca = a.scaled(c);
        let mc = alm_compute(&t, &ca, &ca, &ca.scaled(2.0), &cfg).unwrap().limit;
        let m1 = alm_compute(&t, &a, &a, &a.scaled(2.0), &cfg).unwrap().limit;
        prop_assert!(max_abs_diff(&mc, &m1.scaled(c)) <= 1e-9 * mc.operator_norm().unwrap());
    }

    #[test]
    fn scalar_alm_mean_lies_between_arguments(t in mean_triple(), xs in prop::array::uniform3(1e-2f64..1e2)) {
        let s = |x: f64| SpdMatrix::scalar(x).unwrap();
        let m = alm_compute(&t, &s(xs[0]), &s(xs[1]), &s(xs[2]), &AlmConfig::default())
            .unwrap()
            .limit
            .matrix()[0];
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(0.0, f64::max);
        prop_assert!(m >= lo * (1.0 - 1e-12) && m <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn json_round_trips_every_float(xs in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..16)) {
        let text = to_json(&xs).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), xs.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn matrix_input_round_trips(a in (1usize..=4).prop_flat_map(spd)) {
        let text = to_json(&MatrixInput::from_matrix(a.matrix())).unwrap();
        let back: MatrixInput = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back.to_dense().unwrap(), a.matrix());
    }
}
