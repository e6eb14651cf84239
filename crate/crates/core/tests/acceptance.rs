//! Acceptance criteria, one pass/fail line each.
//!
//! Runs without the libtest harness so the summary always prints. Oracles are
//! computed here from plain nalgebra eigendecompositions or scalar brute
//! force, not through the library's own closed forms. Loewner slacks are
//! absolute eigenvalue units, Frobenius and Thompson slacks are absolute.

use std::process::ExitCode;
use std::time::Instant;

use alm_means::linalg::congruence;
use alm_means::stochastic::{check_primitive, cyclic_gamma, gamma3, perron_vector};
use alm_means::verify::sample::{
    gaussian_matrix, log_uniform, loewner_pair, mixed_means, ordered_triple, random_orthogonal,
    random_psd_spectrum, random_spd, random_triple, rng, scale, spectrum, weight, with_basis,
    SeededRng,
};
use alm_means::{
    alm_compute, alm_compute_n, build_alm_multimean, closed_form_p3, estimate_weight_vector,
    ordered_convergence_run, thompson, validate_triple, AlmConfig, Error, MeanTriple, MultiMean,
    SpdMatrix, StopReason, TwoVarMean,
};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;

type Res<T> = Result<T, String>;

/// One measured quantity against its tolerance.
struct Measure {
    what: &'static str,
    worst: f64,
    tol: f64,
}

impl Measure {
    fn new(what: &'static str, worst: f64, tol: f64) -> Measure {
        Measure { what, worst, tol }
    }
    fn ok(&self) -> bool {
        self.worst <= self.tol
    }
}

struct Criterion {
    id: usize,
    title: &'static str,
    run: fn() -> Res<Vec<Measure>>,
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

// ---------- independent oracles ----------

fn eig(m: &DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    SymmetricEigen::new((m + m.transpose()) * 0.5)
}

fn min_eig(m: &DMatrix<f64>) -> f64 {
    eig(m).eigenvalues.min()
}

fn op_norm(m: &DMatrix<f64>) -> f64 {
    eig(m).eigenvalues.amax()
}

fn inv(m: &DMatrix<f64>) -> DMatrix<f64> {
    let d = eig(m);
    &d.eigenvectors * DMatrix::from_diagonal(&d.eigenvalues.map(|x| 1.0 / x)) * d.eigenvectors.transpose()
}

/// `max(0, −λ_min(B − A))`.
fn leq_excess(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (-min_eig(&(b - a))).max(0.0)
}

fn fro(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm()
}

fn arith(p: &[f64], x: &[SpdMatrix]) -> DMatrix<f64> {
    let n = x[0].dim();
    p.iter().zip(x).fold(DMatrix::zeros(n, n), |acc, (w, m)| acc + m.matrix() * *w)
}

fn harm(p: &[f64], x: &[SpdMatrix]) -> DMatrix<f64> {
    let n = x[0].dim();
    inv(&p.iter().zip(x).fold(DMatrix::zeros(n, n), |acc, (w, m)| acc + inv(m.matrix()) * *w))
}

/// Left Perron vector by plain power iteration on `Γᵀ`.
fn power_perron(gamma: &DMatrix<f64>) -> Vec<f64> {
    let n = gamma.nrows();
    let lazy = (gamma + DMatrix::identity(n, n)) * 0.5;
    let mut v = nalgebra::DVector::from_element(n, 1.0 / n as f64);
    for _ in 0..20_000 {
        let next = lazy.transpose() * &v;
        let done = (&next - &v).amax() < 1e-17;
        v = next;
        if done {
            break;
        }
    }
    let s = v.sum();
    v.iter().map(|x| x / s).collect()
}

fn geo(r: f64) -> TwoVarMean {
    TwoVarMean::geometric(r).unwrap()
}
fn har(r: f64) -> TwoVarMean {
    TwoVarMean::harmonic(r).unwrap()
}
fn ari(r: f64) -> TwoVarMean {
    TwoVarMean::arithmetic(r).unwrap()
}

fn forced() -> AlmConfig {
    AlmConfig {
        force_iterate: true,
        ..AlmConfig::default()
    }
}

fn run(t: &MeanTriple, x: &[SpdMatrix], cfg: &AlmConfig) -> Res<SpdMatrix> {
    alm_compute(t, &x[0], &x[1], &x[2], cfg).map(|o| o.limit).map_err(e)
}

fn mixed(g: &mut SeededRng) -> Res<MeanTriple> {
    let [a, b, c] = mixed_means(g);
    validate_triple(a, b, c).map_err(e)
}

fn inverses(x: &[SpdMatrix]) -> Res<Vec<SpdMatrix>> {
    x.iter().map(|m| m.inverse().map_err(e)).collect()
}

// ---------- criteria ----------

fn closed_form_oracles() -> Res<Vec<Measure>> {
    let start = Instant::now();
    let mut g = rng(1001);
    let (mut geo_err, mut har_err, mut har_fast, mut p_err) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let (mut ari_fast, mut ari_forced) = (0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let dim = g.random_range(1..=8);
        let q = random_orthogonal(&mut g, dim);
        let spectra = [0, 1, 2].map(|_| spectrum(&mut g, dim));
        let x: Vec<SpdMatrix> = spectra.iter().map(|s| with_basis(&q, s)).collect();
        let rs = [weight(&mut g), weight(&mut g), weight(&mut g)];
        let p = power_perron(&gamma3(rs[0], rs[1], rs[2]).map_err(e)?);

        let t = validate_triple(geo(rs[0]), geo(rs[1]), geo(rs[2])).map_err(e)?;
        p_err = p_err.max((0..3).map(|k| (t.p()[k] - p[k]).abs()).fold(0.0, f64::max));
        let oracle: Vec<f64> = (0..dim)
            .map(|i| (0..3).map(|k| spectra[k][i].powf(p[k])).product())
            .collect();
        geo_err = geo_err.max(fro(run(&t, &x, &AlmConfig::default())?.matrix(), with_basis(&q, &oracle).matrix()));

        let t = validate_triple(har(rs[0]), har(rs[1]), har(rs[2])).map_err(e)?;
        let h = harm(&p, &x);
        har_err = har_err.max(fro(run(&t, &x, &forced())?.matrix(), &h));
        har_fast = har_fast.max(fro(run(&t, &x, &AlmConfig::default())?.matrix(), &h));

        let t = validate_triple(ari(rs[0]), ari(rs[1]), ari(rs[2])).map_err(e)?;
        let o = alm_compute(&t, &x[0], &x[1], &x[2], &AlmConfig::default()).map_err(e)?;
        if o.stop_reason != StopReason::ClosedForm {
            return Err("arithmetic triple did not take the closed form".into());
        }
        ari_fast = ari_fast.max(fro(o.limit.matrix(), &arith(&o.p, &x)));
        ari_forced = ari_forced.max(fro(run(&t, &x, &forced())?.matrix(), &arith(&p, &x)));
    }
    Ok(vec![
        Measure::new("p vs power-iteration oracle", p_err, 1e-12),
        Measure::new("geometric vs A^p1 B^p2 C^p3", geo_err, 1e-8),
        Measure::new("harmonic (iterated) vs oracle", har_err, 1e-8),
        Measure::new("harmonic (fast path) vs oracle", har_fast, 1e-8),
        Measure::new("arithmetic fast path, exact", ari_fast, 0.0),
        Measure::new("arithmetic forced", ari_forced, 1e-10),
        Measure::new("seconds", start.elapsed().as_secs_f64(), 30.0),
    ])
}

/// `max |Γ^200[i][k] − p[k]|`, powers by plain repeated multiplication.
fn power_gap(gamma: &DMatrix<f64>, p: &[f64]) -> f64 {
    let n = gamma.nrows();
    let mut power = DMatrix::identity(n, n);
    for _ in 0..200 {
        power = &power * gamma;
    }
    let mut worst = 0.0_f64;
    for i in 0..n {
        for k in 0..n {
            worst = worst.max((power[(i, k)] - p[k]).abs());
        }
    }
    worst
}

fn perron_machinery() -> Res<Vec<Measure>> {
    let grid: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
    let (mut cf, mut pow) = (0.0_f64, 0.0_f64);
    for &r1 in &grid {
        for &r2 in &grid {
            for &r3 in &grid {
                let gamma = gamma3(r1, r2, r3).map_err(e)?;
                let p = perron_vector(&gamma).map_err(e)?;
                let c = closed_form_p3(r1, r2, r3).map_err(e)?;
                cf = cf.max((0..3).map(|k| (p[k] - c[k]).abs()).fold(0.0, f64::max));
                // near the 0/1 corners Γ approaches a periodic matrix and
                // |λ₂|^200 is no longer small, so powers are taken inside
                if [r1, r2, r3].iter().all(|r| (0.1..=0.9).contains(r)) {
                    pow = pow.max(power_gap(&gamma, &p));
                }
            }
        }
    }
    let mut g = rng(1002);
    for _ in 0..100 {
        let size = g.random_range(4..=6);
        let weights: Vec<Vec<f64>> = (0..size)
            .map(|_| {
                let w: Vec<f64> = (1..size).map(|_| g.random_range(0.1..1.0)).collect();
                let t: f64 = w.iter().sum();
                w.iter().map(|x| x / t).collect()
            })
            .collect();
        let gamma = cyclic_gamma(&weights).map_err(e)?;
        pow = pow.max(power_gap(&gamma, &perron_vector(&gamma).map_err(e)?));
    }
    let mut shift3 = DMatrix::zeros(3, 3);
    for i in 0..3 {
        shift3[(i, (i + 1) % 3)] = 1.0;
    }
    let avg = DMatrix::from_element(2, 2, 0.5);
    let shift_avg = shift3.kronecker(&avg);
    let flagged = [&shift3, &shift_avg]
        .iter()
        .map(|m| check_primitive(m).map(|c| !c.primitive))
        .collect::<Result<Vec<bool>, Error>>()
        .map_err(e)?;
    let misses = flagged.iter().filter(|f| !**f).count() as f64;
    Ok(vec![
        Measure::new("closed form vs perron_vector, 1000 grid points", cf, 1e-12),
        Measure::new("rows of Γ^200 vs p (interior grid, random cyclic Γ)", pow, 1e-8),
        Measure::new("cyclic 3×3 and 6×6 not flagged non-primitive", misses, 0.0),
    ])
}

fn monotone_aggregate() -> Res<Vec<Measure>> {
    let mut g = rng(1003);
    let (mut viol, mut dist, mut iters) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..200 {
        let dim = g.random_range(2..=8);
        let t = mixed(&mut g)?;
        let x = random_triple(&mut g, dim);
        let o = alm_compute(&t, &x[0], &x[1], &x[2], &forced()).map_err(e)?;
        let s0 = op_norm(&arith(&t.p(), &x));
        for rec in &o.trace {
            if let Some(m) = rec.s_step_min_eig {
                viol = viol.max(-m / s0);
            }
        }
        dist = dist.max(o.final_distance);
        iters = iters.max(o.iterations as f64);
    }
    Ok(vec![
        Measure::new("-λmin(Sn − Sn+1)/‖S0‖", viol, 1e-9),
        Measure::new("final pairwise Thompson distance", dist, 1e-12),
        Measure::new("iterations", iters, 10_000.0),
    ])
}

fn axiom_suite() -> Res<Vec<Measure>> {
    let mut g = rng(1004);
    let cfg = AlmConfig::default();
    let (mut mono, mut trans, mut cong, mut norm) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let dim = g.random_range(1..=6);
        let t = mixed(&mut g)?;

        let pairs: Vec<_> = (0..3).map(|_| loewner_pair(&mut g, dim)).collect();
        let lo: Vec<SpdMatrix> = pairs.iter().map(|p| p.0.clone()).collect();
        let hi: Vec<SpdMatrix> = pairs.iter().map(|p| p.1.clone()).collect();
        mono = mono.max(leq_excess(run(&t, &lo, &cfg)?.matrix(), run(&t, &hi, &cfg)?.matrix()));

        let x = random_triple(&mut g, dim);
        let rank = g.random_range(1..=dim);
        let tm = random_psd_spectrum(&mut g, dim, rank, 0.5, 2.0);
        let tx: Vec<SpdMatrix> = x.iter().map(|m| congruence(tm.matrix(), m)).collect::<Result<_, _>>().map_err(e)?;
        let m = run(&t, &x, &cfg)?;
        let lhs = tm.matrix() * m.matrix() * tm.matrix();
        trans = trans.max(leq_excess(&lhs, run(&t, &tx, &cfg)?.matrix()));

        let s = &random_orthogonal(&mut g, dim)
            * DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |_, _| log_uniform(&mut g, 0.5, 2.0)))
            * random_orthogonal(&mut g, dim);
        let sx: Vec<SpdMatrix> = x
            .iter()
            .map(|a| SpdMatrix::new(&s * a.matrix() * s.transpose()).map_err(e))
            .collect::<Res<_>>()?;
        cong = cong.max(fro(run(&t, &sx, &cfg)?.matrix(), &(&s * m.matrix() * s.transpose())));

        let a = random_spd(&mut g, dim);
        let same = vec![a.clone(), a.clone(), a.clone()];
        norm = norm.max(fro(run(&t, &same, &cfg)?.matrix(), a.matrix()));
    }
    Ok(vec![
        Measure::new("monotonicity (Loewner excess)", mono, 1e-8),
        Measure::new("transformer inequality", trans, 1e-8),
        Measure::new("congruence invariance (Frobenius)", cong, 1e-8),
        Measure::new("normalization, exact", norm, 0.0),
    ])
}

fn at_level(level: usize, r: f64) -> TwoVarMean {
    match level {
        0 => har(r),
        1 => geo(r),
        _ => ari(r),
    }
}

fn sandwich_and_order() -> Res<Vec<Measure>> {
    let mut g = rng(1005);
    let cfg = AlmConfig::default();
    let (mut sand, mut order) = (0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let dim = g.random_range(1..=6);
        let t = mixed(&mut g)?;
        let x = random_triple(&mut g, dim);
        let m = run(&t, &x, &cfg)?;
        let p = t.p();
        sand = sand
            .max(leq_excess(&harm(&p, &x), m.matrix()))
            .max(leq_excess(m.matrix(), &arith(&p, &x)));

        // same weights, each slot raised along ! ≤ # ≤ ∇, at most one ∇ overall
        let rs = [weight(&mut g), weight(&mut g), weight(&mut g)];
        let lo_lv = [0, 1, 2].map(|_| g.random_range(0..2usize));
        let slot = g.random_range(0..4usize);
        let hi_lv = [0, 1, 2].map(|k| if k == slot { 2 } else { lo_lv[k].max(g.random_range(0..2)) });
        let lo = validate_triple(at_level(lo_lv[0], rs[0]), at_level(lo_lv[1], rs[1]), at_level(lo_lv[2], rs[2])).map_err(e)?;
        let hi = validate_triple(at_level(hi_lv[0], rs[0]), at_level(hi_lv[1], rs[1]), at_level(hi_lv[2], rs[2])).map_err(e)?;
        let y = random_triple(&mut g, dim);
        order = order.max(leq_excess(run(&lo, &y, &cfg)?.matrix(), run(&hi, &y, &cfg)?.matrix()));
    }
    Ok(vec![
        Measure::new("harmonic-p ≤ M ≤ arithmetic-p", sand, 1e-9),
        Measure::new("σ ≤ σ' ⇒ M ≤ M'", order, 1e-9),
    ])
}

fn joint_homogeneity() -> Res<Vec<Measure>> {
    let mut g = rng(1006);
    let cfg = AlmConfig::default();
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let dim = g.random_range(1..=6);
        let rs = [weight(&mut g), weight(&mut g), weight(&mut g)];
        let t = validate_triple(geo(rs[0]), geo(rs[1]), geo(rs[2])).map_err(e)?;
        let x = random_triple(&mut g, dim);
        let c = [scale(&mut g), scale(&mut g), scale(&mut g)];
        let p = t.p();
        let scaled: Vec<SpdMatrix> = (0..3).map(|k| x[k].scaled(c[k])).collect();
        let factor: f64 = (0..3).map(|k| c[k].powf(p[k])).product();
        worst = worst.max(fro(run(&t, &scaled, &cfg)?.matrix(), &(run(&t, &x, &cfg)?.matrix() * factor)));
    }
    Ok(vec![Measure::new("‖M(αA,βB,γC) − α^p1 β^p2 γ^p3 M‖_F", worst, 1e-8)])
}

fn metric_inequalities() -> Res<Vec<Measure>> {
    let mut g = rng(1007);
    let cfg = AlmConfig::default();
    let d = |a: &SpdMatrix, b: &SpdMatrix| thompson(a, b).map(|t| t.value()).map_err(e);
    let mut lip = 0.0_f64;
    for _ in 0..500 {
        let dim = g.random_range(1..=4);
        let rs = [weight(&mut g), weight(&mut g), weight(&mut g)];
        let t = validate_triple(geo(rs[0]), geo(rs[1]), geo(rs[2])).map_err(e)?;
        let x = random_triple(&mut g, dim);
        let y = random_triple(&mut g, dim);
        let p = t.p();
        let rhs: f64 = (0..3).map(|k| d(&x[k], &y[k]).map(|v| p[k] * v)).sum::<Res<f64>>()?;
        lip = lip.max(d(&run(&t, &x, &cfg)?, &run(&t, &y, &cfg)?)? - rhs);
    }
    let half = validate_triple(geo(0.5), geo(0.5), geo(0.5)).map_err(e)?;
    let two_thirds = validate_triple(geo(2.0 / 3.0), geo(2.0 / 3.0), geo(2.0 / 3.0)).map_err(e)?;
    let mut dist = 0.0_f64;
    for _ in 0..500 {
        let dim = g.random_range(1..=4);
        let [a, b, c] = random_triple(&mut g, dim);
        let x = [a.clone(), b.clone(), c.clone()];
        let k = 2.0 / 3.0 - 0.5;
        let rhs = k * (d(&b, &c)? + d(&c, &a)? + d(&a, &b)?) / 3.0;
        dist = dist.max(d(&run(&half, &x, &cfg)?, &run(&two_thirds, &x, &cfg)?)? - rhs);
    }
    let mut pert = 0.0_f64;
    for _ in 0..200 {
        let dim = g.random_range(1..=6);
        let t = mixed(&mut g)?;
        let x = random_triple(&mut g, dim);
        let delta = log_uniform(&mut g, 1e-4, 0.5);
        let mut y = Vec::new();
        for m in &x {
            let h = gaussian_matrix(&mut g, dim, dim);
            let h = (&h + h.transpose()) * 0.5;
            let h = &h * (delta * min_eig(m.matrix()) / h.norm());
            y.push(SpdMatrix::new(m.matrix() + h).map_err(e)?);
        }
        let all: Vec<&SpdMatrix> = x.iter().chain(&y).collect();
        let lo = all.iter().map(|m| min_eig(m.matrix())).fold(f64::INFINITY, f64::min);
        let hi = all.iter().map(|m| op_norm(m.matrix())).fold(0.0, f64::max);
        let dev = (0..3).map(|k| op_norm(&(x[k].matrix() - y[k].matrix()))).fold(0.0, f64::max);
        let lhs = op_norm(&(run(&t, &x, &cfg)?.matrix() - run(&t, &y, &cfg)?.matrix()));
        pert = pert.max(lhs - hi / lo * dev);
    }
    Ok(vec![
        Measure::new("Lipschitz excess", lip.max(0.0), 1e-8),
        Measure::new("distance bound excess, (1/2) vs (2/3)", dist.max(0.0), 1e-8),
        Measure::new("norm perturbation excess (M/m factor)", pert.max(0.0), 1e-8),
    ])
}

fn self_adjointness() -> Res<Vec<Measure>> {
    let mut g = rng(1008);
    let cfg = AlmConfig::default();
    let mut sa = 0.0_f64;
    for _ in 0..100 {
        let dim = g.random_range(1..=6);
        let rs = [weight(&mut g), weight(&mut g), weight(&mut g)];
        let t = validate_triple(geo(rs[0]), geo(rs[1]), geo(rs[2])).map_err(e)?;
        let x = random_triple(&mut g, dim);
        let via = run(&t, &inverses(&x)?, &cfg)?.inverse().map_err(e)?;
        sa = sa.max(fro(via.matrix(), run(&t, &x, &cfg)?.matrix()));
    }
    let mut adj = 0.0_f64;
    for _ in 0..100 {
        let dim = g.random_range(1..=6);
        // one ∇_r and one !_r (their adjoints swap), the rest #_r; both triples valid
        let mut levels = [1usize, 1, 1];
        let (i, j) = (g.random_range(0..3usize), g.random_range(0..3usize));
        levels[i] = 2;
        if j != i {
            levels[j] = 0;
        }
        let rs = [weight(&mut g), weight(&mut g), weight(&mut g)];
        let sig: Vec<TwoVarMean> = (0..3).map(|k| at_level(levels[k], rs[k])).collect();
        // adjoint of ∇_r is !_r and vice versa; #_r is self-adjoint
        let star: Vec<TwoVarMean> = (0..3).map(|k| at_level(2 - levels[k], rs[k])).collect();
        let t = validate_triple(sig[0].clone(), sig[1].clone(), sig[2].clone()).map_err(e)?;
        let ts = validate_triple(star[0].clone(), star[1].clone(), star[2].clone()).map_err(e)?;
        let x = random_triple(&mut g, dim);
        let via = run(&ts, &inverses(&x)?, &cfg)?.inverse().map_err(e)?;
        adj = adj.max(fro(via.matrix(), run(&t, &x, &cfg)?.matrix()));
    }
    Ok(vec![
        Measure::new("‖M#(A⁻¹,B⁻¹,C⁻¹)⁻¹ − M#(A,B,C)‖_F", sa, 1e-7),
        Measure::new("‖Mσ*(A⁻¹,…)⁻¹ − Mσ(A,…)‖_F, σ from ∇/!", adj, 1e-7),
    ])
}

/// Scalar ALM recursion for a 3-variable mean of geometric `#_½` steps.
fn brute3(mut v: [f64; 3]) -> f64 {
    for _ in 0..200 {
        v = [(v[1] * v[2]).sqrt(), (v[2] * v[0]).sqrt(), (v[0] * v[1]).sqrt()];
    }
    v[0]
}

fn brute4(mut v: [f64; 4]) -> f64 {
    for _ in 0..200 {
        v = [0, 1, 2, 3].map(|k| brute3([v[(k + 1) % 4], v[(k + 2) % 4], v[(k + 3) % 4]]));
    }
    v[0]
}

fn tower() -> Res<Vec<Measure>> {
    let cfg = AlmConfig::default();
    let oracle = brute4([1.0, 2.0, 3.0, 4.0]);
    let target = 24f64.powf(0.25);
    let t = validate_triple(geo(0.5), geo(0.5), geo(0.5)).map_err(e)?;
    let m3 = build_alm_multimean(&t).map_err(e)?;
    let means = vec![m3.clone(); 4];
    let x: Vec<SpdMatrix> = [1.0, 2.0, 3.0, 4.0].iter().map(|&v| SpdMatrix::scalar(v).unwrap()).collect();
    let o = alm_compute_n(&means, &x, &cfg).map_err(e)?;
    let p_err = o.p.iter().map(|p| (p - 0.25).abs()).fold(0.0, f64::max);
    let m4 = MultiMean::alm_tower(means).map_err(e)?;
    let w = estimate_weight_vector(&m4, 1e-5, &cfg).map_err(e)?;
    let w_err = w.iter().map(|p| (p - 0.25).abs()).fold(0.0, f64::max);
    let got = o.limit.matrix()[(0, 0)];
    Ok(vec![
        Measure::new("brute-force oracle vs 24^(1/4)", (oracle - target).abs(), 1e-12),
        Measure::new("p from Γ vs 1/4", p_err, 1e-6),
        Measure::new("estimated weight vector vs 1/4", w_err, 1e-6),
        Measure::new("tower on (1,2,3,4) vs brute force", (got - oracle).abs(), 1e-6),
        Measure::new("tower on (1,2,3,4) vs 24^(1/4)", (got - target).abs(), 1e-6),
    ])
}

fn counterexamples() -> Res<Vec<Measure>> {
    // six 5-variable arithmetic means; even ones read slots 2,3 and odd ones 1,2
    let weights: Vec<Vec<f64>> = (0..6)
        .map(|k| if k % 2 == 0 { vec![0.0, 0.5, 0.5, 0.0, 0.0] } else { vec![0.5, 0.5, 0.0, 0.0, 0.0] })
        .collect();
    let means = weights.into_iter().map(MultiMean::arithmetic).collect::<Result<Vec<_>, _>>().map_err(e)?;
    let mut g = rng(1010);
    let (mut not_rejected, mut not_nonconverged) = (0.0, 0.0);
    let (mut floor, mut decay) = (f64::INFINITY, 0.0_f64);
    for _ in 0..20 {
        let dim = g.random_range(1..=4);
        let x: Vec<SpdMatrix> = (0..6).map(|_| random_spd(&mut g, dim)).collect();
        if !matches!(alm_compute_n(&means, &x, &AlmConfig::default()), Err(Error::NotAffinelyDominated { .. })) {
            not_rejected += 1.0;
        }
        let cfg = AlmConfig { unsafe_allow: true, max_iter: 200, ..AlmConfig::default() };
        match alm_compute_n(&means, &x, &cfg) {
            Err(Error::NonConverged(o)) => {
                let window = |lo: usize, hi: usize| {
                    o.trace.iter().filter(|r| r.iteration >= lo && r.iteration <= hi).map(|r| r.max_distance).fold(f64::INFINITY, f64::min)
                };
                let (early, late) = (window(100, 150), window(150, 200));
                floor = floor.min(early.min(late));
                decay = decay.max(early / late);
            }
            _ => not_nonconverged += 1.0,
        }
    }
    Ok(vec![
        Measure::new("runs not rejected as NotAffinelyDominated", not_rejected, 0.0),
        Measure::new("unsafe runs not NonConverged", not_nonconverged, 0.0),
        Measure::new("distance floor over iterations 100–200 (negated)", -floor, -1e-3),
        Measure::new("floor decay, iterations 100–150 over 150–200", decay, 2.0),
    ])
}

fn ordered_convergence() -> Res<Vec<Measure>> {
    let mut g = rng(1011);
    let cfg = AlmConfig::default();
    let (mut pattern, mut resid) = (0.0_f64, 0.0_f64);
    for i in 0..100 {
        let dim = g.random_range(1..=6);
        let sigma = at_level(i % 3, 0.5);
        let x = ordered_triple(&mut g, dim);
        let tr = ordered_convergence_run(&MultiMean::two_var(sigma), &x, &cfg).map_err(e)?;
        pattern = pattern.max(tr.pattern_violation);
        resid = resid.max(tr.residuals.last().copied().unwrap_or(f64::INFINITY));
        resid = resid.max(tr.max_residuals.last().copied().unwrap_or(f64::INFINITY));
    }
    Ok(vec![
        Measure::new("interleaving pattern violation", pattern, 1e-9),
        Measure::new("‖A_m − S‖_F at termination", resid, 1e-8),
    ])
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, title: "closed-form oracles", run: closed_form_oracles },
        Criterion { id: 2, title: "Perron machinery", run: perron_machinery },
        Criterion { id: 3, title: "monotone aggregate", run: monotone_aggregate },
        Criterion { id: 4, title: "axiom suite", run: axiom_suite },
        Criterion { id: 5, title: "sandwich and mean order", run: sandwich_and_order },
        Criterion { id: 6, title: "joint homogeneity", run: joint_homogeneity },
        Criterion { id: 7, title: "metric inequalities", run: metric_inequalities },
        Criterion { id: 8, title: "self-adjointness", run: self_adjointness },
        Criterion { id: 9, title: "n-variable tower", run: tower },
        Criterion { id: 10, title: "counterexamples", run: counterexamples },
        Criterion { id: 11, title: "ordered convergence", run: ordered_convergence },
    ];
    let results: Vec<Res<Vec<Measure>>> = criteria.par_iter().map(|c| (c.run)()).collect();
    let mut failed = 0;
    for (c, r) in criteria.iter().zip(&results) {
        let (ok, detail) = match r {
            Ok(ms) => (
                ms.iter().all(Measure::ok),
                ms.iter()
                    .map(|m| format!("{}{} {:.3e} (tol {:.0e})", if m.ok() { "" } else { "FAILED " }, m.what, m.worst, m.tol))
                    .collect::<Vec<_>>()
                    .join("; "),
            ),
            Err(msg) => (false, format!("error: {msg}")),
        };
        if !ok {
            failed += 1;
        }
        println!("[{}] criterion {:>2} {}: {}", if ok { "PASS" } else { "FAIL" }, c.id, c.title, detail);
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
