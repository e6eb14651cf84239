// Thompson distance and gauge R, and the Lipschitz bound of the geometric
// ALM mean with respect to its probability vector.

use alm_means::{alm_compute, gauge_r, thompson, validate_triple, AlmConfig, SpdMatrix, TwoVarMean};

fn main() -> alm_means::Result<()> {
    let a = SpdMatrix::from_row_slice(2, &[2.0, 0.5, 0.5, 1.0])?;
    let b = SpdMatrix::from_row_slice(2, &[1.0, 0.0, 0.0, 3.0])?;
    let d = thompson(&a, &b)?.value();
    println!("d_T(A, B) = {d:.15}, exp d_T = {:.15}, R(A, B) = {:.15}", d.exp(), gauge_r(&a, &b)?);
    println!("d_T(2A, 2B) = {:.15}", thompson(&a.scaled(2.0), &b.scaled(2.0))?.value());

    let g = |r| TwoVarMean::geometric(r);
    let t = validate_triple(g(0.4)?, g(0.5)?, g(0.6)?)?;
    let c = SpdMatrix::from_row_slice(2, &[1.5, -0.2, -0.2, 0.7])?;
    let cfg = AlmConfig::default();
    let m = alm_compute(&t, &a, &b, &c, &cfg)?.limit;
    let (a2, b2, c2) = (a.scaled(1.5), b.clone(), c.scaled(0.8));
    let m2 = alm_compute(&t, &a2, &b2, &c2, &cfg)?.limit;
    let p = t.p();
    let bound = p[0] * thompson(&a, &a2)?.value() + p[1] * thompson(&b, &b2)?.value() + p[2] * thompson(&c, &c2)?.value();
    println!("d_T(M, M') = {:.6} ≤ Σ pₖ d_T(Xₖ, Xₖ') = {:.6}", thompson(&m, &m2)?.value(), bound);
    Ok(())
}
