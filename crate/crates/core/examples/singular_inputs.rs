// Semidefinite inputs. A shared kernel is compressed away exactly; without
// one the engine walks a decreasing ladder of regularization shifts.

use alm_means::{alm_compute, validate_triple, AlmConfig, SpdMatrix, TwoVarMean};

fn main() -> alm_means::Result<()> {
    let g = TwoVarMean::geometric(0.5)?;
    let t = validate_triple(g.clone(), g.clone(), g)?;
    let cfg = AlmConfig::default();

    // common kernel e₃: the result is the 2×2 mean padded with zeros
    let a = SpdMatrix::from_diagonal(&[1.0, 8.0, 0.0])?;
    let b = SpdMatrix::from_diagonal(&[2.0, 1.0, 0.0])?;
    let c = SpdMatrix::from_diagonal(&[4.0, 1.0, 0.0])?;
    let out = alm_compute(&t, &a, &b, &c, &cfg)?;
    println!("shared kernel: limit diagonal {:?} (expect 2, 2, 0)", out.limit.matrix().diagonal().as_slice());

    // no common kernel: A is a rank-one projection, B and C are definite
    let a = SpdMatrix::from_row_slice(2, &[0.5, 0.5, 0.5, 0.5])?;
    let b = SpdMatrix::identity(2);
    let c = SpdMatrix::from_diagonal(&[2.0, 1.0])?;
    let out = alm_compute(&t, &a, &b, &c, &cfg)?;
    for rung in &out.ladder {
        println!("ε = {:.1e}: trace {:.15} after {} iterations", rung.eps, rung.limit.trace(), rung.iterations);
    }
    println!("limit trace {:.15}, determinant {:.3e}", out.limit.trace(), out.limit.matrix().determinant());
    Ok(())
}
