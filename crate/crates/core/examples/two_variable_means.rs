// Kubo–Ando means of two matrices: the built-in families, a custom
// representing function, and the adjoint/transpose operations.

use alm_means::{SpdMatrix, TwoVarMean};

fn main() -> alm_means::Result<()> {
    let a = SpdMatrix::from_row_slice(2, &[2.0, 1.0, 1.0, 3.0])?;
    let b = SpdMatrix::from_row_slice(2, &[4.0, 0.0, 0.0, 1.0])?;

    // the logarithmic mean: f(t) = (t − 1)/ln t, weight 1/2
    let log_mean = TwoVarMean::custom(
        "logarithmic",
        |t: f64| if (t - 1.0).abs() < 1e-8 { 1.0 + (t - 1.0) / 2.0 } else if t == 0.0 { 0.0 } else { (t - 1.0) / t.ln() },
        0.5,
        false,
    )?;
    let means = [
        TwoVarMean::harmonic(0.5)?,
        TwoVarMean::geometric(0.5)?,
        log_mean,
        TwoVarMean::arithmetic(0.5)?,
    ];
    // ! ≤ # ≤ logarithmic ≤ ∇, visible in the traces
    for m in &means {
        let c = m.evaluate(&a, &b, 0.0)?;
        println!("{:<14} weight {:.3}  trace {:.12}", m.label(), m.weight(), c.trace());
    }

    let g = TwoVarMean::geometric(0.3)?;
    let star = g.adjoint()?;
    println!("adjoint of {} is {}", g.label(), star.label());
    let direct = g.evaluate(&a, &b, 0.0)?;
    let via = star.evaluate(&a.inverse()?, &b.inverse()?, 0.0)?.inverse()?;
    println!("‖A # B − (A⁻¹ #* B⁻¹)⁻¹‖_F = {:.3e}", (direct.matrix() - via.matrix()).norm());
    Ok(())
}
