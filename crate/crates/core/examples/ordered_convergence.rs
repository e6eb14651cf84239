// On Loewner-ordered inputs A ≥ B ≥ C and a symmetric mean, the iterates
// interleave: even steps keep the order, odd steps reverse it.

use alm_means::verify::sample::{ordered_triple, rng};
use alm_means::{ordered_convergence_run, AlmConfig, MultiMean, TwoVarMean};

fn main() -> alm_means::Result<()> {
    let x = ordered_triple(&mut rng(7), 3);
    let m = MultiMean::two_var(TwoVarMean::geometric(0.5)?);
    let tr = ordered_convergence_run(&m, &x, &AlmConfig::default())?;
    println!("pattern violation {:.3e} over {} steps", tr.pattern_violation, tr.residuals.len());
    for (k, r) in tr.max_residuals.iter().enumerate().take(8) {
        println!("step {k}: max_k ‖A⁽ᵏ⁾ₘ − S‖_F = {r:.3e}");
    }
    Ok(())
}
