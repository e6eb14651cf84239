// The weight matrix Γ of a mean triple, its Perron vector p (closed form and
// eigen-solved), and the primitivity test on a periodic counterexample.

use alm_means::stochastic::{check_primitive, cyclic_shift, gamma_from_weights_3, matrix_power};
use alm_means::{closed_form_p3, perron_vector};

fn main() -> alm_means::Result<()> {
    let (r1, r2, r3) = (0.3, 0.5, 0.8);
    let profile = gamma_from_weights_3(r1, r2, r3)?;
    println!("Γ =\n{}", profile.gamma);
    println!("p (eigen)       = {:?}", perron_vector(&profile.gamma)?);
    println!("p (closed form) = {:?}", closed_form_p3(r1, r2, r3)?);
    println!("primitive {}, spectral gap {:.6}", profile.primitive, profile.spectral_gap);
    println!("first row of Γ^200 = {:?}", matrix_power(&profile.gamma, 200).row(0).iter().collect::<Vec<_>>());

    let shift = cyclic_shift(3);
    let prim = check_primitive(&shift)?;
    println!("cyclic shift: primitive {}, gap {:.3e}", prim.primitive, prim.spectral_gap);
    Ok(())
}
