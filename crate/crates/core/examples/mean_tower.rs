// Recursive construction: four copies of the 3-variable geometric ALM mean
// induce a 4-variable mean, which on scalars 1, 2, 3, 4 gives 24^{1/4}.

use alm_means::{
    alm_compute_n, build_alm_multimean, estimate_weight_vector, validate_triple, AlmConfig,
    MultiMean, SpdMatrix, TwoVarMean,
};

fn main() -> alm_means::Result<()> {
    let g = TwoVarMean::geometric(0.5)?;
    let m3 = build_alm_multimean(&validate_triple(g.clone(), g.clone(), g)?)?;
    let cfg = AlmConfig::default();
    println!("weights of {}: {:?}", m3.label(), m3.weights());

    let means = vec![m3; 4];
    let x: Vec<SpdMatrix> = [1.0, 2.0, 3.0, 4.0].iter().map(|&v| SpdMatrix::scalar(v)).collect::<Result<_, _>>()?;
    let out = alm_compute_n(&means, &x, &cfg)?;
    println!("p = {:?}", out.p);
    println!("M(1,2,3,4) = {:.15}, 24^(1/4) = {:.15}", out.limit.matrix()[0], 24f64.powf(0.25));

    let m4 = MultiMean::alm_tower(means)?;
    println!("estimated weight vector of the 4-variable mean: {:?}", estimate_weight_vector(&m4, 1e-5, &cfg)?);
    Ok(())
}
