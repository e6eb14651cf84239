// The three-variable ALM mean of (#_{r1}, #_{r2}, #_{r3}) on commuting
// inputs, compared with the closed form A^{p1} B^{p2} C^{p3}.

use alm_means::{alm_compute, validate_triple, AlmConfig, SpdMatrix, TwoVarMean};

fn main() -> alm_means::Result<()> {
    let rs = [0.3, 0.5, 0.7];
    let triple = validate_triple(
        TwoVarMean::geometric(rs[0])?,
        TwoVarMean::geometric(rs[1])?,
        TwoVarMean::geometric(rs[2])?,
    )?;
    let (da, db, dc) = ([1.0, 4.0, 9.0], [2.0, 2.0, 0.5], [8.0, 1.0, 3.0]);
    let a = SpdMatrix::from_diagonal(&da)?;
    let b = SpdMatrix::from_diagonal(&db)?;
    let c = SpdMatrix::from_diagonal(&dc)?;

    let out = alm_compute(&triple, &a, &b, &c, &AlmConfig::default())?;
    let p = out.p.clone();
    println!("p = {p:?}");
    println!("{:?} after {} iterations, spread {:.2e}", out.stop_reason, out.iterations, out.final_distance);
    for i in 0..3 {
        let oracle = da[i].powf(p[0]) * db[i].powf(p[1]) * dc[i].powf(p[2]);
        println!("diag {i}: ALM {:.15}  closed form {:.15}", out.limit.matrix()[(i, i)], oracle);
    }
    let steps: Vec<String> = out.trace.iter().take(6).map(|r| format!("{:.2e}", r.max_distance)).collect();
    println!("first pairwise Thompson distances: {}", steps.join(", "));
    Ok(())
}
