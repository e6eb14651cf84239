// A JSON job as the CLI reads it, run in-process and printed at full precision.

use alm_means::io::{to_json, JobResult, MeanJobSpec};

fn main() -> alm_means::Result<()> {
    let job = MeanJobSpec::from_json(
        r#"{
            "means": [{"kind": "geometric", "r": 0.5},
                      {"kind": "harmonic", "r": 0.4},
                      {"kind": "arithmetic", "r": 0.6}],
            "matrices": [[[2, 1], [1, 2]], {"dim": 2, "data": [3, 0, 0, 1]}, [[1, 0], [0, 5]]],
            "config": {"tol": 1e-13}
        }"#,
    )?;
    let out = job.run()?;
    println!("{}", to_json(&JobResult::from_outcome(&out, false))?);
    Ok(())
}
