// Runs a slice of the property-check registry with a fixed seed and prints
// one line per check.

use alm_means::verify::run_checks;

fn main() -> alm_means::Result<()> {
    let patterns = vec!["axiom.*".to_string(), "oracle.*".to_string(), "stochastic.closed_form".to_string()];
    let report = run_checks(&patterns, 42, Some(20))?;
    for c in &report.checks {
        println!("{} {:<32} {} trials, worst excess {:.2e} (slack {:.0e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.trials, c.worst_excess, c.slack);
    }
    println!("all passed: {}", report.passed);
    Ok(())
}
