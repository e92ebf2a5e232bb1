//! Seeded ordered pairs of initial data stay ordered under both solvers.
//!
//! `cargo run --release --example comparison_principle -- [seed]`

use stiff_pressure_lab::diagnostics::{comparison_check, ComparisonSetup};
use stiff_pressure_lab::{GrowthLaw, ModelParams, Result};

fn main() -> Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let params = ModelParams::new(20.0, 0.5, GrowthLaw::affine(1.0, 1.0)?, 0.0, 1.0)?;
    let r = comparison_check(&ComparisonSetup::standard(params, seed)?)?;
    println!("{}", r.summary());
    for t in r.trials.iter().filter(|t| !t.pass) {
        println!("violation in {}: {:.3e}", t.label, t.measured);
    }
    Ok(())
}
