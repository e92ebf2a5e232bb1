//! Radial tumor: the density for `m = 10, 20, 40, 80` against the limit
//! density `1 - b(u) / nu`, with the Hausdorff distance between the
//! saturated sets.

use stiff_pressure_lab::diagnostics::ConvergenceScenario;
use stiff_pressure_lab::Result;

fn main() -> Result<()> {
    let report = ConvergenceScenario::radial_tumor()?.run()?;
    println!("{:>5} {:>12} {:>12}", "m", "sup error", "hausdorff");
    for (k, m) in report.m_values.iter().enumerate() {
        println!("{m:>5} {:>12.4e} {:>12.4e}", report.errors[k], report.hausdorff[k]);
    }
    println!(
        "strictly decreasing: {}, error(80) / error(10) = {:.3}, half-cell resolution {:.2e}",
        report.errors_strictly_decreasing(),
        report.error_ratio(),
        report.quantization
    );
    Ok(())
}
