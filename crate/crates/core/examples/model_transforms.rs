//! The change of variables between density, pressure and the limit
//! variable `u = Phi(rho)`, and the `b` graph of the limit problem.

use stiff_pressure_lab::model::{b_graph, density_of_pressure, pressure_of_density};
use stiff_pressure_lab::{GrowthLaw, ModelParams, Result};

fn main() -> Result<()> {
    let params = ModelParams::new(20.0, 0.5, GrowthLaw::affine(1.0, 1.0)?, 0.0, 1.0)?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "rho", "p", "u", "b(u)", "D(rho)");
    for rho in [0.0, 0.5, 0.9, 0.95, 0.99, 1.0] {
        let p = pressure_of_density(rho, params.m)?;
        let u = params.phi(rho);
        println!(
            "{rho:>6.2} {p:>12.6} {u:>12.6} {:>12.6} {:>12.6}",
            b_graph(u),
            params.effective_diffusivity(rho)
        );
        assert!((params.phi_inverse(u)? - rho).abs() < 1e-10);
    }

    // pressure levels and the density that produces them
    for p in [0.5, 1.0, 2.0] {
        println!("p = {p}: rho = {:.8}, u = {:.8}", density_of_pressure(p, params.m)?, params.psi(p));
    }
    println!("barrier shift c_m = {:.3e}", params.barrier_shift());
    Ok(())
}
