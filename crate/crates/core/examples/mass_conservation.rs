//! Without growth and with no-flux ends the finite-volume update conserves
//! mass to rounding, in both Cartesian and radial geometry.

use stiff_pressure_lab::pme::PmeStepper;
use stiff_pressure_lab::{Boundaries, Field, Grid, GrowthLaw, ModelParams, PmeState, Result, Scheme};

fn main() -> Result<()> {
    let params = ModelParams::new(20.0, 0.5, GrowthLaw::Zero, 0.0, 2.0)?;
    for grid in [Grid::cartesian(-1.0, 1.0, 400)?, Grid::radial(2, 1.0, 200)?, Grid::radial(3, 1.0, 200)?] {
        let rho = Field::from_fn(grid, 0.0, |x| if x.abs() < 0.5 { 0.97 } else { 0.1 })?;
        let mut state = PmeState::new(rho, params, Boundaries::zero_flux())?;
        let mut stepper = PmeStepper::for_state(&state);
        let mass0 = state.mass();
        for _ in 0..1000 {
            let dt = stepper.stable_dt(&state.rho.values);
            state = stepper.step(&state, dt, Scheme::Explicit)?;
        }
        println!(
            "{:?}: t = {:.4e}, mass {mass0:.12} -> {:.12}, drift {:.2e}",
            grid.geometry,
            state.time(),
            state.mass(),
            (state.mass() - mass0).abs()
        );
    }
    Ok(())
}
