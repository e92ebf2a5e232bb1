//! A spatially uniform positive limit variable decays like
//! `nu - (nu - c) e^(g0 t)`, reaches zero at `t* = ln(nu / (nu - c)) / g0`
//! and then jumps to `-p_M`.

use stiff_pressure_lab::limit::LimitStepper;
use stiff_pressure_lab::{Boundaries, Field, Grid, GrowthLaw, LimitState, ModelParams, Result};

fn main() -> Result<()> {
    let (nu, g0, p_max, c, dt) = (0.5, 1.0, 1.0, 0.1, 1e-4);
    let params = ModelParams::new(20.0, nu, GrowthLaw::affine(g0, p_max)?, 0.0, p_max)?;
    let t_star = (nu / (nu - c)).ln() / g0;
    let grid = Grid::cartesian(0.0, 1.0, 8)?;
    let mut state = LimitState::new(Field::constant(grid, c, 0.0), params, Boundaries::zero_flux())?;
    let mut stepper = LimitStepper::for_state(&state);
    let mut next_report = 0.05;
    while state.u.max() > 0.0 {
        state = stepper.step(&state, dt)?;
        if state.time() >= next_report {
            let exact = nu - (nu - c) * (g0 * state.time()).exp();
            println!("t = {:.4}: u = {:.8}, closed form {exact:.8}", state.time(), state.u.values[0]);
            next_report += 0.05;
        }
    }
    println!("u <= 0 first at t = {:.4} (t* = {t_star:.4}), u = {:.6}", state.time(), state.u.values[0]);
    let state = stepper.step(&state, dt)?;
    println!("one step later u = {:.6} (-p_M = {})", state.u.values[0], -p_max);
    Ok(())
}
