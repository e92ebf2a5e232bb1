//! Two saturated intervals separated by a dense gap merge in the limit
//! problem; the free boundary drops from four points to two.

use stiff_pressure_lab::interface::extract_free_boundary;
use stiff_pressure_lab::{
    limit_boundaries, limit_run, project_initial_data, Grid, GrowthLaw, ModelParams, Preset, Result, Scheme,
    StepControl, TimeStep,
};

fn main() -> Result<()> {
    let params = ModelParams::new(20.0, 0.5, GrowthLaw::affine(1.0, 1.0)?, 0.0, 1.0)?;
    let grid = Grid::cartesian(-2.0, 2.0, 400)?;
    let rho0 = Preset::by_name("merging")?.density(grid, params.nu)?;
    let start = project_initial_data(&rho0, &params, limit_boundaries(&grid, &params))?;
    println!("t = 0.000: {:?}", extract_free_boundary(&start.u).positions);
    let control = StepControl::uniform(TimeStep::Fixed(1e-3), 0.3, 6, Scheme::Implicit)?;
    let run = limit_run(&start, &control)?;
    for b in &run.boundaries {
        let pos: Vec<String> = b.positions.iter().map(|x| format!("{x:.4}")).collect();
        println!("t = {:.3}: {} points [{}]", b.time, b.len(), pos.join(", "));
    }
    Ok(())
}
