//! Scaling checks on the limit problem: pressure overshoot relaxation,
//! nucleation time, shrink and expansion speed, and initial motion.

use stiff_pressure_lab::diagnostics::{
    expansion_bound_check, initial_motion_check, nucleation_timing_check, pressure_bound_check,
    shrink_speed_check, ExpansionSetup, InitialMotionSetup, LemmaCheckResult, NucleationSetup,
    PressureBoundSetup, ShrinkSetup,
};
use stiff_pressure_lab::{GrowthLaw, ModelParams, Result};

fn show(r: &LemmaCheckResult) {
    println!("{}", r.summary());
    for t in &r.trials {
        println!("    {:<28} measured {:>11.4e}  bound {:>11.4e}  {}", t.label, t.measured, t.bound, t.pass);
    }
}

fn main() -> Result<()> {
    let params = ModelParams::new(20.0, 0.5, GrowthLaw::affine(1.0, 1.0)?, 0.0, 1.0)?;
    show(&pressure_bound_check(&PressureBoundSetup::standard(params)?)?);
    show(&nucleation_timing_check(&NucleationSetup::standard(params))?);
    show(&shrink_speed_check(&ShrinkSetup::standard()?)?);
    println!("negative control, horizon r^2:");
    show(&shrink_speed_check(&ShrinkSetup::negative_control()?)?);
    show(&expansion_bound_check(&ExpansionSetup::standard(params))?);
    show(&initial_motion_check(&InitialMotionSetup::standard(params)?)?);
    Ok(())
}
