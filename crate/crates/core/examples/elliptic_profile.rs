//! Pressure profile of a saturated slab, `-w'' = G(w)` with `w(+-1) = 0`,
//! against the closed form `p_M (1 - cosh(k x) / cosh(k))`.

use stiff_pressure_lab::elliptic::solve_pressure_profile;
use stiff_pressure_lab::{Bc, Boundaries, Grid, GrowthLaw, Result};

fn main() -> Result<()> {
    let growth = GrowthLaw::affine(1.0, 1.0)?;
    let k = (growth.g0() / growth.p_max()).sqrt();
    let bc = Boundaries::new(Bc::Dirichlet(0.0), Bc::Dirichlet(0.0));
    let mut previous: Option<f64> = None;
    for n in [100, 200, 400, 800, 1600] {
        let grid = Grid::cartesian(-1.0, 1.0, n)?;
        let w = solve_pressure_profile(&grid, bc, growth)?;
        let err = grid
            .centers()
            .iter()
            .zip(&w)
            .map(|(x, v)| (v - growth.p_max() * (1.0 - (k * x).cosh() / k.cosh())).abs())
            .fold(0.0, f64::max);
        let order = previous.map_or(String::new(), |e| format!("order {:.3}", (e / err).log2()));
        println!("N = {n:>5}: sup error {err:.3e} {order}");
        previous = Some(err);
    }

    // a nonlinear law has no closed form; the same solver applies
    let grid = Grid::cartesian(-1.0, 1.0, 400)?;
    let w = solve_pressure_profile(&grid, bc, GrowthLaw::rational(2.0, 1.5)?)?;
    println!("rational law: center pressure {:.6}", 0.5 * (w[199] + w[200]));
    Ok(())
}
