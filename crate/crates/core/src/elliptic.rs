//! Semilinear elliptic solves `-L w = F(x, w)` by Newton's method on the
//! tridiagonal finite-volume system.

use crate::error::{Error, Result};
use crate::grid::{Boundaries, Grid, Laplacian};
use crate::linalg::{sup_norm, Tridiagonal};
use crate::model::GrowthLaw;

pub const NEWTON_TOL: f64 = 1e-11;
const MAX_NEWTON: usize = 60;

/// Solves `-L w = rhs(i, w_i)` where `rhs` returns the value and the
/// `w`-derivative of the right-hand side in cell `i`. Starts from `guess`.
pub fn solve_semilinear(
    grid: &Grid,
    bc: Boundaries,
    guess: Vec<f64>,
    rhs: impl Fn(usize, f64) -> (f64, f64),
) -> Result<Vec<f64>> {
    bc.validate_for(grid)?;
    let n = grid.n_cells;
    let lap = Laplacian::new(grid, bc);
    let mut w = guess;
    let mut lw = vec![0.0; n];
    let mut res = vec![0.0; n];
    let mut jac = Tridiagonal::zeros(n);
    let mut scratch = Vec::new();

    let residual = |w: &[f64], lw: &mut [f64], res: &mut [f64]| {
        lap.apply(w, lw);
        for i in 0..n {
            res[i] = -lw[i] - rhs(i, w[i]).0;
        }
        sup_norm(res)
    };

    // rounding in the discrete Laplacian limits how far the residual can fall
    let tol = |w: &[f64]| NEWTON_TOL.max(64.0 * f64::EPSILON * lap.max_diagonal() * sup_norm(w));
    let mut norm = residual(&w, &mut lw, &mut res);
    for _ in 0..MAX_NEWTON {
        if norm <= tol(&w) {
            return Ok(w);
        }
        for i in 0..n {
            jac.lower[i] = -lap.west[i];
            jac.upper[i] = -lap.east[i];
            jac.diag[i] = lap.west[i] + lap.east[i] - rhs(i, w[i]).1;
        }
        // Dirichlet closures act on the boundary value, not a neighbour.
        jac.lower[0] = 0.0;
        jac.upper[n - 1] = 0.0;
        let mut step: Vec<f64> = res.iter().map(|r| -r).collect();
        jac.solve_in_place(&mut step, &mut scratch)?;

        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = w.iter().zip(&step).map(|(a, s)| a + lambda * s).collect();
            let mut trial_lw = vec![0.0; n];
            let mut trial_res = vec![0.0; n];
            let trial_norm = residual(&trial, &mut trial_lw, &mut trial_res);
            if trial_norm < norm || lambda < 1e-4 {
                w = trial;
                res = trial_res;
                norm = trial_norm;
                break;
            }
            lambda *= 0.5;
        }
    }
    if norm <= tol(&w) {
        Ok(w)
    } else {
        Err(Error::ProjectionFailure { residual: norm })
    }
}

/// Pressure profile of a saturated region: `-L w = G(w)` with the given
/// boundary closure (zero Dirichlet data on the free boundary).
pub fn solve_pressure_profile(grid: &Grid, bc: Boundaries, growth: GrowthLaw) -> Result<Vec<f64>> {
    solve_semilinear(grid, bc, vec![0.0; grid.n_cells], |_, w| {
        (growth.evaluate(w), growth.derivative(w))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Bc;

    fn cosh_profile(x: f64, a: f64, g0: f64, p_max: f64) -> f64 {
        let k = (g0 / p_max).sqrt();
        p_max * (1.0 - (k * x).cosh() / (k * a).cosh())
    }

    #[test]
    fn affine_matches_closed_form_second_order() {
        let growth = GrowthLaw::affine(1.0, 1.0).unwrap();
        let bc = Boundaries::new(Bc::Dirichlet(0.0), Bc::Dirichlet(0.0));
        let err = |n: usize| {
            let grid = Grid::cartesian(-1.0, 1.0, n).unwrap();
            let w = solve_pressure_profile(&grid, bc, growth).unwrap();
            grid.centers()
                .iter()
                .zip(&w)
                .map(|(x, v)| (v - cosh_profile(*x, 1.0, 1.0, 1.0)).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(100), err(200));
        assert!(e2 < 2e-5, "err = {e2}");
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.1, "order = {order}");
    }

    #[test]
    fn radial_symmetric_half_matches_full_interval() {
        // One-dimensional radial grid with the symmetry closure is the
        // mirror half of the Cartesian interval.
        let growth = GrowthLaw::rational(2.0, 1.5).unwrap();
        let full = Grid::cartesian(-0.8, 0.8, 160).unwrap();
        let half = Grid::radial(1, 0.8, 80).unwrap();
        let wf = solve_pressure_profile(
            &full,
            Boundaries::new(Bc::Dirichlet(0.0), Bc::Dirichlet(0.0)),
            growth,
        )
        .unwrap();
        let wh = solve_pressure_profile(&half, Boundaries::far_field(0.0), growth).unwrap();
        for i in 0..80 {
            assert!((wh[i] - wf[80 + i]).abs() < 1e-10);
        }
    }

    #[test]
    fn nonlinear_law_satisfies_equation() {
        let growth = GrowthLaw::rational(3.0, 0.7).unwrap();
        let grid = Grid::radial(3, 1.2, 120).unwrap();
        let bc = Boundaries::far_field(0.0);
        let w = solve_pressure_profile(&grid, bc, growth).unwrap();
        let lap = Laplacian::new(&grid, bc);
        let mut lw = vec![0.0; 120];
        lap.apply(&w, &mut lw);
        for i in 0..120 {
            assert!((-lw[i] - growth.evaluate(w[i])).abs() <= NEWTON_TOL);
            assert!(w[i] > 0.0 && w[i] < 0.7);
        }
    }
}
