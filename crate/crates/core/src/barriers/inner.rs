use rayon::prelude::*;

use super::{forcing_profile, BarrierKind, RadialProfilePair};
use crate::error::{Error, Result};
use crate::grid::{Boundaries, Grid, Laplacian};
use crate::linalg::{sup_norm, Tridiagonal};
use crate::model::GrowthLaw;

pub const FIXED_POINT_TOL: f64 = 1e-10;
pub const FIXED_POINT_MAX_ITER: usize = 50;
pub const FIXED_POINT_DAMPING: f64 = 0.5;
/// Relative radius perturbation for the interface-speed derivative.
const RADIUS_STEP: f64 = 1e-3;

/// Solves `-lap v = G(pmap(v)) + forcing` on a ball grid with `v = 0` on its
/// outer face, by damped fixed-point iteration on the nonlinear term.
/// Returns the solution and the iteration count.
pub fn solve_inner_bvp(
    grid: &Grid,
    growth: GrowthLaw,
    forcing: &[f64],
    pmap: impl Fn(f64) -> Result<f64>,
    guess: Vec<f64>,
) -> Result<(Vec<f64>, usize)> {
    let n = grid.n_cells;
    let bc = Boundaries::far_field(0.0);
    bc.validate_for(grid)?;
    let lap = Laplacian::new(grid, bc);
    let mut mat = Tridiagonal::zeros(n);
    for i in 0..n {
        mat.diag[i] = lap.west[i] + lap.east[i];
        mat.lower[i] = -lap.west[i];
        mat.upper[i] = -lap.east[i];
    }
    let mut scratch = Vec::new();
    let mut v = guess;
    let mut rhs = vec![0.0; n];
    let mut lv = vec![0.0; n];
    let mut res = vec![0.0; n];
    for iter in 0..=FIXED_POINT_MAX_ITER {
        for i in 0..n {
            rhs[i] = growth.evaluate(pmap(v[i])?) + forcing[i];
        }
        lap.apply(&v, &mut lv);
        for i in 0..n {
            res[i] = -lv[i] - rhs[i];
        }
        let norm = sup_norm(&res);
        // rounding in the discrete Laplacian limits how far the residual can fall
        let floor = 64.0 * f64::EPSILON * (lap.max_diagonal() * sup_norm(&v) + sup_norm(&rhs));
        if norm <= FIXED_POINT_TOL.max(floor) {
            return Ok((v, iter));
        }
        if iter == FIXED_POINT_MAX_ITER || !norm.is_finite() {
            return Err(Error::ConstructionFailure(format!(
                "inner fixed point stalled at residual {norm:e} after {iter} iterations"
            )));
        }
        mat.solve_in_place(&mut rhs, &mut scratch)?;
        for i in 0..n {
            v[i] += FIXED_POINT_DAMPING * (rhs[i] - v[i]);
        }
    }
    unreachable!()
}

/// `u_tilde` on the ball `[0, a(t)]` at every sample time, with its time
/// derivative.
#[derive(Debug, Clone)]
pub struct InnerProfile {
    pub kind: BarrierKind,
    pub m: f64,
    pub a0: f64,
    pub times: Vec<f64>,
    pub a: Vec<f64>,
    pub u_tilde: Vec<Vec<f64>>,
    /// `d u_tilde / dt` at fixed radius.
    pub u_tilde_t: Vec<Vec<f64>>,
    /// The signed forcing `s f_m` per cell.
    pub forcing: Vec<Vec<f64>>,
    pub max_iterations: usize,
}

impl InnerProfile {
    pub fn grid(&self, k: usize, dim: u32) -> Result<Grid> {
        Grid::radial(dim, self.a[k], self.u_tilde[k].len())
    }
}

/// Centered radial derivative with the symmetry closure at the origin and
/// the zero Dirichlet closure at the outer face.
fn radial_slope(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let w = if i == 0 { v[0] } else { v[i - 1] };
            let e = if i + 1 == n { -v[n - 1] } else { v[i + 1] };
            (e - w) / (2.0 * h)
        })
        .collect()
}

/// Builds `u_tilde` for one barrier. The profile depends on time only
/// through `a(t)`; its time derivative is `a'(t) d/da` at fixed radius,
/// obtained from solves on the scaled ball with the forcing held fixed in
/// the scaled coordinate `r / a`.
pub fn build_inner_profile(
    pair: &RadialProfilePair,
    m: f64,
    a0: f64,
    kind: BarrierKind,
) -> Result<InnerProfile> {
    let spec = pair.spec;
    let params = spec.model(m)?;
    let s = kind.sign();
    // vacuum pressure where -u_tilde exceeds Psi(0)
    let pmap = |v: f64| params.psi_inverse((-v).min(params.nu));
    let per_sample = (0..pair.times.len())
        .into_par_iter()
        .map(|k| -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, usize)> {
            let a = pair.a[k];
            let forcing: Vec<f64> = pair.p0[k]
                .iter()
                .map(|&p| s * forcing_profile(p, m, a0, spec.nu))
                .collect();
            let grid = spec.inner_grid(a)?;
            let (v, it0) = solve_inner_bvp(&grid, spec.growth, &forcing, pmap, pair.p0[k].clone())?;
            let solve_at = |scale: f64| {
                let g = spec.inner_grid(a * scale)?;
                solve_inner_bvp(&g, spec.growth, &forcing, pmap, v.clone())
            };
            let (wp, it1) = solve_at(1.0 + RADIUS_STEP)?;
            let (wm, it2) = solve_at(1.0 - RADIUS_STEP)?;
            let h = grid.dx();
            let vr = radial_slope(&v, h);
            let vt: Vec<f64> = (0..v.len())
                .map(|i| {
                    let da_scaled = (wp[i] - wm[i]) / (2.0 * RADIUS_STEP * a);
                    let r = grid.center(i);
                    (da_scaled - r / a * vr[i]) * spec.a_dot()
                })
                .collect();
            Ok((v, vt, forcing, it0.max(it1).max(it2)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = InnerProfile {
        kind,
        m,
        a0,
        times: pair.times.clone(),
        a: pair.a.clone(),
        u_tilde: Vec::new(),
        u_tilde_t: Vec::new(),
        forcing: Vec::new(),
        max_iterations: 0,
    };
    for (v, vt, f, it) in per_sample {
        out.u_tilde.push(v);
        out.u_tilde_t.push(vt);
        out.forcing.push(f);
        out.max_iterations = out.max_iterations.max(it);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_map_recovers_cosh_profile() {
        let growth = GrowthLaw::affine(1.0, 1.0).unwrap();
        let err = |n: usize| {
            let g = Grid::radial(1, 1.0, n).unwrap();
            let (v, _) = solve_inner_bvp(&g, growth, &vec![0.0; n], Ok, vec![0.0; n]).unwrap();
            g.centers()
                .iter()
                .zip(&v)
                .map(|(x, v)| (v - (1.0 - x.cosh() / 1.0f64.cosh())).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(100), err(200));
        assert!(e2 < 2e-5);
        assert!((e1 / e2).log2() > 1.9);
    }

    #[test]
    fn radial_slope_is_exact_for_quadratics_inside() {
        let g = Grid::radial(2, 1.0, 10).unwrap();
        let v: Vec<f64> = g.centers().iter().map(|r| 1.0 - r * r).collect();
        let d = radial_slope(&v, g.dx());
        for i in 1..9 {
            assert!((d[i] + 2.0 * g.center(i)).abs() < 1e-12);
        }
    }
}
