//! The limit elliptic-parabolic problem
//!
//! ```text
//! b(u)_t - nu lap u = (b(u) - nu) G(u^-),   b(u) = u^+
//! ```
//!
//! discretized by backward Euler and solved with a semismooth Newton method.
//! Where `u > 0` the variable is `nu (1 - rho)`; where `u < 0` it is minus the
//! pressure. Dirichlet values in [`LimitState::bc`] are values of `u`.

use crate::elliptic::solve_semilinear;
use crate::error::{Error, Result};
use crate::grid::{Bc, Boundaries, Field, Grid, Laplacian};
use crate::interface::{extract_free_boundary, FreeBoundary};
use crate::linalg::{sup_norm, Tridiagonal};
use crate::model::{b_graph, GrowthLaw, ModelParams};
use crate::pme::{StepControl, TimeStep};

/// Cells with `rho0 >= 1 - SATURATION_TOL` form the initial tumor region.
pub const SATURATION_TOL: f64 = 1e-12;
pub const NEWTON_TOL: f64 = 1e-10;
const UPDATE_TOL: f64 = 1e-12;
const MAX_NEWTON: usize = 100;
const REGULARIZATION: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LimitState {
    pub u: Field,
    pub params: ModelParams,
    pub bc: Boundaries,
}

impl LimitState {
    pub fn new(u: Field, params: ModelParams, bc: Boundaries) -> Result<Self> {
        params.validate()?;
        bc.validate_for(&u.grid)?;
        let s = LimitState { u, params, bc };
        s.check_upper_bound()?;
        Ok(s)
    }

    fn check_upper_bound(&self) -> Result<()> {
        let nu = self.params.nu;
        if let Some((i, v)) = self
            .u
            .values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v <= nu + 1e-12))
        {
            return Err(Error::NumericalBlowup {
                time: self.u.time,
                reason: format!("u = {v} exceeds nu = {nu} in cell {i} (negative density)"),
            });
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.u.time
    }

    /// `b(u) = u^+ = nu (1 - rho)`.
    pub fn b(&self) -> Field {
        self.u.map(b_graph)
    }

    /// Pressure `u^-`.
    pub fn pressure(&self) -> Field {
        self.u.map(|v| (-v).max(0.0))
    }

    /// Limit density `1 - b(u) / nu`.
    pub fn density(&self) -> Field {
        let nu = self.params.nu;
        self.u.map(|v| 1.0 - b_graph(v) / nu)
    }

    pub fn free_boundary(&self) -> FreeBoundary {
        extract_free_boundary(&self.u)
    }
}

/// Dirichlet `u = nu (1 - rho_l)` on every non-symmetric end of the grid.
pub fn limit_boundaries(grid: &Grid, params: &ModelParams) -> Boundaries {
    let g = params.nu * (1.0 - params.rho_l);
    let left = if grid.has_origin() {
        Bc::ZeroFlux
    } else {
        Bc::Dirichlet(g)
    };
    Boundaries::new(left, Bc::Dirichlet(g))
}

/// Maximal runs `[start, end)` of cells where `pred` holds.
pub(crate) fn components(values: &[f64], pred: impl Fn(f64) -> bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &v) in values.iter().enumerate() {
        match (pred(v), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, values.len()));
    }
    out
}

/// Solves `-lap w = G(w)` with `w = 0` on the boundary of each component of
/// the saturated set. Ends that coincide with a symmetry or no-flux end of
/// the grid keep that closure.
pub fn saturated_pressure(
    grid: &Grid,
    saturated: &[(usize, usize)],
    outer: Boundaries,
    growth: GrowthLaw,
) -> Result<Vec<f64>> {
    let mut w = vec![0.0; grid.n_cells];
    for &(s, e) in saturated {
        let sub = Grid::new(grid.geometry, grid.face(s), grid.face(e), e - s)?;
        let left = if s == 0 && outer.left == Bc::ZeroFlux {
            Bc::ZeroFlux
        } else {
            Bc::Dirichlet(0.0)
        };
        let right = if e == grid.n_cells && outer.right == Bc::ZeroFlux {
            Bc::ZeroFlux
        } else {
            Bc::Dirichlet(0.0)
        };
        let ws = solve_semilinear(&sub, Boundaries::new(left, right), vec![0.0; e - s], |_, v| {
            (growth.evaluate(v), growth.derivative(v))
        })?;
        w[s..e].copy_from_slice(&ws);
    }
    Ok(w)
}

/// Initial datum of the limit problem: `-w` on the saturated set
/// `{rho0 = 1}`, where `-lap w = G(w)` with zero boundary values, and
/// `nu (1 - rho0)` elsewhere.
pub fn project_initial_data(rho0: &Field, params: &ModelParams, bc: Boundaries) -> Result<LimitState> {
    if let Some((i, v)) = rho0
        .values
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=1.0).contains(*v))
    {
        return Err(Error::InvalidData(format!(
            "initial density {v} in cell {i} outside [0, 1]"
        )));
    }
    bc.validate_for(&rho0.grid)?;
    let saturated = components(&rho0.values, |r| r >= 1.0 - SATURATION_TOL);
    let w = saturated_pressure(&rho0.grid, &saturated, bc, params.growth)?;
    let nu = params.nu;
    let values = rho0
        .values
        .iter()
        .zip(&w)
        .map(|(&r, &w)| if r >= 1.0 - SATURATION_TOL { -w } else { nu * (1.0 - r) })
        .collect();
    LimitState::new(Field::new(rho0.grid, values, rho0.time)?, *params, bc)
}

/// Reusable Newton workspace for one grid and boundary closure.
#[derive(Debug, Clone)]
pub struct LimitStepper {
    lap: Laplacian,
    params: ModelParams,
    scratch: Vec<f64>,
}

/// `b` and its generalized derivative, with the regularized slope `eps` on
/// the negative side.
#[inline]
fn b_eps(u: f64, eps: f64) -> (f64, f64) {
    if u >= 0.0 {
        (u, 1.0)
    } else {
        (eps * u, eps)
    }
}

impl LimitStepper {
    pub fn new(grid: &Grid, params: ModelParams, bc: Boundaries) -> Self {
        LimitStepper {
            lap: Laplacian::new(grid, bc),
            params,
            scratch: Vec::new(),
        }
    }

    pub fn for_state(state: &LimitState) -> Self {
        Self::new(&state.u.grid, state.params, state.bc)
    }

    fn solve(&mut self, state: &LimitState, dt: f64, eps: f64) -> Result<Vec<f64>> {
        let n = state.u.values.len();
        let nu = self.params.nu;
        let growth = self.params.growth;
        let b_old: Vec<f64> = state.u.values.iter().map(|&v| b_eps(v, eps).0).collect();
        let lap = &self.lap;

        let residual = |u: &[f64], lu: &mut [f64], res: &mut [f64]| {
            lap.apply(u, lu);
            for i in 0..n {
                let b = b_eps(u[i], eps).0;
                let p = (-u[i]).max(0.0);
                res[i] = b - b_old[i] - dt * (nu * lu[i] + (b - nu) * growth.evaluate(p));
            }
            sup_norm(res)
        };

        let mut u = state.u.values.clone();
        let mut lu = vec![0.0; n];
        let mut res = vec![0.0; n];
        let mut jac = Tridiagonal::zeros(n);
        let mut trial = vec![0.0; n];
        let mut norm = residual(&u, &mut lu, &mut res);
        let mut update = f64::INFINITY;
        for _ in 0..MAX_NEWTON {
            if norm <= NEWTON_TOL && (update <= UPDATE_TOL || norm == 0.0) {
                return Ok(u);
            }
            for i in 0..n {
                let (b, db) = b_eps(u[i], eps);
                let p = (-u[i]).max(0.0);
                // d/du of (b - nu) G(u^-)
                let dsrc = if u[i] >= 0.0 {
                    db * growth.evaluate(0.0)
                } else {
                    db * growth.evaluate(p) - (b - nu) * growth.derivative(p)
                };
                jac.diag[i] = db + dt * nu * (lap.west[i] + lap.east[i]) - dt * dsrc;
                jac.lower[i] = -dt * nu * lap.west[i];
                jac.upper[i] = -dt * nu * lap.east[i];
            }
            let mut step: Vec<f64> = res.iter().map(|r| -r).collect();
            jac.solve_in_place(&mut step, &mut self.scratch)?;

            let mut lambda = 1.0;
            loop {
                for i in 0..n {
                    trial[i] = u[i] + lambda * step[i];
                }
                let mut tlu = vec![0.0; n];
                let mut tres = vec![0.0; n];
                let t_norm = residual(&trial, &mut tlu, &mut tres);
                if t_norm < norm || t_norm <= NEWTON_TOL || lambda < 1e-4 {
                    update = lambda * sup_norm(&step);
                    std::mem::swap(&mut u, &mut trial);
                    res = tres;
                    norm = t_norm;
                    break;
                }
                lambda *= 0.5;
            }
            if !norm.is_finite() {
                return Err(Error::NumericalBlowup {
                    time: state.time(),
                    reason: "non-finite residual in limit step".into(),
                });
            }
        }
        if norm <= NEWTON_TOL {
            return Ok(u);
        }
        Err(Error::StepFailure {
            time: state.time(),
            residual: norm,
            reason: "semismooth Newton stagnated".into(),
        })
    }

    /// One backward-Euler step. Falls back to the regularized graph
    /// `u^+ + 1e-8 min(u, 0)` only when the exact iteration stagnates.
    pub fn step(&mut self, state: &LimitState, dt: f64) -> Result<LimitState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
        }
        let values = match self.solve(state, dt, 0.0) {
            Ok(u) => u,
            Err(Error::StepFailure { .. }) => self.solve(state, dt, REGULARIZATION)?,
            Err(e) => return Err(e),
        };
        let next = LimitState {
            u: Field {
                grid: state.u.grid,
                values,
                time: state.time() + dt,
            },
            params: state.params,
            bc: state.bc,
        };
        next.check_upper_bound()?;
        Ok(next)
    }
}

pub fn limit_step(state: &LimitState, dt: f64) -> Result<LimitState> {
    LimitStepper::for_state(state).step(state, dt)
}

/// A cell that switched from the parabolic phase (`u >= 0`) to the elliptic
/// phase (`u < 0`) outside the previous elliptic region and its immediate
/// neighbours: the birth of a new tumor component. Both one-sided values
/// across the step are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpEvent {
    pub time_before: f64,
    pub time_after: f64,
    pub position: f64,
    pub u_before: f64,
    pub u_after: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LimitRun {
    pub snapshots: Vec<LimitState>,
    pub boundaries: Vec<FreeBoundary>,
    pub jumps: Vec<JumpEvent>,
    /// `max_n |b(u^{n+1}) - b(u^n)|_inf` over the whole run.
    pub max_b_increment: f64,
    pub steps: usize,
}

/// Nucleation detection: new negative components not touching the old ones.
fn detect_jumps(before: &LimitState, after: &LimitState, out: &mut Vec<JumpEvent>) {
    let old = &before.u.values;
    let new = &after.u.values;
    let centers = after.u.grid.centers();
    for (s, e) in components(new, |v| v < 0.0) {
        let lo = s.saturating_sub(1);
        let hi = (e + 1).min(old.len());
        if old[lo..hi].iter().any(|&v| v < 0.0) {
            continue;
        }
        let k = (s..e)
            .min_by(|&a, &b| new[a].total_cmp(&new[b]))
            .unwrap_or(s);
        out.push(JumpEvent {
            time_before: before.time(),
            time_after: after.time(),
            position: centers[k],
            u_before: old[k],
            u_after: new[k],
        });
    }
}

impl LimitStepper {
    /// Advances to exactly `t_target` with steps of at most `dt`, shortening
    /// the last one.
    pub fn advance_to(
        &mut self,
        state: LimitState,
        t_target: f64,
        dt: f64,
        run: &mut LimitRun,
    ) -> Result<LimitState> {
        let mut state = state;
        while state.time() < t_target {
            let remaining = t_target - state.time();
            let last = remaining <= dt * (1.0 + 1e-9);
            let h = if last { remaining } else { dt };
            let mut next = self.step(&state, h)?;
            if last {
                next.u.time = t_target;
            }
            let db = state
                .u
                .values
                .iter()
                .zip(&next.u.values)
                .fold(0.0_f64, |a, (x, y)| a.max((b_graph(*x) - b_graph(*y)).abs()));
            run.max_b_increment = run.max_b_increment.max(db);
            detect_jumps(&state, &next, &mut run.jumps);
            run.steps += 1;
            state = next;
        }
        Ok(state)
    }
}

/// Runs to each snapshot time and records the free boundary there.
pub fn limit_run(initial: &LimitState, control: &StepControl) -> Result<LimitRun> {
    control.validate()?;
    let dt = match control.dt {
        TimeStep::Fixed(h) => h,
        TimeStep::Auto => {
            return Err(Error::InvalidParameter(
                "the limit solver needs a fixed dt".into(),
            ))
        }
    };
    let mut stepper = LimitStepper::for_state(initial);
    let mut run = LimitRun::default();
    let mut state = initial.clone();
    for &t in &control.snapshot_times {
        state = stepper.advance_to(state, t, dt, &mut run)?;
        run.boundaries.push(state.free_boundary());
        run.snapshots.push(state.clone());
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pme::Scheme;

    fn params() -> ModelParams {
        ModelParams::new(20.0, 0.5, GrowthLaw::affine(1.0, 1.0).unwrap(), 0.0, 2.0).unwrap()
    }

    #[test]
    fn vacuum_is_stationary() {
        let g = Grid::cartesian(-1.0, 1.0, 30).unwrap();
        let p = params();
        let s = LimitState::new(Field::constant(g, 0.5, 0.0), p, limit_boundaries(&g, &p)).unwrap();
        let next = limit_step(&s, 1e-2).unwrap();
        assert!(next.u.values.iter().all(|&v| (v - 0.5).abs() < 1e-14));
    }

    #[test]
    fn empty_saturated_set_projects_to_parabolic_data() {
        let g = Grid::cartesian(-1.0, 1.0, 30).unwrap();
        let p = params();
        let rho0 = Field::constant(g, 0.0, 0.0);
        let s = project_initial_data(&rho0, &p, limit_boundaries(&g, &p)).unwrap();
        assert!(s.u.values.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn projection_matches_cosh_profile() {
        let g = Grid::cartesian(-2.0, 2.0, 400).unwrap();
        let p = params();
        let rho0 = Field::from_fn(g, 0.0, |x| if x.abs() < 1.0 { 1.0 } else { 0.3 }).unwrap();
        let s = project_initial_data(&rho0, &p, limit_boundaries(&g, &p)).unwrap();
        let w0 = -0.5 * (s.u.values[199] + s.u.values[200]);
        // w(0) = 1 - 1/cosh(1) with half-cell offset error O(dx^2)
        assert!((w0 - (1.0 - 1.0 / 1.0f64.cosh())).abs() < 1e-4, "w0 = {w0}");
        assert!(s.u.values[50] == 0.5 * 0.7);
    }

    #[test]
    fn uniform_positive_follows_ode() {
        let g = Grid::cartesian(0.0, 1.0, 8).unwrap();
        let p = params();
        let c = 0.2;
        let s = LimitState::new(Field::constant(g, c, 0.0), p, Boundaries::zero_flux()).unwrap();
        let ctl = StepControl::new(TimeStep::Fixed(1e-4), 0.02, vec![0.02], Scheme::Implicit).unwrap();
        let run = limit_run(&s, &ctl).unwrap();
        let exact = 0.5 - (0.5 - c) * 0.02f64.exp();
        for v in &run.snapshots[0].u.values {
            assert!((v - exact).abs() < 1e-6, "{v} vs {exact}");
        }
        assert!(run.jumps.is_empty());
    }

    #[test]
    fn rejects_u_above_nu() {
        let g = Grid::cartesian(0.0, 1.0, 4).unwrap();
        let p = params();
        let u = Field::constant(g, 0.6, 0.0);
        assert!(LimitState::new(u, p, Boundaries::zero_flux()).is_err());
    }

    #[test]
    fn components_of_runs() {
        let v = [1.0, -1.0, -1.0, 1.0, -1.0];
        assert_eq!(components(&v, |x| x < 0.0), vec![(1, 3), (4, 5)]);
    }
}
