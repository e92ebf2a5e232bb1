//! Time stepping for the density equation
//!
//! ```text
//! rho_t = lap(rho^m + nu rho) + rho G(p)
//! ```
//!
//! in conservative finite-volume form. The explicit scheme advances the
//! potential fluxes and the source with forward Euler under a monotonicity
//! (CFL) bound. The implicit scheme is backward Euler in both the flux and
//! the source, solved by damped Newton on the tridiagonal Jacobian; it is
//! monotone for every `dt < 1 / G(0)`.

use crate::error::{Error, Result};
use crate::grid::{Bc, Boundaries, Field, Grid, Laplacian};
use crate::linalg::{sup_norm, Tridiagonal};
use crate::model::{
    density_of_pressure, pressure_of_density_unchecked, GrowthLaw, ModelParams,
};

/// Fraction of the monotonicity limit used by automatic explicit steps.
/// On a Cartesian grid this is `dt = 0.45 dx^2 / max D`.
pub const CFL_SAFETY: f64 = 0.9;

const NEWTON_TOL: f64 = 1e-10;
const UPDATE_TOL: f64 = 1e-12;
const MAX_NEWTON: usize = 50;
const MAX_HALVINGS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Explicit,
    Implicit,
}

impl Scheme {
    /// Explicit below `m = 60`, implicit above where the diffusivity
    /// `m rho^(m-1)` makes explicit steps prohibitively small.
    pub fn default_for(m: f64) -> Self {
        if m >= 60.0 {
            Scheme::Implicit
        } else {
            Scheme::Explicit
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    /// Largest monotone explicit step, recomputed every step.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepControl {
    pub dt: TimeStep,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    pub scheme: Scheme,
}

impl StepControl {
    pub fn new(dt: TimeStep, t_end: f64, snapshot_times: Vec<f64>, scheme: Scheme) -> Result<Self> {
        let c = StepControl {
            dt,
            t_end,
            snapshot_times,
            scheme,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
            }
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        if self.snapshot_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("snapshot times must be sorted".into()));
        }
        if self
            .snapshot_times
            .iter()
            .any(|&t| !(t >= 0.0 && t <= self.t_end))
        {
            return Err(Error::InvalidParameter(
                "snapshot times must lie in [0, t_end]".into(),
            ));
        }
        Ok(())
    }

    /// Evenly spaced snapshots `t_end / k, 2 t_end / k, ..., t_end`.
    pub fn uniform(dt: TimeStep, t_end: f64, count: usize, scheme: Scheme) -> Result<Self> {
        let times = (1..=count)
            .map(|k| t_end * k as f64 / count as f64)
            .collect();
        Self::new(dt, t_end, times, scheme)
    }
}

/// Density at one time level together with the model and the boundary
/// closure (Dirichlet values are densities).
#[derive(Debug, Clone, PartialEq)]
pub struct PmeState {
    pub rho: Field,
    pub params: ModelParams,
    pub bc: Boundaries,
}

impl PmeState {
    pub fn new(rho: Field, params: ModelParams, bc: Boundaries) -> Result<Self> {
        params.validate()?;
        bc.validate_for(&rho.grid)?;
        if let Some((i, v)) = rho.values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::InvalidData(format!("negative density {v} in cell {i}")));
        }
        Ok(PmeState { rho, params, bc })
    }

    pub fn time(&self) -> f64 {
        self.rho.time
    }

    pub fn pressure(&self) -> Field {
        let m = self.params.m;
        self.rho.map(|r| pressure_of_density_unchecked(r, m))
    }

    /// `u_m = Phi(rho_m)` cellwise.
    pub fn u(&self) -> Field {
        u_of_pme_state(&self.rho, &self.params)
    }

    pub fn mass(&self) -> f64 {
        self.rho.integral()
    }
}

/// `u = Phi(rho)` applied pointwise.
pub fn u_of_pme_state(rho: &Field, params: &ModelParams) -> Field {
    rho.map(|r| params.phi(r))
}

/// `m rho^(m-1) + nu`.
pub fn effective_diffusivity(rho: f64, params: &ModelParams) -> f64 {
    params.effective_diffusivity(rho)
}

/// Clips the limit initial density so that the initial pressure respects the
/// bound `M0`: `rho_m0 = min(rho0, rho(M0))`.
pub fn prepare_initial_density(rho0: &Field, params: &ModelParams) -> Result<Field> {
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
    let cap = density_of_pressure(params.m0, params.m)?;
    Ok(rho0.map(|r| r.min(cap)))
}

#[inline]
fn source(growth: &GrowthLaw, rho: f64, m: f64) -> (f64, f64) {
    let p = pressure_of_density_unchecked(rho, m);
    let g = growth.evaluate(p);
    // d/drho [rho G(p(rho))] = G(p) + G'(p) (m-1) p
    (rho * g, g + growth.derivative(p) * (m - 1.0) * p)
}

/// Reusable stepping machinery for one grid and boundary closure.
#[derive(Debug, Clone)]
pub struct PmeStepper {
    lap: Laplacian,
    bc_potential: Boundaries,
    params: ModelParams,
    scratch: Vec<f64>,
}

impl PmeStepper {
    pub fn new(grid: &Grid, params: ModelParams, bc: Boundaries) -> Self {
        PmeStepper {
            lap: Laplacian::new(grid, bc),
            bc_potential: bc.map_values(|r| params.potential(r)),
            params,
            scratch: Vec::new(),
        }
    }

    pub fn for_state(state: &PmeState) -> Self {
        Self::new(&state.rho.grid, state.params, state.bc)
    }

    /// Largest `dt` for which the explicit update is monotone in every cell.
    pub fn stable_dt(&self, rho: &[f64]) -> f64 {
        let m = self.params.m;
        let mut worst = 0.0_f64;
        for (i, &r) in rho.iter().enumerate() {
            let diag = (self.lap.west[i] + self.lap.east[i]) * self.params.effective_diffusivity(r);
            let ds = source(&self.params.growth, r, m).1;
            worst = worst.max(diag + (-ds).max(0.0));
        }
        // a single cell with no-flux ends has no diffusive limit
        if worst == 0.0 {
            f64::INFINITY
        } else {
            CFL_SAFETY / worst
        }
    }

    pub fn explicit_step(&mut self, state: &PmeState, dt: f64) -> Result<PmeState> {
        let limit = self.stable_dt(&state.rho.values);
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "explicit dt = {dt:e} exceeds the monotonicity limit {limit:e}"
            )));
        }
        let m = self.params.m;
        let q: Vec<f64> = state.rho.values.iter().map(|&r| self.params.potential(r)).collect();
        let mut lq = vec![0.0; q.len()];
        self.lap.apply_with(&q, self.bc_potential, &mut lq);
        let values: Vec<f64> = state
            .rho
            .values
            .iter()
            .zip(&lq)
            .map(|(&r, &l)| (r + dt * (l + source(&self.params.growth, r, m).0)).max(0.0))
            .collect();
        self.finish(state, values, dt)
    }

    /// One backward-Euler step solved by damped Newton.
    pub fn implicit_step(&mut self, state: &PmeState, dt: f64) -> Result<PmeState> {
        let n = state.rho.values.len();
        let m = self.params.m;
        let old = &state.rho.values;
        let mut rho = old.clone();
        let mut q = vec![0.0; n];
        let mut lq = vec![0.0; n];
        let mut res = vec![0.0; n];
        let mut jac = Tridiagonal::zeros(n);

        let eval = |rho: &[f64], q: &mut [f64], lq: &mut [f64], res: &mut [f64], this: &Self| {
            for i in 0..n {
                q[i] = this.params.potential(rho[i]);
            }
            this.lap.apply_with(q, this.bc_potential, lq);
            for i in 0..n {
                res[i] = rho[i] - old[i] - dt * (lq[i] + source(&this.params.growth, rho[i], m).0);
            }
            sup_norm(res)
        };

        let mut norm = eval(&rho, &mut q, &mut lq, &mut res, self);
        let mut last_update = f64::INFINITY;
        let mut iter = 0;
        while !(norm <= NEWTON_TOL && last_update <= UPDATE_TOL) {
            if iter == MAX_NEWTON {
                return Err(Error::StepFailure {
                    time: state.time(),
                    residual: norm,
                    reason: "implicit density step did not converge".into(),
                });
            }
            iter += 1;
            for i in 0..n {
                let dq = self.params.effective_diffusivity(rho[i]);
                let ds = source(&self.params.growth, rho[i], m).1;
                jac.diag[i] = 1.0 + dt * (self.lap.west[i] + self.lap.east[i]) * dq - dt * ds;
                if i > 0 {
                    jac.lower[i] = -dt * self.lap.west[i] * self.params.effective_diffusivity(rho[i - 1]);
                }
                if i + 1 < n {
                    jac.upper[i] = -dt * self.lap.east[i] * self.params.effective_diffusivity(rho[i + 1]);
                }
            }
            let mut step: Vec<f64> = res.iter().map(|r| -r).collect();
            jac.solve_in_place(&mut step, &mut self.scratch)?;

            let mut lambda = 1.0;
            let mut trial = vec![0.0; n];
            loop {
                for i in 0..n {
                    trial[i] = (rho[i] + lambda * step[i]).max(0.0);
                }
                let t_norm = eval(&trial, &mut q, &mut lq, &mut res, self);
                if t_norm < norm || t_norm <= NEWTON_TOL || lambda < 1e-3 {
                    last_update = rho
                        .iter()
                        .zip(&trial)
                        .fold(0.0, |a, (x, y)| a.max((x - y).abs()));
                    std::mem::swap(&mut rho, &mut trial);
                    norm = t_norm;
                    break;
                }
                lambda *= 0.5;
            }
            if !norm.is_finite() {
                return Err(Error::NumericalBlowup {
                    time: state.time(),
                    reason: "non-finite residual in implicit density step".into(),
                });
            }
        }
        self.finish(state, rho, dt)
    }

    fn finish(&self, state: &PmeState, values: Vec<f64>, dt: f64) -> Result<PmeState> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NumericalBlowup {
                time: state.time() + dt,
                reason: format!("non-finite density in cell {i}"),
            });
        }
        Ok(PmeState {
            rho: Field {
                grid: state.rho.grid,
                values,
                time: state.time() + dt,
            },
            params: state.params,
            bc: state.bc,
        })
    }

    pub fn step(&mut self, state: &PmeState, dt: f64, scheme: Scheme) -> Result<PmeState> {
        match scheme {
            Scheme::Explicit => self.explicit_step(state, dt),
            Scheme::Implicit => self.implicit_step(state, dt),
        }
    }

    /// Implicit step that retries with halved sub-steps when Newton fails.
    fn robust_implicit(&mut self, state: &PmeState, dt: f64, depth: u32) -> Result<PmeState> {
        match self.implicit_step(state, dt) {
            Ok(s) => Ok(s),
            Err(e @ Error::StepFailure { .. }) if depth >= MAX_HALVINGS => Err(e),
            Err(Error::StepFailure { .. }) => {
                let half = self.robust_implicit(state, 0.5 * dt, depth + 1)?;
                self.robust_implicit(&half, 0.5 * dt, depth + 1)
            }
            Err(e) => Err(e),
        }
    }

    /// Advances `state` to exactly `t_target`.
    pub fn advance_to(
        &mut self,
        state: PmeState,
        t_target: f64,
        dt: TimeStep,
        scheme: Scheme,
    ) -> Result<PmeState> {
        let mut state = state;
        while state.time() < t_target {
            let nominal = match (dt, scheme) {
                (TimeStep::Fixed(h), Scheme::Explicit) => h.min(self.stable_dt(&state.rho.values)),
                (TimeStep::Fixed(h), Scheme::Implicit) => h,
                (TimeStep::Auto, Scheme::Explicit) => self.stable_dt(&state.rho.values),
                (TimeStep::Auto, Scheme::Implicit) => {
                    return Err(Error::InvalidParameter(
                        "the implicit scheme needs a fixed dt".into(),
                    ))
                }
            };
            let remaining = t_target - state.time();
            let last = remaining <= nominal * (1.0 + 1e-9);
            let h = if last { remaining } else { nominal };
            let mut next = match scheme {
                Scheme::Explicit => self.explicit_step(&state, h)?,
                Scheme::Implicit => self.robust_implicit(&state, h, 0)?,
            };
            if last {
                next.rho.time = t_target;
            }
            state = next;
        }
        Ok(state)
    }
}

/// One step of the density equation.
pub fn pme_step(state: &PmeState, dt: f64, scheme: Scheme) -> Result<PmeState> {
    PmeStepper::for_state(state).step(state, dt, scheme)
}

/// Runs to every snapshot time and returns the states there. The last step
/// before each snapshot is shortened so the snapshot time is hit exactly.
pub fn pme_run(initial: &PmeState, control: &StepControl) -> Result<Vec<PmeState>> {
    control.validate()?;
    let mut stepper = PmeStepper::for_state(initial);
    let mut out = Vec::with_capacity(control.snapshot_times.len());
    let mut state = initial.clone();
    for &t in &control.snapshot_times {
        state = stepper.advance_to(state, t, control.dt, control.scheme)?;
        out.push(state.clone());
    }
    Ok(out)
}

/// Dirichlet `rho = rho_l` on every non-symmetric end of the grid.
pub fn lateral_boundaries(grid: &Grid, rho_l: f64) -> Boundaries {
    let left = if grid.has_origin() {
        Bc::ZeroFlux
    } else {
        Bc::Dirichlet(rho_l)
    };
    Boundaries::new(left, Bc::Dirichlet(rho_l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(m: f64, growth: GrowthLaw) -> ModelParams {
        ModelParams::new(m, 0.5, growth, 0.0, 2.0).unwrap()
    }

    fn bump(grid: Grid, center: f64, width: f64, height: f64) -> Field {
        Field::from_fn(grid, 0.0, |x| {
            let s = (x - center) / width;
            if s.abs() < 1.0 {
                height * (1.0 - s * s).powi(2)
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn diffusivity_examples() {
        let p = params(20.0, GrowthLaw::affine(1.0, 1.0).unwrap());
        assert_eq!(effective_diffusivity(0.0, &p), 0.5);
        assert_abs_diff_eq!(effective_diffusivity(1.0, &p), 20.5, epsilon = 1e-12);
        // 20 * 0.9^19 + 0.5 evaluated with 50-digit arithmetic
        assert_abs_diff_eq!(
            effective_diffusivity(0.9, &p),
            3.201_703_435_345_984,
            epsilon = 1e-13
        );
    }

    #[test]
    fn vacuum_is_absorbing() {
        let g = Grid::cartesian(-1.0, 1.0, 40).unwrap();
        let p = params(20.0, GrowthLaw::affine(1.0, 1.0).unwrap());
        let s = PmeState::new(Field::constant(g, 0.0, 0.0), p, lateral_boundaries(&g, 0.0)).unwrap();
        for scheme in [Scheme::Explicit, Scheme::Implicit] {
            let next = pme_step(&s, 1e-4, scheme).unwrap();
            assert!(next.rho.values.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn explicit_rejects_unstable_dt() {
        let g = Grid::cartesian(-1.0, 1.0, 100).unwrap();
        let p = params(20.0, GrowthLaw::affine(1.0, 1.0).unwrap());
        let s = PmeState::new(bump(g, 0.0, 0.5, 0.9), p, Boundaries::zero_flux()).unwrap();
        assert!(matches!(
            pme_step(&s, 1e-2, Scheme::Explicit),
            Err(Error::InvalidParameter(_))
        ));
        assert!(pme_step(&s, 1e-2, Scheme::Implicit).is_ok());
    }

    #[test]
    fn snapshot_at_zero_returns_initial() {
        let g = Grid::cartesian(-1.0, 1.0, 20).unwrap();
        let p = params(20.0, GrowthLaw::affine(1.0, 1.0).unwrap());
        let s = PmeState::new(bump(g, 0.0, 0.5, 0.5), p, Boundaries::zero_flux()).unwrap();
        let c = StepControl::new(TimeStep::Auto, 0.1, vec![0.0], Scheme::Explicit).unwrap();
        let out = pme_run(&s, &c).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0], s);
    }

    #[test]
    fn mass_conserved_without_growth() {
        for (geometry_grid, scheme) in [
            (Grid::cartesian(-1.0, 1.0, 100).unwrap(), Scheme::Explicit),
            (Grid::radial(2, 1.0, 100).unwrap(), Scheme::Explicit),
            (Grid::radial(3, 1.0, 60).unwrap(), Scheme::Implicit),
        ] {
            let p = params(20.0, GrowthLaw::Zero);
            let mut s = PmeState::new(bump(geometry_grid, 0.0, 0.7, 0.95), p, Boundaries::zero_flux()).unwrap();
            let mass0 = s.mass();
            let mut stepper = PmeStepper::for_state(&s);
            for _ in 0..200 {
                let dt = match scheme {
                    Scheme::Explicit => stepper.stable_dt(&s.rho.values),
                    Scheme::Implicit => 1e-3,
                };
                s = stepper.step(&s, dt, scheme).unwrap();
            }
            assert!((s.mass() - mass0).abs() < 1e-11, "{:?}", geometry_grid.geometry);
        }
    }

    #[test]
    fn prepare_clips_to_pressure_bound() {
        let g = Grid::cartesian(0.0, 1.0, 10).unwrap();
        let p = params(20.0, GrowthLaw::affine(1.0, 1.0).unwrap());
        let zero = Field::constant(g, 0.0, 0.0);
        assert_eq!(prepare_initial_density(&zero, &p).unwrap(), zero);

        let one = Field::constant(g, 1.0, 0.0);
        let clipped = prepare_initial_density(&one, &p).unwrap();
        // rho(M0) = (19 * 2 / 20)^(1/19) > 1 leaves a saturated state untouched
        assert_abs_diff_eq!(
            density_of_pressure(2.0, 20.0).unwrap(),
            1.034_358_867_909_310_3,
            epsilon = 1e-14
        );
        assert_eq!(clipped, one);

        let bad = Field::constant(g, 1.2, 0.0);
        assert!(prepare_initial_density(&bad, &p).is_err());
    }

    #[test]
    fn clipping_distance_decreases_with_m() {
        // M0 < m/(m-1) makes the clipping level lie below one.
        let g = Grid::cartesian(0.0, 1.0, 10).unwrap();
        let one = Field::constant(g, 1.0, 0.0);
        let mut prev = f64::INFINITY;
        for m in [10.0, 20.0, 40.0, 80.0] {
            let p = ModelParams::new(m, 0.5, GrowthLaw::affine(1.0, 1.0).unwrap(), 0.0, 0.5).unwrap();
            let d = prepare_initial_density(&one, &p).unwrap().sup_distance(&one);
            assert!(d < prev && d > 0.0);
            prev = d;
        }
    }
}
