//! Propagation statements for the limit problem, measured on radial
//! scenarios.

use rayon::prelude::*;

use super::{log_log_slope, slope_through_origin, LemmaCheckResult, LemmaId, Outcome, TrialRecord};
use crate::error::{Error, Result};
use crate::grid::{Bc, Boundaries, Field, Grid};
use crate::limit::{limit_boundaries, project_initial_data, LimitRun, LimitState, LimitStepper};
use crate::model::{GrowthLaw, ModelParams};
use crate::presets::Preset;

/// Steps a limit state with fixed `dt` and calls `watch` after every step
/// until it returns `false` or `t_end` is reached.
fn watch_run(
    state: LimitState,
    dt: f64,
    t_end: f64,
    mut watch: impl FnMut(&LimitState) -> bool,
) -> Result<LimitState> {
    let mut stepper = LimitStepper::for_state(&state);
    let mut run = LimitRun::default();
    let mut state = state;
    if !watch(&state) {
        return Ok(state);
    }
    while state.time() < t_end {
        let target = (state.time() + dt).min(t_end);
        state = stepper.advance_to(state, target, dt, &mut run)?;
        if !watch(&state) {
            break;
        }
    }
    Ok(state)
}

/// Largest `u` over the cells whose centers lie in `[0, radius)`.
fn max_in_ball(u: &Field, radius: f64) -> f64 {
    u.grid
        .centers()
        .iter()
        .zip(&u.values)
        .filter(|(x, _)| **x < radius)
        .fold(f64::NEG_INFINITY, |a, (_, &v)| a.max(v))
}

fn min_in_ball(u: &Field, radius: f64) -> f64 {
    u.grid
        .centers()
        .iter()
        .zip(&u.values)
        .filter(|(x, _)| **x < radius)
        .fold(f64::INFINITY, |a, (_, &v)| a.min(v))
}

// ---------------------------------------------------------------------------
// nucleation timing

/// `u(., 0) = eps` on `B_r`, `u = outside` elsewhere, on the radial domain
/// `[0, 2r]` with `u = outside` at the outer end.
#[derive(Debug, Clone, PartialEq)]
pub struct NucleationSetup {
    pub params: ModelParams,
    pub dim: u32,
    pub r: f64,
    pub outside: f64,
    pub n_cells: usize,
    pub eps_values: Vec<f64>,
    pub held_out: f64,
    /// `dt = resolution eps / (nu G(0))` for each trial.
    pub resolution: f64,
}

impl NucleationSetup {
    pub fn standard(params: ModelParams) -> Self {
        NucleationSetup {
            params,
            dim: 2,
            r: 0.5,
            outside: 0.2 * params.nu,
            n_cells: 200,
            eps_values: vec![1e-2, 5e-3, 2.5e-3],
            held_out: 1.25e-3,
            resolution: 5e-3,
        }
    }

    fn scale(&self) -> f64 {
        self.params.nu * self.params.growth.g0()
    }
}

/// First time at which every cell of `B_{r/4}` is nonpositive, or `None`
/// if that does not happen before `r^2`.
fn nucleation_time(setup: &NucleationSetup, eps: f64) -> Result<Option<f64>> {
    let p = setup.params;
    let grid = Grid::radial(setup.dim, 2.0 * setup.r, setup.n_cells)?;
    let u = Field::from_fn(grid, 0.0, |x| if x < setup.r { eps } else { setup.outside })?;
    let state = LimitState::new(u, p, Boundaries::far_field(setup.outside))?;
    let dt = if eps > 0.0 {
        setup.resolution * eps / setup.scale()
    } else {
        setup.resolution * setup.r * setup.r
    };
    let mut hit = None;
    watch_run(state, dt, setup.r * setup.r, |s| {
        if max_in_ball(&s.u, 0.25 * setup.r) <= 0.0 {
            hit = Some(s.time());
            false
        } else {
            true
        }
    })?;
    Ok(hit)
}

/// Measures the nucleation time of `B_{r/4}` for each `eps`, fits
/// `t = slope eps`, and checks linear scaling across consecutive values and
/// the fitted bound at the held-out `eps`. Reports `C_n = slope nu G(0)`.
pub fn nucleation_timing_check(setup: &NucleationSetup) -> Result<LemmaCheckResult> {
    if setup.eps_values.len() < 2 || setup.eps_values.iter().any(|&e| !(e > 0.0 && e < setup.params.nu)) {
        return Err(Error::InvalidParameter(
            "nucleation check needs at least two eps values in (0, nu)".into(),
        ));
    }
    let mut all = setup.eps_values.clone();
    all.push(setup.held_out);
    let times = all
        .par_iter()
        .map(|&e| nucleation_time(setup, e))
        .collect::<Result<Vec<_>>>()?;

    let mut trials = Vec::new();
    let horizon = setup.r * setup.r;
    for (i, (&e, t)) in all.iter().zip(&times).enumerate() {
        trials.push(TrialRecord {
            trial: i,
            label: format!("nucleation time (eps={e:e})"),
            parameter: e,
            measured: t.unwrap_or(f64::INFINITY),
            bound: horizon,
            pass: t.is_some(),
        });
    }
    let k = setup.eps_values.len();
    let fit_t: Vec<f64> = times[..k].iter().map(|t| t.unwrap_or(f64::INFINITY)).collect();
    let slope = slope_through_origin(&setup.eps_values, &fit_t);
    for j in 0..k - 1 {
        let normalized = (fit_t[j + 1] / fit_t[j]) / (setup.eps_values[j + 1] / setup.eps_values[j]);
        trials.push(TrialRecord {
            trial: all.len() + j,
            label: format!("scaling eps={:e} -> {:e}", setup.eps_values[j], setup.eps_values[j + 1]),
            parameter: setup.eps_values[j + 1],
            measured: normalized,
            bound: 2.0,
            pass: (0.5..=2.0).contains(&normalized),
        });
    }
    let held = times[k].unwrap_or(f64::INFINITY);
    trials.push(TrialRecord {
        trial: all.len() + k - 1,
        label: format!("held-out eps={:e} within fitted bound", setup.held_out),
        parameter: setup.held_out,
        measured: held,
        bound: slope * setup.held_out,
        pass: held <= slope * setup.held_out,
    });
    Ok(LemmaCheckResult::from_trials(
        LemmaId::NucleationTiming,
        vec![("slope".into(), slope), ("C_n".into(), slope * setup.scale())],
        trials,
    ))
}

// ---------------------------------------------------------------------------
// shrinkage

/// A saturated ball `B_r` (projected pressure inside) surrounded by
/// `u = min(u_far, slope (|x| - r))`, on the radial domain `[0, 4r]` with
/// `u = u_far` at the outer end. An infinite slope is a jump to `u_far`.
/// `B_{r/2}` must stay negative up to `r^horizon_exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkSetup {
    pub params: ModelParams,
    pub dim: u32,
    pub r_values: Vec<f64>,
    pub exterior_slope: f64,
    pub u_far: f64,
    pub horizon_exponent: f64,
    pub cells_per_radius: usize,
    /// Steps per horizon.
    pub steps: usize,
}

impl ShrinkSetup {
    /// Jump to `u = nu` at `|x| = r` for `nu = 0.05` and `G(p) = 10 (1 - p / 10)`.
    pub fn standard() -> Result<Self> {
        let growth = GrowthLaw::affine(10.0, 10.0)?;
        let params = ModelParams::new(20.0, 0.05, growth, 0.0, growth.p_max())?;
        Ok(ShrinkSetup {
            params,
            dim: 2,
            r_values: vec![0.2, 0.1, 0.05],
            exterior_slope: f64::INFINITY,
            u_far: params.nu,
            horizon_exponent: 2.5,
            cells_per_radius: 100,
            steps: 400,
        })
    }

    /// The standard scenario checked up to `r^2`.
    pub fn negative_control() -> Result<Self> {
        Ok(ShrinkSetup {
            horizon_exponent: 2.0,
            ..Self::standard()?
        })
    }
}

/// Largest `u` on `B_{r/2}` over the run, and the first time it became
/// nonnegative, if any.
fn shrink_trial(setup: &ShrinkSetup, r: f64) -> Result<(f64, Option<f64>)> {
    let p = setup.params;
    if !(setup.u_far > 0.0 && setup.u_far <= p.nu && setup.exterior_slope > 0.0) {
        return Err(Error::InvalidParameter(
            "shrink check needs 0 < u_far <= nu and a positive slope".into(),
        ));
    }
    let grid = Grid::radial(setup.dim, 4.0 * r, 4 * setup.cells_per_radius)?;
    let rho0 = Field::from_fn(grid, 0.0, |x| {
        if x < r {
            1.0
        } else {
            1.0 - setup.u_far.min(setup.exterior_slope * (x - r)) / p.nu
        }
    })?;
    let state = project_initial_data(&rho0, &p, Boundaries::far_field(setup.u_far))?;
    let horizon = r.powf(setup.horizon_exponent);
    let mut worst = f64::NEG_INFINITY;
    let mut lost = None;
    watch_run(state, horizon / setup.steps as f64, horizon, |s| {
        let top = max_in_ball(&s.u, 0.5 * r);
        worst = worst.max(top);
        if top >= 0.0 && lost.is_none() {
            lost = Some(s.time());
        }
        true
    })?;
    Ok((worst, lost))
}

/// Checks that `B_{r/2}` stays in the elliptic phase up to the horizon for
/// every `r`. Reports `c_0`, the largest tested `r` below which every trial
/// passed.
pub fn shrink_speed_check(setup: &ShrinkSetup) -> Result<LemmaCheckResult> {
    let results = setup
        .r_values
        .par_iter()
        .map(|&r| shrink_trial(setup, r))
        .collect::<Result<Vec<_>>>()?;
    let mut trials = Vec::new();
    for (i, (&r, &(worst, lost))) in setup.r_values.iter().zip(&results).enumerate() {
        trials.push(TrialRecord {
            trial: i,
            label: format!("max u on B_(r/2) up to r^{} (r={r})", setup.horizon_exponent),
            parameter: r,
            measured: worst,
            bound: 0.0,
            pass: lost.is_none() && worst < 0.0,
        });
    }
    let mut order: Vec<usize> = (0..setup.r_values.len()).collect();
    order.sort_by(|&a, &b| setup.r_values[a].total_cmp(&setup.r_values[b]));
    let mut c0 = 0.0;
    for i in order {
        if !trials[i].pass {
            break;
        }
        c0 = setup.r_values[i];
    }
    let first_loss = results
        .iter()
        .filter_map(|(_, l)| *l)
        .fold(f64::INFINITY, f64::min);
    Ok(LemmaCheckResult::from_trials(
        LemmaId::ShrinkSpeed,
        vec![("c_0".into(), c0), ("first_loss_time".into(), first_loss)],
        trials,
    ))
}

// ---------------------------------------------------------------------------
// expansion

/// A hole `B_{3r}` with `u = level` inside a saturated annulus
/// `[3r, 6r]` (projected pressure, no-flux outer end). `B_{r/2}` must stay
/// in the parabolic phase up to `r^3`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionSetup {
    pub params: ModelParams,
    pub dim: u32,
    pub r_values: Vec<f64>,
    /// Value of `u` in the hole; the hypothesis needs `level > r`.
    pub level: f64,
    pub cells_per_radius: usize,
    pub steps: usize,
}

impl ExpansionSetup {
    pub fn standard(params: ModelParams) -> Self {
        ExpansionSetup {
            params,
            dim: 2,
            r_values: vec![0.2, 0.1],
            level: params.nu,
            cells_per_radius: 50,
            steps: 400,
        }
    }
}

fn expansion_initial(setup: &ExpansionSetup, r: f64) -> Result<LimitState> {
    let p = setup.params;
    if !(setup.level <= p.nu) {
        return Err(Error::InvalidParameter(format!(
            "hole level {} exceeds nu = {}",
            setup.level, p.nu
        )));
    }
    let grid = Grid::radial(setup.dim, 6.0 * r, 6 * setup.cells_per_radius)?;
    let rho0 = Field::from_fn(grid, 0.0, |x| if x < 3.0 * r { 1.0 - setup.level / p.nu } else { 1.0 })?;
    project_initial_data(&rho0, &p, Boundaries::new(Bc::ZeroFlux, Bc::ZeroFlux))
}

/// Checks that `B_{r/2}` stays positive up to `r^3` for each `r`. Scenarios
/// violating `u > r` on `B_r` or `u > 0` on `B_{3r}` are reported as
/// hypothesis-not-met and not run.
pub fn expansion_bound_check(setup: &ExpansionSetup) -> Result<LemmaCheckResult> {
    let mut trials = Vec::new();
    let mut hypothesis_ok = true;
    for (i, &r) in setup.r_values.iter().enumerate() {
        let state = expansion_initial(setup, r)?;
        let met = min_in_ball(&state.u, r) > r && min_in_ball(&state.u, 3.0 * r) > 0.0;
        if !met {
            hypothesis_ok = false;
            trials.push(TrialRecord {
                trial: i,
                label: format!("hypothesis u > r on B_r (r={r})"),
                parameter: r,
                measured: min_in_ball(&state.u, r),
                bound: r,
                pass: false,
            });
            continue;
        }
        let horizon = r.powi(3);
        let mut worst = f64::INFINITY;
        watch_run(state, horizon / setup.steps as f64, horizon, |s| {
            worst = worst.min(min_in_ball(&s.u, 0.5 * r));
            true
        })?;
        trials.push(TrialRecord {
            trial: i,
            label: format!("min u on B_(r/2) up to r^3 (r={r})"),
            parameter: r,
            measured: worst,
            bound: 0.0,
            pass: worst > 0.0,
        });
    }
    let mut result = LemmaCheckResult::from_trials(LemmaId::ExpansionBound, Vec::new(), trials);
    if !hypothesis_ok {
        result.outcome = Outcome::HypothesisNotMet;
    }
    Ok(result)
}

// ---------------------------------------------------------------------------
// initial motion

#[derive(Debug, Clone, PartialEq)]
pub struct InitialMotionSetup {
    pub params: ModelParams,
    pub grid: Grid,
    pub preset: Preset,
    pub t_samples: Vec<f64>,
    /// Steps per smallest sample time.
    pub steps_per_sample: usize,
}

impl InitialMotionSetup {
    pub fn standard(params: ModelParams) -> Result<Self> {
        Ok(InitialMotionSetup {
            params,
            grid: Grid::radial(2, 2.0, 800)?,
            preset: Preset::RadialTumor {
                radius: 0.5,
                width: 0.5,
                rho_out: 0.2,
            },
            t_samples: vec![1e-4, 1e-3, 1e-2],
            steps_per_sample: 10,
        })
    }
}

/// Largest distance from a current free-boundary point to the initial
/// free boundary.
fn displacement(initial: &[f64], now: &[f64]) -> f64 {
    now.iter()
        .map(|x| initial.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Checks `displacement(t) < t^(1/3)` at each sample and, when every
/// displacement is positive, that the log-log slope of displacement against
/// `t` is at least `1/3`. Reports `t_0`, the largest sample obeying the bound.
pub fn initial_motion_check(setup: &InitialMotionSetup) -> Result<LemmaCheckResult> {
    let mut samples = setup.t_samples.clone();
    samples.sort_by(f64::total_cmp);
    if samples.first().is_none_or(|&t| !(t > 0.0)) {
        return Err(Error::InvalidParameter("need positive sample times".into()));
    }
    let p = setup.params;
    let rho0 = setup.preset.density(setup.grid, p.nu)?;
    let state = project_initial_data(&rho0, &p, limit_boundaries(&setup.grid, &p))?;
    let start = state.free_boundary().positions;
    let dt = samples[0] / setup.steps_per_sample as f64;
    let mut stepper = LimitStepper::for_state(&state);
    let mut run = LimitRun::default();
    let mut state = state;
    let mut disp = Vec::new();
    for &t in &samples {
        state = stepper.advance_to(state, t, dt, &mut run)?;
        disp.push(displacement(&start, &state.free_boundary().positions));
    }
    let mut trials = Vec::new();
    let mut t0 = 0.0;
    let mut holding = true;
    for (i, (&t, &d)) in samples.iter().zip(&disp).enumerate() {
        let bound = t.powf(1.0 / 3.0);
        holding &= d < bound;
        if holding {
            t0 = t;
        }
        trials.push(TrialRecord {
            trial: i,
            label: format!("displacement at t={t:e}"),
            parameter: t,
            measured: d,
            bound,
            pass: d < bound,
        });
    }
    let mut fitted = vec![("t_0".into(), t0)];
    if disp.iter().all(|&d| d > 0.0) && disp.len() >= 2 {
        let slope = log_log_slope(&samples, &disp);
        fitted.push(("loglog_slope".into(), slope));
        trials.push(TrialRecord {
            trial: samples.len(),
            label: "log-log slope of displacement".into(),
            parameter: f64::NAN,
            measured: slope,
            bound: 1.0 / 3.0,
            pass: slope >= 1.0 / 3.0,
        });
    }
    Ok(LemmaCheckResult::from_trials(LemmaId::InitialMotion, fitted, trials))
}
