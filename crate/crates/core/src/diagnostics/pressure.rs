use rayon::prelude::*;

use super::{LemmaCheckResult, LemmaId, TrialRecord};
use crate::error::{Error, Result};
use crate::grid::{Boundaries, Field, Grid};
use crate::model::{density_of_pressure, ModelParams};
use crate::pme::{PmeState, PmeStepper, Scheme, TimeStep};

/// Overshoot decay of the pressure maximum. The initial pressure is
/// `factor p_M exp(-(x / 0.3)^2)` on `[-1, 1]` with no-flux ends.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureBoundSetup {
    pub params: ModelParams,
    pub grid: Grid,
    /// Two or more increasing exponents; the relaxation time must scale as `1/m`.
    pub m_values: Vec<f64>,
    pub factor: f64,
    pub eps: f64,
    pub t_end: f64,
    pub dt: f64,
    /// Required `t_relax <= budget / m`.
    pub budget: f64,
    /// Allowed relative deviation of `t_relax` ratios from `1/m` scaling.
    pub ratio_tolerance: f64,
}

impl PressureBoundSetup {
    pub fn standard(params: ModelParams) -> Result<Self> {
        Ok(PressureBoundSetup {
            params,
            grid: Grid::cartesian(-1.0, 1.0, 200)?,
            m_values: vec![40.0, 80.0],
            factor: 2.0,
            eps: 0.05,
            t_end: 0.5,
            dt: 1e-4,
            budget: 10.0,
            ratio_tolerance: 0.3,
        })
    }
}

/// Time after which `max p_m <= p_M + eps` holds at every step up to
/// `t_end`, and the largest pressure seen after that time.
fn relaxation_time(setup: &PressureBoundSetup, m: f64) -> Result<(f64, f64)> {
    let params = setup.params.with_m(m)?;
    let p_max = params.growth.p_max();
    let level = p_max + setup.eps;
    let peak = setup.factor * p_max;
    let rho = Field::from_fn(setup.grid, 0.0, |x| {
        density_of_pressure(peak * (-(x / 0.3).powi(2)).exp(), m).unwrap_or(0.0)
    })?;
    let mut state = PmeState::new(rho, params, Boundaries::zero_flux())?;
    let mut stepper = PmeStepper::for_state(&state);
    let max_p = |s: &PmeState| s.pressure().max();
    let mut t_relax = if max_p(&state) <= level { 0.0 } else { f64::NAN };
    let mut after = max_p(&state);
    while state.time() < setup.t_end {
        let target = (state.time() + setup.dt).min(setup.t_end);
        state = stepper.advance_to(state, target, TimeStep::Fixed(setup.dt), Scheme::Implicit)?;
        let p = max_p(&state);
        if p > level {
            t_relax = f64::NAN;
        } else if t_relax.is_nan() {
            t_relax = state.time();
            after = p;
        }
        if !t_relax.is_nan() {
            after = after.max(p);
        }
    }
    Ok((t_relax, after))
}

/// Checks that the pressure maximum falls below `p_M + eps` within
/// `budget / m` and stays there, and that the relaxation time scales like
/// `1/m` across consecutive exponents. Reports `K = max m t_relax`.
pub fn pressure_bound_check(setup: &PressureBoundSetup) -> Result<LemmaCheckResult> {
    if setup.m_values.is_empty() || !(setup.factor >= 1.0) || !(setup.eps > 0.0) {
        return Err(Error::InvalidParameter(
            "pressure bound check needs m values, factor >= 1 and eps > 0".into(),
        ));
    }
    let measured = setup
        .m_values
        .par_iter()
        .map(|&m| relaxation_time(setup, m))
        .collect::<Result<Vec<_>>>()?;

    let mut trials = Vec::new();
    let mut k_fit = 0.0_f64;
    for (i, (&m, &(t_relax, after))) in setup.m_values.iter().zip(&measured).enumerate() {
        k_fit = k_fit.max(m * t_relax);
        trials.push(TrialRecord {
            trial: i,
            label: format!("t_relax(m={m})"),
            parameter: m,
            measured: t_relax,
            bound: setup.budget / m,
            pass: t_relax <= setup.budget / m,
        });
        trials.push(TrialRecord {
            trial: i,
            label: format!("max p after t_relax (m={m})"),
            parameter: m,
            measured: after,
            bound: setup.params.growth.p_max() + setup.eps,
            pass: after <= setup.params.growth.p_max() + setup.eps,
        });
    }
    let offset = trials.len();
    for (j, w) in setup.m_values.windows(2).enumerate() {
        let expected = w[0] / w[1];
        let ratio = measured[j + 1].0 / measured[j].0;
        trials.push(TrialRecord {
            trial: offset + j,
            label: format!("t_relax ratio m={} / m={}", w[1], w[0]),
            parameter: expected,
            measured: ratio,
            bound: setup.ratio_tolerance,
            pass: (ratio / expected - 1.0).abs() <= setup.ratio_tolerance,
        });
    }
    Ok(LemmaCheckResult::from_trials(
        LemmaId::PressureBound,
        vec![("K".into(), k_fit)],
        trials,
    ))
}
