//! Pressure build-up after two density bumps merge.
//!
//! The density is scanned on a fine time lattice. Once the center density
//! first exceeds [`SATURATION`], the pressure there is compared with the
//! elliptic profile `-w'' = G(w)` on the saturated interval around the center,
//! `w = 0` at its ends.

use crate::elliptic::solve_pressure_profile;
use crate::error::{Error, Result};
use crate::grid::{Bc, Boundaries, Field, Grid};
use crate::model::{GrowthLaw, ModelParams};
use crate::pme::{lateral_boundaries, prepare_initial_density, PmeState, PmeStepper, Scheme, TimeStep};
use crate::presets::Preset;

pub const SATURATION: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoBumpScenario {
    pub params: ModelParams,
    pub grid: Grid,
    pub preset: Preset,
    pub dt: f64,
    /// Spacing of the saturation scan.
    pub scan_step: f64,
    pub t_max: f64,
    /// Window after saturation within which the pressure must build.
    pub window: f64,
    /// Center pressure at saturation must stay below `onset_fraction p_M`.
    pub onset_fraction: f64,
    /// Required fraction of the matched profile's center value.
    pub build_fraction: f64,
    /// Cells of the matched elliptic solve.
    pub profile_cells: usize,
}

impl TwoBumpScenario {
    /// `m = 20`, `nu = 0.5`, `G(p) = 10 (1 - p / 10)`, two bumps on `[-2, 2]`.
    pub fn standard() -> Result<Self> {
        let growth = GrowthLaw::affine(10.0, 10.0)?;
        Ok(TwoBumpScenario {
            params: ModelParams::new(20.0, 0.5, growth, 0.0, growth.p_max())?,
            grid: Grid::cartesian(-2.0, 2.0, 400)?,
            preset: Preset::by_name("two-bump")?,
            dt: 2e-4,
            scan_step: 2e-3,
            t_max: 1.0,
            window: 0.05,
            onset_fraction: 0.2,
            build_fraction: 0.5,
            profile_cells: 400,
        })
    }

    pub fn initial_state(&self) -> Result<PmeState> {
        let rho0 = self.preset.density(self.grid, self.params.nu)?;
        PmeState::new(
            prepare_initial_density(&rho0, &self.params)?,
            self.params,
            lateral_boundaries(&self.grid, self.params.rho_l),
        )
    }

    /// The state after the initial one at each of `times`, with the same
    /// stepping as the scan.
    pub fn snapshots(&self, times: &[f64]) -> Result<Vec<PmeState>> {
        let mut state = self.initial_state()?;
        let mut stepper = PmeStepper::for_state(&state);
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            state = stepper.advance_to(state, t, TimeStep::Fixed(self.dt), Scheme::Implicit)?;
            out.push(state.clone());
        }
        Ok(out)
    }

    pub fn run(&self) -> Result<TwoBumpReport> {
        if !(self.scan_step > 0.0 && self.window > 0.0 && self.t_max > 0.0) {
            return Err(Error::InvalidParameter(
                "scan step, window and horizon must be positive".into(),
            ));
        }
        let p_max = self.params.growth.p_max();
        let mut state = self.initial_state()?;
        let mut stepper = PmeStepper::for_state(&state);
        let mut saturation: Option<(f64, f64)> = None;
        let mut build = None;
        let mut k = 0;
        while state.time() < self.t_max {
            k += 1;
            let t = (k as f64 * self.scan_step).min(self.t_max);
            state = stepper.advance_to(state, t, TimeStep::Fixed(self.dt), Scheme::Implicit)?;
            let center_rho = state.rho.sample(0.0);
            let center_p = state.pressure().sample(0.0);
            match saturation {
                None if center_rho > SATURATION => saturation = Some((t, center_p)),
                None => {}
                Some((t1, _)) if t > t1 + self.window * (1.0 + 1e-12) => break,
                Some(_) => {
                    let matched = self.matched_center(&state.rho)?;
                    if center_p > self.build_fraction * matched {
                        build = Some((t, center_p, matched));
                        break;
                    }
                }
            }
        }
        let (t_saturated, onset_pressure) = saturation.unwrap_or((f64::NAN, f64::NAN));
        Ok(TwoBumpReport {
            p_max,
            t_saturated,
            onset_pressure,
            onset_pass: onset_pressure < self.onset_fraction * p_max,
            build,
            window: self.window,
        })
    }

    /// Center value of `-w'' = G(w)` on the component of `{rho >= SATURATION}`
    /// containing the origin, with `w = 0` at the interpolated ends.
    pub fn matched_center(&self, rho: &Field) -> Result<f64> {
        let (a, b) = saturated_interval(rho).ok_or_else(|| {
            Error::InvalidParameter("the center is not saturated".into())
        })?;
        let g = Grid::cartesian(a, b, self.profile_cells)?;
        let bc = Boundaries::new(Bc::Dirichlet(0.0), Bc::Dirichlet(0.0));
        let w = solve_pressure_profile(&g, bc, self.params.growth)?;
        Ok(Field::new(g, w, 0.0)?.sample(0.0))
    }
}

/// Interval `[a, b]` around the origin on which `rho >= SATURATION`, with
/// ends located by linear interpolation.
fn saturated_interval(rho: &Field) -> Option<(f64, f64)> {
    let x = rho.grid.centers();
    let v = &rho.values;
    let c = rho.grid.locate(0.0);
    if v[c] < SATURATION {
        return None;
    }
    let cross = |i: usize, j: usize| {
        let s = (SATURATION - v[i]) / (v[j] - v[i]);
        x[i] + s * (x[j] - x[i])
    };
    let mut l = c;
    while l > 0 && v[l - 1] >= SATURATION {
        l -= 1;
    }
    let a = if l == 0 { rho.grid.x_min } else { cross(l - 1, l) };
    let mut r = c;
    while r + 1 < v.len() && v[r + 1] >= SATURATION {
        r += 1;
    }
    let b = if r + 1 == v.len() { rho.grid.x_max } else { cross(r, r + 1) };
    Some((a, b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoBumpReport {
    pub p_max: f64,
    /// First scan time with center density above [`SATURATION`]; `NaN` if never.
    pub t_saturated: f64,
    pub onset_pressure: f64,
    pub onset_pass: bool,
    /// First `(time, center pressure, matched center value)` within the
    /// window at which the pressure reached the required fraction.
    pub build: Option<(f64, f64, f64)>,
    pub window: f64,
}

impl TwoBumpReport {
    pub fn pass(&self) -> bool {
        self.onset_pass && self.build.is_some()
    }

    /// Four snapshot times: before and at saturation, then one and four
    /// windows later.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let t1 = self.t_saturated;
        vec![0.5 * t1, t1, t1 + self.window, t1 + 4.0 * self.window]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_interpolates_ends() {
        let g = Grid::cartesian(-1.0, 1.0, 20).unwrap();
        let rho = Field::from_fn(g, 0.0, |x| 1.0 - 0.02 * x.abs() / 0.5).unwrap();
        let (a, b) = saturated_interval(&rho).unwrap();
        assert!((a + 0.25).abs() < 1e-12 && (b - 0.25).abs() < 1e-12, "{a} {b}");
        let low = Field::constant(g, 0.5, 0.0);
        assert!(saturated_interval(&low).is_none());
    }

    #[test]
    fn matched_profile_matches_cosh() {
        let s = TwoBumpScenario::standard().unwrap();
        let g = Grid::cartesian(-1.0, 1.0, 40).unwrap();
        let rho = Field::from_fn(g, 0.0, |x| if x.abs() < 0.5 { 1.0 } else { 0.98 }).unwrap();
        let w0 = s.matched_center(&rho).unwrap();
        // k = 1, half-width 0.5 (ends fall mid-way between cells)
        let exact = 10.0 * (1.0 - 1.0 / 0.5_f64.cosh());
        assert!((w0 - exact).abs() < 1e-3 * exact, "{w0} vs {exact}");
    }
}
