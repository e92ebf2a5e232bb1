use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::interface::sublevel_hausdorff;
use crate::limit::{limit_boundaries, limit_run, project_initial_data};
use crate::model::{GrowthLaw, ModelParams};
use crate::pme::{lateral_boundaries, pme_run, prepare_initial_density, PmeState, Scheme, StepControl, TimeStep};
use crate::presets::Preset;

/// Snapshot comparisons before `STARTUP_WINDOW / m` are skipped.
pub const STARTUP_WINDOW: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub m_values: Vec<f64>,
    pub times: Vec<f64>,
    /// Max over compared snapshots of `|rho_m - (1 - b(u) / nu)|_inf`.
    pub errors: Vec<f64>,
    /// Max over compared snapshots of the Hausdorff distance between
    /// `{u_m <= 0}` and `{u <= 0}`.
    pub hausdorff: Vec<f64>,
    /// Per `m`, per snapshot; `NaN` inside the startup window.
    pub error_series: Vec<Vec<f64>>,
    pub hausdorff_series: Vec<Vec<f64>>,
    /// Half a cell: the resolution of the sublevel-set distance.
    pub quantization: f64,
}

impl ConvergenceReport {
    pub fn errors_strictly_decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }

    pub fn hausdorff_decreasing(&self) -> bool {
        self.hausdorff.windows(2).all(|w| w[1] <= w[0])
    }

    /// `error(last m) / error(first m)`.
    pub fn error_ratio(&self) -> f64 {
        self.errors[self.errors.len() - 1] / self.errors[0]
    }
}

/// Runs the density equation for every `m` from the well-prepared data and
/// the limit problem once from the projected data, then compares them at
/// the shared snapshot times. Both solvers use `control`; the limit solver
/// needs a fixed `dt`.
pub fn convergence_study(
    rho0: &Field,
    template: &ModelParams,
    m_values: &[f64],
    control: &StepControl,
) -> Result<ConvergenceReport> {
    if m_values.len() < 2 || m_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "need at least two increasing m values".into(),
        ));
    }
    control.validate()?;
    let grid = rho0.grid;
    let limit0 = project_initial_data(rho0, template, limit_boundaries(&grid, template))?;
    let limit = limit_run(&limit0, control)?;

    let per_m = m_values
        .par_iter()
        .map(|&m| -> Result<(Vec<f64>, Vec<f64>)> {
            let params = template.with_m(m)?;
            let start = PmeState::new(
                prepare_initial_density(rho0, &params)?,
                params,
                lateral_boundaries(&grid, params.rho_l),
            )?;
            let snaps = pme_run(&start, control)?;
            let mut err = Vec::new();
            let mut hd = Vec::new();
            for (a, b) in snaps.iter().zip(&limit.snapshots) {
                if a.time() < STARTUP_WINDOW / m {
                    err.push(f64::NAN);
                    hd.push(f64::NAN);
                } else {
                    err.push(a.rho.sup_distance(&b.density()));
                    hd.push(sublevel_hausdorff(&a.u(), &b.u));
                }
            }
            Ok((err, hd))
        })
        .collect::<Result<Vec<_>>>()?;

    let max_finite = |v: &[f64]| v.iter().filter(|x| !x.is_nan()).fold(0.0_f64, |a, &b| a.max(b));
    let (error_series, hausdorff_series): (Vec<_>, Vec<_>) = per_m.into_iter().unzip();
    Ok(ConvergenceReport {
        m_values: m_values.to_vec(),
        times: control.snapshot_times.clone(),
        errors: error_series.iter().map(|e| max_finite(e)).collect(),
        hausdorff: hausdorff_series.iter().map(|h| max_finite(h)).collect(),
        error_series,
        hausdorff_series,
        quantization: 0.5 * grid.dx(),
    })
}

/// A radially symmetric tumor whose saturated core is surrounded by a
/// smooth density ramp, compared for `m in {10, 20, 40, 80}` up to `T = 0.5`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceScenario {
    pub grid: Grid,
    pub preset: Preset,
    pub params: ModelParams,
    pub m_values: Vec<f64>,
    pub control: StepControl,
}

impl ConvergenceScenario {
    pub fn radial_tumor() -> Result<Self> {
        let rho_out = 0.1;
        let growth = GrowthLaw::affine(2.0, 3.0)?;
        let times = (1..=10).map(|k| 0.05 * k as f64).collect();
        Ok(ConvergenceScenario {
            grid: Grid::radial(2, 2.5, 800)?,
            preset: Preset::RadialTumor {
                radius: 0.6,
                width: 1.0,
                rho_out,
            },
            params: ModelParams::new(10.0, 0.5, growth, rho_out, growth.p_max())?,
            m_values: vec![10.0, 20.0, 40.0, 80.0],
            control: StepControl::new(TimeStep::Fixed(1e-3), 0.5, times, Scheme::Implicit)?,
        })
    }

    pub fn run(&self) -> Result<ConvergenceReport> {
        let rho0 = self.preset.density(self.grid, self.params.nu)?;
        convergence_study(&rho0, &self.params, &self.m_values, &self.control)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_has_zero_errors() {
        let grid = Grid::cartesian(-1.0, 1.0, 40).unwrap();
        let params = ModelParams::new(10.0, 0.5, GrowthLaw::affine(1.0, 1.0).unwrap(), 0.0, 1.0).unwrap();
        let ctl = StepControl::uniform(TimeStep::Fixed(1e-2), 0.1, 5, Scheme::Implicit).unwrap();
        let rho0 = Field::constant(grid, 0.0, 0.0);
        let r = convergence_study(&rho0, &params, &[10.0, 20.0], &ctl).unwrap();
        assert_eq!(r.errors, vec![0.0, 0.0]);
        assert_eq!(r.hausdorff, vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_single_m() {
        let grid = Grid::cartesian(-1.0, 1.0, 4).unwrap();
        let params = ModelParams::new(10.0, 0.5, GrowthLaw::affine(1.0, 1.0).unwrap(), 0.0, 1.0).unwrap();
        let ctl = StepControl::uniform(TimeStep::Fixed(1e-2), 0.1, 1, Scheme::Implicit).unwrap();
        let rho0 = Field::constant(grid, 0.0, 0.0);
        assert!(convergence_study(&rho0, &params, &[10.0], &ctl).is_err());
    }
}
