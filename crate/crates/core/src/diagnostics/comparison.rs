//! Ordering of discrete solutions from ordered random data.
//!
//! Trial `k` draws from `ChaCha8Rng` seeded with `seed` on stream `k`, so
//! every trial is reproducible on its own and independent of thread
//! scheduling. A random radial profile is a clamped sum of three Gaussian
//! bumps with uniformly drawn centers, widths and amplitudes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{LemmaCheckResult, LemmaId, TrialRecord};
use crate::error::Result;
use crate::grid::{Boundaries, Field, Grid};
use crate::limit::{LimitRun, LimitState, LimitStepper};
use crate::model::{b_graph, ModelParams};
use crate::pme::{PmeState, PmeStepper, Scheme};

/// Allowed violation of the ordering.
pub const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSetup {
    pub params: ModelParams,
    pub grid: Grid,
    pub n_trials: usize,
    pub seed: u64,
    pub delta: f64,
    pub pme_t_end: f64,
    pub limit_t_end: f64,
    pub limit_dt: f64,
    pub snapshots: usize,
}

impl ComparisonSetup {
    pub fn standard(params: ModelParams, seed: u64) -> Result<Self> {
        Ok(ComparisonSetup {
            params,
            grid: Grid::radial(2, 1.5, 100)?,
            n_trials: 20,
            seed,
            delta: 1e-3,
            pme_t_end: 0.05,
            limit_t_end: 0.2,
            limit_dt: 1e-3,
            snapshots: 5,
        })
    }

    fn snapshot_times(&self, t_end: f64) -> Vec<f64> {
        (1..=self.snapshots)
            .map(|k| t_end * k as f64 / self.snapshots as f64)
            .collect()
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn random_profile(rng: &mut ChaCha8Rng, grid: &Grid) -> Vec<f64> {
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(grid.x_min..grid.x_max),
                rng.gen_range(0.05..0.4) * (grid.x_max - grid.x_min),
                rng.gen_range(0.0..1.0),
            )
        })
        .collect();
    grid.centers()
        .iter()
        .map(|&x| {
            bumps
                .iter()
                .map(|&(c, w, a)| a * (-((x - c) / w).powi(2)).exp())
                .sum::<f64>()
        })
        .collect()
}

/// Smallest `b - a` over all cells.
fn min_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| y - x).fold(f64::INFINITY, f64::min)
}

/// Density pair `rho_a <= rho_b`, both in `[0, 1]`. The explicit scheme is
/// run with a shared step, the smaller of the two monotone limits.
fn pme_trial(setup: &ComparisonSetup, trial: usize) -> Result<f64> {
    let mut rng = trial_rng(setup.seed, trial);
    let base = random_profile(&mut rng, &setup.grid);
    let extra = random_profile(&mut rng, &setup.grid);
    let rho_a: Vec<f64> = base.iter().map(|v| (v - setup.delta).clamp(0.0, 1.0)).collect();
    let rho_b: Vec<f64> = base
        .iter()
        .zip(&extra)
        .map(|(v, e)| (v + setup.delta + 0.2 * e).clamp(0.0, 1.0))
        .collect();
    let bc = Boundaries::zero_flux();
    let mut a = PmeState::new(Field::new(setup.grid, rho_a, 0.0)?, setup.params, bc)?;
    let mut b = PmeState::new(Field::new(setup.grid, rho_b, 0.0)?, setup.params, bc)?;
    let mut sa = PmeStepper::for_state(&a);
    let mut sb = PmeStepper::for_state(&b);
    let mut worst = min_gap(&a.rho.values, &b.rho.values);
    for t in setup.snapshot_times(setup.pme_t_end) {
        while a.time() < t {
            let dt = sa
                .stable_dt(&a.rho.values)
                .min(sb.stable_dt(&b.rho.values))
                .min(t - a.time());
            a = sa.step(&a, dt, Scheme::Explicit)?;
            b = sb.step(&b, dt, Scheme::Explicit)?;
            worst = worst.min(min_gap(&a.rho.values, &b.rho.values));
        }
    }
    Ok(worst)
}

/// Limit pair `u_a <= u_b - delta` with values in `[-p_M, nu]`.
fn limit_trial(setup: &ComparisonSetup, trial: usize) -> Result<f64> {
    let mut rng = trial_rng(setup.seed, setup.n_trials + trial);
    let p = setup.params;
    let lo = -p.growth.p_max();
    let span = p.nu - lo;
    let base = random_profile(&mut rng, &setup.grid);
    let extra = random_profile(&mut rng, &setup.grid);
    let u_b: Vec<f64> = base.iter().map(|v| (p.nu - span * v.min(1.0)).max(lo)).collect();
    let u_a: Vec<f64> = u_b
        .iter()
        .zip(&extra)
        .map(|(v, e)| v - setup.delta - 0.2 * span * e.min(1.0))
        .collect();
    let bc = Boundaries::zero_flux();
    let a = LimitState::new(Field::new(setup.grid, u_a, 0.0)?, p, bc)?;
    let b = LimitState::new(Field::new(setup.grid, u_b, 0.0)?, p, bc)?;
    ordered_limit_gap(a, b, &setup.snapshot_times(setup.limit_t_end), setup.limit_dt)
}

/// Smallest `u_b - u_a` at the initial time and every snapshot.
fn ordered_limit_gap(a: LimitState, b: LimitState, times: &[f64], dt: f64) -> Result<f64> {
    let mut sa = LimitStepper::for_state(&a);
    let mut sb = LimitStepper::for_state(&b);
    let (mut ra, mut rb) = (LimitRun::default(), LimitRun::default());
    let mut worst = min_gap(&a.u.values, &b.u.values);
    let (mut a, mut b) = (a, b);
    for &t in times {
        a = sa.advance_to(a, t, dt, &mut ra)?;
        b = sb.advance_to(b, t, dt, &mut rb)?;
        worst = worst.min(min_gap(&a.u.values, &b.u.values));
    }
    Ok(worst)
}

/// Uniform data `c_a < c_b` in `(0, nu)`: only the smaller one has
/// nucleated at the first snapshot. Returns the smallest `b(u_b) - b(u_a)`
/// and whether the designed nucleation order was observed.
fn nucleation_pair(setup: &ComparisonSetup) -> Result<(f64, bool)> {
    let p = setup.params;
    let g = Grid::cartesian(0.0, 1.0, 8)?;
    let (ca, cb) = (0.2 * p.nu, 0.4 * p.nu);
    let hit = |c: f64| (p.nu / (p.nu - c)).ln() / p.growth.g0();
    let t_first = 0.5 * (hit(ca) + hit(cb));
    let dt = 1e-2 * hit(ca);
    let bc = Boundaries::zero_flux();
    let mut a = LimitState::new(Field::constant(g, ca, 0.0), p, bc)?;
    let mut b = LimitState::new(Field::constant(g, cb, 0.0), p, bc)?;
    let mut sa = LimitStepper::for_state(&a);
    let mut sb = LimitStepper::for_state(&b);
    let (mut ra, mut rb) = (LimitRun::default(), LimitRun::default());
    let mut worst = f64::INFINITY;
    let mut designed = false;
    for t in [t_first, 2.0 * hit(cb)] {
        a = sa.advance_to(a, t, dt, &mut ra)?;
        b = sb.advance_to(b, t, dt, &mut rb)?;
        if t == t_first {
            designed = a.u.max() < 0.0 && b.u.min() > 0.0;
        }
        let ba: Vec<f64> = a.u.values.iter().map(|&v| b_graph(v)).collect();
        let bb: Vec<f64> = b.u.values.iter().map(|&v| b_graph(v)).collect();
        worst = worst.min(min_gap(&ba, &bb));
    }
    Ok((worst, designed))
}

/// Runs `n_trials` ordered pairs through each solver plus one designed
/// nucleation pair and checks that no ordering is violated by more than
/// [`SLACK`]. The density equation uses `params.m` with no-flux ends.
pub fn comparison_check(setup: &ComparisonSetup) -> Result<LemmaCheckResult> {
    let pme = (0..setup.n_trials)
        .into_par_iter()
        .map(|k| pme_trial(setup, k))
        .collect::<Result<Vec<_>>>()?;
    let limit = (0..setup.n_trials)
        .into_par_iter()
        .map(|k| limit_trial(setup, k))
        .collect::<Result<Vec<_>>>()?;
    let (nuc_gap, designed) = nucleation_pair(setup)?;

    let mut trials = Vec::new();
    for (solver, gaps) in [("density", &pme), ("limit", &limit)] {
        for (k, &g) in gaps.iter().enumerate() {
            trials.push(TrialRecord {
                trial: trials.len(),
                label: format!("{solver} pair {k}"),
                parameter: k as f64,
                measured: g,
                bound: -SLACK,
                pass: g >= -SLACK,
            });
        }
    }
    trials.push(TrialRecord {
        trial: trials.len(),
        label: "nucleation pair b(u) ordering".into(),
        parameter: f64::NAN,
        measured: nuc_gap,
        bound: -SLACK,
        pass: nuc_gap >= -SLACK && designed,
    });
    let violations = trials.iter().filter(|t| !t.pass).count();
    Ok(LemmaCheckResult::from_trials(
        LemmaId::Comparison,
        vec![
            ("min_gap_density".into(), pme.iter().copied().fold(f64::INFINITY, f64::min)),
            ("min_gap_limit".into(), limit.iter().copied().fold(f64::INFINITY, f64::min)),
            ("violations".into(), violations as f64),
        ],
        trials,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GrowthLaw;

    fn setup() -> ComparisonSetup {
        let p = ModelParams::new(20.0, 0.5, GrowthLaw::affine(1.0, 1.0).unwrap(), 0.0, 1.0).unwrap();
        ComparisonSetup {
            grid: Grid::radial(2, 1.0, 30).unwrap(),
            n_trials: 2,
            pme_t_end: 5e-3,
            limit_t_end: 2e-2,
            ..ComparisonSetup::standard(p, 7).unwrap()
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let s = setup();
        let a = random_profile(&mut trial_rng(3, 1), &s.grid);
        let b = random_profile(&mut trial_rng(3, 1), &s.grid);
        let c = random_profile(&mut trial_rng(3, 2), &s.grid);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn identical_pair_keeps_equality() {
        let s = setup();
        let u = Field::from_fn(s.grid, 0.0, |r| 0.4 - r).unwrap();
        let a = LimitState::new(u.clone(), s.params, Boundaries::zero_flux()).unwrap();
        let gap = ordered_limit_gap(a.clone(), a, &[0.01, 0.02], 1e-3).unwrap();
        assert_eq!(gap, 0.0);
    }

    #[test]
    fn small_suite_has_no_violations() {
        let r = comparison_check(&setup()).unwrap();
        assert!(r.pass(), "{}", r.summary());
    }
}
