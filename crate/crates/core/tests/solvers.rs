use stiff_pressure_lab::interface::extract_free_boundary;
use stiff_pressure_lab::pme::{lateral_boundaries, prepare_initial_density};
use stiff_pressure_lab::*;

fn params(m: f64) -> ModelParams {
    ModelParams::new(m, 0.5, GrowthLaw::affine(1.0, 1.0).unwrap(), 0.0, 1.0).unwrap()
}

/// Classical RK4 for `rho' = rho G(p(rho))` with a fine step.
fn uniform_ode(p: &ModelParams, rho0: f64, t_end: f64) -> f64 {
    let f = |r: f64| {
        let pressure = p.m / (p.m - 1.0) * r.powf(p.m - 1.0);
        r * p.growth.evaluate(pressure)
    };
    let n = 20_000;
    let h = t_end / n as f64;
    let mut r = rho0;
    for _ in 0..n {
        let k1 = f(r);
        let k2 = f(r + 0.5 * h * k1);
        let k3 = f(r + 0.5 * h * k2);
        let k4 = f(r + h * k3);
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    r
}

#[test]
fn uniform_density_follows_scalar_ode() {
    let p = params(20.0);
    let grid = Grid::cartesian(0.0, 1.0, 8).unwrap();
    for rho0 in [0.3, 0.8, 0.95] {
        let exact = uniform_ode(&p, rho0, 0.2);
        for scheme in [Scheme::Explicit, Scheme::Implicit] {
            let s = PmeState::new(Field::constant(grid, rho0, 0.0), p, Boundaries::zero_flux()).unwrap();
            let ctl = StepControl::new(TimeStep::Fixed(1e-5), 0.2, vec![0.2], scheme).unwrap();
            let out = pme_run(&s, &ctl).unwrap();
            for v in &out[0].rho.values {
                let rel = (v - exact).abs() / exact;
                assert!(rel < 1e-4, "rho0 {rho0} {scheme:?}: {v} vs {exact} ({rel:.2e})");
            }
        }
    }
}

#[test]
fn single_bump_agrees_with_refined_grid() {
    let p = params(20.0);
    let run = |n: usize| {
        let grid = Grid::cartesian(-1.5, 1.5, n).unwrap();
        let rho0 = Field::from_fn(grid, 0.0, |x| 0.9 * (-(x / 0.4).powi(2)).exp()).unwrap();
        let s = PmeState::new(prepare_initial_density(&rho0, &p).unwrap(), p, lateral_boundaries(&grid, 0.0)).unwrap();
        let ctl = StepControl::new(TimeStep::Auto, 0.1, vec![0.1], Scheme::Explicit).unwrap();
        pme_run(&s, &ctl).unwrap().pop().unwrap().rho
    };
    let coarse = run(400);
    let fine = run(1600);
    // cell averages of the reference over each coarse cell
    let err = coarse
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| (v - fine.values[4 * i..4 * i + 4].iter().sum::<f64>() / 4.0).abs())
        .fold(0.0, f64::max);
    assert!(err <= 2e-2, "sup error {err:.3e}");
}

#[test]
fn vacuum_limit_run_has_no_boundary() {
    let p = params(20.0);
    let grid = Grid::cartesian(-1.0, 1.0, 50).unwrap();
    let s = LimitState::new(Field::constant(grid, p.nu, 0.0), p, Boundaries::far_field(p.nu)).unwrap();
    let ctl = StepControl::uniform(TimeStep::Fixed(1e-2), 0.2, 4, Scheme::Implicit).unwrap();
    let run = limit_run(&s, &ctl).unwrap();
    assert!(run.boundaries.iter().all(|b| b.is_empty()));
    assert!(run.jumps.is_empty());
}

#[test]
fn uniform_limit_matches_closed_form_then_jumps() {
    let p = params(20.0);
    let (c, dt) = (0.1, 1e-4);
    let grid = Grid::cartesian(0.0, 1.0, 8).unwrap();
    let mut s = LimitState::new(Field::constant(grid, c, 0.0), p, Boundaries::zero_flux()).unwrap();
    let t_star = (p.nu / (p.nu - c)).ln();
    // backward Euler error grows like dt t |u''| / 2; 1e-6 holds up to t = 0.02
    while s.time() < 0.02 - 0.5 * dt {
        s = limit_step(&s, dt).unwrap();
        let exact = p.nu - (p.nu - c) * s.time().exp();
        assert!((s.u.values[0] - exact).abs() < 1e-6);
    }
    while s.u.max() > 0.0 {
        s = limit_step(&s, dt).unwrap();
    }
    assert!((s.time() - t_star).abs() <= 2.0 * dt);
    let next = limit_step(&s, dt).unwrap();
    assert!(next.u.values.iter().all(|u| (u + 1.0).abs() < 1e-6));
}

#[test]
fn merging_intervals_lose_two_boundary_points() {
    let p = params(20.0);
    let grid = Grid::cartesian(-2.0, 2.0, 400).unwrap();
    let rho0 = Preset::by_name("merging").unwrap().density(grid, p.nu).unwrap();
    let s = project_initial_data(&rho0, &p, limit_boundaries(&grid, &p)).unwrap();
    assert_eq!(extract_free_boundary(&s.u).len(), 4);
    let ctl = StepControl::new(TimeStep::Fixed(1e-3), 0.3, vec![0.05, 0.1, 0.2, 0.3], Scheme::Implicit).unwrap();
    let run = limit_run(&s, &ctl).unwrap();
    let counts: Vec<usize> = run.boundaries.iter().map(|b| b.len()).collect();
    assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
    assert_eq!(*counts.last().unwrap(), 2, "{counts:?}");
}

#[test]
fn radial_tumor_density_approaches_limit() {
    let scenario = diagnostics::ConvergenceScenario {
        grid: Grid::radial(2, 2.5, 200).unwrap(),
        m_values: vec![10.0, 40.0],
        control: StepControl::uniform(TimeStep::Fixed(2e-3), 0.5, 5, Scheme::Implicit).unwrap(),
        ..diagnostics::ConvergenceScenario::radial_tumor().unwrap()
    };
    let r = scenario.run().unwrap();
    assert!(r.errors[1] < r.errors[0], "{:?}", r.errors);
}
