//! Acceptance criteria. Runs as a plain binary (`harness = false`), prints
//! one PASS/FAIL line per criterion and exits nonzero if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use stiff_pressure_lab::barriers::{auto_barrier, verify_barrier, BarrierBundle, BarrierKind, PairSpec, RadialProfilePair};
use stiff_pressure_lab::cli::{run_command, Command};
use stiff_pressure_lab::config::parse_config;
use stiff_pressure_lab::diagnostics::{
    comparison_check, expansion_bound_check, initial_motion_check, nucleation_timing_check,
    pressure_bound_check, shrink_speed_check, ComparisonSetup, ConvergenceScenario, ExpansionSetup,
    TwoBumpScenario, InitialMotionSetup, NucleationSetup, PressureBoundSetup, ShrinkSetup,
};
use stiff_pressure_lab::elliptic::solve_pressure_profile;
use stiff_pressure_lab::io::{twin_axis_plot, PlotStyle};
use stiff_pressure_lab::limit::LimitStepper;
use stiff_pressure_lab::pme::PmeStepper;
use stiff_pressure_lab::{
    Bc, Boundaries, Field, Grid, GrowthLaw, LimitState, ModelParams, PmeState, Result, Scheme,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict {
        pass,
        detail: detail.into(),
    })
}

fn lemma_params() -> Result<ModelParams> {
    ModelParams::new(20.0, 0.5, GrowthLaw::affine(1.0, 1.0)?, 0.0, 1.0)
}

fn elliptic_oracle() -> Result<Verdict> {
    let growth = GrowthLaw::affine(1.0, 1.0)?;
    let k = (growth.g0() / growth.p_max()).sqrt();
    let bc = Boundaries::new(Bc::Dirichlet(0.0), Bc::Dirichlet(0.0));
    let mut errors = Vec::new();
    for n in [400, 800, 1600] {
        let grid = Grid::cartesian(-1.0, 1.0, n)?;
        let w = solve_pressure_profile(&grid, bc, growth)?;
        let e = grid
            .centers()
            .iter()
            .zip(&w)
            .map(|(x, v)| (v - growth.p_max() * (1.0 - (k * x).cosh() / k.cosh())).abs())
            .fold(0.0, f64::max);
        errors.push(e);
    }
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    verdict(
        errors[0] <= 1e-3 && orders.iter().all(|&o| o >= 1.9),
        format!("err(400) = {:.3e}, orders {:.3} {:.3}", errors[0], orders[0], orders[1]),
    )
}

fn conservation() -> Result<Verdict> {
    let grid = Grid::cartesian(-1.0, 1.0, 400)?;
    let params = ModelParams::new(20.0, 0.5, GrowthLaw::Zero, 0.0, 2.0)?;
    let rho = Field::from_fn(grid, 0.0, |x| {
        let s = x / 0.6;
        if s.abs() < 1.0 { 0.98 * (1.0 - s * s) } else { 0.0 }
    })?;
    let mut worst: f64 = 0.0;
    for scheme in [Scheme::Explicit, Scheme::Implicit] {
        let mut s = PmeState::new(rho.clone(), params, Boundaries::zero_flux())?;
        let mass0 = s.mass();
        let mut stepper = PmeStepper::for_state(&s);
        for _ in 0..1000 {
            let dt = match scheme {
                Scheme::Explicit => stepper.stable_dt(&s.rho.values),
                _ => 1e-3,
            };
            s = stepper.step(&s, dt, scheme)?;
        }
        worst = worst.max((s.mass() - mass0).abs());
    }
    verdict(worst <= 1e-10, format!("max |mass drift| = {worst:.3e} (explicit and implicit)"))
}

fn pressure_bound() -> Result<Verdict> {
    let r = pressure_bound_check(&PressureBoundSetup::standard(lemma_params()?)?)?;
    verdict(r.pass(), r.summary())
}

fn uniform_nucleation() -> Result<Verdict> {
    let (nu, g0, p_max, c, dt) = (0.5, 1.0, 1.0, 0.1, 1e-4);
    let params = ModelParams::new(20.0, nu, GrowthLaw::affine(g0, p_max)?, 0.0, p_max)?;
    let t_star = (nu / (nu - c)).ln() / g0;
    let grid = Grid::cartesian(0.0, 1.0, 16)?;
    let mut state = LimitState::new(Field::constant(grid, c, 0.0), params, Boundaries::zero_flux())?;
    let mut stepper = LimitStepper::for_state(&state);
    while state.u.max() > 0.0 {
        if state.time() > 2.0 * t_star {
            return verdict(false, "no nucleation before 2 t*");
        }
        state = stepper.step(&state, dt)?;
    }
    let t_hit = state.time();
    let landed = stepper.step(&state, dt)?;
    let dev = landed.u.values.iter().map(|u| (u + p_max).abs()).fold(0.0, f64::max);
    verdict(
        (t_hit - t_star).abs() <= 2.0 * dt && dev <= 1e-6,
        format!("t_hit = {t_hit:.5}, t* = {t_star:.5}, |u + p_M| next step = {dev:.2e}"),
    )
}

fn convergence() -> Result<Verdict> {
    let r = ConvergenceScenario::radial_tumor()?.run()?;
    let fmt = |v: &[f64]| v.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>().join(" ");
    verdict(
        r.errors_strictly_decreasing() && r.error_ratio() < 0.5 && r.hausdorff_decreasing(),
        format!(
            "errors [{}], ratio {:.3}, hausdorff [{}]",
            fmt(&r.errors),
            r.error_ratio(),
            fmt(&r.hausdorff)
        ),
    )
}

fn two_bump(dir: &Path) -> Result<Verdict> {
    let scenario = TwoBumpScenario::standard()?;
    let report = scenario.run()?;
    let times = report.snapshot_times();
    let mut written = 0;
    for s in scenario.snapshots(&times)? {
        let style = PlotStyle {
            title: format!("t = {:.3}", s.time()),
            ..PlotStyle::default()
        };
        let svg = twin_axis_plot(&s.rho.grid.centers(), &s.rho.values, &s.pressure().values, &style);
        std::fs::write(dir.join(format!("two_bump_{written}.svg")), svg)?;
        written += 1;
    }
    let build = report
        .build
        .map_or("none".to_string(), |(t, p, w)| format!("t = {t:.3}, p = {p:.3}, matched {w:.3}"));
    verdict(
        report.pass() && written == 4,
        format!(
            "saturated at t = {:.3} with p = {:.3} (< {:.3}); build {build}; {written} SVGs",
            report.t_saturated,
            report.onset_pressure,
            scenario.onset_fraction * report.p_max
        ),
    )
}

fn barrier() -> Result<Verdict> {
    let pair = RadialProfilePair::build(PairSpec::standard())?;
    let auto = auto_barrier(&pair, 100.0, BarrierKind::Sub, 1e-8, 0.99)?;
    let r = auto.report.as_ref().expect("auto barrier is verified");
    let zero = BarrierBundle::build(&pair, 100.0, 0.0, BarrierKind::Sub)?;
    let control = verify_barrier(&zero, &pair, 1e-8, 0.99)?;
    verdict(
        r.pass && r.min_gap() > 0.0 && !control.pass,
        format!(
            "A0 = {} inner {:.4} outer {:.4} gap {:.4}; A0 = 0 inner {:.4} pass {}",
            auto.a0,
            r.inner.fraction(),
            r.outer.fraction(),
            r.min_gap(),
            control.inner.fraction(),
            control.pass
        ),
    )
}

fn comparison() -> Result<Verdict> {
    let r = comparison_check(&ComparisonSetup::standard(lemma_params()?, 20_240_601)?)?;
    let violations = r.trials.iter().filter(|t| !t.pass).count();
    verdict(r.pass() && violations == 0, r.summary())
}

fn lemma_scaling() -> Result<Verdict> {
    let p = lemma_params()?;
    let results = [
        nucleation_timing_check(&NucleationSetup::standard(p))?,
        shrink_speed_check(&ShrinkSetup::standard()?)?,
        expansion_bound_check(&ExpansionSetup::standard(p))?,
        initial_motion_check(&InitialMotionSetup::standard(p)?)?,
    ];
    let control = shrink_speed_check(&ShrinkSetup::negative_control()?)?;
    let mut lines: Vec<String> = results.iter().map(|r| r.summary()).collect();
    lines.push(format!("control (horizon r^2) {}", if control.pass() { "passed" } else { "failed" }));
    verdict(
        results.iter().all(|r| r.pass()) && !control.pass(),
        lines.join("; "),
    )
}

const DETERMINISM_CONFIGS: [(Command, &str); 5] = [
    (
        Command::SimulatePme,
        "model.m = 20\nmodel.nu = 0.5\nmodel.g0 = 10\nmodel.p_M = 10\ngrid.x_min = -2\ngrid.x_max = 2\n\
         grid.n_cells = 200\ninitial.preset = two-bump\nstepping.dt = 1e-3\nstepping.t_end = 0.05\n\
         stepping.snapshots = 2\noutput.formats = csv\n",
    ),
    (
        Command::SimulateLimit,
        "model.m = 20\nmodel.nu = 0.5\nmodel.rho_L = 0.8\ngrid.x_min = -2\ngrid.x_max = 2\ngrid.n_cells = 200\n\
         initial.preset = uniform-nucleation\ninitial.c = 0.1\nstepping.dt = 1e-3\nstepping.t_end = 0.3\n\
         stepping.snapshots = 3\noutput.formats = csv\n",
    ),
    (
        Command::Converge,
        "model.m = 10\nmodel.nu = 0.5\nmodel.g0 = 2\nmodel.p_M = 3\nmodel.rho_L = 0.1\ngrid.geometry = radial\n\
         grid.dim = 2\ngrid.r_max = 2.5\ngrid.n_cells = 200\ninitial.preset = radial-tumor\nstepping.dt = 2e-3\n\
         stepping.t_end = 0.1\nstepping.snapshots = 2\nconverge.m_values = 10, 20\n",
    ),
    (
        Command::BarrierCheck,
        "model.m = 100\nmodel.nu = 0.5\nbarrier.kind = sub\nbarrier.m = 100\nbarrier.a0 = 1\n",
    ),
    (
        Command::LemmaCheck,
        "model.m = 20\nmodel.nu = 0.5\nmodel.g0 = 1\nmodel.p_M = 1\nlemma.checks = comparison\nlemma.n_trials = 3\n",
    ),
];

fn read_csvs(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
            out.insert(name, std::fs::read(&path)?);
        }
    }
    Ok(out)
}

fn determinism(dir: &Path) -> Result<Verdict> {
    let mut notes = Vec::new();
    let mut pass = true;
    for (command, text) in DETERMINISM_CONFIGS {
        let config = parse_config(text)?;
        let mut runs = Vec::new();
        for k in 0..2 {
            let out = dir.join(format!("{}-{k}", command.name()));
            std::fs::create_dir_all(&out)?;
            run_command(command, &config, &out, 7)?;
            runs.push(read_csvs(&out)?);
        }
        let same = !runs[0].is_empty() && runs[0] == runs[1];
        pass &= same;
        notes.push(format!("{} {} files {}", command.name(), runs[0].len(), if same { "identical" } else { "DIFFER" }));
    }
    verdict(pass, notes.join(", "))
}

fn main() -> ExitCode {
    let scratch = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => {
            eprintln!("cannot create a scratch directory: {e}");
            return ExitCode::FAILURE;
        }
    };
    let dir = scratch.path();
    type Check<'a> = Box<dyn Fn() -> Result<Verdict> + 'a>;
    let criteria: Vec<(&str, Option<u64>, Check)> = vec![
        ("elliptic oracle", Some(1), Box::new(elliptic_oracle)),
        ("conservation", Some(5), Box::new(conservation)),
        ("pressure bound", Some(30), Box::new(pressure_bound)),
        ("uniform nucleation", Some(5), Box::new(uniform_nucleation)),
        ("convergence", Some(120), Box::new(convergence)),
        ("two-bump saturation", Some(20), Box::new(|| two_bump(dir))),
        ("barrier certification", Some(30), Box::new(barrier)),
        ("comparison", Some(60), Box::new(comparison)),
        ("lemma scaling", Some(90), Box::new(lemma_scaling)),
        ("determinism", None, Box::new(|| determinism(dir))),
    ];
    let mut failures = 0;
    for (k, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_budget = budget.is_none_or(|b| elapsed < Duration::from_secs(b));
        let (pass, detail) = match result {
            Ok(v) => (v.pass && in_budget, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let budget_note = match budget {
            Some(b) => format!("{:.2}s of {b}s", elapsed.as_secs_f64()),
            None => format!("{:.2}s", elapsed.as_secs_f64()),
        };
        println!(
            "{} criterion {}: {name} [{budget_note}] {detail}",
            if pass { "PASS" } else { "FAIL" },
            k + 1
        );
        if !pass {
            failures += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
