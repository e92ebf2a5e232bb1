//! Command drivers behind the `stiff-pressure-lab` binary. Each command
//! reads a [`RunConfig`], writes its files into an output directory and
//! reports whether every requested check passed.

use std::path::{Path, PathBuf};

use crate::barriers::{auto_barrier, verify_barrier, BarrierBundle, BarrierKind, RadialProfilePair};
use crate::config::{InitialData, RunConfig};
use crate::diagnostics::{
    comparison_check, convergence_study, expansion_bound_check, initial_motion_check, nucleation_timing_check,
    pressure_bound_check, shrink_speed_check, ComparisonSetup, ExpansionSetup, InitialMotionSetup, LemmaCheckResult,
    LemmaId, NucleationSetup, Outcome, PressureBoundSetup, ShrinkSetup,
};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::io::{format_f64, read_density_csv, twin_axis_plot, PlotStyle, Table};
use crate::limit::{limit_boundaries, limit_run, project_initial_data};
use crate::model::b_graph;
use crate::pme::{lateral_boundaries, pme_run, prepare_initial_density, PmeState, TimeStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SimulatePme,
    SimulateLimit,
    Converge,
    BarrierCheck,
    LemmaCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SimulatePme => "simulate-pme",
            Command::SimulateLimit => "simulate-limit",
            Command::Converge => "converge",
            Command::BarrierCheck => "barrier-check",
            Command::LemmaCheck => "lemma-check",
        }
    }
}

/// Files written and human-readable result lines of one command.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CommandOutcome {
    pub pass: bool,
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

impl CommandOutcome {
    fn write_table(&mut self, dir: &Path, name: &str, table: &Table) -> Result<()> {
        let path = dir.join(name);
        table.write(&path)?;
        self.files.push(path);
        Ok(())
    }

    fn write_text(&mut self, dir: &Path, name: &str, text: &str) -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, text)?;
        self.files.push(path);
        Ok(())
    }
}

pub fn run_command(command: Command, config: &RunConfig, out: &Path, seed: u64) -> Result<CommandOutcome> {
    std::fs::create_dir_all(out)?;
    match command {
        Command::SimulatePme => cmd_simulate_pme(config, out),
        Command::SimulateLimit => cmd_simulate_limit(config, out),
        Command::Converge => cmd_converge(config, out),
        Command::BarrierCheck => cmd_barrier_check(config, out),
        Command::LemmaCheck => cmd_lemma_check(config, out, seed),
    }
}

pub fn initial_density(config: &RunConfig) -> Result<Field> {
    match &config.initial {
        InitialData::Preset(p) => p.density(config.grid, config.model.nu),
        InitialData::Csv(path) => read_density_csv(path, config.grid),
    }
}

fn time_tag(t: f64) -> String {
    format!("{t:.6}")
}

fn style(config: &RunConfig, t: f64) -> PlotStyle {
    let prefix = config.output.title.clone().unwrap_or_default();
    let title = if prefix.is_empty() {
        format!("t = {}", time_tag(t))
    } else {
        format!("{prefix}, t = {}", time_tag(t))
    };
    PlotStyle {
        width: config.output.width,
        height: config.output.height,
        title,
        x_label: match config.grid.geometry {
            crate::grid::Geometry::Cartesian => "x".into(),
            crate::grid::Geometry::Radial { .. } => "r".into(),
        },
    }
}

fn model_comments(table: &mut Table, config: &RunConfig, command: Command) {
    let p = &config.model;
    table
        .comment("command", command.name())
        .comment("m", format_f64(p.m))
        .comment("nu", format_f64(p.nu))
        .comment("growth", format!("{:?}", p.growth));
}

/// Density snapshots `snapshot_t<time>.csv` with columns `x, rho, p, u`,
/// plus SVG plots when requested.
pub fn cmd_simulate_pme(config: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    let rho0 = prepare_initial_density(&initial_density(config)?, &config.model)?;
    let start = PmeState::new(rho0, config.model, lateral_boundaries(&config.grid, config.model.rho_l))?;
    let snaps = pme_run(&start, &config.stepping)?;
    let x = config.grid.centers();
    let mut outcome = CommandOutcome {
        pass: true,
        ..Default::default()
    };
    for s in &snaps {
        let p = s.pressure();
        let u = s.u();
        let tag = time_tag(s.time());
        if config.output.csv {
            let mut t = Table::new(&["x", "rho", "p", "u"]);
            model_comments(&mut t, config, Command::SimulatePme);
            t.comment("time", format_f64(s.time()));
            for i in 0..x.len() {
                t.push_numbers(&[x[i], s.rho.values[i], p.values[i], u.values[i]]);
            }
            outcome.write_table(out, &format!("snapshot_t{tag}.csv"), &t)?;
        }
        if config.output.svg {
            let svg = twin_axis_plot(&x, &s.rho.values, &p.values, &style(config, s.time()));
            outcome.write_text(out, &format!("snapshot_t{tag}.svg"), &svg)?;
        }
        outcome.lines.push(format!(
            "t = {tag}: max rho = {:.6}, max p = {:.6}, mass = {:.10e}",
            s.rho.max(),
            p.max(),
            s.mass()
        ));
    }
    Ok(outcome)
}

/// Limit snapshots with columns `x, u, b_u, p` (`p = u^-`),
/// `free_boundary.csv` with one row per snapshot, and `jumps.csv`.
pub fn cmd_simulate_limit(config: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    if config.stepping.dt == TimeStep::Auto {
        return Err(Error::config_global("simulate-limit needs a fixed stepping.dt"));
    }
    let rho0 = initial_density(config)?;
    let start = project_initial_data(&rho0, &config.model, limit_boundaries(&config.grid, &config.model))?;
    let run = limit_run(&start, &config.stepping)?;
    let x = config.grid.centers();
    let nu = config.model.nu;
    let mut outcome = CommandOutcome {
        pass: true,
        ..Default::default()
    };
    for s in &run.snapshots {
        let tag = time_tag(s.time());
        let u = &s.u.values;
        let b: Vec<f64> = u.iter().map(|&v| b_graph(v)).collect();
        let p: Vec<f64> = u.iter().map(|&v| (-v).max(0.0)).collect();
        if config.output.csv {
            let mut t = Table::new(&["x", "u", "b_u", "p"]);
            model_comments(&mut t, config, Command::SimulateLimit);
            t.comment("time", format_f64(s.time()));
            for i in 0..x.len() {
                t.push_numbers(&[x[i], u[i], b[i], p[i]]);
            }
            outcome.write_table(out, &format!("snapshot_t{tag}.csv"), &t)?;
        }
        if config.output.svg {
            let density: Vec<f64> = b.iter().map(|v| 1.0 - v / nu).collect();
            let svg = twin_axis_plot(&x, &density, &p, &style(config, s.time()));
            outcome.write_text(out, &format!("snapshot_t{tag}.svg"), &svg)?;
        }
    }
    let mut fb = Table::new(&["time", "count", "positions"]);
    model_comments(&mut fb, config, Command::SimulateLimit);
    for b in &run.boundaries {
        let pos: Vec<String> = b.positions.iter().map(|&v| format_f64(v)).collect();
        fb.push(vec![format_f64(b.time), b.len().to_string(), pos.join(";")]);
        outcome
            .lines
            .push(format!("t = {}: {} free-boundary points", time_tag(b.time), b.len()));
    }
    outcome.write_table(out, "free_boundary.csv", &fb)?;
    let mut jumps = Table::new(&["time_before", "time_after", "position", "u_before", "u_after"]);
    for j in &run.jumps {
        jumps.push_numbers(&[j.time_before, j.time_after, j.position, j.u_before, j.u_after]);
    }
    outcome.write_table(out, "jumps.csv", &jumps)?;
    outcome.lines.push(format!("{} nucleation events, {} steps", run.jumps.len(), run.steps));
    Ok(outcome)
}

/// `convergence.csv` (per `m` and snapshot) and `convergence_summary.csv`.
/// Passes when the sup-norm errors strictly decrease in `m` and the
/// Hausdorff distances do not increase.
pub fn cmd_converge(config: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    let rho0 = initial_density(config)?;
    let report = convergence_study(&rho0, &config.model, &config.m_values, &config.stepping)?;
    let mut series = Table::new(&["m", "time", "error", "hausdorff"]);
    model_comments(&mut series, config, Command::Converge);
    let mut summary = Table::new(&["m", "max_error", "max_hausdorff"]);
    model_comments(&mut summary, config, Command::Converge);
    summary.comment("quantization", format_f64(report.quantization));
    let mut outcome = CommandOutcome::default();
    for (k, &m) in report.m_values.iter().enumerate() {
        for (j, &t) in report.times.iter().enumerate() {
            series.push_numbers(&[m, t, report.error_series[k][j], report.hausdorff_series[k][j]]);
        }
        summary.push_numbers(&[m, report.errors[k], report.hausdorff[k]]);
        outcome.lines.push(format!(
            "m = {m}: error = {:.4e}, hausdorff = {:.4e}",
            report.errors[k], report.hausdorff[k]
        ));
    }
    outcome.write_table(out, "convergence.csv", &series)?;
    outcome.write_table(out, "convergence_summary.csv", &summary)?;
    let monotone = report.errors_strictly_decreasing();
    let hd = report.hausdorff_decreasing();
    outcome.lines.push(format!(
        "errors strictly decreasing: {monotone}; hausdorff decreasing: {hd}; error ratio {:.3}",
        report.error_ratio()
    ));
    outcome.pass = monotone && hd;
    Ok(outcome)
}

/// Builds the radial pair and the composite barrier, verifies it and writes
/// `barrier_summary.csv`, `barrier_samples.csv` and `barrier_profile.csv`.
pub fn cmd_barrier_check(config: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    let b = &config.barrier;
    let pair = RadialProfilePair::build(b.pair)?;
    let mut outcome = CommandOutcome::default();
    let bundle = match b.a0 {
        Some(a0) => {
            let mut bundle = BarrierBundle::build(&pair, b.m, a0, b.kind)?;
            bundle.report = Some(verify_barrier(&bundle, &pair, b.tolerance, b.fraction)?);
            bundle
        }
        None => match auto_barrier(&pair, b.m, b.kind, b.tolerance, b.fraction) {
            Ok(bundle) => bundle,
            Err(Error::ConstructionFailure(msg)) => {
                let mut t = Table::new(&["kind", "m", "pass", "message"]);
                t.push(vec![kind_name(b.kind).into(), format_f64(b.m), "false".into(), msg.clone()]);
                outcome.write_table(out, "barrier_summary.csv", &t)?;
                outcome.lines.push(format!("FAIL barrier: {msg}"));
                return Ok(outcome);
            }
            Err(e) => return Err(e),
        },
    };
    let report = bundle.report.as_ref().expect("verified bundle");

    let mut summary = Table::new(&[
        "kind",
        "m",
        "a0",
        "c_m",
        "inner_fraction",
        "outer_fraction",
        "worst_margin",
        "min_gap",
        "max_jump",
        "pass",
    ]);
    summary.push(vec![
        kind_name(b.kind).into(),
        format_f64(b.m),
        format_f64(bundle.a0),
        format_f64(bundle.c_m),
        format_f64(report.inner.fraction()),
        format_f64(report.outer.fraction()),
        format_f64(report.worst_margin()),
        format_f64(report.min_gap()),
        format_f64(report.max_jump()),
        report.pass.to_string(),
    ]);
    outcome.write_table(out, "barrier_summary.csv", &summary)?;

    let mut samples = Table::new(&["time", "a", "inner_slope", "outer_slope", "gap", "jump"]);
    for s in &report.samples {
        samples.push_numbers(&[s.time, s.a, s.inner_slope, s.outer_slope, s.gap, s.jump]);
    }
    outcome.write_table(out, "barrier_samples.csv", &samples)?;

    let params = pair.spec.model(b.m)?;
    let mut profile = Table::new(&["sample", "time", "r", "u", "phase"]);
    for k in 0..pair.times.len() {
        let t = pair.times[k];
        let ig = bundle.inner.grid(k, pair.spec.dim)?;
        for (r, u) in ig.centers().iter().zip(bundle.inner_u(k)) {
            profile.push(vec![k.to_string(), format_f64(t), format_f64(*r), format_f64(u), "inner".into()]);
        }
        let og = bundle.outer.grid(k)?;
        for (r, u) in og.centers().iter().zip(bundle.outer_u(k, &params)) {
            profile.push(vec![k.to_string(), format_f64(t), format_f64(*r), format_f64(u), "outer".into()]);
        }
    }
    outcome.write_table(out, "barrier_profile.csv", &profile)?;

    outcome.lines.push(format!(
        "{} {} barrier at m = {}: A0 = {}, inner {:.4}, outer {:.4}, min gap {:.4e}",
        if report.pass { "PASS" } else { "FAIL" },
        kind_name(b.kind),
        b.m,
        bundle.a0,
        report.inner.fraction(),
        report.outer.fraction(),
        report.min_gap()
    ));
    outcome.pass = report.pass;
    Ok(outcome)
}

fn kind_name(kind: BarrierKind) -> &'static str {
    match kind {
        BarrierKind::Sub => "sub",
        BarrierKind::Super => "super",
    }
}

/// Runs one check with the scenario defaults for `lemma`.
pub fn run_lemma(lemma: LemmaId, config: &RunConfig, seed: u64) -> Result<LemmaCheckResult> {
    let p = config.model;
    match lemma {
        LemmaId::PressureBound => pressure_bound_check(&PressureBoundSetup::standard(p)?),
        LemmaId::NucleationTiming => nucleation_timing_check(&NucleationSetup::standard(p)),
        LemmaId::ShrinkSpeed => shrink_speed_check(&ShrinkSetup::standard()?),
        LemmaId::ExpansionBound => expansion_bound_check(&ExpansionSetup::standard(p)),
        LemmaId::InitialMotion => initial_motion_check(&InitialMotionSetup::standard(p)?),
        LemmaId::Comparison => comparison_check(&ComparisonSetup {
            n_trials: config.lemma.n_trials,
            ..ComparisonSetup::standard(p, seed)?
        }),
    }
}

/// `lemma_<name>.csv` per requested check and `lemma_summary.csv`.
pub fn cmd_lemma_check(config: &RunConfig, out: &Path, seed: u64) -> Result<CommandOutcome> {
    let mut outcome = CommandOutcome {
        pass: true,
        ..Default::default()
    };
    let mut summary = Table::new(&["lemma", "outcome", "trials", "failed", "fitted"]);
    model_comments(&mut summary, config, Command::LemmaCheck);
    summary.comment("seed", seed);
    for &lemma in &config.lemma.checks {
        let r = run_lemma(lemma, config, seed)?;
        let mut t = Table::new(&["trial", "label", "parameter", "measured", "bound", "pass"]);
        model_comments(&mut t, config, Command::LemmaCheck);
        for (k, v) in &r.fitted {
            t.comment(k, format_f64(*v));
        }
        for tr in &r.trials {
            t.push(vec![
                tr.trial.to_string(),
                tr.label.clone(),
                format_f64(tr.parameter),
                format_f64(tr.measured),
                format_f64(tr.bound),
                tr.pass.to_string(),
            ]);
        }
        outcome.write_table(out, &format!("lemma_{lemma}.csv"), &t)?;
        let fitted: Vec<String> = r.fitted.iter().map(|(k, v)| format!("{k}={}", format_f64(*v))).collect();
        summary.push(vec![
            lemma.to_string(),
            outcome_name(r.outcome).into(),
            r.trials.len().to_string(),
            r.trials.iter().filter(|t| !t.pass).count().to_string(),
            fitted.join(";"),
        ]);
        outcome.pass &= r.pass();
        outcome.lines.push(r.summary());
    }
    outcome.write_table(out, "lemma_summary.csv", &summary)?;
    Ok(outcome)
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "pass",
        Outcome::Fail => "fail",
        Outcome::HypothesisNotMet => "hypothesis-not-met",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn zero_data_gives_flat_snapshots() {
        let c = parse_config("model.m = 20\nmodel.nu = 0.5\ngrid.n_cells = 20\nstepping.t_end = 0.01\nstepping.snapshots = 2\n").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let o = run_command(Command::SimulatePme, &c, dir.path(), 0).unwrap();
        assert!(o.pass);
        assert_eq!(o.files.len(), 2);
        let text = std::fs::read_to_string(&o.files[1]).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
        assert_eq!(rows.len(), 20);
        assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("0.0000000000000000e0")));
    }

    #[test]
    fn initial_snapshot_only() {
        let c = parse_config("model.m = 20\nmodel.nu = 0.5\ngrid.n_cells = 10\ninitial.preset = two-bump\nstepping.t_end = 0\nstepping.snapshot_times = 0\n").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let o = cmd_simulate_pme(&c, dir.path()).unwrap();
        assert_eq!(o.files.len(), 1);
        assert!(o.files[0].ends_with("snapshot_t0.000000.csv"));
    }

    #[test]
    fn vacuum_limit_has_no_boundary() {
        let c = parse_config("model.m = 20\nmodel.nu = 0.5\ngrid.n_cells = 20\nstepping.dt = 1e-3\nstepping.t_end = 0.01\nstepping.snapshots = 2\n").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let o = cmd_simulate_limit(&c, dir.path()).unwrap();
        let fb = std::fs::read_to_string(dir.path().join("free_boundary.csv")).unwrap();
        assert!(fb.lines().filter(|l| !l.starts_with('#')).skip(1).all(|l| l.split(',').nth(1) == Some("0")));
        assert!(o.lines.iter().any(|l| l.starts_with("0 nucleation")));
    }

    #[test]
    fn limit_needs_fixed_dt() {
        let c = parse_config("model.m = 20\nmodel.nu = 0.5\n").unwrap();
        let dir = tempfile::tempdir().unwrap();
        assert!(cmd_simulate_limit(&c, dir.path()).is_err());
    }
}
