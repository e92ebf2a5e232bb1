use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use stiff_pressure_lab::cli::{run_command, Command};
use stiff_pressure_lab::config::load_config;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    SimulatePme,
    SimulateLimit,
    Converge,
    BarrierCheck,
    LemmaCheck,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::SimulatePme => Command::SimulatePme,
            Cmd::SimulateLimit => Command::SimulateLimit,
            Cmd::Converge => Command::Converge,
            Cmd::BarrierCheck => Command::BarrierCheck,
            Cmd::LemmaCheck => Command::LemmaCheck,
        }
    }
}

/// Solvers and numerical checks for the stiff-pressure limit of a
/// porous-medium tumor model.
#[derive(Debug, Parser)]
#[command(name = "stiff-pressure-lab", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Run configuration (`section.key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = load_config(&args.config).and_then(|config| {
        let out = args.out.clone().unwrap_or_else(|| config.output.directory.clone());
        run_command(args.command.into(), &config, &out, args.seed)
    });
    match result {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
