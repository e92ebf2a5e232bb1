//! Drives a command from configuration text, as the binary does.

use stiff_pressure_lab::cli::{run_command, Command};
use stiff_pressure_lab::config::parse_config;
use stiff_pressure_lab::Result;

const CONFIG: &str = "
# uniform data u = 0.1 on a domain whose ends hold the same value
model.m = 20
model.nu = 0.5
model.rho_L = 0.8
grid.x_min = -2
grid.x_max = 2
grid.n_cells = 200
initial.preset = uniform-nucleation
initial.c = 0.1
stepping.dt = 1e-3
stepping.t_end = 0.4
stepping.snapshots = 4
output.formats = csv
";

fn main() -> Result<()> {
    let config = parse_config(CONFIG)?;
    let out = std::env::temp_dir().join("stiff-pressure-lab-config-run");
    let outcome = run_command(Command::SimulateLimit, &config, &out, 0)?;
    for line in &outcome.lines {
        println!("{line}");
    }
    println!("{} files in {}", outcome.files.len(), out.display());
    Ok(())
}
