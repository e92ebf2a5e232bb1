//! Numerical lab for the stiff-pressure limit of a porous-medium tumor
//! growth model.

pub mod barriers;
pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod elliptic;
pub mod error;
pub mod grid;
pub mod interface;
pub mod io;
pub mod limit;
pub mod linalg;
pub mod model;
pub mod pme;
pub mod presets;

pub use error::{Error, Result};
pub use grid::{Bc, Boundaries, Field, Geometry, Grid, Laplacian};
pub use model::{GrowthLaw, ModelParams};
pub use pme::{pme_run, pme_step, PmeState, Scheme, StepControl, TimeStep};
pub use limit::{limit_boundaries, limit_run, limit_step, project_initial_data, LimitRun, LimitState};
pub use presets::Preset;
