//! File output: versioned CSV tables and SVG snapshot plots.

mod svg;
mod table;

pub use svg::{twin_axis_plot, PlotStyle};
pub use table::{format_f64, read_density_csv, Table, SCHEMA_LINE};
