//! Batch front end for the `locfield` rate library: flat config files, the
//! figure presets, parallel sweeps written as deterministic CSV, and gnuplot
//! scripts for the resulting tables.

pub mod config;
pub mod error;
pub mod plot;
pub mod sweep;

pub use config::{preset, spec_from_pairs, FixedParams, Series, Spacing, SweepSpec, SweptVariable, PRESETS};
pub use error::{CliError, Result};
pub use plot::{emit_plot_script, PlotStyle};
pub use sweep::{render_csv, run_sweep, SweepSummary};
