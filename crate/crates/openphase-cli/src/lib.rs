//! Command-line front end of `openphase`: figure sweeps, user schedules, CSV and
//! gnuplot output, population propagation and the Jordan utility.

pub mod config;
pub mod error;
pub mod figures;
pub mod matrix;
pub mod plot;
pub mod run;
pub mod table;

pub use config::RunConfig;
pub use error::CliError;
pub use figures::{FigureId, RatePoint};
pub use run::{run, run_propagation, Output};
pub use table::Table;
