//! Run orchestration for the dirac2c solvers: JSON configs, solver dispatch,
//! figure presets, verification suites and deterministic file output.

pub mod commands;
pub mod config;
pub mod error;
pub mod oracle;
pub mod output;
pub mod run;

pub use commands::{cmd_compare, cmd_figure, cmd_simulate, run_figure, FigureName};
pub use config::RunConfig;
pub use error::{CliError, CliResult};
