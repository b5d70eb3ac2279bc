//! Command-line orchestration: configuration, dataset registry, the
//! single-run pipeline, the experiment grid and its reports.

pub mod config;
pub mod datasets;
pub mod grid;
pub mod pipeline;
pub mod report;
pub mod selftest;

pub use config::{EnsembleMode, FsChoice, KValue, MnbInput, RunConfig};
pub use grid::{run_grid, GridCell, GridResult};
pub use pipeline::{run, RunReport};
pub use report::{emit_report, ReportFormat};
