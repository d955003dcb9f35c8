//! Experiment presets, verification suites and CSV output for the `gdaam`
//! command-line tool.

pub mod config;
pub mod csvio;
pub mod error;
pub mod experiment;
pub mod verify;

pub use error::{BenchError, Result};
pub use experiment::{preset, run_experiment, ExperimentSpec, ProblemSpec, ResultTable};
pub use verify::{verify, Suite, SuiteReport};
