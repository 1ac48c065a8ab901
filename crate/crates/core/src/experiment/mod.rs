//! Configuration-driven experiments: config files, trajectory CSVs, the run,
//! sweep and compare drivers, and the preset reproduction bundles.

mod config;
mod csv_io;
mod presets;
mod runner;

pub use crate::error::ConfigIssue;

pub use config::{
    parse_config, AlphaModeName, EvalPointName, ExperimentConfig, OutputSection, ProblemSection,
    RecordEveryName, SolverName, SolverSection, TopologySection,
};
pub use csv_io::{parse_trajectory_csv, write_trajectory_csv, CSV_HEADER};
pub use presets::{replicate_async, replicate_fig2, replicate_fig3, PresetReport};
pub use runner::{
    compare, parse_vary, resolve_output_dir, run_config, run_experiment, sweep, write_sweep_csv,
    IterateRecord, RunReport, Sidecar, SweepResult, VaryAxis, OUTPUT_DIR_ENV, SIDECAR_FORMAT,
};
