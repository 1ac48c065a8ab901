//! Deterministic parameter-server simulation.
//!
//! Rounds run sequentially. Inside a round each worker owns its state and
//! random stream, so running workers on one thread or many gives bitwise
//! identical results. The server reduces reports in worker-index order.

mod run;
mod topology;
mod trajectory;

pub use run::{run, run_many, EvalPoint, Execution, Job, RecordEvery, RunOptions};
pub use topology::{LocalSteps, Topology};
pub use trajectory::{CommTrace, RunTrace, Trajectory, TrajectoryRow};
