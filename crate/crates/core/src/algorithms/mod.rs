//! Per-step transitions: the local adaptive extragradient worker, the server
//! aggregation rule and the baseline solvers.

mod adaptive;
mod aggregate;
mod baselines;
mod worker;

pub use adaptive::{AdaptiveState, AlphaMode};
pub use aggregate::{plain_average, server_aggregate, Aggregate};
pub use baselines::{baseline_step, SolverKind};
pub use worker::{StepSize, StepTrace, WorkerState};
