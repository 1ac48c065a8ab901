//! Local adaptive stochastic extragradient (LocalAdaSEG) for convex-concave
//! saddle-point problems, run on a deterministic simulated parameter server.
//!
//! The crate is organised bottom-up:
//!
//! * [`space`]: iterates, feasible sets and counter-based random streams.
//! * [`problems`]: the saddle-problem interface, the stochastic bilinear game
//!   and its closed-form metrics.
//! * [`algorithms`]: the adaptive worker step, server aggregation and the
//!   fixed-step baselines.
//! * [`simulator`]: round-based orchestration and trajectory recording.
//! * [`experiment`]: configuration files, CSV output and the preset bundles
//!   used by the command-line runner.

pub mod algorithms;
pub mod error;
pub mod experiment;
pub mod problems;
pub mod simulator;
pub mod space;

pub use error::{ConfigIssue, Error, Result};
