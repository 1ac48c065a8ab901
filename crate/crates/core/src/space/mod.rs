//! Vector iterates over the product space `X × Y`, projectable feasible sets
//! and reproducible per-worker random streams.

mod iterate;
mod rng;
mod set;

pub use iterate::Iterate;
pub use rng::RngStream;
pub use set::FeasibleSet;

/// Tolerance used for membership checks on stored iterates.
pub const FEASIBILITY_TOL: f64 = 1e-12;
