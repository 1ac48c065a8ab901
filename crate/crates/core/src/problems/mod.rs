//! Saddle-point problems, the stochastic bilinear game and its closed-form
//! quality metrics.

mod bilinear;
mod metrics;

pub use bilinear::{
    BilinearProblem, ProblemFile, PROBLEM_FORMAT, PROBLEM_FORMAT_VERSION, PROBLEM_STREAM,
};
pub use metrics::{duality_gap, kkt_residual, regret_bound_check, RegretCheck};

use crate::error::{Error, Result};
use crate::space::{FeasibleSet, Iterate, RngStream};

/// A convex-concave saddle problem `min_x max_y F(x, y)` over a compact set.
///
/// `operator` returns `G(z) = (∂_x F, −∂_y F)`; `oracle` returns an unbiased
/// noisy estimate of it drawn from the caller's stream.
pub trait SaddleProblem: Sync {
    fn feasible_set(&self) -> &FeasibleSet;

    fn x_dim(&self) -> usize;

    fn y_dim(&self) -> usize;

    fn operator(&self, z: &Iterate) -> Iterate;

    fn oracle(&self, z: &Iterate, stream: &mut RngStream) -> Iterate;

    /// Average of `batch` independent oracle draws at `z`.
    fn oracle_batch(&self, z: &Iterate, stream: &mut RngStream, batch: usize) -> Iterate {
        assert!(batch >= 1);
        let mut acc = self.oracle(z, stream);
        for _ in 1..batch {
            acc.axpy(1.0, &self.oracle(z, stream));
        }
        acc.scale(1.0 / batch as f64);
        acc
    }

    /// A certified upper bound on oracle norms, when one is known.
    fn gradient_bound_hint(&self) -> Option<f64> {
        None
    }

    /// Norm of the fixed-point violation `z − Π(z − G(z))`.
    fn kkt_residual(&self, z: &Iterate) -> f64 {
        let g = self.operator(z);
        let mut probe = z.clone();
        probe.axpy(-1.0, &g);
        self.feasible_set().project_in_place(probe.as_mut_slice());
        z.dist(&probe)
    }

    /// Duality gap at a feasible point, when a closed form is available.
    fn duality_gap(&self, _z: &Iterate) -> Result<f64> {
        Err(Error::Usage(
            "this problem has no closed-form duality gap".into(),
        ))
    }

    fn dim(&self) -> usize {
        self.x_dim() + self.y_dim()
    }

    /// Checks that the problem's pieces agree on dimensions.
    fn check_dims(&self) -> Result<()> {
        let set_dim = self.feasible_set().dim();
        if set_dim != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: set_dim,
            });
        }
        Ok(())
    }
}
