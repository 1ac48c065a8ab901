use serde::{Deserialize, Serialize};

use super::WorkerState;
use crate::error::{Error, Result};
use crate::problems::SaddleProblem;

/// Which solver the simulator drives.
///
/// The fixed-step baselines are simplified stand-ins written in their
/// canonical textbook form: projected extragradient, projected simultaneous
/// gradient descent-ascent and server-batched extragradient. All of them
/// average plainly at communication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// Local adaptive stochastic extragradient with inverse-η weighted averaging.
    LocalAdaSeg,
    /// Serial fixed-step stochastic extragradient on a single worker.
    Segda { eta: f64 },
    /// One extragradient step per round, each oracle averaging `K·M` samples.
    /// `eta = None` selects the adaptive step size.
    MinibatchEg { eta: Option<f64> },
    /// Local projected gradient descent-ascent.
    LocalSgda { eta: f64 },
    /// Local fixed-step extragradient.
    LocalSegda { eta: f64 },
}

impl SolverKind {
    pub fn label(&self) -> &'static str {
        match self {
            SolverKind::LocalAdaSeg => "LocalAdaSEG",
            SolverKind::Segda { .. } => "SEGDA",
            SolverKind::MinibatchEg { eta: Some(_) } => "MB-SEGDA",
            SolverKind::MinibatchEg { eta: None } => "MB-AdaEG",
            SolverKind::LocalSgda { .. } => "LocalSGDA",
            SolverKind::LocalSegda { .. } => "LocalSEGDA",
        }
    }

    /// The fixed step size, if this solver uses one.
    pub fn fixed_eta(&self) -> Option<f64> {
        match *self {
            SolverKind::LocalAdaSeg => None,
            SolverKind::MinibatchEg { eta } => eta,
            SolverKind::Segda { eta }
            | SolverKind::LocalSgda { eta }
            | SolverKind::LocalSegda { eta } => Some(eta),
        }
    }

    pub fn is_adaptive(&self) -> bool {
        self.fixed_eta().is_none()
    }

    /// Server batches the oracle instead of running local steps.
    pub fn is_minibatch(&self) -> bool {
        matches!(self, SolverKind::MinibatchEg { .. })
    }

    /// Oracle calls consumed by one step of one worker at the given batch size.
    pub fn calls_per_step(&self, batch: usize) -> u64 {
        match self {
            SolverKind::LocalSgda { .. } => 1,
            SolverKind::MinibatchEg { .. } => 2 * batch as u64,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(eta) = self.fixed_eta() {
            if !(eta.is_finite() && eta > 0.0) {
                return Err(Error::Config(format!(
                    "{} needs a fixed step size > 0, got {eta}",
                    self.label()
                )));
            }
        }
        Ok(())
    }
}

/// One baseline transition of `worker`. `batch` is the server minibatch size
/// and only affects [`SolverKind::MinibatchEg`].
pub fn baseline_step<P: SaddleProblem + ?Sized>(
    kind: &SolverKind,
    worker: &mut WorkerState,
    problem: &P,
    batch: usize,
) -> super::StepTrace {
    match kind {
        SolverKind::LocalSgda { .. } => worker.gda_step(problem),
        SolverKind::MinibatchEg { .. } => worker.extragradient_batch_step(problem, batch),
        SolverKind::LocalAdaSeg | SolverKind::Segda { .. } | SolverKind::LocalSegda { .. } => {
            worker.extragradient_step(problem)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::StepSize;
    use crate::problems::BilinearProblem;
    use crate::space::{Iterate, RngStream};

    #[test]
    fn sgda_from_corner() {
        let p = BilinearProblem::new(vec![1.0], vec![0.0], vec![0.0], 0.0).unwrap();
        let kind = SolverKind::LocalSgda { eta: 0.5 };
        let mut w = WorkerState::new(
            Iterate::new(vec![1.0], vec![1.0]),
            StepSize::Fixed(0.5),
            RngStream::new(0, 0),
        );
        baseline_step(&kind, &mut w, &p, 1);
        assert_eq!(w.anchor, Iterate::new(vec![0.5], vec![1.0]));
    }

    #[test]
    fn segda_matches_extragradient() {
        let p = BilinearProblem::generate_seeded(3, 0.0, 4).unwrap();
        let kind = SolverKind::Segda { eta: 0.2 };
        let start = Iterate::new(vec![0.5, -0.5, 0.1], vec![0.0, 0.9, -0.3]);
        let mut a = WorkerState::new(start.clone(), StepSize::Fixed(0.2), RngStream::new(3, 0));
        let mut b = a.clone();
        for _ in 0..10 {
            baseline_step(&kind, &mut a, &p, 1);
            b.extragradient_step(&p);
        }
        assert_eq!(a.anchor, b.anchor);
        assert_eq!(a.sum_half, b.sum_half);
    }

    #[test]
    fn minibatch_shrinks_oracle_variance() {
        let p = BilinearProblem::generate_seeded(3, 0.5, 4).unwrap();
        let z = Iterate::new(vec![0.2, 0.1, -0.4], vec![0.3, -0.2, 0.0]);
        let exact = p.operator(&z);
        let variance = |batch: usize| {
            let mut s = RngStream::new(17, 3);
            let reps = 4000;
            (0..reps)
                .map(|_| p.oracle_batch(&z, &mut s, batch).dist_sq(&exact))
                .sum::<f64>()
                / reps as f64
        };
        let single = variance(1);
        let batched = variance(8);
        let ratio = single / batched;
        // E‖g̃ − g‖² = 2·n·s² for one draw and 1/8 of that for eight.
        assert!((single - 2.0 * 3.0 * 0.25).abs() < 0.1, "single {single}");
        assert!((ratio - 8.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn validation() {
        assert!(SolverKind::LocalSgda { eta: 0.0 }.validate().is_err());
        assert!(SolverKind::MinibatchEg { eta: None }.validate().is_ok());
        assert!(SolverKind::LocalAdaSeg.validate().is_ok());
        assert_eq!(SolverKind::LocalSgda { eta: 1.0 }.calls_per_step(5), 1);
        assert_eq!(SolverKind::MinibatchEg { eta: None }.calls_per_step(5), 10);
    }
}
