use super::AdaptiveState;
use crate::problems::SaddleProblem;
use crate::space::{Iterate, RngStream};

/// Step-size policy carried by a worker.
#[derive(Debug, Clone, PartialEq)]
pub enum StepSize {
    Adaptive(AdaptiveState),
    Fixed(f64),
}

impl StepSize {
    pub fn eta(&self) -> f64 {
        match self {
            StepSize::Adaptive(s) => s.eta(),
            StepSize::Fixed(eta) => *eta,
        }
    }
}

/// Diagnostics of one completed step, used by invariant checks.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    /// Worker-local step count, starting at 1.
    pub step: u64,
    /// Step size used by this step.
    pub eta: f64,
    /// Step size the next step will use.
    pub next_eta: f64,
    /// Adaptive accumulator after the update (0 for fixed steps).
    pub accumulator: f64,
    /// `D·α` for adaptive workers, NaN otherwise.
    pub d_alpha: f64,
    /// `‖half − anchor‖`.
    pub half_anchor_dist: f64,
    /// `‖M‖`, the probe oracle norm at the anchor.
    pub probe_norm: f64,
    /// `‖full − half‖`.
    pub full_half_dist: f64,
    /// `‖g − M‖`.
    pub oracle_gap_norm: f64,
    /// `Z²` contributed by this step (0 for fixed steps).
    pub z_sq: f64,
    /// Largest distance of `half` or `full` outside the feasible set.
    pub violation: f64,
}

/// State of one worker between steps.
///
/// `anchor` is the point the next step starts from. After a local step it is
/// the step's full iterate; after a communication it is the server average.
#[derive(Debug, Clone)]
pub struct WorkerState {
    pub anchor: Iterate,
    pub last_half: Iterate,
    pub last_full: Iterate,
    pub step_size: StepSize,
    /// Running sum of half iterates (the official output average).
    pub sum_half: Iterate,
    /// Running sum of full iterates, kept for diagnostics.
    pub sum_full: Iterate,
    pub steps: u64,
    /// Running `Σ ‖g‖² + ‖M‖²`.
    pub v_accumulator: f64,
    pub max_oracle_norm: f64,
    pub oracle_calls: u64,
    pub stream: RngStream,
}

impl WorkerState {
    pub fn new(start: Iterate, step_size: StepSize, stream: RngStream) -> Self {
        let zeros = Iterate::zeros(start.x_dim(), start.y_dim());
        Self {
            anchor: start.clone(),
            last_half: start.clone(),
            last_full: start,
            step_size,
            sum_half: zeros.clone(),
            sum_full: zeros,
            steps: 0,
            v_accumulator: 0.0,
            max_oracle_norm: 0.0,
            oracle_calls: 0,
            stream,
        }
    }

    pub fn eta(&self) -> f64 {
        self.step_size.eta()
    }

    /// `sqrt(Σ ‖g‖² + ‖M‖²)` over this worker's steps.
    pub fn v(&self) -> f64 {
        self.v_accumulator.sqrt()
    }

    /// Mean of the half iterates so far, or the anchor before any step.
    pub fn output(&self) -> Iterate {
        if self.steps == 0 {
            return self.anchor.clone();
        }
        self.sum_half.scaled(1.0 / self.steps as f64)
    }

    /// One extragradient step from the anchor:
    ///
    /// `M = G̃(anchor)`, `half = Π(anchor − ηM)`, `g = G̃(half)`,
    /// `full = Π(anchor − ηg)`; then the step size is refreshed.
    pub fn extragradient_step<P: SaddleProblem + ?Sized>(&mut self, problem: &P) -> StepTrace {
        self.extragradient_batch_step(problem, 1)
    }

    /// Extragradient step whose two oracle calls each average `batch` samples.
    pub fn extragradient_batch_step<P: SaddleProblem + ?Sized>(
        &mut self,
        problem: &P,
        batch: usize,
    ) -> StepTrace {
        let set = problem.feasible_set();
        let eta = self.eta();
        let anchor = std::mem::replace(&mut self.anchor, Iterate::zeros(0, 0));

        let probe = problem.oracle_batch(&anchor, &mut self.stream, batch);
        let mut half = anchor.clone();
        half.axpy(-eta, &probe);
        set.project_in_place(half.as_mut_slice());

        let grad = problem.oracle_batch(&half, &mut self.stream, batch);
        let mut full = anchor.clone();
        full.axpy(-eta, &grad);
        set.project_in_place(full.as_mut_slice());

        self.oracle_calls += 2 * batch as u64;
        let probe_sq = probe.norm_sq();
        let grad_sq = grad.norm_sq();
        self.v_accumulator += probe_sq + grad_sq;
        self.max_oracle_norm = self
            .max_oracle_norm
            .max(probe_sq.sqrt())
            .max(grad_sq.sqrt());

        let (z_sq, accumulator, d_alpha) = match &mut self.step_size {
            StepSize::Adaptive(s) => {
                let z_sq = s.update(&half, &anchor, &full);
                (z_sq, s.accumulator(), s.d_alpha())
            }
            StepSize::Fixed(_) => (0.0, 0.0, f64::NAN),
        };

        let trace = StepTrace {
            step: self.steps + 1,
            eta,
            next_eta: self.eta(),
            accumulator,
            d_alpha,
            half_anchor_dist: half.dist(&anchor),
            probe_norm: probe_sq.sqrt(),
            full_half_dist: full.dist(&half),
            oracle_gap_norm: grad.dist(&probe),
            z_sq,
            violation: set
                .violation(half.as_slice())
                .max(set.violation(full.as_slice())),
        };
        self.finish_step(half, full);
        trace
    }

    /// Simultaneous projected gradient descent-ascent step with one oracle call.
    pub fn gda_step<P: SaddleProblem + ?Sized>(&mut self, problem: &P) -> StepTrace {
        let set = problem.feasible_set();
        let eta = self.eta();
        let grad = problem.oracle(&self.anchor, &mut self.stream);
        let mut next = self.anchor.clone();
        next.axpy(-eta, &grad);
        set.project_in_place(next.as_mut_slice());

        self.oracle_calls += 1;
        let grad_sq = grad.norm_sq();
        self.v_accumulator += grad_sq;
        self.max_oracle_norm = self.max_oracle_norm.max(grad_sq.sqrt());

        let trace = StepTrace {
            step: self.steps + 1,
            eta,
            next_eta: eta,
            accumulator: 0.0,
            d_alpha: f64::NAN,
            half_anchor_dist: next.dist(&self.anchor),
            probe_norm: grad_sq.sqrt(),
            full_half_dist: 0.0,
            oracle_gap_norm: 0.0,
            z_sq: 0.0,
            violation: set.violation(next.as_slice()),
        };
        self.finish_step(next.clone(), next);
        trace
    }

    fn finish_step(&mut self, half: Iterate, full: Iterate) {
        self.sum_half.axpy(1.0, &half);
        self.sum_full.axpy(1.0, &full);
        self.steps += 1;
        self.anchor = full.clone();
        self.last_half = half;
        self.last_full = full;
    }

    /// Runs `steps` extragradient steps, each re-anchored at the previous full
    /// iterate.
    pub fn local_phase<P: SaddleProblem + ?Sized>(&mut self, problem: &P, steps: usize) {
        self.local_phase_with(problem, steps, |_, _| {});
    }

    /// [`local_phase`](Self::local_phase) with a callback after every step.
    pub fn local_phase_with<P, F>(&mut self, problem: &P, steps: usize, mut observe: F)
    where
        P: SaddleProblem + ?Sized,
        F: FnMut(&WorkerState, &StepTrace),
    {
        for _ in 0..steps {
            let trace = self.extragradient_step(problem);
            observe(self, &trace);
        }
    }
}
