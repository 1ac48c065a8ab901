use crate::algorithms::{AlphaMode, SolverKind};
use crate::error::{Error, Result};

/// Local steps per round: one shared count, or one per worker for the
/// asynchronous variant. Rounds end at a barrier in both cases.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalSteps {
    Uniform(usize),
    PerWorker(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    /// `M`.
    pub workers: usize,
    /// `R`.
    pub rounds: usize,
    /// `K`, or `K_m` per worker.
    pub local_steps: LocalSteps,
    pub solver: SolverKind,
    pub alpha_mode: AlphaMode,
    /// Initial guess `G0` of the gradient bound.
    pub g0: f64,
    pub master_seed: u64,
    /// Replaces the diameter bound derived from the feasible set.
    pub d_override: Option<f64>,
}

impl Topology {
    /// Synchronous LocalAdaSEG with `α = 1`.
    pub fn synchronous(
        workers: usize,
        local_steps: usize,
        rounds: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            workers,
            rounds,
            local_steps: LocalSteps::Uniform(local_steps),
            solver: SolverKind::LocalAdaSeg,
            alpha_mode: AlphaMode::Nonsmooth,
            g0: 1.0,
            master_seed,
            d_override: None,
        }
    }

    pub fn with_solver(mut self, solver: SolverKind) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_alpha_mode(mut self, mode: AlphaMode) -> Self {
        self.alpha_mode = mode;
        self
    }

    pub fn with_g0(mut self, g0: f64) -> Self {
        self.g0 = g0;
        self
    }

    pub fn with_per_worker_steps(mut self, steps: Vec<usize>) -> Self {
        self.local_steps = LocalSteps::PerWorker(steps);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.workers == 0 {
            problems.push("M must be >= 1".to_string());
        }
        if self.rounds == 0 {
            problems.push("R must be >= 1".to_string());
        }
        match &self.local_steps {
            LocalSteps::Uniform(0) => problems.push("K must be >= 1".to_string()),
            LocalSteps::Uniform(_) => {}
            LocalSteps::PerWorker(ks) => {
                if ks.len() != self.workers {
                    problems.push(format!(
                        "per_worker_K has {} entries but M = {}",
                        ks.len(),
                        self.workers
                    ));
                }
                if ks.contains(&0) {
                    problems.push("per_worker_K entries must be >= 1".to_string());
                }
                if self.solver.is_minibatch() {
                    problems.push("minibatch extragradient needs a uniform K".to_string());
                }
            }
        }
        if !(self.g0.is_finite() && self.g0 > 0.0) {
            problems.push(format!("G0 must be finite and > 0, got {}", self.g0));
        }
        if let Some(d) = self.d_override {
            if !(d.is_finite() && d > 0.0) {
                problems.push(format!("D override must be finite and > 0, got {d}"));
            }
        }
        if matches!(self.solver, SolverKind::Segda { .. }) && self.workers != 1 {
            problems.push("SEGDA runs on a single worker (M = 1)".to_string());
        }
        if let Err(e) = self.solver.validate() {
            problems.push(e.to_string());
        }
        if let Err(e) = self.alpha_mode.validate() {
            problems.push(e.to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    /// Local steps worker `m` runs per round.
    pub fn steps_for(&self, m: usize) -> usize {
        match &self.local_steps {
            LocalSteps::Uniform(k) => *k,
            LocalSteps::PerWorker(ks) => ks[m],
        }
    }

    /// Longest local phase of a round.
    pub fn max_local_steps(&self) -> usize {
        match &self.local_steps {
            LocalSteps::Uniform(k) => *k,
            LocalSteps::PerWorker(ks) => ks.iter().copied().max().unwrap_or(0),
        }
    }

    pub fn is_synchronous(&self) -> bool {
        match &self.local_steps {
            LocalSteps::Uniform(_) => true,
            LocalSteps::PerWorker(ks) => ks.windows(2).all(|w| w[0] == w[1]),
        }
    }

    /// `T = K·R` (longest local phase for the asynchronous variant).
    pub fn horizon(&self) -> u64 {
        (self.max_local_steps() * self.rounds) as u64
    }

    /// Communication times `S = {0, K, 2K, …, RK}`.
    pub fn communication_times(&self) -> Vec<u64> {
        let k = self.max_local_steps() as u64;
        (0..=self.rounds as u64).map(|r| r * k).collect()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_mode.alpha(self.workers, self.horizon())
    }

    /// Oracle calls a complete run consumes.
    pub fn expected_oracle_calls(&self) -> u64 {
        if self.solver.is_minibatch() {
            let batch = self.max_local_steps() * self.workers;
            return self.solver.calls_per_step(batch) * self.rounds as u64;
        }
        let per_step = self.solver.calls_per_step(1);
        let steps: u64 = (0..self.workers).map(|m| self.steps_for(m) as u64).sum();
        per_step * steps * self.rounds as u64
    }
}
