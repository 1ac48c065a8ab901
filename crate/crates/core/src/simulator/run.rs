use std::time::Instant;

use rayon::prelude::*;

use super::{CommTrace, RunTrace, Topology, Trajectory, TrajectoryRow};
use crate::algorithms::{
    baseline_step, plain_average, server_aggregate, AdaptiveState, Aggregate, SolverKind, StepSize,
    StepTrace, WorkerState,
};
use crate::error::Result;
use crate::problems::SaddleProblem;
use crate::space::{Iterate, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecordEvery {
    #[default]
    Round,
    Iteration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// Point at which record metrics are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalPoint {
    /// Running mean of half iterates, the algorithm's output.
    #[default]
    OutputAverage,
    /// Server average of the workers' latest iterates.
    Anchor,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub record: RecordEvery,
    pub eval_point: EvalPoint,
    /// Keep per-step and per-communication diagnostics.
    pub trace: bool,
    pub execution: Execution,
    /// Also record the residual of the server-averaged anchor each round.
    pub record_anchor: bool,
}

impl RunOptions {
    pub fn traced() -> Self {
        Self {
            trace: true,
            ..Self::default()
        }
    }
}

/// Worker state after one local step, kept for per-iteration records.
struct Snapshot {
    sum_half: Iterate,
    anchor: Iterate,
    steps: u64,
    eta: f64,
    v_accumulator: f64,
    oracle_calls: u64,
}

impl Snapshot {
    fn of(w: &WorkerState) -> Self {
        Self {
            sum_half: w.sum_half.clone(),
            anchor: w.anchor.clone(),
            steps: w.steps,
            eta: w.eta(),
            v_accumulator: w.v_accumulator,
            oracle_calls: w.oracle_calls,
        }
    }
}

/// The slice of worker state a record needs.
struct View<'a> {
    sum_half: &'a Iterate,
    anchor: &'a Iterate,
    steps: u64,
    eta: f64,
    v_accumulator: f64,
    oracle_calls: u64,
}

impl<'a> From<&'a WorkerState> for View<'a> {
    fn from(w: &'a WorkerState) -> Self {
        Self {
            sum_half: &w.sum_half,
            anchor: &w.anchor,
            steps: w.steps,
            eta: w.eta(),
            v_accumulator: w.v_accumulator,
            oracle_calls: w.oracle_calls,
        }
    }
}

impl<'a> From<&'a Snapshot> for View<'a> {
    fn from(s: &'a Snapshot) -> Self {
        Self {
            sum_half: &s.sum_half,
            anchor: &s.anchor,
            steps: s.steps,
            eta: s.eta,
            v_accumulator: s.v_accumulator,
            oracle_calls: s.oracle_calls,
        }
    }
}

#[derive(Default)]
struct PhaseOutput {
    traces: Vec<StepTrace>,
    snapshots: Vec<Snapshot>,
}

/// Runs the parameter-server simulation for `topology.rounds` rounds.
///
/// Every round, each worker runs its local steps from the common anchor, then
/// the server averages the workers' latest iterates and broadcasts the result
/// as the new anchor. Communications happen at `S = {0, K, …, RK}`. The
/// returned output is the mean of all half iterates.
pub fn run<P: SaddleProblem + ?Sized>(
    topology: &Topology,
    problem: &P,
    options: &RunOptions,
) -> Result<Trajectory> {
    topology.validate()?;
    problem.check_dims()?;
    let set = problem.feasible_set();
    let d = match topology.d_override {
        Some(d) => d,
        None => set.diameter_bound()?,
    };
    let alpha = topology.alpha();
    let start = set.project(&Iterate::zeros(problem.x_dim(), problem.y_dim()))?;

    let step_size = match topology.solver.fixed_eta() {
        Some(eta) => StepSize::Fixed(eta),
        None => StepSize::Adaptive(AdaptiveState::new(d, topology.g0, alpha)?),
    };
    let solver = topology.solver;
    let minibatch = solver.is_minibatch();
    let (n_states, batch) = if minibatch {
        (1, topology.max_local_steps() * topology.workers)
    } else {
        (topology.workers, 1)
    };
    let mut workers: Vec<WorkerState> = (0..n_states)
        .map(|m| {
            WorkerState::new(
                start.clone(),
                step_size.clone(),
                RngStream::new(topology.master_seed, m as u64),
            )
        })
        .collect();

    let clock = Instant::now();
    let k_max = topology.max_local_steps() as u64;
    let mut trace = options.trace.then(|| RunTrace {
        steps: vec![Vec::new(); n_states],
        communications: vec![CommTrace {
            round: 0,
            iteration: 0,
            weights: vec![1.0 / n_states as f64; n_states],
            anchors: vec![start.clone(); n_states],
        }],
    });

    let want_snapshots = options.record == RecordEvery::Iteration && !minibatch;
    let mut rows = Vec::with_capacity(topology.rounds);
    for round in 1..=topology.rounds {
        let phase = |(m, w): (usize, &mut WorkerState)| -> PhaseOutput {
            let steps = if minibatch { 1 } else { topology.steps_for(m) };
            let mut out = PhaseOutput::default();
            for _ in 0..steps {
                let t = baseline_step(&solver, w, problem, batch);
                if options.trace {
                    out.traces.push(t);
                }
                if want_snapshots {
                    out.snapshots.push(Snapshot::of(w));
                }
            }
            out
        };
        let outputs: Vec<PhaseOutput> = match options.execution {
            Execution::Parallel if n_states > 1 => {
                workers.par_iter_mut().enumerate().map(phase).collect()
            }
            _ => workers.iter_mut().enumerate().map(phase).collect(),
        };

        if want_snapshots {
            for s in 1..k_max as usize {
                // Workers with shorter phases hold their last state.
                let views: Vec<View> = outputs
                    .iter()
                    .map(|o| View::from(&o.snapshots[(s - 1).min(o.snapshots.len() - 1)]))
                    .collect();
                let iteration = (round as u64 - 1) * k_max + s as u64;
                rows.push(
                    record(
                        problem,
                        solver,
                        round,
                        iteration,
                        &views,
                        options.eval_point,
                        &clock,
                    )?
                    .0,
                );
            }
        }

        let views: Vec<View> = workers.iter().map(View::from).collect();
        let (mut row, aggregate) = record(
            problem,
            solver,
            round,
            round as u64 * k_max,
            &views,
            options.eval_point,
            &clock,
        )?;
        if options.record_anchor {
            row.anchor_residual = Some(problem.kkt_residual(&aggregate.iterate));
        }
        rows.push(row);
        for w in &mut workers {
            w.anchor = aggregate.iterate.clone();
        }

        if let Some(t) = trace.as_mut() {
            for (m, o) in outputs.into_iter().enumerate() {
                t.steps[m].extend(o.traces);
            }
            t.communications.push(CommTrace {
                round,
                iteration: round as u64 * k_max,
                weights: aggregate.weights,
                anchors: workers.iter().map(|w| w.anchor.clone()).collect(),
            });
        }
    }

    let views: Vec<View> = workers.iter().map(View::from).collect();
    let final_output = output_average(&views);
    let max_oracle_norm = workers
        .iter()
        .map(|w| w.max_oracle_norm)
        .fold(0.0, f64::max);
    Ok(Trajectory {
        rows,
        final_anchor: workers[0].anchor.clone(),
        initial_residual: problem.kkt_residual(&start),
        initial_gap: problem.duality_gap(&start).unwrap_or(f64::NAN),
        gamma_observed: gamma(max_oracle_norm, topology.g0),
        max_oracle_norm,
        d,
        alpha,
        g0: topology.g0,
        horizon: topology.horizon(),
        total_samples: workers.iter().map(|w| w.oracle_calls).sum(),
        final_output,
        trace,
    })
}

/// `max{G/G0, G0/G}`.
fn gamma(g: f64, g0: f64) -> f64 {
    if g > 0.0 {
        (g / g0).max(g0 / g)
    } else {
        f64::INFINITY
    }
}

fn output_average(views: &[View]) -> Iterate {
    let steps: u64 = views.iter().map(|v| v.steps).sum();
    if steps == 0 {
        return views[0].anchor.clone();
    }
    let mut sum = Iterate::zeros(views[0].anchor.x_dim(), views[0].anchor.y_dim());
    for v in views {
        sum.axpy(1.0, v.sum_half);
    }
    sum.scale(1.0 / steps as f64);
    sum
}

/// What the server would broadcast given these worker states.
fn server_average(solver: SolverKind, views: &[View]) -> Result<Aggregate> {
    if solver == SolverKind::LocalAdaSeg {
        let reports: Vec<(f64, &Iterate)> = views.iter().map(|v| (v.eta, v.anchor)).collect();
        server_aggregate(&reports)
    } else {
        let iterates: Vec<&Iterate> = views.iter().map(|v| v.anchor).collect();
        plain_average(&iterates)
    }
}

fn record<P: SaddleProblem + ?Sized>(
    problem: &P,
    solver: SolverKind,
    round: usize,
    iteration: u64,
    views: &[View],
    eval_point: EvalPoint,
    clock: &Instant,
) -> Result<(TrajectoryRow, Aggregate)> {
    let aggregate = server_average(solver, views)?;
    let owned;
    let point = match eval_point {
        EvalPoint::OutputAverage => {
            owned = output_average(views);
            &owned
        }
        EvalPoint::Anchor => &aggregate.iterate,
    };
    let row = TrajectoryRow {
        round,
        iteration,
        residual: problem.kkt_residual(point),
        dual_gap: problem.duality_gap(point).unwrap_or(f64::NAN),
        eta_min: views.iter().map(|v| v.eta).fold(f64::INFINITY, f64::min),
        eta_max: views.iter().map(|v| v.eta).fold(0.0, f64::max),
        v_max: views
            .iter()
            .map(|v| v.v_accumulator.sqrt())
            .fold(0.0, f64::max),
        samples: views.iter().map(|v| v.oracle_calls).sum(),
        wall_ms: clock.elapsed().as_secs_f64() * 1e3,
        anchor_residual: None,
    };
    Ok((row, aggregate))
}

/// One simulation of a batch: a topology, the problem it runs on and options.
pub struct Job<'a, P: ?Sized> {
    pub topology: Topology,
    pub problem: &'a P,
    pub options: RunOptions,
}

/// Runs independent jobs, in parallel or serially; results keep job order and
/// do not depend on the execution mode.
pub fn run_many<P: SaddleProblem + ?Sized>(
    jobs: &[Job<'_, P>],
    execution: Execution,
) -> Vec<Result<Trajectory>> {
    let one = |job: &Job<'_, P>| run(&job.topology, job.problem, &job.options);
    match execution {
        Execution::Parallel => jobs.par_iter().map(one).collect(),
        Execution::Serial => jobs.iter().map(one).collect(),
    }
}
