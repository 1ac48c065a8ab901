use crate::algorithms::StepTrace;
use crate::space::Iterate;

/// Metrics at one record point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    /// 1-based round the record point falls in.
    pub round: usize,
    /// Global iteration `t`.
    pub iteration: u64,
    /// KKT residual of the running output average.
    pub residual: f64,
    /// Duality gap of the running output average (NaN when unavailable).
    pub dual_gap: f64,
    pub eta_min: f64,
    pub eta_max: f64,
    /// `max_m sqrt(Σ_t ‖g‖² + ‖M‖²)`.
    pub v_max: f64,
    /// Oracle calls consumed so far, all workers together.
    pub samples: u64,
    pub wall_ms: f64,
    /// Residual of the server-averaged anchor, when requested.
    pub anchor_residual: Option<f64>,
}

/// Server-side record of one communication.
#[derive(Debug, Clone, PartialEq)]
pub struct CommTrace {
    pub round: usize,
    pub iteration: u64,
    pub weights: Vec<f64>,
    /// Every worker's anchor right after the broadcast.
    pub anchors: Vec<Iterate>,
}

/// Per-step diagnostics of every worker plus every communication.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub steps: Vec<Vec<StepTrace>>,
    pub communications: Vec<CommTrace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
    /// Mean of all half iterates over workers and steps.
    pub final_output: Iterate,
    /// Server average after the last round.
    pub final_anchor: Iterate,
    pub initial_residual: f64,
    pub initial_gap: f64,
    /// `max{G/G0, G0/G}` with `G` the largest oracle norm observed.
    pub gamma_observed: f64,
    pub max_oracle_norm: f64,
    pub d: f64,
    pub alpha: f64,
    pub g0: f64,
    pub horizon: u64,
    pub total_samples: u64,
    pub trace: Option<RunTrace>,
}

impl Trajectory {
    pub fn final_residual(&self) -> f64 {
        self.rows
            .last()
            .map_or(self.initial_residual, |r| r.residual)
    }

    pub fn final_gap(&self) -> f64 {
        self.rows.last().map_or(self.initial_gap, |r| r.dual_gap)
    }

    /// First round whose record reaches `level` or below.
    pub fn rounds_to_reach(&self, level: f64) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.residual <= level)
            .map(|r| r.round)
    }

    /// `V_max(T)/√T` from the last record.
    pub fn v_over_sqrt_t(&self) -> f64 {
        let v = self.rows.last().map_or(0.0, |r| r.v_max);
        v / (self.horizon as f64).sqrt()
    }
}
