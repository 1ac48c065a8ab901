use serde::{Deserialize, Serialize};

use crate::algorithms::{AlphaMode, SolverKind};
use crate::error::{ConfigIssue, Error, Result};
use crate::problems::BilinearProblem;
use crate::simulator::{EvalPoint, Execution, LocalSteps, RecordEvery, RunOptions, Topology};
use crate::space::FeasibleSet;

/// A full experiment description. Every section and key is optional; missing
/// values take the defaults of the bilinear benchmark (`n = 10`, `σ = 0.1`,
/// `M = 4`, `K = 50`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub problem: ProblemSection,
    pub solver: SolverSection,
    pub topology: TopologySection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemSection {
    pub n: usize,
    pub sigma: f64,
    pub problem_seed: u64,
    pub noise_scale_is_std: bool,
}

impl Default for ProblemSection {
    fn default() -> Self {
        Self {
            n: 10,
            sigma: 0.1,
            problem_seed: 0,
            noise_scale_is_std: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverName {
    #[default]
    LocalAdaseg,
    Segda,
    /// Minibatch extragradient, adaptive unless `fixed_eta` is given.
    MinibatchEg,
    /// Minibatch extragradient with a fixed step.
    MbSegda,
    LocalSgda,
    LocalSegda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AlphaModeName {
    #[default]
    Nonsmooth,
    Smooth,
    SmoothEps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub kind: SolverName,
    #[serde(rename = "G0")]
    pub g0: f64,
    pub alpha_mode: AlphaModeName,
    /// `ε` for `smooth_eps`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Step size of the fixed-step baselines; defaults to `D/(G0·√T)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_eta: Option<f64>,
    /// Replaces the diameter bound computed from the box.
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub d_override: Option<f64>,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            kind: SolverName::LocalAdaseg,
            g0: 1.0,
            alpha_mode: AlphaModeName::Nonsmooth,
            epsilon: None,
            fixed_eta: None,
            d_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopologySection {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "per_worker_K", skip_serializing_if = "Option::is_none")]
    pub per_worker_k: Option<Vec<usize>>,
    #[serde(rename = "R")]
    pub r: usize,
    pub master_seed: u64,
    /// Run a round's workers on the thread pool.
    pub parallel: bool,
}

impl Default for TopologySection {
    fn default() -> Self {
        Self {
            m: 4,
            k: 50,
            per_worker_k: None,
            r: 40,
            master_seed: 0,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RecordEveryName {
    #[default]
    Round,
    Iteration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EvalPointName {
    #[default]
    OutputAverage,
    Anchor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub csv: String,
    pub record_every: RecordEveryName,
    pub eval_point: EvalPointName,
    /// Also write the generated instance next to the CSV.
    pub emit_problem: bool,
    /// Run label used by `compare`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            csv: "trajectory.csv".to_string(),
            record_every: RecordEveryName::Round,
            eval_point: EvalPointName::OutputAverage,
            emit_problem: false,
            label: None,
        }
    }
}

/// Parses and validates a TOML experiment description.
///
/// Syntax and type errors report the line; semantic errors are all collected
/// and reported together.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|span| text[..span.start.min(text.len())].matches('\n').count() + 1);
        Error::Syntax {
            line,
            message: e.message().trim().to_string(),
        }
    })?;
    let issues = config.issues();
    if issues.is_empty() {
        Ok(config)
    } else {
        Err(Error::Validation(issues))
    }
}

impl ExperimentConfig {
    /// Every semantic problem with this config.
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let mut issue = |key: &str, message: String| {
            out.push(ConfigIssue {
                key: key.to_string(),
                message,
            })
        };
        let p = &self.problem;
        if p.n == 0 {
            issue("problem.n", "must be >= 1".into());
        }
        if !(p.sigma.is_finite() && p.sigma >= 0.0) {
            issue(
                "problem.sigma",
                format!("must be finite and >= 0, got {}", p.sigma),
            );
        }

        let s = &self.solver;
        if !(s.g0.is_finite() && s.g0 > 0.0) {
            issue("solver.G0", format!("must be finite and > 0, got {}", s.g0));
        }
        match (s.alpha_mode, s.epsilon) {
            (AlphaModeName::SmoothEps, None) => issue(
                "solver.epsilon",
                "required by alpha_mode = smooth_eps".into(),
            ),
            (AlphaModeName::SmoothEps, Some(eps)) if !(eps > 0.0 && eps < 0.5) => {
                issue("solver.epsilon", format!("must lie in (0, 0.5), got {eps}"))
            }
            _ => {}
        }
        if let Some(eta) = s.fixed_eta {
            if !(eta.is_finite() && eta > 0.0) {
                issue(
                    "solver.fixed_eta",
                    format!("must be finite and > 0, got {eta}"),
                );
            }
        }
        if let Some(d) = s.d_override {
            if !(d.is_finite() && d > 0.0) {
                issue("solver.D", format!("must be finite and > 0, got {d}"));
            }
        }

        let t = &self.topology;
        if t.m == 0 {
            issue("topology.M", "must be >= 1".into());
        }
        if t.k == 0 {
            issue("topology.K", "must be >= 1".into());
        }
        if t.r == 0 {
            issue("topology.R", "must be >= 1".into());
        }
        if let Some(ks) = &t.per_worker_k {
            if ks.len() != t.m {
                issue(
                    "topology.per_worker_K",
                    format!("has {} entries but topology.M = {}", ks.len(), t.m),
                );
            }
            if ks.contains(&0) {
                issue("topology.per_worker_K", "entries must be >= 1".into());
            }
            if matches!(s.kind, SolverName::MinibatchEg | SolverName::MbSegda) {
                issue(
                    "topology.per_worker_K",
                    "minibatch solvers need a uniform K".into(),
                );
            }
        }
        if s.kind == SolverName::Segda && t.m != 1 {
            issue(
                "topology.M",
                "segda runs on a single worker; set M = 1".into(),
            );
        }
        if self.output.csv.trim().is_empty() {
            issue("output.csv", "must name a file".into());
        }
        if let Some(label) = &self.output.label {
            if label.trim().is_empty() {
                issue("output.label", "must not be empty".into());
            }
        }
        out
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn build_problem(&self) -> Result<BilinearProblem> {
        let p = &self.problem;
        Ok(
            BilinearProblem::generate_seeded(p.n, p.sigma, p.problem_seed)?
                .with_noise_scale_is_std(p.noise_scale_is_std),
        )
    }

    /// `T = K·R`, with the longest per-worker phase for the asynchronous variant.
    pub fn horizon(&self) -> u64 {
        let t = &self.topology;
        let k = t
            .per_worker_k
            .as_ref()
            .and_then(|ks| ks.iter().copied().max())
            .unwrap_or(t.k);
        (k * t.r) as u64
    }

    /// Diameter bound the run will use.
    pub fn diameter(&self) -> Result<f64> {
        match self.solver.d_override {
            Some(d) => Ok(d),
            None => FeasibleSet::cube(2 * self.problem.n, -1.0, 1.0)?.diameter_bound(),
        }
    }

    /// Fixed step size for the baselines: the configured one or `D/(G0·√T)`.
    pub fn baseline_eta(&self) -> Result<f64> {
        match self.solver.fixed_eta {
            Some(eta) => Ok(eta),
            None => Ok(self.diameter()? / (self.solver.g0 * (self.horizon() as f64).sqrt())),
        }
    }

    pub fn solver_kind(&self) -> Result<SolverKind> {
        Ok(match self.solver.kind {
            SolverName::LocalAdaseg => SolverKind::LocalAdaSeg,
            SolverName::Segda => SolverKind::Segda {
                eta: self.baseline_eta()?,
            },
            SolverName::MinibatchEg => SolverKind::MinibatchEg {
                eta: self.solver.fixed_eta,
            },
            SolverName::MbSegda => SolverKind::MinibatchEg {
                eta: Some(self.baseline_eta()?),
            },
            SolverName::LocalSgda => SolverKind::LocalSgda {
                eta: self.baseline_eta()?,
            },
            SolverName::LocalSegda => SolverKind::LocalSegda {
                eta: self.baseline_eta()?,
            },
        })
    }

    pub fn alpha_mode(&self) -> AlphaMode {
        match self.solver.alpha_mode {
            AlphaModeName::Nonsmooth => AlphaMode::Nonsmooth,
            AlphaModeName::Smooth => AlphaMode::Smooth,
            AlphaModeName::SmoothEps => {
                AlphaMode::SmoothEps(self.solver.epsilon.unwrap_or(f64::NAN))
            }
        }
    }

    pub fn topology(&self) -> Result<Topology> {
        let issues = self.issues();
        if !issues.is_empty() {
            return Err(Error::Validation(issues));
        }
        let t = &self.topology;
        let topology = Topology {
            workers: t.m,
            rounds: t.r,
            local_steps: match &t.per_worker_k {
                Some(ks) => LocalSteps::PerWorker(ks.clone()),
                None => LocalSteps::Uniform(t.k),
            },
            solver: self.solver_kind()?,
            alpha_mode: self.alpha_mode(),
            g0: self.solver.g0,
            master_seed: t.master_seed,
            d_override: self.solver.d_override,
        };
        topology.validate()?;
        Ok(topology)
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            record: match self.output.record_every {
                RecordEveryName::Round => RecordEvery::Round,
                RecordEveryName::Iteration => RecordEvery::Iteration,
            },
            eval_point: match self.output.eval_point {
                EvalPointName::OutputAverage => EvalPoint::OutputAverage,
                EvalPointName::Anchor => EvalPoint::Anchor,
            },
            trace: false,
            execution: if self.topology.parallel {
                Execution::Parallel
            } else {
                Execution::Serial
            },
            record_anchor: false,
        }
    }

    /// Label used in combined CSVs.
    pub fn label(&self) -> String {
        match &self.output.label {
            Some(l) => l.clone(),
            None => {
                let name = self.solver_kind().map(|k| k.label()).unwrap_or("invalid");
                match &self.topology.per_worker_k {
                    Some(ks) => format!("{name}-K{:?}", ks),
                    None => format!("{name}-K{}", self.topology.k),
                }
            }
        }
    }
}
