use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{parse_config, ExperimentConfig};
use super::csv_io::{write_labeled_csv, write_trajectory_csv};
use crate::error::{Error, Result};
use crate::problems::{BilinearProblem, SaddleProblem};
use crate::simulator::{run, run_many, Execution, Job, Trajectory};
use crate::space::Iterate;

/// Environment variable that redirects relative output paths.
pub const OUTPUT_DIR_ENV: &str = "LOCALADASEG_OUTPUT_DIR";

pub const SIDECAR_FORMAT: &str = "localadaseg/run";

/// The explicit directory if given, else the environment override, if set.
pub fn resolve_output_dir(explicit: Option<&Path>) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
}

fn resolve(path: &str, out_dir: Option<&Path>) -> PathBuf {
    let p = Path::new(path);
    match out_dir {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn create_file(path: &Path) -> Result<fs::File> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    fs::File::create(path).map_err(|e| io_err(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    use std::io::Write;
    create_file(path)?
        .write_all(text.as_bytes())
        .map_err(|e| io_err(path, e))
}

fn sibling(csv: &Path, suffix: &str) -> PathBuf {
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    csv.with_file_name(format!("{stem}{suffix}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl From<&Iterate> for IterateRecord {
    fn from(z: &Iterate) -> Self {
        Self {
            x: z.x().to_vec(),
            y: z.y().to_vec(),
        }
    }
}

/// Metadata written next to a run's CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: String,
    pub version: u32,
    pub label: String,
    pub solver: String,
    /// The config that reproduces this run, as TOML.
    pub config_toml: String,
    #[serde(rename = "D")]
    pub d: f64,
    pub alpha: f64,
    #[serde(rename = "G0")]
    pub g0: f64,
    pub horizon: u64,
    /// `None` when no oracle norm was observed.
    pub gamma_observed: Option<f64>,
    pub gamma_certified: Option<f64>,
    pub max_oracle_norm: f64,
    pub initial_residual: f64,
    pub initial_gap: f64,
    pub final_residual: f64,
    pub final_gap: f64,
    pub total_samples: u64,
    pub v_over_sqrt_t: f64,
    pub final_output: IterateRecord,
    pub final_anchor: IterateRecord,
}

impl Sidecar {
    fn new(config: &ExperimentConfig, problem: &BilinearProblem, t: &Trajectory) -> Result<Self> {
        let g0 = config.solver.g0;
        Ok(Self {
            format: SIDECAR_FORMAT.into(),
            version: 1,
            label: config.label(),
            solver: config.solver_kind()?.label().into(),
            config_toml: config.to_toml(),
            d: t.d,
            alpha: t.alpha,
            g0,
            horizon: t.horizon,
            gamma_observed: t.gamma_observed.is_finite().then_some(t.gamma_observed),
            gamma_certified: problem.gradient_bound_hint().map(|g| (g / g0).max(g0 / g)),
            max_oracle_norm: t.max_oracle_norm,
            initial_residual: t.initial_residual,
            initial_gap: t.initial_gap,
            final_residual: t.final_residual(),
            final_gap: t.final_gap(),
            total_samples: t.total_samples,
            v_over_sqrt_t: t.v_over_sqrt_t(),
            final_output: (&t.final_output).into(),
            final_anchor: (&t.final_anchor).into(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("sidecar: {e}")))
    }

    /// The config echoed in this sidecar.
    pub fn config(&self) -> Result<ExperimentConfig> {
        parse_config(&self.config_toml)
    }
}

#[derive(Debug)]
pub struct RunReport {
    pub csv_path: PathBuf,
    pub sidecar_path: PathBuf,
    pub problem_path: Option<PathBuf>,
    pub trajectory: Trajectory,
    pub sidecar: Sidecar,
}

/// Builds the instance and runs the simulation, without touching the disk.
pub fn run_config(config: &ExperimentConfig) -> Result<(BilinearProblem, Trajectory)> {
    let topology = config.topology()?;
    let problem = config.build_problem()?;
    let trajectory = run(&topology, &problem, &config.run_options())?;
    Ok((problem, trajectory))
}

/// Runs `config` and writes its CSV, the metadata sidecar and optionally the
/// problem instance. Relative paths resolve against `out_dir`.
pub fn run_experiment(config: &ExperimentConfig, out_dir: Option<&Path>) -> Result<RunReport> {
    let (problem, trajectory) = run_config(config)?;
    let csv_path = resolve(&config.output.csv, out_dir);
    let file = create_file(&csv_path)?;
    write_trajectory_csv(std::io::BufWriter::new(file), &trajectory.rows).map_err(|e| match e {
        Error::Io { source, .. } => io_err(&csv_path, source),
        other => other,
    })?;

    let sidecar = Sidecar::new(config, &problem, &trajectory)?;
    let sidecar_path = sibling(&csv_path, ".meta.json");
    write_text(
        &sidecar_path,
        &serde_json::to_string_pretty(&sidecar).expect("sidecar serializes"),
    )?;

    let problem_path = if config.output.emit_problem {
        let path = sibling(&csv_path, ".problem.json");
        write_text(&path, &problem.to_json())?;
        Some(path)
    } else {
        None
    };
    Ok(RunReport {
        csv_path,
        sidecar_path,
        problem_path,
        trajectory,
        sidecar,
    })
}

/// Runs several configs on one shared instance and writes a long-format CSV
/// with `label` and `solver` columns.
pub fn compare(
    configs: &[ExperimentConfig],
    out: &Path,
    execution: Execution,
) -> Result<Vec<(String, Trajectory)>> {
    if configs.len() < 2 {
        return Err(Error::Usage("compare needs at least two configs".into()));
    }
    let problem_section = &configs[0].problem;
    if let Some(i) = configs.iter().position(|c| &c.problem != problem_section) {
        return Err(Error::Usage(format!(
            "config {} has a different [problem] section; compared runs must share one instance",
            i + 1
        )));
    }
    let labels: Vec<String> = configs.iter().map(ExperimentConfig::label).collect();
    for (i, label) in labels.iter().enumerate() {
        if labels[..i].contains(label) {
            return Err(Error::Usage(format!(
                "duplicate run label {label:?}; set output.label to disambiguate"
            )));
        }
    }
    let problem = configs[0].build_problem()?;
    let jobs = configs
        .iter()
        .map(|c| {
            Ok(Job {
                topology: c.topology()?,
                problem: &problem,
                options: c.run_options(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let trajectories = run_many(&jobs, execution)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let solvers: Vec<&str> = jobs.iter().map(|j| j.topology.solver.label()).collect();

    let file = create_file(out)?;
    let rows = labels
        .iter()
        .zip(&solvers)
        .zip(&trajectories)
        .flat_map(|((label, solver), t)| {
            t.rows
                .iter()
                .map(move |r| (vec![label.clone(), solver.to_string()], r))
        });
    write_labeled_csv(std::io::BufWriter::new(file), &["label", "solver"], rows)?;
    Ok(labels.into_iter().zip(trajectories).collect())
}

/// One swept config key and the values it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct VaryAxis {
    /// Dotted key, e.g. `topology.K`.
    pub key: String,
    pub values: Vec<String>,
}

/// Parses `key=v1,v2,…`.
pub fn parse_vary(arg: &str) -> Result<VaryAxis> {
    let (key, values) = arg
        .split_once('=')
        .ok_or_else(|| Error::Usage(format!("--vary expects key=v1,v2,…, got {arg:?}")))?;
    let key = key.trim();
    let values: Vec<String> = values
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    if key.is_empty() || values.is_empty() {
        return Err(Error::Usage(format!(
            "--vary {arg:?} names no key or no values"
        )));
    }
    Ok(VaryAxis {
        key: key.to_string(),
        values,
    })
}

fn toml_value(raw: &str) -> toml::Value {
    if let Ok(i) = raw.parse::<i64>() {
        toml::Value::Integer(i)
    } else if let Ok(f) = raw.parse::<f64>() {
        toml::Value::Float(f)
    } else if let Ok(b) = raw.parse::<bool>() {
        toml::Value::Boolean(b)
    } else {
        toml::Value::String(raw.to_string())
    }
}

fn set_key(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let (section, leaf) = key
        .split_once('.')
        .ok_or_else(|| Error::Usage(format!("sweep key {key:?} must look like section.key")))?;
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match entry {
        toml::Value::Table(t) => {
            t.insert(leaf.to_string(), value);
            Ok(())
        }
        _ => Err(Error::Usage(format!(
            "sweep key {key:?} does not name a section"
        ))),
    }
}

#[derive(Debug)]
pub struct SweepResult {
    /// `key=value` pairs of the grid point, `;`-separated.
    pub label: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub trajectory: Trajectory,
}

/// Runs the cartesian grid of `axes` for every seed. Each seed sets both the
/// problem seed and the master seed. With no seeds the base config's seeds are
/// used. Results are in grid-major, seed-minor order regardless of execution.
pub fn sweep(
    base: &ExperimentConfig,
    axes: &[VaryAxis],
    seeds: &[u64],
    execution: Execution,
) -> Result<Vec<SweepResult>> {
    if axes.is_empty() || axes.iter().any(|a| a.values.is_empty()) {
        return Err(Error::Usage("sweep grid is empty".into()));
    }
    let base_table: toml::Table = base
        .to_toml()
        .parse()
        .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;

    let mut points: Vec<Vec<(&str, &str)>> = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((axis.key.as_str(), v.as_str()));
                    q
                })
            })
            .collect();
    }

    let mut planned = Vec::new();
    for point in &points {
        let label = point
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        let seed_list: Vec<Option<u64>> = if seeds.is_empty() {
            vec![None]
        } else {
            seeds.iter().copied().map(Some).collect()
        };
        for seed in seed_list {
            let mut table = base_table.clone();
            for (k, v) in point {
                set_key(&mut table, k, toml_value(v))?;
            }
            if let Some(s) = seed {
                let s = toml::Value::Integer(s as i64);
                set_key(&mut table, "problem.problem_seed", s.clone())?;
                set_key(&mut table, "topology.master_seed", s)?;
            }
            let config = parse_config(&toml::to_string(&table).expect("table serializes"))?;
            let seed = seed.unwrap_or(config.problem.problem_seed);
            planned.push((label.clone(), seed, config));
        }
    }

    let problems = planned
        .iter()
        .map(|(_, _, c)| c.build_problem())
        .collect::<Result<Vec<_>>>()?;
    let jobs = planned
        .iter()
        .zip(&problems)
        .map(|((_, _, c), p)| {
            Ok(Job {
                topology: c.topology()?,
                problem: p,
                options: c.run_options(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let trajectories = run_many(&jobs, execution);
    planned
        .into_iter()
        .zip(trajectories)
        .map(|((label, seed, config), t)| {
            Ok(SweepResult {
                label,
                seed,
                config,
                trajectory: t?,
            })
        })
        .collect()
}

/// Writes sweep results as one long CSV with `label` and `seed` columns.
pub fn write_sweep_csv(results: &[SweepResult], out: &Path) -> Result<()> {
    let file = create_file(out)?;
    let rows = results.iter().flat_map(|r| {
        r.trajectory
            .rows
            .iter()
            .map(move |row| (vec![r.label.clone(), r.seed.to_string()], row))
    });
    write_labeled_csv(std::io::BufWriter::new(file), &["label", "seed"], rows)
}
