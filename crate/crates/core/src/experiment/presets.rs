//! One-command reproduction bundles for the bilinear benchmark: the K grid,
//! the optimizer comparison and the asynchronous regime.

use std::io::Write;
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, RecordEveryName, SolverName};
use super::csv_io::write_labeled_csv;
use crate::error::{Error, Result};
use crate::simulator::{run_many, Execution, Job, Trajectory};

pub const FIG2_K_GRID: [usize; 7] = [1, 5, 10, 50, 100, 250, 500];
pub const FIG2_HORIZON: usize = 5000;
pub const SIGMAS: [f64; 2] = [0.1, 0.5];
pub const ASYNC_K: [usize; 4] = [50, 45, 40, 35];

const PRESET_PREFIX: [&str; 5] = ["label", "solver", "sigma", "K", "seed"];

#[derive(Debug, Default)]
pub struct PresetReport {
    pub files: Vec<PathBuf>,
    /// One line per run: label, seed, initial and final residual.
    pub summary: Vec<String>,
}

struct Entry {
    label: String,
    config: ExperimentConfig,
}

fn base(n_sigma: f64, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.problem.sigma = n_sigma;
    c.problem.problem_seed = seed;
    c.topology.master_seed = seed;
    // Runs are parallelized across jobs instead.
    c.topology.parallel = false;
    c
}

fn k_column(c: &ExperimentConfig) -> String {
    match &c.topology.per_worker_k {
        Some(ks) => ks
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join("/"),
        None => c.topology.k.to_string(),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn open(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    Ok(std::io::BufWriter::new(
        std::fs::File::create(path).map_err(|e| io_err(path, e))?,
    ))
}

fn run_entries(entries: &[Entry], execution: Execution) -> Result<Vec<Trajectory>> {
    let problems = entries
        .iter()
        .map(|e| e.config.build_problem())
        .collect::<Result<Vec<_>>>()?;
    let jobs = entries
        .iter()
        .zip(&problems)
        .map(|(e, p)| {
            Ok(Job {
                topology: e.config.topology()?,
                problem: p,
                options: e.config.run_options(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    run_many(&jobs, execution).into_iter().collect()
}

fn write_bundle(
    path: &Path,
    entries: &[Entry],
    trajectories: &[Trajectory],
    report: &mut PresetReport,
) -> Result<()> {
    let rows = entries.iter().zip(trajectories).flat_map(|(e, t)| {
        let prefix = vec![
            e.label.clone(),
            e.config
                .solver_kind()
                .map(|k| k.label())
                .unwrap_or("invalid")
                .to_string(),
            e.config.problem.sigma.to_string(),
            k_column(&e.config),
            e.config.problem.problem_seed.to_string(),
        ];
        t.rows.iter().map(move |r| (prefix.clone(), r))
    });
    write_labeled_csv(open(path)?, &PRESET_PREFIX, rows)?;
    for (e, t) in entries.iter().zip(trajectories) {
        report.summary.push(format!(
            "{:<24} sigma={:<4} seed={:<3} initial={:.4e} final={:.4e}",
            e.label,
            e.config.problem.sigma,
            e.config.problem.problem_seed,
            t.initial_residual,
            t.final_residual()
        ));
    }
    report.files.push(path.to_path_buf());
    Ok(())
}

fn fig2_entries(seeds: &[u64]) -> Vec<Entry> {
    let mut out = Vec::new();
    for &sigma in &SIGMAS {
        for &k in &FIG2_K_GRID {
            for &seed in seeds {
                let mut c = base(sigma, seed);
                c.topology.k = k;
                c.topology.r = FIG2_HORIZON / k;
                out.push(Entry {
                    label: format!("K={k}"),
                    config: c,
                });
            }
        }
    }
    out
}

/// LocalAdaSEG over the K grid at fixed `T = 5000`, `M = 4`, `n = 10`, for
/// both noise levels. Writes `fig2.csv` into `out_dir`.
pub fn replicate_fig2(out_dir: &Path, seeds: &[u64], execution: Execution) -> Result<PresetReport> {
    let entries = fig2_entries(seeds);
    let trajectories = run_entries(&entries, execution)?;
    let mut report = PresetReport::default();
    write_bundle(
        &out_dir.join("fig2.csv"),
        &entries,
        &trajectories,
        &mut report,
    )?;
    Ok(report)
}

fn fig3_entries(seeds: &[u64]) -> Vec<Entry> {
    let solvers: [(&str, SolverName); 5] = [
        ("LocalAdaSEG", SolverName::LocalAdaseg),
        ("LocalSEGDA", SolverName::LocalSegda),
        ("LocalSGDA", SolverName::LocalSgda),
        ("MB-SEGDA", SolverName::MbSegda),
        ("MB-AdaEG", SolverName::MinibatchEg),
    ];
    let mut out = Vec::new();
    for &sigma in &SIGMAS {
        for &seed in seeds {
            for (label, kind) in solvers {
                let mut c = base(sigma, seed);
                c.solver.kind = kind;
                out.push(Entry {
                    label: label.into(),
                    config: c,
                });
            }
            out.push(segda_mkr(sigma, seed));
        }
    }
    out
}

/// Single-worker SEGDA with the same sample budget as the default M·K·R run.
fn segda_mkr(sigma: f64, seed: u64) -> Entry {
    let mut c = base(sigma, seed);
    let budget = c.topology.m * c.topology.r;
    c.solver.kind = SolverName::Segda;
    c.topology.m = 1;
    c.topology.r = budget;
    Entry {
        label: "SEGDA-MKR".into(),
        config: c,
    }
}

/// LocalAdaSEG against the local, minibatch and single-worker baselines at
/// `K = 50`, `R = 40`. Writes `fig3.csv`.
pub fn replicate_fig3(out_dir: &Path, seeds: &[u64], execution: Execution) -> Result<PresetReport> {
    let entries = fig3_entries(seeds);
    let trajectories = run_entries(&entries, execution)?;
    let mut report = PresetReport::default();
    write_bundle(
        &out_dir.join("fig3.csv"),
        &entries,
        &trajectories,
        &mut report,
    )?;
    Ok(report)
}

fn async_entries(seeds: &[u64]) -> Vec<Entry> {
    let mut out = Vec::new();
    for &seed in seeds {
        out.push(Entry {
            label: "sync".into(),
            config: base(0.1, seed),
        });
        let mut c = base(0.1, seed);
        c.topology.per_worker_k = Some(ASYNC_K.to_vec());
        out.push(Entry {
            label: "async".into(),
            config: c,
        });
        out.push(segda_mkr(0.1, seed));
    }
    out
}

/// Synchronous against asynchronous local steps (plus SEGDA-MKR) at
/// `σ = 0.1`. Writes `async.csv`, and `vt.csv` with the per-iteration
/// `V_max` of the synchronous run next to `√t` and `t^0.4`.
pub fn replicate_async(
    out_dir: &Path,
    seeds: &[u64],
    execution: Execution,
) -> Result<PresetReport> {
    let entries = async_entries(seeds);
    let trajectories = run_entries(&entries, execution)?;
    let mut report = PresetReport::default();
    write_bundle(
        &out_dir.join("async.csv"),
        &entries,
        &trajectories,
        &mut report,
    )?;

    let mut vt = base(0.1, seeds.first().copied().unwrap_or(0));
    vt.output.record_every = RecordEveryName::Iteration;
    let t = &run_entries(
        &[Entry {
            label: "vt".into(),
            config: vt,
        }],
        execution,
    )?[0];
    let path = out_dir.join("vt.csv");
    let mut w = open(&path)?;
    let write = |w: &mut std::io::BufWriter<std::fs::File>| -> std::io::Result<()> {
        writeln!(w, "iteration,v_max,sqrt_t,t_pow_0_4")?;
        for r in &t.rows {
            let it = r.iteration as f64;
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e}",
                r.iteration,
                r.v_max,
                it.sqrt(),
                it.powf(0.4)
            )?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(&path, e))?;
    report
        .summary
        .push(format!("V_max(T)/sqrt(T) = {:.6e}", t.v_over_sqrt_t()));
    report.files.push(path);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig2_grid_holds_horizon_fixed() {
        let entries = fig2_entries(&[0]);
        assert_eq!(entries.len(), FIG2_K_GRID.len() * SIGMAS.len());
        for e in &entries {
            assert_eq!(e.config.horizon(), FIG2_HORIZON as u64);
            assert!(e.config.issues().is_empty());
        }
    }

    #[test]
    fn baselines_share_the_sample_budget() {
        for e in fig3_entries(&[3]) {
            let t = e.config.topology().unwrap();
            // Gradient descent-ascent probes once per step.
            let per_step = if e.label == "LocalSGDA" { 1 } else { 2 };
            assert_eq!(
                t.expected_oracle_calls(),
                per_step * 4 * 50 * 40,
                "{}",
                e.label
            );
        }
    }

    #[test]
    fn async_entries_validate() {
        for e in async_entries(&[0, 1]) {
            e.config.topology().unwrap();
        }
    }
}
