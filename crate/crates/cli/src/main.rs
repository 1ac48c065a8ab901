use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use localadaseg::experiment::{
    compare, parse_config, parse_vary, replicate_async, replicate_fig2, replicate_fig3,
    resolve_output_dir, run_experiment, sweep, write_sweep_csv, ExperimentConfig, PresetReport,
    VaryAxis, OUTPUT_DIR_ENV,
};
use localadaseg::simulator::Execution;
use localadaseg::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "localadaseg",
    version,
    about = "Local adaptive stochastic extragradient simulator"
)]
struct Cli {
    /// Directory for relative output paths. Falls back to $LOCALADASEG_OUTPUT_DIR.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its trajectory CSV and metadata sidecar.
    Run { config: PathBuf },
    /// Run a config over a grid of key values and seeds.
    Sweep {
        config: PathBuf,
        /// `section.key=v1,v2,…`; repeat for a cartesian grid.
        #[arg(long, required = true, value_name = "KEY=VALUES")]
        vary: Vec<String>,
        /// Comma-separated seeds; each sets problem_seed and master_seed.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
        /// Run grid points one after another.
        #[arg(long)]
        serial: bool,
    },
    /// Run several configs on one instance and write a combined CSV.
    Compare {
        #[arg(required = true, num_args = 2..)]
        configs: Vec<PathBuf>,
        #[arg(long, default_value = "compare.csv")]
        out: PathBuf,
    },
    /// K grid at fixed horizon for both noise levels.
    ReplicateFig2(PresetArgs),
    /// LocalAdaSEG against the baselines.
    ReplicateFig3(PresetArgs),
    /// Synchronous against asynchronous local steps, plus the V_t curve.
    ReplicateAsync(PresetArgs),
}

#[derive(Args)]
struct PresetArgs {
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
}

fn load(path: &Path) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn resolve(out_dir: Option<&Path>, path: PathBuf) -> PathBuf {
    match out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path,
    }
}

fn print_preset(report: &PresetReport) {
    for line in &report.summary {
        println!("{line}");
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    let out_dir = resolve_output_dir(cli.out_dir.as_deref());
    match cli.command {
        Command::Run { config } => {
            let config = load(&config)?;
            let report = run_experiment(&config, out_dir.as_deref())?;
            let t = &report.trajectory;
            println!(
                "{}: rounds={} samples={} residual {:.6e} -> {:.6e}, gap {:.6e} -> {:.6e}",
                report.sidecar.label,
                t.rows.last().map_or(0, |r| r.round),
                t.total_samples,
                t.initial_residual,
                t.final_residual(),
                t.initial_gap,
                t.final_gap(),
            );
            println!("wrote {}", report.csv_path.display());
            println!("wrote {}", report.sidecar_path.display());
            if let Some(p) = &report.problem_path {
                println!("wrote {}", p.display());
            }
        }
        Command::Sweep {
            config,
            vary,
            seeds,
            out,
            serial,
        } => {
            let base = load(&config)?;
            let axes = vary
                .iter()
                .map(|v| parse_vary(v))
                .collect::<Result<Vec<VaryAxis>, _>>()?;
            let execution = if serial {
                Execution::Serial
            } else {
                Execution::Parallel
            };
            let results = sweep(&base, &axes, &seeds, execution)?;
            for r in &results {
                println!(
                    "{:<32} seed={:<4} final residual {:.6e}",
                    r.label,
                    r.seed,
                    r.trajectory.final_residual()
                );
            }
            let out = resolve(out_dir.as_deref(), out);
            write_sweep_csv(&results, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Compare { configs, out } => {
            let configs = configs
                .iter()
                .map(|c| load(c))
                .collect::<Result<Vec<_>, _>>()?;
            let out = resolve(out_dir.as_deref(), out);
            for (label, t) in compare(&configs, &out, Execution::Parallel)? {
                println!("{label:<24} final residual {:.6e}", t.final_residual());
            }
            println!("wrote {}", out.display());
        }
        Command::ReplicateFig2(a) => print_preset(&replicate_fig2(
            &out_dir.unwrap_or_default(),
            &a.seeds,
            Execution::Parallel,
        )?),
        Command::ReplicateFig3(a) => print_preset(&replicate_fig3(
            &out_dir.unwrap_or_default(),
            &a.seeds,
            Execution::Parallel,
        )?),
        Command::ReplicateAsync(a) => print_preset(&replicate_async(
            &out_dir.unwrap_or_default(),
            &a.seeds,
            Execution::Parallel,
        )?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Io { .. } = e {
                eprintln!("hint: set --out-dir or ${OUTPUT_DIR_ENV} to a writable directory");
            }
            ExitCode::from(if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_RUNTIME
            })
        }
    }
}
