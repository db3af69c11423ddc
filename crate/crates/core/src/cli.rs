//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on validation or usage errors, 2 on IO errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{parse_scenario, Arm, Scenario};
use crate::engine::run;
use crate::error::{Error, Result};
use crate::experiment::{compare, compare_csv, sweep, sweep_csv, SeedRange};
use crate::output::{unix_ms, write_file, write_run, write_surface};
use crate::plot::render_run_plots;

/// Environment variable overriding the default output root.
pub const OUT_ENV: &str = "AZPP_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "azpp",
    version,
    about = "Agent-based simulation of fear-driven collective violence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write its CSVs, snapshots, plots and manifest.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the per-tick tie matrix (network.csv).
        #[arg(long)]
        network_dump: bool,
    },
    /// Run a scenario over a seed range and aggregate per-seed summaries.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        seeds: SeedRange,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paired-seed comparison of two scenarios (or of the two arms of one).
    Compare {
        config_a: PathBuf,
        config_b: Option<PathBuf>,
        #[arg(long)]
        seeds: SeedRange,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the disposition surface (CSV and heatmap) of a scenario.
    Surface {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-render the plots of a run directory from its CSVs.
    Plot { run_dir: PathBuf },
}

fn out_root() -> PathBuf {
    std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into())
}

fn single_config(path: &Path, scenario: Scenario) -> Result<Arm> {
    let mut runs = scenario.runs();
    if runs.len() != 1 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: format!("expected a single-arm scenario, found {} arms", runs.len()),
        });
    }
    Ok(runs.remove(0))
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run {
            config,
            seed,
            out,
            network_dump,
        } => {
            let scenario = parse_scenario(&config)?;
            let runs = scenario.runs();
            let multi = !scenario.arms.is_empty();
            let root = out
                .clone()
                .unwrap_or_else(|| out_root().join(stem(&config)));
            for mut arm in runs {
                if let Some(s) = seed {
                    arm.config.seed = s;
                }
                arm.config.output.network_dump |= network_dump;
                arm.config.validate()?;
                let dir = match (multi, out.is_some()) {
                    (true, _) => root.join(&arm.name),
                    (false, true) => root.clone(),
                    (false, false) => root.join(format!("seed-{}", arm.config.seed)),
                };
                let started = unix_ms();
                let result = run(&arm.config)?;
                let manifest = write_run(&result, &dir, started)?;
                let last = result
                    .frames
                    .last()
                    .map(|f| f.global.destroyed_count)
                    .unwrap_or(0);
                println!(
                    "{}: {} ticks, {} attacks, {} destroyed -> {} ({} files)",
                    arm.name,
                    result.frames.len(),
                    result.attacks.len(),
                    last,
                    dir.display(),
                    manifest.files.len()
                );
            }
        }
        Command::Sweep {
            config,
            seeds,
            parallel,
            out,
        } => {
            let scenario = parse_scenario(&config)?;
            let multi = !scenario.arms.is_empty();
            let dir = out.unwrap_or_else(|| out_root().join(format!("{}-sweep", stem(&config))));
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            for arm in scenario.runs() {
                let rows = sweep(&arm.config, seeds, parallel)?;
                let name = if multi {
                    format!("sweep-{}.csv", arm.name)
                } else {
                    "sweep.csv".into()
                };
                let path = dir.join(name);
                write_file(&path, sweep_csv(&rows))?;
                println!("{}: {} seeds -> {}", arm.name, rows.len(), path.display());
            }
        }
        Command::Compare {
            config_a,
            config_b,
            seeds,
            parallel,
            out,
        } => {
            let (a, b, label) = match config_b {
                Some(path_b) => {
                    let a = single_config(&config_a, parse_scenario(&config_a)?)?;
                    let b = single_config(&path_b, parse_scenario(&path_b)?)?;
                    (a, b, format!("{}-vs-{}", stem(&config_a), stem(&path_b)))
                }
                None => {
                    let scenario = parse_scenario(&config_a)?;
                    if scenario.arms.len() != 2 {
                        return Err(Error::Parse {
                            path: config_a.clone(),
                            message: format!(
                                "compare with one scenario needs exactly two arms, found {}",
                                scenario.arms.len()
                            ),
                        });
                    }
                    let mut arms = scenario.arms.into_iter();
                    let (a, b) = (arms.next().unwrap(), arms.next().unwrap());
                    let label = format!("{}-{}-vs-{}", stem(&config_a), a.name, b.name);
                    (a, b, label)
                }
            };
            let pairs = compare(&a.config, &b.config, seeds, parallel)?;
            let dir = out.unwrap_or_else(|| out_root().join(label));
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            let path = dir.join("compare.csv");
            write_file(&path, compare_csv(&pairs))?;
            let deltas: Vec<f64> = pairs
                .iter()
                .filter_map(|p| Some(p.b.get("destroyed_count")? - p.a.get("destroyed_count")?))
                .collect();
            let mean = deltas.iter().sum::<f64>() / deltas.len().max(1) as f64;
            println!(
                "{} vs {}: {} seeds, mean destroyed_count delta {:.3} -> {}",
                a.name,
                b.name,
                pairs.len(),
                mean,
                path.display()
            );
        }
        Command::Surface { config, out } => {
            let arm = single_config(&config, parse_scenario(&config)?)?;
            let dir = out.unwrap_or_else(|| out_root().join(format!("{}-surface", stem(&config))));
            for p in write_surface(&arm.config, &dir)? {
                println!("{}", p.display());
            }
        }
        Command::Plot { run_dir } => {
            for p in render_run_plots(&run_dir)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

/// Parse `argv` (including the program name), execute, and return the
/// process exit code.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
