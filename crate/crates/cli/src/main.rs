//! `heterocut`: simulate common-line datasets, classify them, and run the
//! Monte Carlo checks.

mod report;
mod stats_cmd;
mod verify;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use heterocut::pipeline::{run_pipeline, PipelineConfig};
use heterocut::sim::{read_dataset, run_noise_sweep, simulate_dataset, write_dataset, write_sweep_csv, SimSpec};

#[derive(Parser)]
#[command(name = "heterocut", version, about)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset from a JSON spec.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify a dataset and report the partition.
    Partition {
        #[arg(long)]
        data: PathBuf,
        /// Pipeline configuration (JSON); defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        report: PathBuf,
        /// Per-class table; needs ground truth in the dataset.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Record wall-clock times in the report (makes it run-dependent).
        #[arg(long)]
        timings: bool,
    },
    /// Simulate and classify a list of specs, one table row block each.
    Sweep {
        /// JSON array of specs.
        #[arg(long)]
        specs: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a quick invariant suite and print one line per check.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Distance-on-sphere and Gaussian-maximum Monte Carlo checks.
    Stats {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    match cli.command {
        Command::Simulate { spec, out } => {
            let spec: SimSpec = read_json(&spec)?;
            let data = simulate_dataset(&spec)?;
            let mut w = BufWriter::new(create(&out)?);
            write_dataset(&data, &mut w)?;
            w.flush()?;
        }
        Command::Partition { data, config, report, csv, timings } => {
            let stored = read_dataset(BufReader::new(open(&data)?))?;
            let cfg = read_config(config.as_deref())?;
            let outcome = run_pipeline(&stored.table, &cfg)?;
            let rep = report::PartitionReport::new(&stored, &cfg, &outcome, timings)?;
            write_json(&report, &rep)?;
            if let Some(path) = csv {
                let Some(table) = rep.class_table() else {
                    bail!("--csv needs a dataset with ground truth");
                };
                let mut w = BufWriter::new(create(&path)?);
                w.write_all(table.as_bytes())?;
                w.flush()?;
            }
        }
        Command::Sweep { specs, config, csv, report } => {
            let specs: Vec<SimSpec> = read_json(&specs)?;
            let cfg = read_config(config.as_deref())?;
            let rows = run_noise_sweep(&specs, &cfg)?;
            let mut w = BufWriter::new(create(&csv)?);
            write_sweep_csv(&rows, &mut w)?;
            w.flush()?;
            if let Some(path) = report {
                write_json(&path, &rows)?;
            }
        }
        Command::Verify { seed } => {
            if !verify::run(seed) {
                std::process::exit(1);
            }
        }
        Command::Stats { out, samples, trials, seed } => {
            write_json(&out, &stats_cmd::run(samples, trials, seed)?)?;
        }
    }
    Ok(())
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("opening {}", path.display()))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(BufReader::new(open(path)?)).with_context(|| format!("parsing {}", path.display()))
}

fn read_config(path: Option<&Path>) -> Result<PipelineConfig> {
    path.map_or_else(|| Ok(PipelineConfig::default()), read_json)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
