//! Benchmark harness comparing the Shannon, Renyi and Tsallis entropies on
//! thresholding, registration and clustering of seeded synthetic images.
//!
//! A run expands the configuration into tasks (experiment x family x seed x
//! sweep point), executes them, possibly in parallel, and writes, under the
//! output directory:
//!
//! - `report.csv`: one row per task and metric;
//! - `<experiment>.csv` or `.md`: one row per task with every metric;
//! - `images/<experiment>/*.pgm`: binarizations, aligned slaves, label maps;
//! - `summary.md`: families ranked by each experiment's primary metric and
//!   compared with a reference ordering.

pub mod config;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod report;

use std::fs;
use std::path::Path;

pub use config::{Assignments, ExperimentConfig};
pub use error::CliError;
pub use report::Written;

/// Reads a config file and applies `overrides` on top of it.
pub fn load_config(path: &Path, overrides: &[(&str, String)]) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut a = Assignments::parse(&text)?;
    for (key, value) in overrides {
        a.set(key, value)?;
    }
    a.build()
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("cannot start {n} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Written, CliError> {
    let outcomes = with_pool(cfg.jobs, || experiments::run_all(cfg))??;
    fs::create_dir_all(&cfg.out).map_err(CliError::io(&cfg.out))?;
    report::write_reports(cfg, &outcomes)
}

pub fn gen_fixtures(cfg: &ExperimentConfig) -> Result<usize, CliError> {
    with_pool(cfg.jobs, || fixtures::gen_fixtures(cfg))?
}
