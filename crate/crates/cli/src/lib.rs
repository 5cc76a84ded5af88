//! Scans, trajectory dumps and the verification runner behind the `pulsed`
//! binary.

pub mod config;
pub mod scan;
pub mod table;
pub mod verify;

use std::num::NonZeroUsize;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "PULSED_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Model(#[from] pulsed_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Everything other than a failed verification maps to the usage code.
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

/// Worker count from [`WORKERS_ENV`], defaulting to the available parallelism.
pub fn worker_count() -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(raw) => parse_workers(&raw),
        Err(std::env::VarError::NotPresent) => Ok(default_workers()),
        Err(e) => Err(CliError::Usage(format!("{WORKERS_ENV}: {e}"))),
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, NonZeroUsize::get)
}

pub fn parse_workers(raw: &str) -> Result<usize, CliError> {
    match raw.trim().parse::<usize>() {
        Ok(0) => Ok(default_workers()),
        Ok(n) => Ok(n),
        Err(_) => Err(CliError::Usage(format!(
            "{WORKERS_ENV} must be a non-negative integer, got {raw:?}"
        ))),
    }
}

/// Runs `f` inside a dedicated pool of `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}
