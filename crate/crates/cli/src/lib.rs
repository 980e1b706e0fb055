//! Command-line front end for morsekit: TOML run configs, CSV traces, JSON reports
//! and run manifests.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod trace_io;

pub use commands::{run, Command, Invocation, Outcome};
pub use config::RunConfig;
pub use error::{CliError, ExitKind};

/// Caps the global rayon pool from `MORSEKIT_THREADS` when set.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(raw) = value else { return Ok(()) };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::config(format!(
            "MORSEKIT_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))
}
