//! Batch experiment driver for `twistlab`: surface info, sampling, orbits,
//! certification and foliation runs.
//!
//! Every command produces a list of JSON records and a CSV summary. Tasks
//! run on a rayon pool; task `k` draws from `task_rng(seed, k)` and results
//! are merged in task order, so the output does not depend on the thread
//! count.

pub mod commands;
pub mod config;
pub mod output;
pub mod probe;

use thiserror::Error;

pub use commands::{run, Command, Run};
pub use config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Certification(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}
