//! Batch front end: configuration, task execution, caching and reports.

pub mod catalog;
pub mod config;
pub mod run;
pub mod tasks;

use std::path::Path;

pub use catalog::list_builtins;
pub use config::{ConfigError, JobConfig, JobFile, Overrides, Task};
pub use run::{exit_code, run_all, run_job, RunError, RunOptions, RunReport};

/// Loads and resolves a configuration file; relative paths are taken from its directory.
pub fn load_jobs(path: &Path, flags: &Overrides) -> Result<Vec<JobConfig>, ConfigError> {
    let file = config::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    config::resolve(&file, flags, base)
}

/// Jobs from flags alone.
pub fn jobs_from_flags(flags: &Overrides) -> Result<Vec<JobConfig>, ConfigError> {
    config::resolve(&JobFile::default(), flags, Path::new("."))
}
