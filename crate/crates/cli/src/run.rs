//! Job orchestration: digests, the result cache, atomic output and reports.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{ConfigError, JobConfig, Task};
use crate::tasks::{self, TaskOutput};

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    /// A size limit was hit; the message names the cap.
    Resource(String),
    Io(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Resource(m) => write!(f, "resource limit: {m}"),
            RunError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<cyclic_bench::Error> for RunError {
    fn from(e: cyclic_bench::Error) -> Self {
        match e {
            cyclic_bench::Error::ResourceCap { .. } => {
                RunError::Resource(format!("{e} (raise it with --cap)"))
            }
            other => RunError::Config(ConfigError::single(other.to_string())),
        }
    }
}

fn io_err(path: &Path, e: impl fmt::Display) -> RunError {
    RunError::Io(format!("{}: {e}", path.display()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunVerdict {
    Pass,
    Violations,
}

/// `exact` when no value in the records is an enclosure, otherwise the
/// widest enclosure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exactness {
    Exact,
    Enclosure { max_width: f64 },
}

fn exactness_of(v: &Value) -> Exactness {
    fn walk(v: &Value, widest: &mut Option<f64>) {
        match v {
            Value::Object(m) => {
                if let Some(w) = m
                    .get("enclosure")
                    .and_then(|e| e.get("width"))
                    .and_then(Value::as_f64)
                {
                    *widest = Some(widest.map_or(w, |x| x.max(w)));
                }
                m.values().for_each(|x| walk(x, widest));
            }
            Value::Array(a) => a.iter().for_each(|x| walk(x, widest)),
            _ => {}
        }
    }
    let mut widest = None;
    walk(v, &mut widest);
    widest.map_or(Exactness::Exact, |max_width| Exactness::Enclosure {
        max_width,
    })
}

/// The deterministic part of a run; written verbatim as `records.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Records {
    pub job_id: String,
    pub config_digest: String,
    pub version: String,
    pub task: Task,
    pub seed: u64,
    pub convention: cyclic_bench::complexes::Convention,
    pub verdict: RunVerdict,
    pub exactness: Exactness,
    pub records: Value,
    pub violations: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    #[serde(flatten)]
    pub result: Records,
    pub wall_time_ms: u128,
    pub cache_hit: bool,
    pub files: Vec<String>,
}

/// SHA-256 of the canonical JSON of the job (plus any group file it reads).
pub fn config_digest(job: &JobConfig) -> String {
    let mut canon = serde_json::to_value(job).expect("config serializes");
    if let Some(text) = job.group_source() {
        canon["group_source"] = Value::String(text);
    }
    // serde_json maps are sorted, so this text is canonical
    let text = serde_json::to_string(&canon).expect("config serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub use_cache: bool,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    result: Records,
    files: std::collections::BTreeMap<String, String>,
}

fn cache_path(job: &JobConfig, digest: &str) -> PathBuf {
    job.out
        .join(".cache")
        .join(format!("{digest}-{}.json", cyclic_bench::VERSION))
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), RunError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(dir, e))?;
    tmp.write_all(contents).map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

fn pretty<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializes");
    s.push(b'\n');
    s
}

pub fn job_dir(job: &JobConfig) -> PathBuf {
    job.out.join(&job.id)
}

/// Runs one job, consulting and filling the cache.
pub fn run_job(job: &JobConfig, opts: &RunOptions) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let digest = config_digest(job);
    let cache = cache_path(job, &digest);
    let cached: Option<CacheEntry> = if opts.use_cache {
        std::fs::read(&cache)
            .ok()
            .and_then(|b| serde_json::from_slice(&b).ok())
    } else {
        None
    };
    let cache_hit = cached.is_some();
    let entry = match cached {
        Some(e) => e,
        None => {
            let group = job
                .group()
                .map_err(|e| RunError::Config(ConfigError::single(format!("group: {e}"))))?;
            let TaskOutput {
                records,
                violations,
                files,
            } = tasks::run(job, &group)?;
            let result = Records {
                job_id: job.id.clone(),
                config_digest: digest.clone(),
                version: cyclic_bench::VERSION.to_string(),
                task: job.task,
                seed: job.seed,
                convention: job.convention,
                verdict: if violations.is_empty() {
                    RunVerdict::Pass
                } else {
                    RunVerdict::Violations
                },
                exactness: exactness_of(&records),
                records,
                violations,
            };
            let entry = CacheEntry { result, files };
            if opts.use_cache {
                write_atomic(&cache, &pretty(&entry))?;
            }
            entry
        }
    };

    let dir = job_dir(job);
    write_atomic(&dir.join("records.json"), &pretty(&entry.result))?;
    for (name, contents) in &entry.files {
        write_atomic(&dir.join(name), contents.as_bytes())?;
    }
    let report = RunReport {
        result: entry.result,
        wall_time_ms: start.elapsed().as_millis(),
        cache_hit,
        files: std::iter::once("records.json".to_string())
            .chain(entry.files.keys().cloned())
            .collect(),
    };
    write_atomic(&dir.join("report.json"), &pretty(&report))?;
    Ok(report)
}

/// Runs independent jobs in parallel; results come back ordered by job id.
pub fn run_all(
    jobs: &[JobConfig],
    opts: &RunOptions,
) -> Vec<(String, Result<RunReport, RunError>)> {
    let mut results: Vec<_> = jobs
        .par_iter()
        .map(|j| (j.id.clone(), run_job(j, opts)))
        .collect();
    results.sort_by(|a, b| a.0.cmp(&b.0));
    results
}

/// 0 when everything passes, 1 on violations, 2 on any error.
pub fn exit_code(results: &[(String, Result<RunReport, RunError>)]) -> i32 {
    if results.iter().any(|(_, r)| r.is_err()) {
        2
    } else if results
        .iter()
        .any(|(_, r)| matches!(r, Ok(rep) if rep.result.verdict == RunVerdict::Violations))
    {
        1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn exactness_finds_the_widest_enclosure() {
        assert_eq!(
            exactness_of(&json!({"a": {"exact": "1"}})),
            Exactness::Exact
        );
        let v = json!([{"enclosure": {"width": 1e-9}}, {"x": {"enclosure": {"width": 1e-7}}}]);
        assert_eq!(exactness_of(&v), Exactness::Enclosure { max_width: 1e-7 });
    }

    #[test]
    fn atomic_writes_replace_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("f.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
