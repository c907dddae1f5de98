use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use cyclic_bench::complexes::Convention;
use cyclic_bench_cli::{
    exit_code, jobs_from_flags, list_builtins, load_jobs, run, run_all, Overrides, RunOptions, Task,
};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConventionArg {
    Paper,
    Standard,
}

/// Hochschild and cyclic homology, growth and pairing computations on group algebras.
///
/// Values in the configuration file take precedence over flags.
#[derive(Debug, Parser)]
#[command(name = "cyclic-bench", version)]
struct Cli {
    /// Job file (TOML, or JSON by extension).
    #[arg(long)]
    config: Option<PathBuf>,
    /// homology, growth, seminorm, pairing, bound, norms or identity-suite.
    #[arg(long)]
    task: Option<Task>,
    /// Built-in group name such as S3, Z/4, Z2 or F2.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest enumeration (basis, ball or tuple count) a job may perform.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    /// Directory of group files, usable by name with --group.
    #[arg(long)]
    user_groups: Option<PathBuf>,
    /// Print the catalog of built-ins as JSON and exit.
    #[arg(long)]
    list_builtins: bool,
    /// Ignore and do not fill the result cache.
    #[arg(long)]
    no_cache: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_builtins {
        let catalog = list_builtins(cli.user_groups.as_deref());
        println!(
            "{}",
            serde_json::to_string_pretty(&catalog).expect("catalog serializes")
        );
        return ExitCode::SUCCESS;
    }
    let flags = Overrides {
        task: cli.task,
        group: cli.group,
        seed: cli.seed,
        convention: cli.convention.map(|c| match c {
            ConventionArg::Paper => Convention::Paper,
            ConventionArg::Standard => Convention::Standard,
        }),
        cap: cli.cap,
        out: cli.out,
        user_groups: cli.user_groups,
    };
    let jobs = match &cli.config {
        Some(path) => load_jobs(path, &flags),
        None => jobs_from_flags(&flags),
    };
    let jobs = match jobs {
        Ok(j) => j,
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(2);
        }
    };
    let results = run_all(
        &jobs,
        &RunOptions {
            use_cache: !cli.no_cache,
        },
    );

    let mut summaries: BTreeMap<PathBuf, Vec<serde_json::Value>> = BTreeMap::new();
    for (job, (id, result)) in jobs.iter().zip(&results) {
        let line = match result {
            Ok(r) => {
                println!(
                    "{id}: {} ({} violations, {} ms{})",
                    serde_json::to_value(r.result.verdict)
                        .expect("verdict")
                        .as_str()
                        .unwrap_or("?"),
                    r.result.violations.len(),
                    r.wall_time_ms,
                    if r.cache_hit { ", cached" } else { "" }
                );
                serde_json::json!({ "job_id": id, "verdict": r.result.verdict, "violations": r.result.violations.len(), "digest": r.result.config_digest })
            }
            Err(e) => {
                eprintln!("{id}: error: {e}");
                serde_json::json!({ "job_id": id, "error": e.to_string() })
            }
        };
        summaries.entry(job.out.clone()).or_default().push(line);
    }
    for (dir, lines) in summaries {
        let mut text = serde_json::to_vec_pretty(&lines).expect("summary serializes");
        text.push(b'\n');
        if let Err(e) = run::write_atomic(&dir.join("summary.json"), &text) {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(exit_code(&results) as u8)
}
