//! Job configuration files (TOML or JSON) and their validation.

use std::fmt;
use std::path::{Path, PathBuf};

use cyclic_bench::algebra::{AlgebraElement, Chain};
use cyclic_bench::analysis::{BoundedOp, CochainSpec};
use cyclic_bench::complexes::{Convention, Variant};
use cyclic_bench::groups::{builtin, Group, GroupSpec, DEFAULT_CAP};
use cyclic_bench::scalar::{parse_rational, Scalar};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

/// Every problem found in a configuration, one line per field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub problems: Vec<String>,
}

impl ConfigError {
    pub fn single(problem: impl Into<String>) -> Self {
        ConfigError {
            problems: vec![problem.into()],
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration:")?;
        for p in &self.problems {
            writeln!(f, "  - {p}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Homology,
    Growth,
    Seminorm,
    Pairing,
    Bound,
    Norms,
    IdentitySuite,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::Homology,
        Task::Growth,
        Task::Seminorm,
        Task::Pairing,
        Task::Bound,
        Task::Norms,
        Task::IdentitySuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Homology => "homology",
            Task::Growth => "growth",
            Task::Seminorm => "seminorm",
            Task::Pairing => "pairing",
            Task::Bound => "bound",
            Task::Norms => "norms",
            Task::IdentitySuite => "identity-suite",
        }
    }
}

impl std::str::FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| {
                format!(
                    "unknown task `{s}` (expected one of {})",
                    Task::ALL.map(Task::name).join(", ")
                )
            })
    }
}

/// A built-in name, a group file, or an inline specification.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Builtin(String),
    File { file: PathBuf },
    Inline(GroupSpec),
}

impl GroupRef {
    /// Built-in names are looked up first, then `<name>.toml` in `user_dir`.
    pub fn resolve(&self, base: &Path, user_dir: Option<&Path>) -> Result<Group, String> {
        match self.source_file(base, user_dir) {
            Some(path) => {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                GroupSpec::parse(&text)
                    .and_then(|s| s.build())
                    .map_err(|e| format!("{}: {e}", path.display()))
            }
            None => match self {
                GroupRef::Builtin(name) => builtin(name).map_err(|e| e.to_string()),
                GroupRef::Inline(spec) => spec.build().map_err(|e| e.to_string()),
                GroupRef::File { .. } => unreachable!("files always have a source"),
            },
        }
    }

    /// The file a group is read from, if any.
    pub fn source_file(&self, base: &Path, user_dir: Option<&Path>) -> Option<PathBuf> {
        match self {
            GroupRef::File { file } => Some(base.join(file)),
            GroupRef::Builtin(name) if builtin(name).is_err() => user_dir
                .map(|d| d.join(format!("{name}.toml")))
                .filter(|p| p.is_file()),
            _ => None,
        }
    }
}

/// `[coefficient, [g₀, …, gₙ]]` terms; entries in the group's element syntax.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainInput {
    #[serde(default)]
    pub id: Option<String>,
    pub degree: usize,
    pub terms: Vec<(String, Vec<String>)>,
}

impl ChainInput {
    pub fn build(&self, group: &Group) -> Result<Chain, String> {
        let mut x = Chain::zero(self.degree);
        for (c, t) in &self.terms {
            let coeff: Scalar = c.parse().map_err(|e| format!("coefficient `{c}`: {e}"))?;
            let tuple = t
                .iter()
                .map(|s| group.parse_element(s))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            x.try_add_term(tuple, &coeff).map_err(|e| e.to_string())?;
        }
        Ok(x)
    }
}

/// `[coefficient, g]` terms.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementInput {
    #[serde(default)]
    pub id: Option<String>,
    pub terms: Vec<(String, String)>,
}

impl ElementInput {
    pub fn build(&self, group: &Group) -> Result<AlgebraElement, String> {
        let mut x = AlgebraElement::zero();
        for (c, g) in &self.terms {
            let coeff: Scalar = c.parse().map_err(|e| format!("coefficient `{c}`: {e}"))?;
            x.add_term(group.parse_element(g).map_err(|e| e.to_string())?, &coeff);
        }
        Ok(x)
    }
}

/// Seeded random chains.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomChains {
    pub count: usize,
    pub degree: usize,
    pub terms: usize,
    pub max_length: u64,
    pub gaussian: bool,
    /// Force every tuple product to be `e`.
    pub homogeneous: bool,
}

impl Default for RandomChains {
    fn default() -> Self {
        RandomChains {
            count: 20,
            degree: 2,
            terms: 5,
            max_length: 2,
            gaussian: false,
            homogeneous: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomElements {
    pub count: usize,
    pub terms: usize,
    pub max_length: u64,
    pub gaussian: bool,
}

impl Default for RandomElements {
    fn default() -> Self {
        RandomElements {
            count: 20,
            terms: 4,
            max_length: 2,
            gaussian: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomologyParams {
    pub variant: String,
    pub radius: u64,
    pub degrees: Vec<usize>,
    /// Top degree of the finite stage; defaults to one above the largest degree.
    pub n_max: Option<usize>,
    /// Also write bases and boundary matrices.
    pub export: bool,
}

impl Default for HomologyParams {
    fn default() -> Self {
        HomologyParams {
            variant: "hochschild".into(),
            radius: 2,
            degrees: vec![0],
            n_max: None,
            export: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthParams {
    pub cochain: CochainSpec,
    #[serde(default)]
    pub lambdas: Option<Vec<String>>,
    #[serde(default)]
    pub radii: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeminormParams {
    pub chains: Vec<ChainInput>,
    pub random: Option<RandomChains>,
    #[serde(rename = "N")]
    pub n: Vec<String>,
    pub m: Vec<u32>,
    pub lambda: Vec<String>,
    pub ops: Vec<BoundedOp>,
}

impl Default for SeminormParams {
    fn default() -> Self {
        SeminormParams {
            chains: Vec::new(),
            random: Some(RandomChains::default()),
            n: vec!["1".into()],
            m: vec![0],
            lambda: vec!["1".into()],
            ops: vec![BoundedOp::Hochschild, BoundedOp::Connes],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingParams {
    pub cochain: CochainSpec,
    #[serde(default)]
    pub chains: Vec<ChainInput>,
    #[serde(default)]
    pub random: Option<RandomChains>,
    /// Radius of the cyclicity and cocycle scans.
    #[serde(default = "default_scan_radius")]
    pub scan_radius: u64,
    /// Samples `y` of degree `n+1` for `pair(τ_c, b y)`.
    #[serde(default = "default_annihilation_samples")]
    pub annihilation_samples: usize,
}

fn default_scan_radius() -> u64 {
    3
}

fn default_annihilation_samples() -> usize {
    20
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantMode {
    Fit,
    Declared,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundParams {
    pub cochain: CochainSpec,
    #[serde(default)]
    pub chains: Vec<ChainInput>,
    #[serde(default)]
    pub random: Option<RandomChains>,
    #[serde(rename = "N", default = "one_list")]
    pub n: Vec<String>,
    #[serde(default = "zero_list")]
    pub m: Vec<u32>,
    #[serde(default = "two_list")]
    pub lambda: Vec<String>,
    #[serde(default = "fit")]
    pub constant: ConstantMode,
    /// Defaults to the largest total length in each chain.
    #[serde(default)]
    pub cover_radius: Option<u64>,
}

fn one_list() -> Vec<String> {
    vec!["1".into()]
}

fn two_list() -> Vec<String> {
    vec!["2".into()]
}

fn zero_list() -> Vec<u32> {
    vec![0]
}

fn fit() -> ConstantMode {
    ConstantMode::Fit
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormsParams {
    pub elements: Vec<ElementInput>,
    pub random: Option<RandomElements>,
    /// `nu:<λ>`, `max` or `reduced`.
    pub seminorms: Vec<String>,
    pub resolution: u32,
    /// Run the unconditionality check against random dominating elements.
    pub unconditional: bool,
}

impl Default for NormsParams {
    fn default() -> Self {
        NormsParams {
            elements: Vec::new(),
            random: Some(RandomElements::default()),
            seminorms: vec!["nu:1".into(), "nu:2".into(), "max".into(), "reduced".into()],
            resolution: 64,
            unconditional: true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentityParams {
    pub samples: usize,
    pub max_degree: usize,
    pub terms: usize,
    pub max_length: u64,
}

impl Default for IdentityParams {
    fn default() -> Self {
        IdentityParams {
            samples: 100,
            max_degree: 3,
            terms: 5,
            max_length: 3,
        }
    }
}

/// One job as read from disk; unset fields fall back to command-line flags.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub id: Option<String>,
    pub task: Option<Task>,
    pub group: Option<GroupRef>,
    pub seed: Option<u64>,
    pub convention: Option<Convention>,
    pub cap: Option<usize>,
    pub out: Option<PathBuf>,
    pub homology: Option<HomologyParams>,
    pub growth: Option<GrowthParams>,
    pub seminorm: Option<SeminormParams>,
    pub pairing: Option<PairingParams>,
    pub bound: Option<BoundParams>,
    pub norms: Option<NormsParams>,
    #[serde(rename = "identity-suite")]
    pub identity_suite: Option<IdentityParams>,
    /// A suite: each entry is a job inheriting unset fields from this one.
    pub jobs: Option<Vec<JobFile>>,
}

/// Values from the command line, used where the file is silent.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub task: Option<Task>,
    pub group: Option<String>,
    pub seed: Option<u64>,
    pub convention: Option<Convention>,
    pub cap: Option<usize>,
    pub out: Option<PathBuf>,
    pub user_groups: Option<PathBuf>,
}

/// A fully resolved job.
#[derive(Clone, Debug, Serialize)]
pub struct JobConfig {
    pub id: String,
    pub task: Task,
    pub group: GroupRef,
    pub seed: u64,
    pub convention: Convention,
    pub cap: usize,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub base_dir: PathBuf,
    #[serde(skip)]
    pub user_groups: Option<PathBuf>,
    pub params: TaskParams,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum TaskParams {
    Homology(HomologyParams),
    Growth(GrowthParams),
    Seminorm(SeminormParams),
    Pairing(PairingParams),
    Bound(BoundParams),
    Norms(NormsParams),
    IdentitySuite(IdentityParams),
}

impl JobConfig {
    pub fn group(&self) -> Result<Group, String> {
        self.group
            .resolve(&self.base_dir, self.user_groups.as_deref())
    }

    /// Contents of the group file, if the group comes from one.
    pub fn group_source(&self) -> Option<String> {
        let path = self
            .group
            .source_file(&self.base_dir, self.user_groups.as_deref())?;
        std::fs::read_to_string(path).ok()
    }
}

pub const DEFAULT_SEED: u64 = 0;

pub fn parse_job_file(text: &str, path: &Path) -> Result<JobFile, ConfigError> {
    let json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if json {
        serde_json::from_str(text)
            .map_err(|e| ConfigError::single(format!("{}: {e}", path.display())))
    } else {
        toml::from_str(text).map_err(|e| ConfigError::single(format!("{}: {e}", path.display())))
    }
}

pub fn load(path: &Path) -> Result<JobFile, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::single(format!("{}: {e}", path.display())))?;
    parse_job_file(&text, path)
}

fn inherit(child: &mut JobFile, parent: &JobFile) {
    macro_rules! take {
        ($($f:ident),*) => {$(
            if child.$f.is_none() {
                child.$f = parent.$f.clone();
            }
        )*};
    }
    take!(
        task,
        group,
        seed,
        convention,
        cap,
        out,
        homology,
        growth,
        seminorm,
        pairing,
        bound,
        norms,
        identity_suite
    );
}

/// Resolves a file (possibly a suite) into jobs, collecting every problem.
pub fn resolve(
    file: &JobFile,
    flags: &Overrides,
    base_dir: &Path,
) -> Result<Vec<JobConfig>, ConfigError> {
    let mut problems = Vec::new();
    let mut jobs = Vec::new();
    match &file.jobs {
        Some(children) => {
            if children.is_empty() {
                problems.push("jobs: must be nonempty".to_string());
            }
            for (i, child) in children.iter().enumerate() {
                let mut c = child.clone();
                if c.jobs.is_some() {
                    problems.push(format!("jobs[{i}].jobs: suites do not nest"));
                    continue;
                }
                inherit(&mut c, file);
                if c.id.is_none() {
                    c.id = Some(format!("job{i:03}"));
                }
                match resolve_one(&c, flags, base_dir) {
                    Ok(j) => jobs.push(j),
                    Err(e) => {
                        problems.extend(e.problems.into_iter().map(|p| format!("jobs[{i}].{p}")))
                    }
                }
            }
        }
        None => match resolve_one(file, flags, base_dir) {
            Ok(j) => jobs.push(j),
            Err(e) => problems.extend(e.problems),
        },
    }
    let mut ids: Vec<&str> = jobs.iter().map(|j| j.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        problems.push(format!("id: duplicate job id `{}`", w[0]));
    }
    if problems.is_empty() {
        jobs.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(jobs)
    } else {
        Err(ConfigError { problems })
    }
}

fn rationals(
    field: &str,
    values: &[String],
    min: &BigRational,
    strict: bool,
    problems: &mut Vec<String>,
) {
    if values.is_empty() {
        problems.push(format!("{field}: must be nonempty"));
    }
    for (i, v) in values.iter().enumerate() {
        match parse_rational(v) {
            Ok(r) if (strict && &r <= min) || (!strict && &r < min) => problems.push(format!(
                "{field}[{i}]: {v} must be {} {min}",
                if strict { ">" } else { "≥" }
            )),
            Ok(_) => {}
            Err(e) => problems.push(format!("{field}[{i}]: {e}")),
        }
    }
}

fn random_chains(field: &str, r: &RandomChains, problems: &mut Vec<String>) {
    if r.count == 0 {
        problems.push(format!("{field}.count: must be positive"));
    }
    if r.terms == 0 {
        problems.push(format!("{field}.terms: must be positive"));
    }
}

fn resolve_one(
    file: &JobFile,
    flags: &Overrides,
    base_dir: &Path,
) -> Result<JobConfig, ConfigError> {
    let mut problems = Vec::new();
    let task = file.task.or(flags.task);
    let group = file
        .group
        .clone()
        .or_else(|| flags.group.clone().map(GroupRef::Builtin));
    if task.is_none() {
        problems.push("task: missing (set it in the file or pass --task)".to_string());
    }
    match &group {
        None => problems.push("group: missing (set it in the file or pass --group)".to_string()),
        Some(g) => {
            if let Err(e) = g.resolve(base_dir, flags.user_groups.as_deref()) {
                problems.push(format!("group: {e}"));
            }
        }
    }
    let cap = file.cap.or(flags.cap).unwrap_or(DEFAULT_CAP);
    if cap == 0 {
        problems.push("cap: must be positive".to_string());
    }

    let params = task.map(|t| match t {
        Task::Homology => {
            let p = file.homology.clone().unwrap_or_default();
            if let Err(e) = p.variant.parse::<Variant>() {
                problems.push(format!("homology.variant: {e}"));
            }
            if p.degrees.is_empty() {
                problems.push("homology.degrees: must be nonempty".to_string());
            }
            if let (Some(n), Some(d)) = (p.n_max, p.degrees.iter().max()) {
                if *d >= n {
                    problems.push(format!(
                        "homology.n_max: {n} must exceed every degree (largest is {d})"
                    ));
                }
            }
            TaskParams::Homology(p)
        }
        Task::Growth => match &file.growth {
            Some(p) => {
                if let Some(l) = &p.lambdas {
                    rationals(
                        "growth.lambdas",
                        l,
                        &BigRational::from_integer(1.into()),
                        true,
                        &mut problems,
                    );
                }
                if p.radii.as_ref().is_some_and(Vec::is_empty) {
                    problems.push("growth.radii: must be nonempty".to_string());
                }
                TaskParams::Growth(p.clone())
            }
            None => {
                problems.push("growth: missing table (needs at least `cochain`)".to_string());
                TaskParams::Growth(GrowthParams {
                    cochain: CochainSpec::Zero { arity: 1 },
                    lambdas: None,
                    radii: None,
                })
            }
        },
        Task::Seminorm => {
            let p = file.seminorm.clone().unwrap_or_default();
            rationals(
                "seminorm.N",
                &p.n,
                &BigRational::from_integer(1.into()),
                false,
                &mut problems,
            );
            rationals(
                "seminorm.lambda",
                &p.lambda,
                &BigRational::from_integer(1.into()),
                false,
                &mut problems,
            );
            if p.m.is_empty() {
                problems.push("seminorm.m: must be nonempty".to_string());
            }
            if p.chains.is_empty() && p.random.is_none() {
                problems.push("seminorm: needs `chains` or `random`".to_string());
            }
            if let Some(r) = &p.random {
                random_chains("seminorm.random", r, &mut problems);
            }
            TaskParams::Seminorm(p)
        }
        Task::Pairing => match &file.pairing {
            Some(p) => {
                if p.chains.is_empty() && p.random.is_none() {
                    problems.push("pairing: needs `chains` or `random`".to_string());
                }
                if let Some(r) = &p.random {
                    random_chains("pairing.random", r, &mut problems);
                }
                TaskParams::Pairing(p.clone())
            }
            None => {
                problems.push("pairing: missing table (needs `cochain` and chains)".to_string());
                TaskParams::Pairing(PairingParams {
                    cochain: CochainSpec::Zero { arity: 1 },
                    chains: Vec::new(),
                    random: None,
                    scan_radius: 3,
                    annihilation_samples: 0,
                })
            }
        },
        Task::Bound => match &file.bound {
            Some(p) => {
                rationals(
                    "bound.N",
                    &p.n,
                    &BigRational::from_integer(1.into()),
                    false,
                    &mut problems,
                );
                rationals(
                    "bound.lambda",
                    &p.lambda,
                    &BigRational::from_integer(1.into()),
                    false,
                    &mut problems,
                );
                if p.m.is_empty() {
                    problems.push("bound.m: must be nonempty".to_string());
                }
                if p.chains.is_empty() && p.random.is_none() {
                    problems.push("bound: needs `chains` or `random`".to_string());
                }
                if let Some(r) = &p.random {
                    random_chains("bound.random", r, &mut problems);
                }
                TaskParams::Bound(p.clone())
            }
            None => {
                problems.push("bound: missing table (needs `cochain` and chains)".to_string());
                TaskParams::Bound(BoundParams {
                    cochain: CochainSpec::Zero { arity: 1 },
                    chains: Vec::new(),
                    random: None,
                    n: one_list(),
                    m: zero_list(),
                    lambda: two_list(),
                    constant: ConstantMode::Fit,
                    cover_radius: None,
                })
            }
        },
        Task::Norms => {
            let p = file.norms.clone().unwrap_or_default();
            if p.seminorms.is_empty() {
                problems.push("norms.seminorms: must be nonempty".to_string());
            }
            for (i, s) in p.seminorms.iter().enumerate() {
                if let Err(e) = parse_seminorm(s, p.resolution) {
                    problems.push(format!("norms.seminorms[{i}]: {e}"));
                }
            }
            if p.resolution == 0 {
                problems.push("norms.resolution: must be positive".to_string());
            }
            if p.elements.is_empty() && p.random.is_none() {
                problems.push("norms: needs `elements` or `random`".to_string());
            }
            TaskParams::Norms(p)
        }
        Task::IdentitySuite => {
            let p = file.identity_suite.clone().unwrap_or_default();
            if p.samples == 0 {
                problems.push("identity-suite.samples: must be positive".to_string());
            }
            TaskParams::IdentitySuite(p)
        }
    });

    if !problems.is_empty() {
        return Err(ConfigError { problems });
    }
    let task = task.expect("checked");
    Ok(JobConfig {
        id: file.id.clone().unwrap_or_else(|| task.name().to_string()),
        task,
        group: group.expect("checked"),
        seed: file.seed.or(flags.seed).unwrap_or(DEFAULT_SEED),
        convention: file.convention.or(flags.convention).unwrap_or_default(),
        cap,
        out: file
            .out
            .clone()
            .or_else(|| flags.out.clone())
            .unwrap_or_else(|| PathBuf::from("cyclic-bench-out")),
        base_dir: base_dir.to_path_buf(),
        user_groups: flags.user_groups.clone(),
        params: params.expect("checked"),
    })
}

pub fn parse_seminorm(
    s: &str,
    resolution: u32,
) -> Result<cyclic_bench::algebra::SeminormKind, String> {
    use cyclic_bench::algebra::SeminormKind;
    match s {
        "max" => Ok(SeminormKind::Max { resolution }),
        "reduced" => Ok(SeminormKind::Reduced { resolution }),
        _ => match s.strip_prefix("nu:") {
            Some(l) => {
                let l = parse_rational(l).map_err(|e| e.to_string())?;
                if l < BigRational::from_integer(1.into()) {
                    return Err(format!("λ = {l} must be ≥ 1"));
                }
                Ok(SeminormKind::NuLambda(l))
            }
            None => Err(format!(
                "unknown seminorm `{s}` (expected nu:<λ>, max or reduced)"
            )),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<JobConfig>, ConfigError> {
        let file = parse_job_file(text, Path::new("job.toml"))?;
        resolve(&file, &Overrides::default(), Path::new("."))
    }

    #[test]
    fn minimal_homology_job() {
        let jobs = parse("task = \"homology\"\ngroup = \"S3\"\n").unwrap();
        assert_eq!(jobs.len(), 1);
        assert_eq!(jobs[0].task, Task::Homology);
        assert_eq!(jobs[0].convention, Convention::Standard);
    }

    #[test]
    fn problems_are_itemized() {
        let err = parse(
            "task = \"bound\"\ngroup = \"nonsense\"\ncap = 0\n[bound]\ncochain = { family = \"area\" }\nlambda = [\"1/2\", \"x\"]\nm = []\n",
        )
        .unwrap_err();
        let text = err.to_string();
        for needle in [
            "group:",
            "cap:",
            "bound.lambda[0]",
            "bound.lambda[1]",
            "bound.m",
            "bound: needs",
        ] {
            assert!(text.contains(needle), "missing {needle} in\n{text}");
        }
    }

    #[test]
    fn flags_fill_gaps_and_the_file_wins() {
        let file = parse_job_file("task = \"homology\"\nseed = 5\n", Path::new("a.toml")).unwrap();
        let flags = Overrides {
            group: Some("Z/4".into()),
            seed: Some(9),
            ..Default::default()
        };
        let jobs = resolve(&file, &flags, Path::new(".")).unwrap();
        assert_eq!(jobs[0].seed, 5);
        assert!(matches!(&jobs[0].group, GroupRef::Builtin(g) if g == "Z/4"));
    }

    #[test]
    fn suites_inherit_and_sort_by_id() {
        let jobs = parse(
            "group = \"Z/4\"\nseed = 3\n[[jobs]]\nid = \"b\"\ntask = \"homology\"\n[[jobs]]\nid = \"a\"\ntask = \"identity-suite\"\n",
        )
        .unwrap();
        assert_eq!(
            jobs.iter().map(|j| j.id.as_str()).collect::<Vec<_>>(),
            ["a", "b"]
        );
        assert!(jobs.iter().all(|j| j.seed == 3));
    }

    #[test]
    fn json_configs_parse() {
        let file = parse_job_file(r#"{"task": "growth", "group": "Z", "growth": {"cochain": {"family": "homomorphism", "values": ["1"]}}}"#, Path::new("j.json")).unwrap();
        let jobs = resolve(&file, &Overrides::default(), Path::new(".")).unwrap();
        assert_eq!(jobs[0].task, Task::Growth);
    }
}
