//! TOML code descriptions and experiment configurations.
//!
//! Precedence for experiment settings is: built-in defaults, then the
//! config file, then command-line flags ([`SimArgs::apply_to`]).

use std::path::{Path, PathBuf};

use dynsched_core::code::{bg1_for_lifting, BaseSource};
use dynsched_core::{CodeSpec, DecodeConfig, Granularity, LdpcCode, SchedulerKind};
use serde::{Deserialize, Serialize};

use crate::alist::{parse_alist, AlistError};
use crate::base_graph::{parse_base_graph, BaseGraphError};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Toml { path: PathBuf, source: toml::de::Error },
    #[error("{path}: {source}")]
    Alist { path: PathBuf, source: AlistError },
    #[error("{path}: {source}")]
    BaseGraph { path: PathBuf, source: BaseGraphError },
    #[error("{path}: {source}")]
    Code {
        path: PathBuf,
        source: dynsched_core::code::CodeError,
    },
    #[error("{0}")]
    Invalid(String),
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })
}

fn resolve(relative_to: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_owned()
    } else {
        relative_to.parent().unwrap_or(Path::new("")).join(p)
    }
}

fn default_punctured() -> usize {
    2
}

/// A code file. Either `alist` names a parity-check matrix used as is, or
/// `base` + `lifting` describe a QC code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    /// `"bg1"` or a base-graph file relative to the code file.
    pub base: Option<String>,
    pub alist: Option<PathBuf>,
    pub lifting: Option<usize>,
    pub base_rows: Option<usize>,
    #[serde(default = "default_punctured")]
    pub punctured_cols: usize,
    #[serde(default)]
    pub shortened: usize,
    #[serde(default)]
    pub truncated: usize,
    /// Target values the configuration approximates. Informational.
    pub nominal_rate: Option<f64>,
    pub nominal_blocklength: Option<usize>,
}

impl CodeFile {
    pub fn spec(&self) -> Result<CodeSpec, ConfigError> {
        let base = match self.base.as_deref() {
            Some("bg1") => BaseSource::Bg1,
            Some(path) => BaseSource::File(path.into()),
            None => return Err(ConfigError::Invalid("code file needs `base` or `alist`".into())),
        };
        let lifting = self
            .lifting
            .ok_or_else(|| ConfigError::Invalid("a base-graph code needs `lifting`".into()))?;
        Ok(CodeSpec {
            base,
            lifting,
            base_rows: self.base_rows,
            punctured_cols: self.punctured_cols,
            shortened: self.shortened,
            truncated: self.truncated,
            nominal_rate: self.nominal_rate,
        })
    }
}

pub fn load_code(path: &Path) -> Result<LdpcCode, ConfigError> {
    let text = read(path)?;
    let file: CodeFile = toml::from_str(&text).map_err(|source| ConfigError::Toml {
        path: path.to_owned(),
        source,
    })?;
    build_code(&file, path)
}

/// Builds the code described by `file`, resolving relative paths against
/// `origin`.
pub fn build_code(file: &CodeFile, origin: &Path) -> Result<LdpcCode, ConfigError> {
    let code_err = |source| ConfigError::Code {
        path: origin.to_owned(),
        source,
    };
    match (&file.alist, &file.base) {
        (Some(_), Some(_)) => Err(ConfigError::Invalid(format!(
            "{}: `alist` and `base` are mutually exclusive",
            origin.display()
        ))),
        (Some(alist), None) => load_alist(&resolve(origin, alist)),
        (None, _) => {
            let spec = file.spec()?;
            match &spec.base {
                BaseSource::Bg1 => {
                    let base = bg1_for_lifting(spec.lifting).map_err(code_err)?;
                    LdpcCode::build(&base, &spec).map_err(code_err)
                }
                BaseSource::File(p) => {
                    let path = resolve(origin, Path::new(p));
                    let base =
                        parse_base_graph(&read(&path)?).map_err(|source| ConfigError::BaseGraph { path, source })?;
                    LdpcCode::build(&base, &spec).map_err(code_err)
                }
            }
        }
    }
}

pub fn load_alist(path: &Path) -> Result<LdpcCode, ConfigError> {
    let graph = parse_alist(&read(path)?).map_err(|source| ConfigError::Alist {
        path: path.to_owned(),
        source,
    })?;
    Ok(LdpcCode::from_graph(graph))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Code file; relative paths are resolved against the experiment file.
    pub code: Option<PathBuf>,
    pub schedulers: Vec<SchedulerKind>,
    pub snr_db: Vec<f64>,
    /// Trials per (scheduler, SNR) point.
    pub trials: u64,
    /// Stop a point after this many block errors; 0 runs every trial.
    pub stop_at_errors: u64,
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    pub workers: usize,
    pub max_iterations: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub beta: f64,
    pub granularity: Granularity,
    pub syndrome_every: Option<usize>,
    pub first_node_rule: bool,
    /// CSV destination; stdout when unset.
    pub output: Option<PathBuf>,
    /// JSON-lines trace destination.
    pub trace: Option<PathBuf>,
    /// Trials traced per point when `trace` is set.
    pub trace_trials: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let d = DecodeConfig::default();
        Self {
            code: None,
            schedulers: vec![SchedulerKind::Lbp, SchedulerKind::DynEbp, SchedulerKind::DynPebp],
            snr_db: vec![0.0],
            trials: 10_000,
            stop_at_errors: 200,
            seed: 1,
            workers: 0,
            max_iterations: d.max_iterations,
            gamma: d.gamma,
            lambda: d.lambda,
            beta: d.beta,
            granularity: d.granularity,
            syndrome_every: d.syndrome_every,
            first_node_rule: d.first_node_rule,
            output: None,
            trace: None,
            trace_trials: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let mut cfg: Self = toml::from_str(&read(path)?).map_err(|source| ConfigError::Toml {
            path: path.to_owned(),
            source,
        })?;
        cfg.code = cfg.code.map(|c| resolve(path, &c));
        Ok(cfg)
    }

    pub fn decode_config(&self) -> DecodeConfig {
        DecodeConfig {
            max_iterations: self.max_iterations,
            gamma: self.gamma,
            lambda: self.lambda,
            beta: self.beta,
            granularity: self.granularity,
            syndrome_every: self.syndrome_every,
            first_node_rule: self.first_node_rule,
            record: false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.decode_config()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.schedulers.is_empty() {
            return Err(ConfigError::Invalid("no schedulers selected".into()));
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| s.is_nan()) {
            return Err(ConfigError::Invalid(
                "snr_db must be a non-empty list of numbers".into(),
            ));
        }
        if self.snr_db.len() > u32::MAX as usize || self.trials > u32::MAX as u64 {
            return Err(ConfigError::Invalid(
                "at most 2^32 SNR points and trials per point".into(),
            ));
        }
        Ok(())
    }
}

fn parse_scheduler(s: &str) -> Result<SchedulerKind, String> {
    s.parse().map_err(|e: dynsched_core::DecodeError| e.to_string())
}

fn parse_granularity(s: &str) -> Result<Granularity, String> {
    match s {
        "check" => Ok(Granularity::Check),
        "layer" => Ok(Granularity::Layer),
        _ => Err(format!("expected `check` or `layer`, got {s:?}")),
    }
}

/// Command-line overrides for [`ExperimentConfig`].
#[derive(Debug, Clone, Default, clap::Args)]
pub struct SimArgs {
    /// Experiment TOML file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Code TOML file.
    #[arg(long)]
    pub code: Option<PathBuf>,
    /// Comma-separated scheduler names.
    #[arg(long, value_delimiter = ',', value_parser = parse_scheduler)]
    pub schedulers: Option<Vec<SchedulerKind>>,
    /// Comma-separated Es/N0 points in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub snr_db: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub stop_at_errors: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_parser = parse_granularity)]
    pub granularity: Option<Granularity>,
    #[arg(long)]
    pub syndrome_every: Option<usize>,
    #[arg(long)]
    pub first_node_rule: Option<bool>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub trace_trials: Option<u64>,
}

impl SimArgs {
    /// Loads the config file if given, then applies the flags.
    pub fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        self.apply_to(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_to(&self, cfg: &mut ExperimentConfig) {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field { cfg.$field = v.clone(); })*
            };
        }
        set!(
            schedulers,
            snr_db,
            trials,
            stop_at_errors,
            seed,
            workers,
            max_iterations,
            gamma,
            lambda,
            beta,
            granularity,
            first_node_rule,
            trace_trials
        );
        if let Some(v) = &self.code {
            cfg.code = Some(v.clone());
        }
        if let Some(v) = self.syndrome_every {
            cfg.syndrome_every = Some(v);
        }
        if let Some(v) = &self.output {
            cfg.output = Some(v.clone());
        }
        if let Some(v) = &self.trace {
            cfg.trace = Some(v.clone());
        }
    }
}
