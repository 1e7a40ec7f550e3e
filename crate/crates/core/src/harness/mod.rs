//! Experiment orchestration: train or load any method on any task, score
//! it with the one shared accuracy measure, and render comparable reports.

pub mod config;
pub mod model_io;
pub mod oracle_suite;
mod run;
pub mod synthetic;

pub use config::{
    parse_config_file, resolve_data_path, ExperimentConfig, Method, Task, DATA_ROOT_ENV,
};
pub use model_io::{load_model, save_model, Model};
pub use synthetic::SyntheticConfig;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use thiserror::Error;

use crate::baselines::backoff::BackoffError;
use crate::baselines::decision_list::DlError;
use crate::baselines::naive_bayes::NbError;
use crate::feature_space::FeatureError;
use crate::lin_sep::{EvalError, LinSepError};
use crate::snow::SnowError;
use crate::tasks::TaskError;
use crate::winnow::WinnowError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Snow(#[from] SnowError),
    #[error(transparent)]
    Winnow(#[from] WinnowError),
    #[error(transparent)]
    Nb(#[from] NbError),
    #[error(transparent)]
    Backoff(#[from] BackoffError),
    #[error(transparent)]
    Dl(#[from] DlError),
    #[error(transparent)]
    LinSep(#[from] LinSepError),
    #[error(transparent)]
    Oracle(#[from] crate::oracle::OracleError),
    #[error("model kind mismatch: expected {expected}, found {found}")]
    ModelKindMismatch {
        expected: &'static str,
        found: String,
    },
    #[error("unknown model header {0:?}")]
    UnknownModelHeader(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl HarnessError {
    /// CLI exit code: 3 for configuration problems, 2 for anything that
    /// went wrong with data or models.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 3,
            _ => 2,
        }
    }
}

/// A per-group score line (one confusion set, for the spelling task).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupResult {
    pub name: String,
    pub accuracy: f64,
    pub n_test: usize,
}

/// What one experiment produced.
#[derive(Debug, Clone)]
pub struct Report {
    pub task: Task,
    /// Method name; a model kind like `linsep` when evaluating a saved
    /// export directly.
    pub method: String,
    /// Overall test accuracy; for grouped tasks, the test-case-weighted
    /// average over groups.
    pub accuracy: f64,
    /// Accuracy of the most-common baseline on the same test data, when a
    /// training set was available to fit it.
    pub baseline_accuracy: Option<f64>,
    pub n_train: usize,
    pub n_test: usize,
    /// Accuracy restricted to each gold class present in the test set.
    pub per_class: Vec<GroupResult>,
    pub groups: Vec<GroupResult>,
    /// Training mistakes per target node, for the network method.
    pub node_mistakes: Option<Vec<u64>>,
    pub wall_ms: u128,
}

impl Report {
    /// `result <method> <task> <accuracy> <n_test>`.
    pub fn machine_line(&self) -> String {
        format!(
            "result {} {} {:.4} {}",
            self.method, self.task, self.accuracy, self.n_test
        )
    }

    /// Human-readable block with percentages, paper-table style.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "task       {}", self.task);
        let _ = writeln!(out, "method     {}", self.method);
        let _ = writeln!(out, "train      {} examples", self.n_train);
        let _ = writeln!(out, "test       {} examples", self.n_test);
        match self.baseline_accuracy {
            Some(b) => {
                let _ = writeln!(out, "baseline   {:6.2}", b * 100.0);
            }
            None => {
                let _ = writeln!(out, "baseline   -");
            }
        }
        let _ = writeln!(out, "accuracy   {:6.2}", self.accuracy * 100.0);
        if let Some(mistakes) = &self.node_mistakes {
            let total: u64 = mistakes.iter().sum();
            let _ = writeln!(out, "mistakes   {total} across {} nodes", mistakes.len());
        }
        let _ = writeln!(out, "time       {} ms", self.wall_ms);
        let block = |out: &mut String, header: &str, rows: &[GroupResult]| {
            if rows.is_empty() {
                return;
            }
            let width = rows.iter().map(|g| g.name.len()).max().unwrap_or(0).max(5);
            let _ = writeln!(out, "{header:width$}  {:>6}  {:>8}", "cases", "accuracy");
            for g in rows {
                let _ = writeln!(
                    out,
                    "{:width$}  {:>6}  {:>8.2}",
                    g.name,
                    g.n_test,
                    g.accuracy * 100.0
                );
            }
        };
        block(&mut out, "class", &self.per_class);
        block(&mut out, "set", &self.groups);
        out
    }
}

/// Trains (or loads) the configured method on the configured task and
/// scores it. Fully deterministic under a fixed seed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    cfg.validate()?;
    let started = Instant::now();
    let mut report = match cfg.task {
        Task::Synthetic => run::run_synthetic(cfg)?,
        Task::Ppa => run::run_ppa(cfg)?,
        Task::Spell => run::run_spell(cfg)?,
        Task::Pos => run::run_pos(cfg)?,
    };
    report.wall_ms = started.elapsed().as_millis();
    Ok(report)
}

/// Evaluates a previously saved model on a test set; the method comes from
/// the model file header.
pub fn evaluate_saved(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let started = Instant::now();
    let mut report = run::evaluate_saved(cfg)?;
    report.wall_ms = started.elapsed().as_millis();
    Ok(report)
}

/// Side-by-side method comparison on one shared task and split.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub task: Task,
    pub rows: Vec<Report>,
}

impl Comparison {
    /// One table row per method: cases, baseline, accuracy.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "task: {}", self.task);
        let _ = writeln!(
            out,
            "{:<10} {:>7} {:>9} {:>9}",
            "method", "cases", "baseline", "accuracy"
        );
        for r in &self.rows {
            let baseline = r
                .baseline_accuracy
                .map(|b| format!("{:9.2}", b * 100.0))
                .unwrap_or_else(|| format!("{:>9}", "-"));
            let _ = writeln!(
                out,
                "{:<10} {:>7} {} {:>9.2}",
                r.method,
                r.n_test,
                baseline,
                r.accuracy * 100.0
            );
        }
        out
    }

    pub fn machine_lines(&self) -> String {
        self.rows
            .iter()
            .map(Report::machine_line)
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Runs every config and tabulates. All configs must share the task and
/// the data/split/seed so the rows are comparable.
pub fn compare(cfgs: &[ExperimentConfig]) -> Result<Comparison, HarnessError> {
    let first = cfgs
        .first()
        .ok_or_else(|| HarnessError::Config("compare needs at least one config".into()))?;
    for cfg in cfgs {
        let same = cfg.task == first.task
            && cfg.train == first.train
            && cfg.test == first.test
            && cfg.sets == first.sets
            && cfg.split == first.split
            && cfg.seed == first.seed;
        if !same {
            return Err(HarnessError::Config(
                "compare configs must share task, data, split and seed".into(),
            ));
        }
    }
    let rows = cfgs
        .iter()
        .map(run_experiment)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Comparison {
        task: first.task,
        rows,
    })
}
