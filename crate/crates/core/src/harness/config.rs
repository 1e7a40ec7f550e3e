//! Experiment configuration: what to run, on what data, with which knobs.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use super::synthetic::SyntheticConfig;
use super::HarnessError;
use crate::winnow::WinnowConfig;

/// Environment variable naming the default data root; relative data paths
/// resolve against it when it is set.
pub const DATA_ROOT_ENV: &str = "AMBIGUITY_LAB_DATA";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Spell,
    Ppa,
    Pos,
    Synthetic,
}

impl Task {
    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        match s {
            "spell" => Ok(Task::Spell),
            "ppa" => Ok(Task::Ppa),
            "pos" => Ok(Task::Pos),
            "synthetic" => Ok(Task::Synthetic),
            _ => Err(HarnessError::Config(format!(
                "unknown task {s:?}; expected spell, ppa, pos or synthetic"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Spell => "spell",
            Task::Ppa => "ppa",
            Task::Pos => "pos",
            Task::Synthetic => "synthetic",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Snow,
    Nb,
    Bo,
    Dl,
    Baseline,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        match s {
            "snow" => Ok(Method::Snow),
            "nb" => Ok(Method::Nb),
            "bo" => Ok(Method::Bo),
            "dl" => Ok(Method::Dl),
            "baseline" => Ok(Method::Baseline),
            _ => Err(HarnessError::Config(format!(
                "unknown method {s:?}; expected snow, nb, bo, dl or baseline"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Snow => "snow",
            Method::Nb => "nb",
            Method::Bo => "bo",
            Method::Dl => "dl",
            Method::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything one experiment needs. A fixed seed makes the whole run —
/// splitting, shuffling, generation — deterministic.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub task: Task,
    pub method: Method,
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    /// Confusion-set file (spelling only).
    pub sets: Option<PathBuf>,
    /// Model file to evaluate (decision lists are loaded, never trained).
    pub model: Option<PathBuf>,
    /// Lexicon mapping feature ids for a loaded model.
    pub lexicon: Option<PathBuf>,
    /// Train fraction when no test file is given.
    pub split: Option<f64>,
    pub seed: u64,
    pub winnow: WinnowConfig,
    pub epochs: usize,
    /// Context-word window radius.
    pub window_k: usize,
    /// Maximum collocation length.
    pub colloc_l: usize,
    /// Add-constant smoothing for naive Bayes.
    pub smoothing: f64,
    pub synth: SyntheticConfig,
    /// Where to save the trained model (a `<out>.lex` lexicon rides along
    /// for the file-based tasks).
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            task: Task::Synthetic,
            method: Method::Snow,
            train: None,
            test: None,
            sets: None,
            model: None,
            lexicon: None,
            split: None,
            seed: 0,
            winnow: WinnowConfig::default(),
            epochs: 1,
            window_k: 10,
            colloc_l: 2,
            smoothing: 1.0,
            synth: SyntheticConfig::default(),
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if let Some(r) = self.split {
            if !(r > 0.0 && r < 1.0) {
                return Err(HarnessError::Config(format!(
                    "split ratio must lie in (0, 1), got {r}"
                )));
            }
        }
        if self.task != Task::Synthetic {
            if self.train.is_none() {
                return Err(HarnessError::Config(format!(
                    "task {} needs --train",
                    self.task
                )));
            }
            if self.test.is_none() && self.split.is_none() {
                return Err(HarnessError::Config(
                    "give either --test or --split".into(),
                ));
            }
        }
        if self.task == Task::Spell && self.sets.is_none() {
            return Err(HarnessError::Config(
                "the spelling task needs --sets".into(),
            ));
        }
        match (self.method, self.task) {
            (Method::Bo, Task::Ppa) => {}
            (Method::Bo, t) => {
                return Err(HarnessError::Config(format!(
                    "back-off needs a lattice-structured task; {t} is not one (use ppa)"
                )));
            }
            (Method::Nb, Task::Pos) => {
                return Err(HarnessError::Config(
                    "naive Bayes here is binary; pos tagging is multi-class (use snow)".into(),
                ));
            }
            (Method::Dl, _) if self.model.is_none() => {
                return Err(HarnessError::Config(
                    "decision lists are loaded from --model, not trained".into(),
                ));
            }
            (Method::Dl, Task::Pos | Task::Spell) => {
                return Err(HarnessError::Config(
                    "decision-list evaluation supports the binary tasks (ppa, synthetic)".into(),
                ));
            }
            _ => {}
        }
        self.winnow
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }
}

/// Parses a `key=value` config file: one pair per line, `#` comments and
/// blank lines skipped. Values keep their raw text; the CLI maps keys to
/// the flags of the same name.
pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut pairs = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            HarnessError::Config(format!(
                "{}:{}: expected `key=value`, got {line:?}",
                path.display(),
                i + 1
            ))
        })?;
        pairs.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(pairs)
}

/// Joins relative data paths onto `AMBIGUITY_LAB_DATA` when it is set;
/// absolute paths and unset environments pass through.
pub fn resolve_data_path(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(DATA_ROOT_ENV) {
        Some(root) if !root.is_empty() => PathBuf::from(root).join(path),
        _ => path.to_path_buf(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tasks_and_methods() {
        assert_eq!(Task::parse("ppa").unwrap(), Task::Ppa);
        assert!(Task::parse("nope").is_err());
        assert_eq!(Method::parse("snow").unwrap(), Method::Snow);
        assert!(Method::parse("tbl").is_err());
    }

    #[test]
    fn synthetic_task_needs_no_files() {
        assert!(ExperimentConfig::default().validate().is_ok());
    }

    #[test]
    fn file_tasks_need_train_and_a_test_source() {
        let cfg = ExperimentConfig {
            task: Task::Ppa,
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
        let cfg = ExperimentConfig {
            task: Task::Ppa,
            train: Some("x".into()),
            split: Some(0.8),
            ..ExperimentConfig::default()
        };
        assert!(cfg.validate().is_ok());
        let bad_split = ExperimentConfig {
            split: Some(1.2),
            ..cfg
        };
        assert!(bad_split.validate().is_err());
    }

    #[test]
    fn method_task_compatibility() {
        let bo_on_spell = ExperimentConfig {
            task: Task::Spell,
            method: Method::Bo,
            train: Some("x".into()),
            sets: Some("s".into()),
            split: Some(0.8),
            ..ExperimentConfig::default()
        };
        assert!(bo_on_spell.validate().is_err());
        let dl_without_model = ExperimentConfig {
            method: Method::Dl,
            ..ExperimentConfig::default()
        };
        assert!(dl_without_model.validate().is_err());
    }

    #[test]
    fn config_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "# demo\ntask=ppa\nseed = 7\n\nalpha=1.5\n").unwrap();
        let pairs = parse_config_file(&path).unwrap();
        assert_eq!(pairs["task"], "ppa");
        assert_eq!(pairs["seed"], "7");
        assert_eq!(pairs["alpha"], "1.5");
        std::fs::write(&path, "no equals sign\n").unwrap();
        assert!(parse_config_file(&path).is_err());
    }
}
