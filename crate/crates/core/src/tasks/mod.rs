//! Dataset ingestion and feature encoding for the three experimental
//! tasks, plus the most-common baseline.
//!
//! File formats (all UTF-8, LF line endings):
//!
//! - attachment data: five whitespace-separated columns per line,
//!   `verb noun1 prep noun2 label`, label `v` or `n`;
//! - spelling corpora: plain text, one sentence per line; confusion sets:
//!   one set per line, members comma-separated;
//! - tagged corpora: sentences on lines, tokens as `word_TAG` separated by
//!   spaces (the tag starts after the last underscore).

pub mod pos;
pub mod ppa;
pub mod spelling;

pub use pos::{load_pos, pos_features, InitialTagger, PosCorpus};
pub use ppa::{load_ppa, ppa_features, write_ppa, PpaLabel, PpaRecord, PPA_MAX_ORDER};
pub use spelling::{
    load_confusion_sets, load_spelling, scan_spelling, ConfusionSet, Occurrence, SpellingConfig,
};

use thiserror::Error;

use crate::feature_space::{ClassId, Example, FeatureError};

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("training data is empty")]
    EmptyTrainingData,
    #[error("no confusion sets were given")]
    EmptyConfusionSets,
    #[error("a confusion set needs at least two distinct words, got {0:?}")]
    BadConfusionSet(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The constant majority-class predictor: the most frequent training
/// label, ties broken by the lowest class id.
pub fn majority_class(train: &[Example]) -> Result<ClassId, TaskError> {
    if train.is_empty() {
        return Err(TaskError::EmptyTrainingData);
    }
    let mut counts: std::collections::BTreeMap<ClassId, u64> = std::collections::BTreeMap::new();
    for e in train {
        if let Some(label) = e.label() {
            *counts.entry(label).or_insert(0) += 1;
        }
    }
    counts
        .into_iter()
        // BTreeMap iterates ids ascending, so strict `>` keeps the lowest
        // id on ties.
        .fold(None, |best: Option<(ClassId, u64)>, (id, n)| match best {
            Some((_, bn)) if n <= bn => best,
            _ => Some((id, n)),
        })
        .map(|(id, _)| id)
        .ok_or(TaskError::EmptyTrainingData)
}
