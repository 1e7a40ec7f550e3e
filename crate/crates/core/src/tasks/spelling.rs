//! Confusion-set spelling data: occurrence scanning and feature encoding.
//!
//! A confusion set lists word forms that typing errors substitute for each
//! other, like {to, too, two}; the classes of the task are the members.
//! Scanning a corpus emits one example per occurrence of any member, labeled
//! with the member actually present — running text is assumed correct, so
//! the occurrence itself is the gold answer. Features are the context words
//! within `±k` of the occurrence plus collocation patterns up to length
//! `l`.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::TaskError;
use crate::feature_space::{
    extract_collocations, extract_context_words, ClassId, Example, FeatureSpace, Token,
};

/// A set of mutually confusable word forms; at least two, all distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionSet {
    words: Vec<String>,
}

impl ConfusionSet {
    pub fn new(words: Vec<String>) -> Result<Self, TaskError> {
        let mut seen = std::collections::HashSet::new();
        if words.len() < 2 || !words.iter().all(|w| !w.is_empty() && seen.insert(w.clone())) {
            return Err(TaskError::BadConfusionSet(words.join(",")));
        }
        Ok(ConfusionSet { words })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Index of `word` in the set, honoring the case rule.
    pub fn member_index(&self, word: &str, case_sensitive: bool) -> Option<ClassId> {
        self.words
            .iter()
            .position(|w| {
                if case_sensitive {
                    w == word
                } else {
                    w.eq_ignore_ascii_case(word)
                }
            })
            .map(|i| ClassId(i as u32))
    }

    /// A short display name, `to|too|two`.
    pub fn name(&self) -> String {
        self.words.join("|")
    }
}

/// Parses one confusion set per line, members comma-separated. Blank lines
/// and `#` comments are skipped.
pub fn read_confusion_sets<R: BufRead>(r: R) -> Result<Vec<ConfusionSet>, TaskError> {
    let mut sets = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let words: Vec<String> = trimmed
            .split(',')
            .map(|w| w.trim().to_string())
            .filter(|w| !w.is_empty())
            .collect();
        ConfusionSet::new(words)
            .map(|s| sets.push(s))
            .map_err(|_| TaskError::Parse {
                line: i + 1,
                msg: "a confusion set needs at least two distinct words".into(),
            })?;
    }
    Ok(sets)
}

pub fn load_confusion_sets(path: &Path) -> Result<Vec<ConfusionSet>, TaskError> {
    read_confusion_sets(BufReader::new(File::open(path)?))
}

/// Feature-extraction knobs for the spelling task.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpellingConfig {
    /// Context-word window radius `k`.
    pub window: usize,
    /// Maximum collocation pattern length `l`.
    pub max_colloc_len: usize,
    /// Lowercase surrounding words before building features.
    pub lowercase_context: bool,
    /// Match target occurrences against set members case-sensitively.
    pub case_sensitive_target: bool,
}

impl Default for SpellingConfig {
    fn default() -> Self {
        SpellingConfig {
            window: 10,
            max_colloc_len: 2,
            lowercase_context: true,
            case_sensitive_target: true,
        }
    }
}

/// One confusion-member occurrence, not yet encoded: its extracted
/// features, the member index as the gold label, and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Occurrence {
    pub features: Vec<crate::feature_space::Feature>,
    pub label: ClassId,
    pub source: String,
}

impl Occurrence {
    /// Encodes against a space, registering when asked.
    pub fn encode(&self, space: &mut FeatureSpace, register: bool) -> Result<Example, TaskError> {
        let example = if register {
            space.encode_train(&self.features, Some(self.label))?
        } else {
            space.encode_test(&self.features, Some(self.label))
        };
        Ok(example.with_source(self.source.clone()))
    }
}

/// Scans a one-sentence-per-line corpus for confusion-member occurrences
/// without touching any feature space: one [`Occurrence`] per member hit,
/// grouped per set. Sentences without occurrences contribute nothing.
pub fn scan_spelling<R: BufRead>(
    corpus: R,
    sets: &[ConfusionSet],
    cfg: &SpellingConfig,
) -> Result<Vec<Vec<Occurrence>>, TaskError> {
    if sets.is_empty() {
        return Err(TaskError::EmptyConfusionSets);
    }
    let mut per_set: Vec<Vec<Occurrence>> = vec![Vec::new(); sets.len()];
    for (lineno, line) in corpus.lines().enumerate() {
        let line = line?;
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let tokens: Vec<Token> = words
            .iter()
            .map(|w| {
                let text = if cfg.lowercase_context {
                    w.to_lowercase()
                } else {
                    (*w).to_string()
                };
                Token::word(text)
            })
            .collect::<Result<_, _>>()?;
        for (pos, word) in words.iter().enumerate() {
            for (set_idx, set) in sets.iter().enumerate() {
                let Some(label) = set.member_index(word, cfg.case_sensitive_target) else {
                    continue;
                };
                let mut features = extract_context_words(&tokens, pos, cfg.window)?;
                features.extend(extract_collocations(
                    &tokens,
                    None,
                    pos,
                    cfg.max_colloc_len,
                )?);
                per_set[set_idx].push(Occurrence {
                    features,
                    label,
                    source: format!("line {}, word {}", lineno + 1, pos + 1),
                });
            }
        }
    }
    Ok(per_set)
}

/// [`scan_spelling`] plus encoding: per confusion set, one example per
/// member occurrence.
pub fn read_spelling<R: BufRead>(
    corpus: R,
    sets: &[ConfusionSet],
    cfg: &SpellingConfig,
    space: &mut FeatureSpace,
    register: bool,
) -> Result<Vec<Vec<Example>>, TaskError> {
    scan_spelling(corpus, sets, cfg)?
        .into_iter()
        .map(|occurrences| {
            occurrences
                .into_iter()
                .map(|o| o.encode(space, register))
                .collect()
        })
        .collect()
}

pub fn load_spelling(
    path: &Path,
    sets: &[ConfusionSet],
    cfg: &SpellingConfig,
    space: &mut FeatureSpace,
    register: bool,
) -> Result<Vec<Vec<Example>>, TaskError> {
    read_spelling(BufReader::new(File::open(path)?), sets, cfg, space, register)
}
