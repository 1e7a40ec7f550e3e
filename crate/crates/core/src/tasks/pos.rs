//! Tagged corpora, initial tagging and per-position feature encoding.
//!
//! A tagged corpus is one sentence per line, tokens as `word_TAG`. Tagging
//! runs one pass: every word first receives an initial tag — its most
//! common tag in the training corpus, or the global majority tag for
//! unseen words — and the classifier then predicts each position from the
//! surrounding words and the (noisy) initial tags of its neighbors. The
//! position's own initial tag never enters its features, and initial-tag
//! statistics come from training counts only.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::TaskError;
use crate::feature_space::{
    extract_collocations, extract_context_words, ClassId, Example, FeatureSpace, TaskDef, Token,
};

/// A tagged corpus: sentences of `(word, gold tag)` pairs plus the sorted
/// tag inventory.
#[derive(Debug, Clone, PartialEq)]
pub struct PosCorpus {
    pub sentences: Vec<Vec<(String, String)>>,
    pub tagset: Vec<String>,
}

impl PosCorpus {
    /// Rebuilds a corpus (and its tag inventory) from a sentence subset,
    /// as the split machinery needs.
    pub fn from_sentences(sentences: Vec<Vec<(String, String)>>) -> Self {
        let tagset: std::collections::BTreeSet<String> = sentences
            .iter()
            .flatten()
            .map(|(_, tag)| tag.clone())
            .collect();
        PosCorpus {
            sentences,
            tagset: tagset.into_iter().collect(),
        }
    }

    /// The tagging task over this corpus's inventory: one class per tag,
    /// in sorted order.
    pub fn task_def(&self) -> Result<TaskDef, TaskError> {
        Ok(TaskDef::new("pos", self.tagset.clone())?)
    }

    pub fn tag_class(&self, tag: &str) -> Option<ClassId> {
        self.tagset
            .binary_search_by(|t| t.as_str().cmp(tag))
            .ok()
            .map(|i| ClassId(i as u32))
    }

    pub fn num_positions(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}

/// Parses `word_TAG` tokens; the tag starts after the last underscore.
pub fn read_pos<R: BufRead>(r: R) -> Result<PosCorpus, TaskError> {
    let mut sentences = Vec::new();
    let mut tags = std::collections::BTreeSet::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut sentence = Vec::new();
        for (t, token) in line.split_whitespace().enumerate() {
            let (word, tag) = token.rsplit_once('_').ok_or_else(|| TaskError::Parse {
                line: i + 1,
                msg: format!("token {} ({token:?}) has no `_TAG` suffix", t + 1),
            })?;
            if word.is_empty() || tag.is_empty() {
                return Err(TaskError::Parse {
                    line: i + 1,
                    msg: format!("token {} ({token:?}) has an empty word or tag", t + 1),
                });
            }
            tags.insert(tag.to_string());
            sentence.push((word.to_string(), tag.to_string()));
        }
        sentences.push(sentence);
    }
    Ok(PosCorpus {
        sentences,
        tagset: tags.into_iter().collect(),
    })
}

pub fn load_pos(path: &Path) -> Result<PosCorpus, TaskError> {
    read_pos(BufReader::new(File::open(path)?))
}

/// Per-word most-common-tag statistics, with a global-majority fallback
/// for unseen words. Doubles as the tagging baseline.
#[derive(Debug, Clone)]
pub struct InitialTagger {
    per_word: HashMap<String, String>,
    global: String,
}

impl InitialTagger {
    /// Counts tags in the training corpus only. Ties pick the
    /// lexicographically smaller tag (the lower class id).
    pub fn fit(train: &PosCorpus) -> Result<Self, TaskError> {
        let mut word_counts: HashMap<&str, HashMap<&str, u64>> = HashMap::new();
        let mut global_counts: HashMap<&str, u64> = HashMap::new();
        for sentence in &train.sentences {
            for (word, tag) in sentence {
                *word_counts
                    .entry(word)
                    .or_default()
                    .entry(tag)
                    .or_insert(0) += 1;
                *global_counts.entry(tag).or_insert(0) += 1;
            }
        }
        let most_common = |counts: &HashMap<&str, u64>| -> Option<String> {
            counts
                .iter()
                .max_by(|(ta, na), (tb, nb)| na.cmp(nb).then(tb.cmp(ta)))
                .map(|(t, _)| t.to_string())
        };
        let global = most_common(&global_counts).ok_or(TaskError::EmptyTrainingData)?;
        let per_word = word_counts
            .into_iter()
            .map(|(w, counts)| (w.to_string(), most_common(&counts).expect("non-empty")))
            .collect();
        Ok(InitialTagger { per_word, global })
    }

    pub fn tag(&self, word: &str) -> &str {
        self.per_word.get(word).map_or(&self.global, String::as_str)
    }

    pub fn global_majority(&self) -> &str {
        &self.global
    }

    /// Initial tags for a whole sentence.
    pub fn tag_sentence(&self, words: &[String]) -> Vec<String> {
        words.iter().map(|w| self.tag(w).to_string()).collect()
    }
}

/// Features for one position: context words within `±k` plus collocations
/// up to length `l` over both the surrounding words and their current
/// (possibly noisy) tags. The position's own tag is not used. The caller
/// attaches the gold label.
pub fn pos_features(
    words: &[String],
    current_tags: &[String],
    position: usize,
    k: usize,
    l: usize,
    space: &mut FeatureSpace,
    register: bool,
) -> Result<Example, TaskError> {
    let word_tokens: Vec<Token> = words
        .iter()
        .map(|w| Token::word(w.as_str()))
        .collect::<Result<_, _>>()?;
    let tag_tokens: Vec<Token> = current_tags
        .iter()
        .map(|t| Token::pos_tag(t.as_str()))
        .collect::<Result<_, _>>()?;
    let mut feats = extract_context_words(&word_tokens, position, k)?;
    feats.extend(extract_collocations(
        &word_tokens,
        Some(&tag_tokens),
        position,
        l,
    )?);
    if register {
        Ok(space.encode_train(&feats, None)?)
    } else {
        Ok(space.encode_test(&feats, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_word_tag_tokens() {
        let corpus = read_pos(&b"the_DT dog_NN\nruns_VBZ\n"[..]).unwrap();
        assert_eq!(corpus.sentences.len(), 2);
        assert_eq!(corpus.sentences[0].len(), 2);
        assert_eq!(corpus.tagset, vec!["DT", "NN", "VBZ"]);
        assert_eq!(corpus.num_positions(), 3);
    }

    #[test]
    fn underscore_in_word_keeps_the_last_tag_split() {
        let corpus = read_pos(&b"co_op_NN\n"[..]).unwrap();
        assert_eq!(corpus.sentences[0][0], ("co_op".into(), "NN".into()));
    }

    #[test]
    fn malformed_token_errors_with_position() {
        let err = read_pos(&b"the_DT dog\n"[..]).unwrap_err();
        match err {
            TaskError::Parse { line, msg } => {
                assert_eq!(line, 1);
                assert!(msg.contains("token 2"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn initial_tagger_takes_per_word_majority() {
        let corpus = read_pos(
            &b"walk_NN walk_NN walk_VB\nthe_DT the_DT the_DT\n"[..],
        )
        .unwrap();
        let tagger = InitialTagger::fit(&corpus).unwrap();
        assert_eq!(tagger.tag("walk"), "NN");
        // Unseen words fall back to the global majority (DT: 3 vs NN: 2).
        assert_eq!(tagger.tag("zebra"), "DT");
        assert_eq!(tagger.global_majority(), "DT");
    }

    #[test]
    fn initial_tagger_ties_choose_the_smaller_tag() {
        let corpus = read_pos(&b"x_B x_A\n"[..]).unwrap();
        let tagger = InitialTagger::fit(&corpus).unwrap();
        assert_eq!(tagger.tag("x"), "A");
    }

    #[test]
    fn position_features_use_neighbor_tags_not_own() {
        let words: Vec<String> = ["the", "dog", "barks"].iter().map(|s| s.to_string()).collect();
        let tags: Vec<String> = ["DT", "NN", "VBZ"].iter().map(|s| s.to_string()).collect();
        let mut space = FeatureSpace::new();
        pos_features(&words, &tags, 1, 2, 2, &mut space, true).unwrap();
        let texts: Vec<String> = space.iter().map(|(_, f)| f.to_string()).collect();
        assert!(texts.contains(&"t:-1:DT".to_string()));
        assert!(texts.contains(&"t:+1:VBZ".to_string()));
        // The target's own tag NN appears in no feature.
        assert!(texts.iter().all(|t| !t.contains("NN")));
    }

    #[test]
    fn task_def_covers_the_tagset() {
        let corpus = read_pos(&b"a_X b_Y\n"[..]).unwrap();
        let task = corpus.task_def().unwrap();
        assert_eq!(task.num_classes(), 2);
        assert_eq!(corpus.tag_class("Y"), Some(ClassId(1)));
        assert_eq!(corpus.tag_class("Z"), None);
    }
}
