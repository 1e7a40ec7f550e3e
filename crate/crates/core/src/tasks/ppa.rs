//! Prepositional-phrase attachment records and their subsequence features.
//!
//! An instance is the four head words of the attachment decision — the verb,
//! the first noun, the preposition and the second noun — labeled `v` (the
//! phrase attaches to the verb) or `n` (to the noun). Every non-empty
//! slot-labeled subsequence of the 4-tuple becomes a feature: 4 singletons,
//! 6 pairs, 4 triples and the full tuple, 15 in all. Slot labels are part
//! of feature identity, so the same word as first and as second noun gives
//! two different features.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::TaskError;
use crate::feature_space::{ClassId, Example, FeatureSpace, Slot, Token};

/// The order of the full-tuple feature; also the back-off model depth.
pub const PPA_MAX_ORDER: u32 = 4;

/// Attachment site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpaLabel {
    /// Attaches to the verb phrase; encoded as class 1.
    Verb,
    /// Attaches to the noun phrase; encoded as class 0.
    Noun,
}

impl PpaLabel {
    pub fn class_id(self) -> ClassId {
        match self {
            PpaLabel::Verb => ClassId(1),
            PpaLabel::Noun => ClassId(0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PpaLabel::Verb => "v",
            PpaLabel::Noun => "n",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "v" => Some(PpaLabel::Verb),
            "n" => Some(PpaLabel::Noun),
            _ => None,
        }
    }
}

/// One labeled head-word 4-tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpaRecord {
    pub verb: String,
    pub noun1: String,
    pub preposition: String,
    pub noun2: String,
    pub label: PpaLabel,
}

/// Parses 5-column whitespace-separated lines; malformed lines error with
/// their line number.
pub fn read_ppa<R: BufRead>(r: R) -> Result<Vec<PpaRecord>, TaskError> {
    let mut records = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 5 {
            return Err(TaskError::Parse {
                line: lineno,
                msg: format!("expected 5 columns, found {}", cols.len()),
            });
        }
        let label = PpaLabel::parse(cols[4]).ok_or_else(|| TaskError::Parse {
            line: lineno,
            msg: format!("label must be `v` or `n`, found {:?}", cols[4]),
        })?;
        records.push(PpaRecord {
            verb: cols[0].to_string(),
            noun1: cols[1].to_string(),
            preposition: cols[2].to_string(),
            noun2: cols[3].to_string(),
            label,
        });
    }
    Ok(records)
}

pub fn load_ppa(path: &Path) -> Result<Vec<PpaRecord>, TaskError> {
    read_ppa(BufReader::new(File::open(path)?))
}

/// Writes records back in the canonical single-space, LF-terminated form.
/// Reading a canonical file and writing it again is byte-identical.
pub fn write_ppa<W: Write>(records: &[PpaRecord], mut w: W) -> std::io::Result<()> {
    for r in records {
        writeln!(
            w,
            "{} {} {} {} {}",
            r.verb,
            r.noun1,
            r.preposition,
            r.noun2,
            r.label.as_str()
        )?;
    }
    Ok(())
}

/// Encodes a record as its 15 subsequence features, labeled by attachment.
pub fn ppa_features(
    record: &PpaRecord,
    space: &mut FeatureSpace,
    register: bool,
) -> Result<Example, TaskError> {
    let slots = [
        (Slot::Verb, &record.verb),
        (Slot::Noun1, &record.noun1),
        (Slot::Prep, &record.preposition),
        (Slot::Noun2, &record.noun2),
    ];
    let mut feats = Vec::with_capacity(15);
    for mask in 1u32..16 {
        let parts = slots
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, (slot, text))| Ok((*slot, Token::word(text.as_str())?)))
            .collect::<Result<Vec<_>, TaskError>>()?;
        feats.push(crate::feature_space::Feature::new(parts)?);
    }
    let label = Some(record.label.class_id());
    if register {
        Ok(space.encode_train(&feats, label)?)
    } else {
        Ok(space.encode_test(&feats, label))
    }
}
