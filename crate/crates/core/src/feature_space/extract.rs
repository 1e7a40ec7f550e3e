//! Context-word and collocation feature extraction.
//!
//! Context words test for the presence of a particular word within `k`
//! positions of the target, with no record of where: they land in the
//! position-independent [`Slot::Context`]. Collocations test for a contiguous
//! pattern of up to `l` tokens anchored around the target; their slots are
//! signed offsets, and a pattern may straddle the target, which is left as a
//! gap.

use super::{Feature, FeatureError, Slot, Token};

/// One order-1 context feature per distinct word at distance `1..=k` from
/// the target. The target itself is excluded.
pub fn extract_context_words(
    tokens: &[Token],
    target_index: usize,
    k: usize,
) -> Result<Vec<Feature>, FeatureError> {
    if target_index >= tokens.len() {
        return Err(FeatureError::TargetOutOfRange {
            target: target_index,
            len: tokens.len(),
        });
    }
    if k == 0 {
        return Err(FeatureError::ZeroWindow);
    }
    let lo = target_index.saturating_sub(k);
    let hi = (target_index + k).min(tokens.len().saturating_sub(1));
    let mut feats = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, tok) in tokens.iter().enumerate().take(hi + 1).skip(lo) {
        if i == target_index {
            continue;
        }
        if seen.insert(tok.clone()) {
            feats.push(Feature::unit(Slot::Context, tok.clone()));
        }
    }
    Ok(feats)
}

/// Collocation features: every contiguous span of `1..=l` positions drawn
/// from offsets `-l..=l` around the target, the target itself excluded (a
/// span that straddles it keeps the gap). Spans extending past the sentence
/// are skipped. Each span yields an all-word pattern, and an all-tag pattern
/// too when `pos_tags` is supplied; words and tags are never mixed inside
/// one pattern.
pub fn extract_collocations(
    tokens: &[Token],
    pos_tags: Option<&[Token]>,
    target_index: usize,
    l: usize,
) -> Result<Vec<Feature>, FeatureError> {
    if target_index >= tokens.len() {
        return Err(FeatureError::TargetOutOfRange {
            target: target_index,
            len: tokens.len(),
        });
    }
    if l == 0 {
        return Err(FeatureError::ZeroWindow);
    }
    if let Some(tags) = pos_tags {
        if tags.len() != tokens.len() {
            return Err(FeatureError::TagLengthMismatch {
                tokens: tokens.len(),
                tags: tags.len(),
            });
        }
    }

    // Offsets around the target with 0 removed; runs of consecutive entries
    // in this list are the candidate spans (-1 and +1 are adjacent across
    // the gap).
    let offsets: Vec<i64> = (-(l as i64)..=l as i64).filter(|&o| o != 0).collect();

    let mut feats = Vec::new();
    for start in 0..offsets.len() {
        for len in 1..=l.min(offsets.len() - start) {
            let span = &offsets[start..start + len];
            let in_bounds = span.iter().all(|&o| {
                let pos = target_index as i64 + o;
                pos >= 0 && (pos as usize) < tokens.len()
            });
            if !in_bounds {
                continue;
            }
            let word_parts: Vec<(Slot, Token)> = span
                .iter()
                .map(|&o| {
                    let pos = (target_index as i64 + o) as usize;
                    (Slot::Offset(o as i32), tokens[pos].clone())
                })
                .collect();
            feats.push(Feature::new(word_parts)?);
            if let Some(tags) = pos_tags {
                let tag_parts: Vec<(Slot, Token)> = span
                    .iter()
                    .map(|&o| {
                        let pos = (target_index as i64 + o) as usize;
                        (Slot::Offset(o as i32), tags[pos].clone())
                    })
                    .collect();
                feats.push(Feature::new(tag_parts)?);
            }
        }
    }
    feats.dedup();
    Ok(feats)
}
