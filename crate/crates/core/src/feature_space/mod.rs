//! Features, feature spaces and sparse binary examples.
//!
//! A feature is a non-empty sequence of slotted tokens: each token is a word
//! or a part-of-speech tag, and each slot says where the token sits relative
//! to the disambiguation target (a position-independent context slot, a
//! signed offset, or one of the four named head-word slots). Features of
//! order `k` consist of `k` tokens; lower-order features generalize
//! higher-order ones under the subset partial order [`Feature::precedes`].
//!
//! A [`FeatureSpace`] is the global lexicon: a bijection between features and
//! dense integer ids, assigned first-come-first-served during training. An
//! [`Example`] is the sparse encoding of one classification instance: the
//! sorted set of active feature ids plus an optional gold label.
//!
//! A space can be frozen after training. A frozen space rejects registration,
//! so test-time encoding can never grow the lexicon; read-only encoding and
//! lookup on a frozen space are safe from many threads.

mod extract;

pub use extract::{extract_collocations, extract_context_words};

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};

use thiserror::Error;

/// Errors from feature construction, extraction, encoding and lexicon I/O.
#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("token text must be non-empty")]
    EmptyTokenText,
    #[error("a feature must contain at least one token")]
    EmptyFeature,
    #[error("feature slots must be strictly increasing")]
    NonIncreasingSlots,
    #[error("target index {target} out of range for {len} tokens")]
    TargetOutOfRange { target: usize, len: usize },
    #[error("window radius / pattern length must be at least 1")]
    ZeroWindow,
    #[error("pos tag sequence has length {tags}, tokens have length {tokens}")]
    TagLengthMismatch { tokens: usize, tags: usize },
    #[error("feature space is frozen; registration is not allowed")]
    Frozen,
    #[error("task needs at least two classes")]
    TooFewClasses,
    #[error("duplicate class name {0:?}")]
    DuplicateClass(String),
    #[error("lexicon line {line}: {msg}")]
    LexiconParse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// What kind of symbol a token carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TokenKind {
    Word,
    PosTag,
}

/// A word surface form or a pos-tag symbol. Text is always non-empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token {
    kind: TokenKind,
    text: String,
}

impl Token {
    pub fn new(kind: TokenKind, text: impl Into<String>) -> Result<Self, FeatureError> {
        let text = text.into();
        if text.is_empty() {
            return Err(FeatureError::EmptyTokenText);
        }
        Ok(Token { kind, text })
    }

    pub fn word(text: impl Into<String>) -> Result<Self, FeatureError> {
        Token::new(TokenKind::Word, text)
    }

    pub fn pos_tag(text: impl Into<String>) -> Result<Self, FeatureError> {
        Token::new(TokenKind::PosTag, text)
    }

    pub fn kind(&self) -> TokenKind {
        self.kind
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

/// Where a token sits relative to the disambiguation target.
///
/// `Context` is position-independent (a bag-of-words slot), `Offset` is a
/// signed distance from the target, and the four named slots identify the
/// head words of a verb–noun–preposition–noun attachment tuple.
///
/// The derived order (`Context`, then offsets ascending, then the named
/// slots in tuple order) is the order feature slots must strictly increase
/// in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Context,
    Offset(i32),
    Verb,
    Noun1,
    Prep,
    Noun2,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Context => write!(f, "c"),
            Slot::Offset(o) => write!(f, "{o:+}"),
            Slot::Verb => write!(f, "V"),
            Slot::Noun1 => write!(f, "N1"),
            Slot::Prep => write!(f, "P"),
            Slot::Noun2 => write!(f, "N2"),
        }
    }
}

impl Slot {
    fn parse(s: &str) -> Option<Slot> {
        match s {
            "c" => Some(Slot::Context),
            "V" => Some(Slot::Verb),
            "N1" => Some(Slot::Noun1),
            "P" => Some(Slot::Prep),
            "N2" => Some(Slot::Noun2),
            _ => s.parse::<i32>().ok().map(Slot::Offset),
        }
    }
}

/// A feature: an ordered, non-empty sequence of `(slot, token)` pairs with
/// strictly increasing slots. The order of a feature is its token count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Feature {
    parts: Vec<(Slot, Token)>,
}

impl Feature {
    pub fn new(parts: Vec<(Slot, Token)>) -> Result<Self, FeatureError> {
        if parts.is_empty() {
            return Err(FeatureError::EmptyFeature);
        }
        if parts.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(FeatureError::NonIncreasingSlots);
        }
        Ok(Feature { parts })
    }

    /// Convenience constructor for a single-token feature.
    pub fn unit(slot: Slot, token: Token) -> Self {
        Feature {
            parts: vec![(slot, token)],
        }
    }

    /// The number of tokens in the feature. Always at least 1.
    pub fn order(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[(Slot, Token)] {
        &self.parts
    }

    /// The subset partial order on features viewed as sets of slotted
    /// tokens: `self` precedes `g` iff every `(slot, token)` pair of `self`
    /// occurs in `g`. Reflexive: every feature precedes itself.
    pub fn precedes(&self, g: &Feature) -> bool {
        // Both sides are sorted by slot, so a single merge walk suffices.
        let mut it = g.parts.iter();
        'outer: for part in &self.parts {
            for other in it.by_ref() {
                if other == part {
                    continue 'outer;
                }
                if other.0 > part.0 {
                    return false;
                }
            }
            return false;
        }
        true
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (slot, tok)) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let kind = match tok.kind() {
                TokenKind::Word => "w",
                TokenKind::PosTag => "t",
            };
            write!(f, "{kind}:{slot}:{}", escape(tok.text()))?;
        }
        Ok(())
    }
}

/// Dense non-negative feature identifier assigned by a [`FeatureSpace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureId(pub u32);

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Index of a class in a [`TaskDef`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub u32);

impl ClassId {
    /// Maps a binary prediction to the conventional class ids 0 and 1.
    pub fn from_bool(positive: bool) -> ClassId {
        ClassId(positive as u32)
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The global lexicon: a bijection between features and dense ids.
///
/// Ids are assigned first-come-first-served by [`FeatureSpace::register`]
/// and are stable once assigned. After [`FeatureSpace::freeze`] the space
/// rejects registration; lookups and read-only encoding remain available.
#[derive(Debug, Clone, Default)]
pub struct FeatureSpace {
    by_feature: HashMap<Feature, FeatureId>,
    by_id: Vec<Feature>,
    frozen: bool,
}

impl FeatureSpace {
    pub fn new() -> Self {
        FeatureSpace::default()
    }

    /// Number of registered features.
    pub fn len(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    /// Disallow further registration. Idempotent.
    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    /// Returns the id of `f`, registering it if unseen.
    pub fn register(&mut self, f: Feature) -> Result<FeatureId, FeatureError> {
        if let Some(&id) = self.by_feature.get(&f) {
            return Ok(id);
        }
        if self.frozen {
            return Err(FeatureError::Frozen);
        }
        let id = FeatureId(self.by_id.len() as u32);
        self.by_id.push(f.clone());
        self.by_feature.insert(f, id);
        Ok(id)
    }

    pub fn id_of(&self, f: &Feature) -> Option<FeatureId> {
        self.by_feature.get(f).copied()
    }

    pub fn feature(&self, id: FeatureId) -> Option<&Feature> {
        self.by_id.get(id.0 as usize)
    }

    /// Iterates `(id, feature)` pairs in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (FeatureId, &Feature)> {
        self.by_id
            .iter()
            .enumerate()
            .map(|(i, f)| (FeatureId(i as u32), f))
    }

    /// Training-mode encoding: unseen features get fresh ids.
    pub fn encode_train(
        &mut self,
        feats: &[Feature],
        label: Option<ClassId>,
    ) -> Result<Example, FeatureError> {
        let mut active = Vec::with_capacity(feats.len());
        for f in feats {
            active.push(self.register(f.clone())?);
        }
        Ok(Example::new(active, label))
    }

    /// Test-mode encoding: unseen features are silently dropped (they carry
    /// weight zero in every model anyway).
    pub fn encode_test(&self, feats: &[Feature], label: Option<ClassId>) -> Example {
        let active = feats.iter().filter_map(|f| self.id_of(f)).collect();
        Example::new(active, label)
    }

    /// Writes the lexicon as `<id>\t<kind>:<slot>:<text>...` lines, ids
    /// ascending, UTF-8, LF line endings. Token text has `%`, `:`,
    /// whitespace and newlines percent-escaped.
    pub fn write_lexicon<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (id, f) in self.iter() {
            writeln!(w, "{id}\t{f}")?;
        }
        Ok(())
    }

    /// Reads a lexicon written by [`write_lexicon`](Self::write_lexicon).
    /// The returned space is frozen: loaded lexicons are for evaluation.
    pub fn read_lexicon<R: BufRead>(r: R) -> Result<Self, FeatureError> {
        let mut space = FeatureSpace::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| FeatureError::LexiconParse {
                line: lineno,
                msg: msg.to_string(),
            };
            let (id_part, feat_part) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
            let id: u32 = id_part.parse().map_err(|_| bad("bad feature id"))?;
            if id as usize != space.len() {
                return Err(bad("ids must be dense and ascending"));
            }
            let mut parts = Vec::new();
            for tok_str in feat_part.split(' ') {
                let mut fields = tok_str.splitn(3, ':');
                let kind = match fields.next() {
                    Some("w") => TokenKind::Word,
                    Some("t") => TokenKind::PosTag,
                    _ => return Err(bad("bad token kind")),
                };
                let slot = fields
                    .next()
                    .and_then(Slot::parse)
                    .ok_or_else(|| bad("bad slot"))?;
                let text = unescape(fields.next().ok_or_else(|| bad("missing token text"))?)
                    .ok_or_else(|| bad("bad escape sequence"))?;
                let token = Token::new(kind, text).map_err(|_| bad("empty token text"))?;
                parts.push((slot, token));
            }
            let feature = Feature::new(parts).map_err(|e| bad(&e.to_string()))?;
            space.register(feature)?;
        }
        space.freeze();
        Ok(space)
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '%' => out.push_str("%25"),
            ':' => out.push_str("%3A"),
            ' ' => out.push_str("%20"),
            '\t' => out.push_str("%09"),
            '\n' => out.push_str("%0A"),
            '\r' => out.push_str("%0D"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape(text: &str) -> Option<String> {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '%' {
            out.push(c);
            continue;
        }
        let hi = chars.next()?;
        let lo = chars.next()?;
        let byte = u8::from_str_radix(&format!("{hi}{lo}"), 16).ok()?;
        out.push(byte as char);
    }
    Some(out)
}

/// One classification instance: the sorted, duplicate-free set of active
/// feature ids, an optional gold label and an optional provenance note.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    active: Vec<FeatureId>,
    label: Option<ClassId>,
    source: Option<String>,
}

impl Example {
    /// Builds an example, sorting and deduplicating the active set.
    pub fn new(mut active: Vec<FeatureId>, label: Option<ClassId>) -> Self {
        active.sort_unstable();
        active.dedup();
        Example {
            active,
            label,
            source: None,
        }
    }

    /// An example whose active set is the bit positions set in `mask`.
    /// Bit `i` corresponds to feature id `i`; used by exhaustive oracles.
    pub fn from_mask(mask: u64, n: u32) -> Self {
        debug_assert!(n <= 64);
        let active = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(FeatureId)
            .collect();
        Example {
            active,
            label: None,
            source: None,
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn with_label(mut self, label: ClassId) -> Self {
        self.label = Some(label);
        self
    }

    /// Active feature ids, sorted ascending, no duplicates.
    pub fn active(&self) -> &[FeatureId] {
        &self.active
    }

    pub fn label(&self) -> Option<ClassId> {
        self.label
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn is_active(&self, id: FeatureId) -> bool {
        self.active.binary_search(&id).is_ok()
    }
}

/// A disambiguation task: the predicate being resolved and its ordered set
/// of at least two distinct class names. Class ids are indices into this
/// list.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskDef {
    predicate_name: String,
    classes: Vec<String>,
}

impl TaskDef {
    pub fn new(
        predicate_name: impl Into<String>,
        classes: Vec<String>,
    ) -> Result<Self, FeatureError> {
        if classes.len() < 2 {
            return Err(FeatureError::TooFewClasses);
        }
        let mut seen = std::collections::HashSet::new();
        for c in &classes {
            if !seen.insert(c.as_str()) {
                return Err(FeatureError::DuplicateClass(c.clone()));
            }
        }
        Ok(TaskDef {
            predicate_name: predicate_name.into(),
            classes,
        })
    }

    /// Two-class task helper; class 0 is `negative`, class 1 is `positive`.
    pub fn binary(
        predicate_name: impl Into<String>,
        negative: impl Into<String>,
        positive: impl Into<String>,
    ) -> Result<Self, FeatureError> {
        TaskDef::new(predicate_name, vec![negative.into(), positive.into()])
    }

    pub fn predicate_name(&self) -> &str {
        &self.predicate_name
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_name(&self, id: ClassId) -> Option<&str> {
        self.classes.get(id.0 as usize).map(String::as_str)
    }

    pub fn class_id(&self, name: &str) -> Option<ClassId> {
        self.classes
            .iter()
            .position(|c| c == name)
            .map(|i| ClassId(i as u32))
    }

    pub fn class_ids(&self) -> impl Iterator<Item = ClassId> {
        (0..self.classes.len() as u32).map(ClassId)
    }
}
