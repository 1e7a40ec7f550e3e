//! Positive 1-decision lists and their powers-of-two linear export.
//!
//! A rule conditions only on the *presence* of a feature, never its
//! absence, and carries a ±1 consequent. Evaluation scans the rule sequence
//! from the end: the last rule whose feature is active decides; if none
//! fires, a default label applies. A feature may appear several times in a
//! raw list; canonicalization keeps only each feature's last rule, which
//! leaves every evaluation unchanged.
//!
//! The same hypothesis is a linear separator: give rule `j` (1-indexed in
//! list order) the weight `2^j · c_j` and encode the default as a ±1 bias.
//! The active rule with the highest index then dominates the sum of
//! everything below it — `2^j > 2^(j-1) + … + 2 + 1` — so the sign of the
//! activation reproduces the scan exactly. Weights are exact powers of two,
//! which caps exportable lists at 1023 rules; longer lists evaluate
//! natively.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::feature_space::{Example, FeatureId};
use crate::lin_sep::{LinSepError, LinearSeparator};

/// Longest list whose top weight `2^k` still fits in an f64.
pub const MAX_EXPORT_RULES: usize = 1023;

#[derive(Debug, Error)]
pub enum DlError {
    #[error("{0} rules cannot be exported; 2^j weights overflow past {MAX_EXPORT_RULES}")]
    TooManyRules(usize),
    #[error(transparent)]
    Model(#[from] LinSepError),
}

/// A ±1 class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Neg,
    Pos,
}

impl Polarity {
    pub fn value(self) -> f64 {
        match self {
            Polarity::Neg => -1.0,
            Polarity::Pos => 1.0,
        }
    }

    /// Maps onto the boolean classes used everywhere else: `Pos` is 1.
    pub fn as_bool(self) -> bool {
        self == Polarity::Pos
    }

    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Polarity::Pos
        } else {
            Polarity::Neg
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Polarity::Neg => "-1",
            Polarity::Pos => "+1",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "+1" => Some(Polarity::Pos),
            "-1" => Some(Polarity::Neg),
            _ => None,
        }
    }
}

/// One rule: if the feature is active, predict the consequent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub feature: FeatureId,
    pub consequent: Polarity,
}

/// An ordered rule list with a default label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionList {
    rules: Vec<Rule>,
    default: Polarity,
}

impl DecisionList {
    pub fn new(rules: Vec<Rule>, default: Polarity) -> Self {
        DecisionList { rules, default }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn default_label(&self) -> Polarity {
        self.default
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.rules.iter().all(|r| seen.insert(r.feature))
    }

    /// Drops all but the last rule of each feature, preserving the relative
    /// order of the survivors. Idempotent, and evaluation-preserving.
    pub fn canonicalize(&self) -> DecisionList {
        let mut seen = std::collections::HashSet::new();
        let mut kept: Vec<Rule> = self
            .rules
            .iter()
            .rev()
            .filter(|r| seen.insert(r.feature))
            .copied()
            .collect();
        kept.reverse();
        DecisionList {
            rules: kept,
            default: self.default,
        }
    }

    /// The consequent of the last rule whose feature is active; the default
    /// if none fires.
    pub fn evaluate(&self, e: &Example) -> Polarity {
        for rule in self.rules.iter().rev() {
            if e.is_active(rule.feature) {
                return rule.consequent;
            }
        }
        self.default
    }

    /// The powers-of-two separator form: rule `j` weighs `2^j · c_j`, the
    /// default is a ±1 bias, `θ = 0`. Predictions agree with
    /// [`evaluate`](Self::evaluate) on every input.
    pub fn to_linear(&self) -> Result<LinearSeparator, DlError> {
        if self.rules.len() > MAX_EXPORT_RULES {
            return Err(DlError::TooManyRules(self.rules.len()));
        }
        // A non-canonical list merges each feature's powers; the highest
        // occurrence still dominates, so merging is sound.
        let mut weights = std::collections::BTreeMap::new();
        for (j, rule) in self.rules.iter().enumerate() {
            let w = 2f64.powi(j as i32 + 1) * rule.consequent.value();
            *weights.entry(rule.feature).or_insert(0.0) += w;
        }
        Ok(LinearSeparator::with_weights(
            weights,
            0.0,
            self.default.value(),
        )?)
    }

    /// Writes `dl <default>` then ordered `<feature-id>\t<+1|-1>` lines.
    pub fn write_model<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "dl {}", self.default.as_str())?;
        for rule in &self.rules {
            writeln!(w, "{}\t{}", rule.feature, rule.consequent.as_str())?;
        }
        Ok(())
    }

    pub fn read_model<R: BufRead>(mut r: R) -> Result<Self, DlError> {
        let mut header = String::new();
        r.read_line(&mut header).map_err(LinSepError::from)?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("dl") {
            return Err(LinSepError::ModelParse {
                line: 1,
                msg: "expected `dl` header".into(),
            }
            .into());
        }
        let default = fields
            .next()
            .and_then(Polarity::parse)
            .ok_or_else(|| LinSepError::ModelParse {
                line: 1,
                msg: "default label must be +1 or -1".into(),
            })?;
        let mut rules = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(LinSepError::from)?;
            let lineno = i + 2;
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: &str| -> DlError {
                LinSepError::ModelParse {
                    line: lineno,
                    msg: msg.to_string(),
                }
                .into()
            };
            let (id, pol) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected `<id>\\t<+1|-1>`"))?;
            let feature = id
                .parse::<u32>()
                .map(FeatureId)
                .map_err(|_| parse_err("bad feature id"))?;
            let consequent = Polarity::parse(pol).ok_or_else(|| parse_err("bad consequent"))?;
            rules.push(Rule {
                feature,
                consequent,
            });
        }
        Ok(DecisionList::new(rules, default))
    }
}
