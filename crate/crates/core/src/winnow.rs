//! The Winnow learner: mistake-driven multiplicative updates on positive
//! weights.
//!
//! Winnow keeps one positive weight per feature and predicts 1 when the
//! summed weight of the active features strictly exceeds a threshold `θ`.
//! On a false negative every active weight is multiplied by the promotion
//! factor `α > 1`; on a false positive by the demotion factor `β ∈ (0, 1)`;
//! a correct prediction changes nothing. The weight state is therefore a
//! function of the mistake subsequence alone.
//!
//! The mistake count grows linearly with the number of relevant features
//! and only logarithmically with the total feature count, which is what
//! makes the algorithm usable over the very large, very sparse feature
//! spaces produced by text. With `α = 2` and `θ = n`, learning a monotone
//! `k`-literal disjunction over `n` features makes at most
//! `2 + 3k(1 + log₂ n)` mistakes on any stream.
//!
//! A learner either treats every feature as implicitly carrying
//! `initial_weight` until first touched ([`LinkPolicy::AllFeatures`], the
//! classic single-separator setting) or restricts itself to an explicitly
//! allocated link set ([`LinkPolicy::LinkedOnly`], how a network target node
//! runs).

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::feature_space::{ClassId, Example, FeatureId};
use crate::lin_sep::{self, LinSepError, LinearSeparator};

/// Weights are clamped into this range to survive long promotion or
/// demotion chains; clamping events are counted and reported.
pub const WEIGHT_MIN: f64 = 1e-300;
pub const WEIGHT_MAX: f64 = 1e300;

#[derive(Debug, Error)]
pub enum WinnowError {
    #[error("promotion factor must be > 1, got {0}")]
    BadAlpha(f64),
    #[error("demotion factor must be in (0, 1), got {0}")]
    BadBeta(f64),
    #[error("threshold must be > 0, got {0}")]
    BadTheta(f64),
    #[error("initial weight must be > 0, got {0}")]
    BadInitialWeight(f64),
    #[error("stream example {0} has no label")]
    Unlabeled(usize),
    #[error("stream example {0} has label {1}; binary training needs 0 or 1")]
    NonBinaryLabel(usize, ClassId),
    #[error(transparent)]
    Model(#[from] LinSepError),
}

/// Hyperparameters for one Winnow learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WinnowConfig {
    /// Promotion factor, > 1.
    pub alpha: f64,
    /// Demotion factor, in (0, 1).
    pub beta: f64,
    /// Prediction threshold, > 0.
    pub theta: f64,
    /// Weight given to a feature when it is first linked, > 0.
    pub initial_weight: f64,
}

impl Default for WinnowConfig {
    fn default() -> Self {
        WinnowConfig {
            alpha: 1.5,
            beta: 0.8,
            theta: 1.0,
            initial_weight: 1.0,
        }
    }
}

impl WinnowConfig {
    pub fn validate(&self) -> Result<(), WinnowError> {
        if !self.alpha.is_finite() || self.alpha <= 1.0 {
            return Err(WinnowError::BadAlpha(self.alpha));
        }
        if !self.beta.is_finite() || self.beta <= 0.0 || self.beta >= 1.0 {
            return Err(WinnowError::BadBeta(self.beta));
        }
        if !self.theta.is_finite() || self.theta <= 0.0 {
            return Err(WinnowError::BadTheta(self.theta));
        }
        if !self.initial_weight.is_finite() || self.initial_weight <= 0.0 {
            return Err(WinnowError::BadInitialWeight(self.initial_weight));
        }
        Ok(())
    }
}

/// How the learner treats features it has no stored weight for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkPolicy {
    /// Every feature implicitly starts at `initial_weight`; weights
    /// materialize lazily on the first update that touches them.
    AllFeatures,
    /// Only explicitly allocated links carry weight; anything else counts
    /// as zero. Link allocation is the caller's job (see the snow module).
    LinkedOnly,
}

/// One online Winnow learner.
#[derive(Debug, Clone)]
pub struct WinnowLearner {
    config: WinnowConfig,
    policy: LinkPolicy,
    weights: BTreeMap<FeatureId, f64>,
    mistakes: u64,
    examples_seen: u64,
    clamp_events: u64,
}

impl WinnowLearner {
    pub fn new(config: WinnowConfig, policy: LinkPolicy) -> Result<Self, WinnowError> {
        config.validate()?;
        Ok(WinnowLearner {
            config,
            policy,
            weights: BTreeMap::new(),
            mistakes: 0,
            examples_seen: 0,
            clamp_events: 0,
        })
    }

    pub fn config(&self) -> &WinnowConfig {
        &self.config
    }

    pub fn policy(&self) -> LinkPolicy {
        self.policy
    }

    /// Stored weight, or what the feature would effectively contribute.
    fn effective_weight(&self, id: FeatureId) -> f64 {
        match self.weights.get(&id) {
            Some(&w) => w,
            None => match self.policy {
                LinkPolicy::AllFeatures => self.config.initial_weight,
                LinkPolicy::LinkedOnly => 0.0,
            },
        }
    }

    pub fn activation(&self, e: &Example) -> f64 {
        e.active().iter().map(|&id| self.effective_weight(id)).sum()
    }

    /// True (class 1) iff the activation strictly exceeds `θ`.
    pub fn predict(&self, e: &Example) -> bool {
        self.activation(e) > self.config.theta
    }

    /// Allocates a link at `initial_weight` if absent. Returns true when a
    /// new link was created.
    pub fn link(&mut self, id: FeatureId) -> bool {
        if self.weights.contains_key(&id) {
            return false;
        }
        self.weights.insert(id, self.config.initial_weight);
        true
    }

    pub fn is_linked(&self, id: FeatureId) -> bool {
        self.weights.contains_key(&id)
    }

    pub fn links(&self) -> impl Iterator<Item = (FeatureId, f64)> + '_ {
        self.weights.iter().map(|(&id, &w)| (id, w))
    }

    pub fn num_links(&self) -> usize {
        self.weights.len()
    }

    pub fn mistakes(&self) -> u64 {
        self.mistakes
    }

    pub fn examples_seen(&self) -> u64 {
        self.examples_seen
    }

    pub fn clamp_events(&self) -> u64 {
        self.clamp_events
    }

    /// One mistake-driven step. Returns true iff the prediction was wrong
    /// and weights changed.
    pub fn update(&mut self, e: &Example, positive: bool) -> bool {
        self.examples_seen += 1;
        let predicted = self.predict(e);
        if predicted == positive {
            return false;
        }
        let factor = if positive {
            self.config.alpha
        } else {
            self.config.beta
        };
        for &id in e.active() {
            match self.weights.get_mut(&id) {
                Some(w) => {
                    let next = *w * factor;
                    let clamped = next.clamp(WEIGHT_MIN, WEIGHT_MAX);
                    if clamped != next {
                        self.clamp_events += 1;
                    }
                    *w = clamped;
                }
                None => {
                    if self.policy == LinkPolicy::AllFeatures {
                        self.weights
                            .insert(id, self.config.initial_weight * factor);
                    }
                    // LinkedOnly: unlinked features stay out of the model.
                }
            }
        }
        self.mistakes += 1;
        true
    }

    /// Runs `update` over the stream in order, `epochs` times. Labels must
    /// be 0 or 1. Returns the total number of mistakes made by this call.
    pub fn train_stream(&mut self, stream: &[Example], epochs: usize) -> Result<u64, WinnowError> {
        let mut mistakes = 0;
        for _ in 0..epochs {
            for (i, e) in stream.iter().enumerate() {
                let gold = match e.label() {
                    Some(ClassId(0)) => false,
                    Some(ClassId(1)) => true,
                    Some(other) => return Err(WinnowError::NonBinaryLabel(i, other)),
                    None => return Err(WinnowError::Unlabeled(i)),
                };
                if self.update(e, gold) {
                    mistakes += 1;
                }
            }
        }
        Ok(mistakes)
    }

    /// The learner's current hypothesis as an explicit separator. Only
    /// materialized links are exported; under [`LinkPolicy::AllFeatures`]
    /// untouched features are not enumerable and are left implicit.
    pub fn to_separator(&self) -> LinearSeparator {
        LinearSeparator::with_weights(
            self.weights.iter().map(|(&id, &w)| (id, w)),
            self.config.theta,
            0.0,
        )
        .expect("winnow weights are always finite")
    }

    /// Writes `winnow <alpha> <beta> <theta>` then `<id>\t<weight>` lines.
    pub fn write_model<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "winnow {} {} {}",
            lin_sep::fmt_f64(self.config.alpha),
            lin_sep::fmt_f64(self.config.beta),
            lin_sep::fmt_f64(self.config.theta)
        )?;
        for (id, weight) in &self.weights {
            writeln!(w, "{id}\t{}", lin_sep::fmt_f64(*weight))?;
        }
        Ok(())
    }

    /// Reads a learner written by [`write_model`](Self::write_model). The
    /// result carries [`LinkPolicy::LinkedOnly`]: a loaded learner is an
    /// evaluation-time hypothesis whose link set is fixed by the file.
    pub fn read_model<R: BufRead>(mut r: R) -> Result<Self, WinnowError> {
        let mut header = String::new();
        r.read_line(&mut header).map_err(LinSepError::from)?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("winnow") {
            return Err(LinSepError::ModelParse {
                line: 1,
                msg: "expected `winnow` header".into(),
            }
            .into());
        }
        let alpha = lin_sep::parse_f64(fields.next(), 1)?;
        let beta = lin_sep::parse_f64(fields.next(), 1)?;
        let theta = lin_sep::parse_f64(fields.next(), 1)?;
        let config = WinnowConfig {
            alpha,
            beta,
            theta,
            ..WinnowConfig::default()
        };
        let mut learner = WinnowLearner::new(config, LinkPolicy::LinkedOnly)?;
        for (id, w) in lin_sep::read_weight_lines(r, 2)? {
            learner.weights.insert(id, w);
        }
        Ok(learner)
    }

    #[cfg(test)]
    pub(crate) fn from_parts(
        config: WinnowConfig,
        policy: LinkPolicy,
        weights: BTreeMap<FeatureId, f64>,
    ) -> Result<Self, WinnowError> {
        config.validate()?;
        Ok(WinnowLearner {
            config,
            policy,
            weights,
            mistakes: 0,
            examples_seen: 0,
            clamp_events: 0,
        })
    }
}
