//! Attribute-efficient disambiguation learners over sparse binary feature
//! spaces.
//!
//! The crate trains and evaluates classifiers for lexical disambiguation
//! tasks (confusion-set spelling, prepositional-phrase attachment,
//! part-of-speech tagging) in one shared representation: the sparse linear
//! separator. It provides
//!
//! - a network of Winnow-trained separators with data-driven link
//!   allocation and winner-take-all multi-class prediction ([`snow`]),
//! - three classical baselines — naive Bayes, level-based back-off
//!   estimation, and positive 1-decision lists — each with an exact export
//!   to an explicit [`lin_sep::LinearSeparator`] ([`baselines`]),
//! - exhaustive oracles that verify those exports predict identically to
//!   the native forms, and small shattering demos ([`oracle`]),
//! - loaders and feature encoders for the three tasks ([`tasks`]), and an
//!   experiment harness plus CLI ([`harness`]).

pub mod baselines;
pub mod feature_space;
pub mod lin_sep;
pub mod harness;
pub mod oracle;
pub mod tasks;
pub mod snow;
pub mod winnow;

pub use feature_space::{ClassId, Example, Feature, FeatureId, FeatureSpace, TaskDef};
pub use lin_sep::{perf, LinearSeparator, Prediction};
pub use snow::{SnowConfig, SnowNetwork};
pub use winnow::{WinnowConfig, WinnowLearner};
