//! The three classical disambiguation baselines, each in its native
//! parameterization and each exportable to an explicit
//! [`LinearSeparator`](crate::lin_sep::LinearSeparator).
//!
//! All three are binary predictors sharing the crate-wide tie rule
//! (activation equal to the threshold predicts class 0). Multi-class tasks
//! are handled by the one-vs-all network layer, not here.

pub mod backoff;
pub mod decision_list;
pub mod naive_bayes;

pub use backoff::{BackoffModel, BoPrediction, OrderIndex};
pub use decision_list::{DecisionList, Polarity, Rule};
pub use naive_bayes::NbParams;
