//! Keeps the book honest.
//!
//! mdbook renders `book/` but does not compile its code blocks against this
//! workspace, so each chapter is also included here as module docs: rustdoc
//! turns every fenced Rust block into a doctest, and `cargo test
//! --workspace` runs them all. A snippet that drifts from the library is a
//! test failure, not a stale page.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/features.md")]
pub mod features {}

#[doc = include_str!("../../../book/src/linear-separators.md")]
pub mod linear_separators {}

#[doc = include_str!("../../../book/src/winnow.md")]
pub mod winnow {}

#[doc = include_str!("../../../book/src/snow.md")]
pub mod snow {}

#[doc = include_str!("../../../book/src/naive-bayes.md")]
pub mod naive_bayes {}

#[doc = include_str!("../../../book/src/backoff.md")]
pub mod backoff {}

#[doc = include_str!("../../../book/src/decision-lists.md")]
pub mod decision_lists {}

#[doc = include_str!("../../../book/src/oracles.md")]
pub mod oracles {}

#[doc = include_str!("../../../book/src/tasks.md")]
pub mod tasks {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
