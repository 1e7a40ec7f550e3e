//! Synthetic corpora with known ground truth.
//!
//! The paper-scale corpora behind the reference results are licensed and
//! cannot ship here, so correctness acceptance runs on generated data whose
//! labeling rule is known. Each class hides a disjunction over its own
//! block of `relevant_per_class` features; examples draw every feature
//! independently with probability `p_active` and are kept only when exactly
//! one class's disjunction fires, which makes the label unambiguous.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HarnessError;
use crate::feature_space::{ClassId, Example, FeatureId, TaskDef};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    /// Number of classes, each with its own hidden disjunction.
    pub classes: u32,
    /// Total feature count; features beyond the relevant blocks are noise.
    pub n_features: u32,
    /// Literals per hidden disjunction.
    pub relevant_per_class: u32,
    /// Per-feature activation probability.
    pub p_active: f64,
    pub train: usize,
    pub test: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            classes: 3,
            n_features: 300,
            relevant_per_class: 5,
            p_active: 0.1,
            train: 2000,
            test: 500,
        }
    }
}

impl SyntheticConfig {
    fn validate(&self) -> Result<(), HarnessError> {
        if self.classes < 2 {
            return Err(HarnessError::Config(
                "synthetic task needs at least 2 classes".into(),
            ));
        }
        if self.relevant_per_class == 0 {
            return Err(HarnessError::Config(
                "each class needs at least 1 relevant feature".into(),
            ));
        }
        if self.classes * self.relevant_per_class > self.n_features {
            return Err(HarnessError::Config(format!(
                "{} classes x {} relevant features exceed the {}-feature space",
                self.classes, self.relevant_per_class, self.n_features
            )));
        }
        if !(self.p_active > 0.0 && self.p_active < 1.0) {
            return Err(HarnessError::Config(
                "p_active must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Generates `(task, train, test)` deterministically from the seed. Class
/// `c` owns features `c*k .. (c+1)*k`.
pub fn generate(
    cfg: &SyntheticConfig,
    seed: u64,
) -> Result<(TaskDef, Vec<Example>, Vec<Example>), HarnessError> {
    cfg.validate()?;
    let task = TaskDef::new(
        "synthetic",
        (0..cfg.classes).map(|c| format!("c{c}")).collect(),
    )
    .expect("class names are distinct");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = cfg.relevant_per_class;
    let mut draw = |count: usize| -> Result<Vec<Example>, HarnessError> {
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count {
            attempts += 1;
            if attempts > count.saturating_mul(10_000).max(10_000) {
                return Err(HarnessError::Config(
                    "p_active rejects almost every draw; too few single-class examples".into(),
                ));
            }
            let active: Vec<FeatureId> = (0..cfg.n_features)
                .filter(|_| rng.random_bool(cfg.p_active))
                .map(FeatureId)
                .collect();
            let firing: Vec<u32> = (0..cfg.classes)
                .filter(|c| {
                    (c * k..(c + 1) * k).any(|f| active.binary_search(&FeatureId(f)).is_ok())
                })
                .collect();
            if let [class] = firing[..] {
                out.push(Example::new(active, Some(ClassId(class))));
            }
        }
        Ok(out)
    };
    let train = draw(cfg.train)?;
    let test = draw(cfg.test)?;
    Ok((task, train, test))
}

/// A labeled stream for single-separator experiments: features drawn iid,
/// label 1 iff the monotone disjunction over features `0..k` fires. Both
/// classes occur; nothing is rejected.
pub fn disjunction_stream(
    n_features: u32,
    k: u32,
    p_active: f64,
    len: usize,
    seed: u64,
) -> Vec<Example> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let active: Vec<FeatureId> = (0..n_features)
                .filter(|_| rng.random_bool(p_active))
                .map(FeatureId)
                .collect();
            let fires = active.iter().any(|id| id.0 < k);
            Example::new(active, Some(ClassId(fires as u32)))
        })
        .collect()
}
