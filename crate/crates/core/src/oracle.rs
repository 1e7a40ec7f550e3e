//! Exhaustive verification machinery.
//!
//! [`enumerate_agreement`] runs two binary predictors over *every* subset of
//! a small feature universe and reports how often they disagree, plus the
//! first counterexample in binary-counter order (bit `i` of the counter is
//! feature `i`). It is how the crate checks that each baseline's linear
//! export is the same function as its native form — not approximately, but
//! on all `2^n` inputs.
//!
//! [`shatter_check`] drives capacity demonstrations: given a hypothesis
//! enumeration and a small point set, it collects which labelings of the
//! points the hypotheses realize, and reports whether all `2^m` appear.

use thiserror::Error;

use crate::baselines::decision_list::{DecisionList, Polarity, Rule};
use crate::feature_space::{Example, FeatureId};
use crate::lin_sep::LinearSeparator;

/// Cost guard: `2^24` inputs is the most an agreement sweep will do.
pub const MAX_AGREEMENT_FEATURES: u32 = 24;
/// Cost guard for shattering point sets.
pub const MAX_SHATTER_POINTS: usize = 20;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("{0} features would mean 2^{0} inputs; the sweep is capped at {MAX_AGREEMENT_FEATURES}")]
    TooManyFeatures(u32),
    #[error("{0} points would mean 2^{0} labelings; shattering is capped at {MAX_SHATTER_POINTS} points")]
    TooManyPoints(usize),
}

/// Outcome of an exhaustive agreement sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub total_inputs: u64,
    pub disagreements: u64,
    /// First input (in binary-counter order) where the predictors differ;
    /// present exactly when `disagreements > 0`.
    pub first_counterexample: Option<Example>,
}

impl AgreementReport {
    pub fn agree_everywhere(&self) -> bool {
        self.disagreements == 0
    }

    /// `agreement <total> <disagreements>` plus a counterexample line
    /// listing the sorted active feature ids, when one exists.
    pub fn render(&self) -> String {
        let mut out = format!("agreement {} {}", self.total_inputs, self.disagreements);
        if let Some(e) = &self.first_counterexample {
            out.push_str("\ncounterexample");
            for id in e.active() {
                out.push(' ');
                out.push_str(&id.to_string());
            }
        }
        out
    }
}

/// Evaluates both predictors on all `2^n` examples over features `0..n`.
pub fn enumerate_agreement<A, B>(
    pred_a: A,
    pred_b: B,
    n: u32,
) -> Result<AgreementReport, OracleError>
where
    A: Fn(&Example) -> bool,
    B: Fn(&Example) -> bool,
{
    if n > MAX_AGREEMENT_FEATURES {
        return Err(OracleError::TooManyFeatures(n));
    }
    let total = 1u64 << n;
    let mut disagreements = 0;
    let mut first = None;
    for mask in 0..total {
        let e = Example::from_mask(mask, n);
        if pred_a(&e) != pred_b(&e) {
            disagreements += 1;
            if first.is_none() {
                first = Some(e);
            }
        }
    }
    Ok(AgreementReport {
        total_inputs: total,
        disagreements,
        first_counterexample: first,
    })
}

/// Outcome of a shattering probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ShatterReport {
    pub points: Vec<Example>,
    pub achieved_labelings: usize,
    pub shattered: bool,
    /// True when the hypothesis budget ran out before a verdict: the point
    /// set is reported as not shattered, but the search was cut short.
    pub inconclusive: bool,
}

impl ShatterReport {
    pub fn render(&self) -> String {
        let needed = 1usize << self.points.len();
        let mut out = format!(
            "shatter {}/{} {}",
            self.achieved_labelings,
            needed,
            if self.shattered { "shattered" } else { "not-shattered" }
        );
        if self.inconclusive {
            out.push_str(" inconclusive");
        }
        out
    }
}

/// Collects the labelings the hypotheses induce on `points`, evaluating at
/// most `cap` hypotheses. Shattered iff all `2^|points|` labelings occur.
pub fn shatter_check<P, I>(
    hypotheses: I,
    points: &[Example],
    cap: usize,
) -> Result<ShatterReport, OracleError>
where
    I: IntoIterator<Item = P>,
    P: Fn(&Example) -> bool,
{
    if points.len() > MAX_SHATTER_POINTS {
        return Err(OracleError::TooManyPoints(points.len()));
    }
    let needed = 1usize << points.len();
    let mut seen = std::collections::HashSet::new();
    let mut exhausted_cap = false;
    for (i, h) in hypotheses.into_iter().enumerate() {
        if i >= cap {
            exhausted_cap = true;
            break;
        }
        let mut labeling = 0u64;
        for (bit, p) in points.iter().enumerate() {
            if h(p) {
                labeling |= 1 << bit;
            }
        }
        seen.insert(labeling);
        if seen.len() == needed {
            break;
        }
    }
    let shattered = seen.len() == needed;
    Ok(ShatterReport {
        points: points.to_vec(),
        achieved_labelings: seen.len(),
        shattered,
        inconclusive: exhausted_cap && !shattered,
    })
}

/// Every separator over `n` features whose weights and bias come from a
/// small grid, with `θ = 0`. Coarse, but plenty to shatter tiny point sets.
pub fn grid_separators(n: u32, grid: &[f64]) -> Vec<LinearSeparator> {
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n as usize + 1]; // weights then bias
    loop {
        let weights = (0..n).map(|i| (FeatureId(i), grid[assignment[i as usize]]));
        let bias = grid[assignment[n as usize]];
        out.push(LinearSeparator::with_weights(weights, 0.0, bias).expect("finite grid"));
        // Odometer increment over the grid positions.
        let mut pos = 0;
        loop {
            if pos == assignment.len() {
                return out;
            }
            assignment[pos] += 1;
            if assignment[pos] < grid.len() {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

/// Every positive 1-decision list over `n` features with up to `max_rules`
/// rules: all orderings of distinct features, all consequent assignments,
/// both defaults.
pub fn all_p1dls(n: u32, max_rules: usize) -> Vec<DecisionList> {
    let mut out = Vec::new();
    let mut sequence: Vec<u32> = Vec::new();
    fn rec(n: u32, left: usize, sequence: &mut Vec<u32>, out: &mut Vec<DecisionList>) {
        for consequents in 0u32..(1 << sequence.len()) {
            for default in [Polarity::Neg, Polarity::Pos] {
                let rules = sequence
                    .iter()
                    .enumerate()
                    .map(|(i, &f)| Rule {
                        feature: FeatureId(f),
                        consequent: Polarity::from_bool(consequents >> i & 1 == 1),
                    })
                    .collect();
                out.push(DecisionList::new(rules, default));
            }
        }
        if left == 0 {
            return;
        }
        for f in 0..n {
            if !sequence.contains(&f) {
                sequence.push(f);
                rec(n, left - 1, sequence, out);
                sequence.pop();
            }
        }
    }
    rec(n, max_rules, &mut sequence, &mut out);
    out
}
