//! Sparse linear separators and the shared accuracy measure.
//!
//! Every method in this crate ultimately predicts with a weighted threshold
//! test: activation `bias + Σ w_i x_i` compared against a threshold `θ`.
//! The comparison is strictly greater-than, so an activation exactly equal
//! to `θ` predicts class 0. That tie rule is shared by every native
//! predictor and every export in the crate; the equivalence oracles depend
//! on it.
//!
//! The bias is a distinguished always-active weight rather than part of the
//! threshold, which keeps `θ = 0` canonical for the baseline exports.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::feature_space::{ClassId, Example, FeatureId};

#[derive(Debug, Error)]
pub enum LinSepError {
    #[error("weight for feature {0} is not finite")]
    NonFiniteWeight(FeatureId),
    #[error("threshold and bias must be finite")]
    NonFiniteParam,
    #[error("model line {line}: {msg}")]
    ModelParse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Errors from the accuracy measure.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("test example {0} has no gold label")]
    UnlabeledExample(usize),
}

/// A sparse weighted threshold function `bias + Σ w_i x_i > θ`.
///
/// The weight map never stores explicit zeros; absent features contribute
/// nothing. A built separator is immutable in practice and safe to evaluate
/// from many threads.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSeparator {
    weights: BTreeMap<FeatureId, f64>,
    theta: f64,
    bias: f64,
}

impl LinearSeparator {
    pub fn new(theta: f64, bias: f64) -> Self {
        assert!(theta.is_finite() && bias.is_finite());
        LinearSeparator {
            weights: BTreeMap::new(),
            theta,
            bias,
        }
    }

    pub fn with_weights(
        weights: impl IntoIterator<Item = (FeatureId, f64)>,
        theta: f64,
        bias: f64,
    ) -> Result<Self, LinSepError> {
        if !theta.is_finite() || !bias.is_finite() {
            return Err(LinSepError::NonFiniteParam);
        }
        let mut sep = LinearSeparator::new(theta, bias);
        for (id, w) in weights {
            if !w.is_finite() {
                return Err(LinSepError::NonFiniteWeight(id));
            }
            sep.set_weight(id, w);
        }
        Ok(sep)
    }

    /// Sets a weight; setting exactly 0.0 removes the entry.
    pub fn set_weight(&mut self, id: FeatureId, w: f64) {
        assert!(w.is_finite());
        if w == 0.0 {
            self.weights.remove(&id);
        } else {
            self.weights.insert(id, w);
        }
    }

    pub fn weight(&self, id: FeatureId) -> f64 {
        self.weights.get(&id).copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> impl Iterator<Item = (FeatureId, f64)> + '_ {
        self.weights.iter().map(|(&id, &w)| (id, w))
    }

    pub fn num_weights(&self) -> usize {
        self.weights.len()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// `bias + Σ w_i` over the example's active features.
    pub fn activation(&self, e: &Example) -> f64 {
        let mut sum = self.bias;
        for id in e.active() {
            if let Some(w) = self.weights.get(id) {
                sum += w;
            }
        }
        sum
    }

    /// True (class 1) iff the activation strictly exceeds `θ`.
    pub fn predict(&self, e: &Example) -> bool {
        self.activation(e) > self.theta
    }

    /// Writes `linsep <theta> <bias>` then one `<feature-id>\t<weight>` line
    /// per weight, ids ascending. Floats carry 17 significant digits, which
    /// round-trips 64-bit values exactly.
    pub fn write_model<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "linsep {} {}", fmt_f64(self.theta), fmt_f64(self.bias))?;
        self.write_weight_lines(&mut w)
    }

    pub(crate) fn write_weight_lines<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (id, weight) in &self.weights {
            writeln!(w, "{id}\t{}", fmt_f64(*weight))?;
        }
        Ok(())
    }

    pub fn read_model<R: BufRead>(mut r: R) -> Result<Self, LinSepError> {
        let mut header = String::new();
        r.read_line(&mut header)?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("linsep") {
            return Err(LinSepError::ModelParse {
                line: 1,
                msg: "expected `linsep` header".into(),
            });
        }
        let theta = parse_f64(fields.next(), 1)?;
        let bias = parse_f64(fields.next(), 1)?;
        let weights = read_weight_lines(r, 2)?;
        LinearSeparator::with_weights(weights, theta, bias)
    }
}

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn parse_f64(field: Option<&str>, line: usize) -> Result<f64, LinSepError> {
    field
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|v| v.is_finite())
        .ok_or_else(|| LinSepError::ModelParse {
            line,
            msg: "expected a finite float".into(),
        })
}

pub(crate) fn read_weight_lines<R: BufRead>(
    r: R,
    first_line: usize,
) -> Result<Vec<(FeatureId, f64)>, LinSepError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = first_line + i;
        if line.is_empty() {
            continue;
        }
        let (id, w) = line.split_once('\t').ok_or_else(|| LinSepError::ModelParse {
            line: lineno,
            msg: "expected `<id>\\t<weight>`".into(),
        })?;
        let id: u32 = id.parse().map_err(|_| LinSepError::ModelParse {
            line: lineno,
            msg: "bad feature id".into(),
        })?;
        let w = parse_f64(Some(w), lineno)?;
        out.push((FeatureId(id), w));
    }
    Ok(out)
}

/// A winner-take-all outcome: the chosen class and its activation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: ClassId,
    pub score: f64,
}

/// Fraction of test examples the predictor classifies correctly. Examples
/// are visited in sequence order.
///
/// Every method in the crate reports accuracy through this one function.
pub fn perf<P>(predict: P, test: &[Example]) -> Result<f64, EvalError>
where
    P: Fn(&Example) -> ClassId,
{
    if test.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let mut correct = 0usize;
    for (i, e) in test.iter().enumerate() {
        let gold = e.label().ok_or(EvalError::UnlabeledExample(i))?;
        if predict(e) == gold {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.len() as f64)
}

/// [`perf`] over a prediction sequence already aligned with the test set,
/// for predictors that work from context the examples do not carry.
pub fn perf_precomputed(predictions: &[ClassId], test: &[Example]) -> Result<f64, EvalError> {
    assert_eq!(predictions.len(), test.len());
    let next = std::cell::Cell::new(0usize);
    perf(
        |_| {
            let i = next.get();
            next.set(i + 1);
            predictions[i]
        },
        test,
    )
}
