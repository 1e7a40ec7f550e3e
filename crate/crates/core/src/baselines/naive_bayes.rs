//! Binary naive Bayes with add-constant smoothing and an exact linear
//! export.
//!
//! The native predictor evaluates the full likelihood product over *every*
//! parameterized feature: an active feature contributes `p_i` (or `q_i`
//! under class 0), an inactive one contributes `1 − p_i` (or `1 − q_i`).
//! Keeping the inactive terms is what makes the decision surface exactly
//! linear: folding them into a constant leaves per-feature log-odds weights
//!
//! ```text
//! w_i = log( p_i (1 − q_i) / ((1 − p_i) q_i) )
//! bias = log( P(1)/P(0) ) + Σ_i log( (1 − p_i)/(1 − q_i) )
//! ```
//!
//! and the exported separator predicts 1 iff `bias + Σ w_i x_i > 0`, which
//! agrees with the native argmax on every input, ties included.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::feature_space::{ClassId, Example, FeatureId};
use crate::lin_sep::{self, LinSepError, LinearSeparator};

#[derive(Debug, Error)]
pub enum NbError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("training corpus contains a single class")]
    SingleClassCorpus,
    #[error("training example {0} has no label")]
    Unlabeled(usize),
    #[error("training example {0} has label {1}; binary fitting needs 0 or 1")]
    NonBinaryLabel(usize, ClassId),
    #[error("smoothing constant must be non-negative and finite, got {0}")]
    BadSmoothing(f64),
    #[error("probability for feature {0} fell on 0 or 1; smoothing leaked")]
    DegenerateProbability(FeatureId),
    #[error(transparent)]
    Model(#[from] LinSepError),
}

/// Fitted naive Bayes parameters over a fixed feature universe `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NbParams {
    prior1: f64,
    smoothing: f64,
    p: Vec<f64>, // P(x_i = 1 | c = 1)
    q: Vec<f64>, // P(x_i = 1 | c = 0)
    // Cached logs so full-product evaluation stays cheap on large spaces.
    log_p: Vec<f64>,
    log_not_p: Vec<f64>,
    log_q: Vec<f64>,
    log_not_q: Vec<f64>,
}

impl NbParams {
    /// Smoothed empirical frequencies:
    /// `p_i = (count(x_i=1, c=1) + λ) / (count(c=1) + 2λ)`, likewise `q_i`
    /// from the class-0 counts. Priors are the raw class fractions.
    pub fn fit(corpus: &[Example], n_features: usize, smoothing: f64) -> Result<Self, NbError> {
        if corpus.is_empty() {
            return Err(NbError::EmptyCorpus);
        }
        if !smoothing.is_finite() || smoothing < 0.0 {
            return Err(NbError::BadSmoothing(smoothing));
        }
        let mut count1 = 0u64;
        let mut active1 = vec![0u64; n_features];
        let mut active0 = vec![0u64; n_features];
        for (i, e) in corpus.iter().enumerate() {
            let positive = match e.label() {
                Some(ClassId(0)) => false,
                Some(ClassId(1)) => true,
                Some(other) => return Err(NbError::NonBinaryLabel(i, other)),
                None => return Err(NbError::Unlabeled(i)),
            };
            let table = if positive {
                count1 += 1;
                &mut active1
            } else {
                &mut active0
            };
            for id in e.active() {
                if (id.0 as usize) < n_features {
                    table[id.0 as usize] += 1;
                }
            }
        }
        let count0 = corpus.len() as u64 - count1;
        if count0 == 0 || count1 == 0 {
            return Err(NbError::SingleClassCorpus);
        }
        let cond = |active: u64, class_total: u64| {
            (active as f64 + smoothing) / (class_total as f64 + 2.0 * smoothing)
        };
        let p: Vec<f64> = active1.iter().map(|&a| cond(a, count1)).collect();
        let q: Vec<f64> = active0.iter().map(|&a| cond(a, count0)).collect();
        let prior1 = count1 as f64 / corpus.len() as f64;
        NbParams::from_probabilities(prior1, smoothing, p, q)
    }

    /// Builds parameters from explicit probabilities, checking they sit in
    /// the open interval (0, 1).
    pub fn from_probabilities(
        prior1: f64,
        smoothing: f64,
        p: Vec<f64>,
        q: Vec<f64>,
    ) -> Result<Self, NbError> {
        assert_eq!(p.len(), q.len());
        for (i, (&pi, &qi)) in p.iter().zip(&q).enumerate() {
            if !(pi > 0.0 && pi < 1.0 && qi > 0.0 && qi < 1.0) {
                return Err(NbError::DegenerateProbability(FeatureId(i as u32)));
            }
        }
        if !(prior1 > 0.0 && prior1 < 1.0) {
            return Err(NbError::SingleClassCorpus);
        }
        let log_p = p.iter().map(|v| v.ln()).collect();
        let log_not_p = p.iter().map(|v| (1.0 - v).ln()).collect();
        let log_q = q.iter().map(|v| v.ln()).collect();
        let log_not_q = q.iter().map(|v| (1.0 - v).ln()).collect();
        Ok(NbParams {
            prior1,
            smoothing,
            p,
            q,
            log_p,
            log_not_p,
            log_q,
            log_not_q,
        })
    }

    pub fn n_features(&self) -> usize {
        self.p.len()
    }

    pub fn prior1(&self) -> f64 {
        self.prior1
    }

    pub fn prior0(&self) -> f64 {
        1.0 - self.prior1
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    pub fn p_i(&self, id: FeatureId) -> Option<f64> {
        self.p.get(id.0 as usize).copied()
    }

    pub fn q_i(&self, id: FeatureId) -> Option<f64> {
        self.q.get(id.0 as usize).copied()
    }

    /// Class log-likelihoods `(score0, score1)` of the full product over
    /// all parameterized features. Ids outside the universe are ignored.
    pub fn scores(&self, e: &Example) -> (f64, f64) {
        let mut score1 = self.prior1.ln();
        let mut score0 = (1.0 - self.prior1).ln();
        let mut active = e.active().iter().peekable();
        for i in 0..self.p.len() {
            let is_active = match active.peek() {
                Some(&&id) if id.0 as usize == i => {
                    active.next();
                    true
                }
                _ => false,
            };
            if is_active {
                score1 += self.log_p[i];
                score0 += self.log_q[i];
            } else {
                score1 += self.log_not_p[i];
                score0 += self.log_not_q[i];
            }
        }
        (score0, score1)
    }

    /// Argmax over the two class likelihoods; a tie predicts class 0.
    pub fn predict(&self, e: &Example) -> bool {
        let (score0, score1) = self.scores(e);
        score1 > score0
    }

    /// The explicit separator form of the fitted predictor. `θ = 0`; the
    /// constant term lives in the bias.
    pub fn to_linear(&self) -> Result<LinearSeparator, NbError> {
        let mut sep = LinearSeparator::new(0.0, 0.0);
        let mut bias = (self.prior1 / (1.0 - self.prior1)).ln();
        for i in 0..self.p.len() {
            let (pi, qi) = (self.p[i], self.q[i]);
            if !(pi > 0.0 && pi < 1.0 && qi > 0.0 && qi < 1.0) {
                return Err(NbError::DegenerateProbability(FeatureId(i as u32)));
            }
            let w = (pi * (1.0 - qi) / ((1.0 - pi) * qi)).ln();
            sep.set_weight(FeatureId(i as u32), w);
            bias += ((1.0 - pi) / (1.0 - qi)).ln();
        }
        Ok(LinearSeparator::with_weights(
            sep.weights(),
            0.0,
            bias,
        )?)
    }

    /// Writes `nb <prior1> <smoothing>` then one `<id>\t<p>\t<q>` line per
    /// feature, ids dense and ascending.
    pub fn write_model<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "nb {} {}",
            lin_sep::fmt_f64(self.prior1),
            lin_sep::fmt_f64(self.smoothing)
        )?;
        for i in 0..self.p.len() {
            writeln!(
                w,
                "{i}\t{}\t{}",
                lin_sep::fmt_f64(self.p[i]),
                lin_sep::fmt_f64(self.q[i])
            )?;
        }
        Ok(())
    }

    pub fn read_model<R: BufRead>(mut r: R) -> Result<Self, NbError> {
        let mut header = String::new();
        r.read_line(&mut header).map_err(LinSepError::from)?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("nb") {
            return Err(LinSepError::ModelParse {
                line: 1,
                msg: "expected `nb` header".into(),
            }
            .into());
        }
        let prior1 = lin_sep::parse_f64(fields.next(), 1)?;
        let smoothing = lin_sep::parse_f64(fields.next(), 1)?;
        let mut p = Vec::new();
        let mut q = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(LinSepError::from)?;
            let lineno = i + 2;
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: &str| -> NbError {
                LinSepError::ModelParse {
                    line: lineno,
                    msg: msg.to_string(),
                }
                .into()
            };
            let mut cols = line.split('\t');
            let id: usize = cols
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err("bad feature id"))?;
            if id != p.len() {
                return Err(parse_err("ids must be dense and ascending"));
            }
            p.push(lin_sep::parse_f64(cols.next(), lineno)?);
            q.push(lin_sep::parse_f64(cols.next(), lineno)?);
        }
        NbParams::from_probabilities(prior1, smoothing, p, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(active: &[u32], label: Option<u32>) -> Example {
        Example::new(
            active.iter().map(|&i| FeatureId(i)).collect(),
            label.map(ClassId),
        )
    }

    #[test]
    fn fit_counts_with_add_one_smoothing() {
        // Feature 0 active in both class-1 examples, neither class-0.
        let corpus = vec![
            ex(&[0], Some(1)),
            ex(&[0], Some(1)),
            ex(&[], Some(0)),
            ex(&[], Some(0)),
        ];
        let nb = NbParams::fit(&corpus, 1, 1.0).unwrap();
        assert_eq!(nb.p_i(FeatureId(0)), Some(0.75)); // (2+1)/(2+2)
        assert_eq!(nb.q_i(FeatureId(0)), Some(0.25)); // (0+1)/(2+2)
        assert_eq!(nb.prior1(), 0.5);
        assert_eq!(nb.prior0(), 0.5);
    }

    #[test]
    fn fit_rejects_single_class_and_empty() {
        let one_class = vec![ex(&[0], Some(1)), ex(&[], Some(1))];
        assert!(matches!(
            NbParams::fit(&one_class, 1, 1.0),
            Err(NbError::SingleClassCorpus)
        ));
        assert!(matches!(
            NbParams::fit(&[], 1, 1.0),
            Err(NbError::EmptyCorpus)
        ));
    }

    #[test]
    fn equal_conditionals_defer_to_the_prior() {
        let nb = NbParams::from_probabilities(0.7, 1.0, vec![0.4, 0.6], vec![0.4, 0.6]).unwrap();
        assert!(nb.predict(&ex(&[], None)));
        assert!(nb.predict(&ex(&[0], None)));
        assert!(nb.predict(&ex(&[0, 1], None)));
    }

    #[test]
    fn single_feature_decision_flips_with_activity() {
        let nb = NbParams::from_probabilities(0.5, 1.0, vec![0.75], vec![0.25]).unwrap();
        assert!(nb.predict(&ex(&[0], None))); // 0.75 vs 0.25
        assert!(!nb.predict(&ex(&[], None))); // 0.25 vs 0.75
    }

    #[test]
    fn export_weight_matches_log_odds() {
        let nb = NbParams::from_probabilities(0.5, 1.0, vec![0.8], vec![0.2]).unwrap();
        let sep = nb.to_linear().unwrap();
        let w = sep.weight(FeatureId(0));
        assert!((w - 16f64.ln()).abs() < 1e-12);
        // p = q gives weight zero, which is not stored.
        let nb = NbParams::from_probabilities(0.5, 1.0, vec![0.3], vec![0.3]).unwrap();
        assert_eq!(nb.to_linear().unwrap().num_weights(), 0);
    }

    #[test]
    fn export_tie_rule_matches_native() {
        // With p = q everywhere and equal priors both routes sit exactly on
        // the tie and must both answer 0.
        let nb = NbParams::from_probabilities(0.5, 1.0, vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        let sep = nb.to_linear().unwrap();
        for mask in 0..4u64 {
            let e = Example::from_mask(mask, 2);
            assert!(!nb.predict(&e));
            assert!(!sep.predict(&e));
        }
    }

    #[test]
    fn degenerate_probabilities_are_rejected() {
        assert!(matches!(
            NbParams::from_probabilities(0.5, 0.0, vec![1.0], vec![0.5]),
            Err(NbError::DegenerateProbability(FeatureId(0)))
        ));
        // Unsmoothed fit where a feature is always active in class 1.
        let corpus = vec![ex(&[0], Some(1)), ex(&[], Some(0))];
        assert!(matches!(
            NbParams::fit(&corpus, 1, 0.0),
            Err(NbError::DegenerateProbability(_))
        ));
    }

    #[test]
    fn model_round_trip() {
        let corpus = vec![
            ex(&[0, 2], Some(1)),
            ex(&[1], Some(0)),
            ex(&[0], Some(1)),
            ex(&[2], Some(0)),
        ];
        let nb = NbParams::fit(&corpus, 3, 1.0).unwrap();
        let mut buf = Vec::new();
        nb.write_model(&mut buf).unwrap();
        let back = NbParams::read_model(&buf[..]).unwrap();
        assert_eq!(back, nb);
    }

    #[test]
    fn read_model_rejects_wrong_header() {
        let err = NbParams::read_model(&b"dl +1\n"[..]).unwrap_err();
        assert!(matches!(err, NbError::Model(_)));
    }

    #[test]
    fn fitted_models_export_exactly() {
        // Models fitted from corpora (not just sampled parameters) must
        // also agree with their export on every input.
        use crate::oracle::enumerate_agreement;
        let n = 8u32;
        for seed in 0..10u64 {
            let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
            let mut next = move || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state
            };
            let corpus: Vec<Example> = (0..30)
                .map(|_| {
                    let mask = next() % (1 << n);
                    Example::from_mask(mask, n).with_label(ClassId((next() % 2) as u32))
                })
                .collect();
            let Ok(nb) = NbParams::fit(&corpus, n as usize, 1.0) else {
                continue; // single-class draw
            };
            let sep = nb.to_linear().unwrap();
            let report =
                enumerate_agreement(|e| nb.predict(e), |e| sep.predict(e), n).unwrap();
            assert_eq!(report.disagreements, 0, "seed {seed}: {}", report.render());
        }
    }
}
