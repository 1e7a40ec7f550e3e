//! Level-based back-off estimation over a feature lattice, with a linear
//! export calibrated to a finite instance set.
//!
//! Back-off treats the classified unit itself as a feature of maximal order
//! `k`; everything below it in the subset order is a more general, more
//! frequent event. Fitting counts occurrences `N(f)` and class-1
//! occurrences per feature. Prediction descends the orders: at the first
//! order with any seen active feature, the estimate is the unweighted
//! average of `Pr(c=1 | f)` over the seen active features of that order,
//! and the predicted class is 1 iff the estimate strictly exceeds 1/2.
//! Only the highest supported order ever matters; with no support at all
//! the class prior decides.
//!
//! The same procedure is a linear separator. Each seen order-`j` feature
//! gets weight `m_j · (2 Pr(c=1|f) − 1 − η_j)`: the signed vote of the
//! feature, nudged by a tiny `η_j` so an exactly-tied level sums negative
//! (ties predict 0), scaled by a magnitude `m_j` built inductively so any
//! order-`j` verdict outweighs everything the lower orders can sum to. The
//! nudge and the scales depend on the smallest nonzero vote sum an instance
//! can produce, which is why the export takes the enumerable instance set:
//! it is exact on those instances and errors out if the counts would push
//! the construction past 64-bit float precision.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::feature_space::{ClassId, Example, FeatureId, FeatureSpace};
use crate::lin_sep::{LinSepError, LinearSeparator};

/// Smallest usable tie nudge; below this, float rounding in the weight sums
/// could swallow the margin.
const MIN_ETA: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum BackoffError {
    #[error("max order must be at least 1")]
    BadMaxOrder,
    #[error("example {0} has no active feature of maximal order")]
    MissingMaximalFeature(usize),
    #[error("example {0} has {1} features of maximal order; back-off expects exactly one")]
    AmbiguousMaximalFeature(usize, usize),
    #[error("training example {0} has no label")]
    Unlabeled(usize),
    #[error("training example {0} has label {1}; binary fitting needs 0 or 1")]
    NonBinaryLabel(usize, ClassId),
    #[error("counts at order {0} exceed what the export can separate in 64-bit floats")]
    ExportPrecision(u32),
    #[error(transparent)]
    Model(#[from] LinSepError),
}

/// Feature orders indexed by feature id; order 0 marks ids that are not
/// part of the lattice.
#[derive(Debug, Clone, Default)]
pub struct OrderIndex(Vec<u32>);

impl OrderIndex {
    pub fn from_orders(orders: Vec<u32>) -> Self {
        OrderIndex(orders)
    }

    /// Reads every feature's token count out of a registered space.
    pub fn from_space(space: &FeatureSpace) -> Self {
        let mut orders = vec![0u32; space.len()];
        for (id, f) in space.iter() {
            orders[id.0 as usize] = f.order() as u32;
        }
        OrderIndex(orders)
    }

    pub fn order(&self, id: FeatureId) -> Option<u32> {
        match self.0.get(id.0 as usize) {
            Some(&o) if o > 0 => Some(o),
            _ => None,
        }
    }
}

/// Occurrence counts for one seen feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureCounts {
    pub order: u32,
    pub n: u64,
    pub n_class1: u64,
}

impl FeatureCounts {
    /// Empirical `Pr(c = 1 | f)`.
    pub fn pr_class1(&self) -> f64 {
        self.n_class1 as f64 / self.n as f64
    }
}

/// The outcome of one back-off prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoPrediction {
    /// True iff the estimate strictly exceeds 1/2.
    pub label: bool,
    /// The probability estimate the decision was made on.
    pub estimate: f64,
    /// The order that supplied the estimate; `None` means the class prior.
    pub level: Option<u32>,
}

/// Fitted back-off count tables up to a maximal order.
#[derive(Debug, Clone, PartialEq)]
pub struct BackoffModel {
    max_order: u32,
    counts: BTreeMap<FeatureId, FeatureCounts>,
    total: u64,
    total_class1: u64,
}

impl BackoffModel {
    /// Counts every active feature of order `1..=max_order` in every
    /// example. Each example must carry exactly one active feature of the
    /// maximal order (the classified unit itself); its sub-feature lattice
    /// is simply the rest of the active set.
    pub fn fit(
        corpus: &[Example],
        orders: &OrderIndex,
        max_order: u32,
    ) -> Result<Self, BackoffError> {
        if max_order == 0 {
            return Err(BackoffError::BadMaxOrder);
        }
        let mut model = BackoffModel {
            max_order,
            counts: BTreeMap::new(),
            total: 0,
            total_class1: 0,
        };
        for (i, e) in corpus.iter().enumerate() {
            let positive = match e.label() {
                Some(ClassId(0)) => false,
                Some(ClassId(1)) => true,
                Some(other) => return Err(BackoffError::NonBinaryLabel(i, other)),
                None => return Err(BackoffError::Unlabeled(i)),
            };
            let maximal = e
                .active()
                .iter()
                .filter(|&&id| orders.order(id) == Some(max_order))
                .count();
            match maximal {
                0 => return Err(BackoffError::MissingMaximalFeature(i)),
                1 => {}
                m => return Err(BackoffError::AmbiguousMaximalFeature(i, m)),
            }
            for &id in e.active() {
                let Some(order) = orders.order(id) else {
                    continue;
                };
                if order > max_order {
                    continue;
                }
                let entry = model.counts.entry(id).or_insert(FeatureCounts {
                    order,
                    n: 0,
                    n_class1: 0,
                });
                entry.n += 1;
                entry.n_class1 += positive as u64;
            }
            model.total += 1;
            model.total_class1 += positive as u64;
        }
        Ok(model)
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn counts(&self, id: FeatureId) -> Option<&FeatureCounts> {
        self.counts.get(&id)
    }

    pub fn num_seen(&self) -> usize {
        self.counts.len()
    }

    pub fn total_examples(&self) -> u64 {
        self.total
    }

    /// Training class-1 prior; 1/2 for an empty model.
    pub fn prior(&self) -> f64 {
        if self.total == 0 {
            0.5
        } else {
            self.total_class1 as f64 / self.total as f64
        }
    }

    /// Descends orders from the highest: the first order with seen active
    /// features supplies the estimate (the unweighted average of their
    /// class-1 ratios); with no support anywhere, the prior does.
    pub fn predict(&self, e: &Example) -> BoPrediction {
        let mut best_order = 0u32;
        let mut sum = 0.0;
        let mut hits = 0u32;
        for id in e.active() {
            let Some(c) = self.counts.get(id) else {
                continue;
            };
            if c.order > best_order {
                best_order = c.order;
                sum = c.pr_class1();
                hits = 1;
            } else if c.order == best_order {
                sum += c.pr_class1();
                hits += 1;
            }
        }
        if hits == 0 {
            let estimate = self.prior();
            return BoPrediction {
                label: estimate > 0.5,
                estimate,
                level: None,
            };
        }
        let estimate = sum / hits as f64;
        BoPrediction {
            label: estimate > 0.5,
            estimate,
            level: Some(best_order),
        }
    }

    /// The explicit separator form, calibrated to the given enumerable
    /// instance set: predictions agree with [`predict`](Self::predict) on
    /// every instance in it. Features no instance activates carry no
    /// weight. Errors out when the counts would need margins finer than
    /// 64-bit floats can hold.
    pub fn to_linear(&self, instances: &[Example]) -> Result<LinearSeparator, BackoffError> {
        // Level 0 is the prior, encoded as the bias at unit scale.
        let prior_margin = 1.0 / self.total.max(1) as f64;
        let eta0 = prior_margin / 2.0;
        let bias = (2.0 * self.prior() - 1.0) - eta0;

        let mut sep = LinearSeparator::new(0.0, bias);
        let mut cum = bias.abs();

        for order in 1..=self.max_order {
            let level: Vec<(FeatureId, &FeatureCounts)> = self
                .counts
                .iter()
                .filter(|(_, c)| c.order == order)
                .map(|(&id, c)| (id, c))
                .collect();
            if level.is_empty() {
                continue;
            }
            // Per instance: how many level features fire together and how
            // large the common denominator of their vote sum can get. The
            // smallest nonzero vote sum is at least 1 over that product.
            let mut max_prod = 0.0f64;
            let mut max_hits = 0usize;
            for inst in instances {
                let mut prod = 1.0f64;
                let mut hits = 0usize;
                for (id, c) in &level {
                    if inst.is_active(*id) {
                        prod *= c.n as f64;
                        hits += 1;
                    }
                }
                if hits > 0 {
                    max_prod = max_prod.max(prod);
                    max_hits = max_hits.max(hits);
                }
            }
            if max_hits == 0 {
                // No instance reaches this level; nothing to separate.
                continue;
            }
            // max_prod is a product of counts >= 1, so eta lands in
            // (0, 0.5] unless the product overflowed.
            let eta = 1.0 / max_prod / (2.0 * max_hits as f64);
            if eta < MIN_ETA {
                return Err(BackoffError::ExportPrecision(order));
            }
            let scale = if cum == 0.0 { 1.0 } else { 4.0 * cum / eta };
            if !scale.is_finite() {
                return Err(BackoffError::ExportPrecision(order));
            }
            for (id, c) in level {
                let w = scale * ((2.0 * c.pr_class1() - 1.0) - eta);
                if !w.is_finite() {
                    return Err(BackoffError::ExportPrecision(order));
                }
                sep.set_weight(id, w);
                cum += w.abs();
            }
            if !cum.is_finite() {
                return Err(BackoffError::ExportPrecision(order));
            }
        }
        Ok(sep)
    }

    /// Writes `bo <k> <total> <total_class1>` then per seen feature a
    /// `<order>\t<feature-id>\t<N>\t<N_class1>` line.
    pub fn write_model<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "bo {} {} {}", self.max_order, self.total, self.total_class1)?;
        for (id, c) in &self.counts {
            writeln!(w, "{}\t{id}\t{}\t{}", c.order, c.n, c.n_class1)?;
        }
        Ok(())
    }

    pub fn read_model<R: BufRead>(mut r: R) -> Result<Self, BackoffError> {
        let mut header = String::new();
        r.read_line(&mut header).map_err(LinSepError::from)?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("bo") {
            return Err(LinSepError::ModelParse {
                line: 1,
                msg: "expected `bo` header".into(),
            }
            .into());
        }
        let header_err = || -> BackoffError {
            LinSepError::ModelParse {
                line: 1,
                msg: "expected `bo <k> <total> <total_class1>`".into(),
            }
            .into()
        };
        let max_order: u32 = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(header_err)?;
        let total: u64 = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(header_err)?;
        let total_class1: u64 = fields
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(header_err)?;
        if max_order == 0 {
            return Err(BackoffError::BadMaxOrder);
        }
        let mut counts = BTreeMap::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(LinSepError::from)?;
            let lineno = i + 2;
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: &str| -> BackoffError {
                LinSepError::ModelParse {
                    line: lineno,
                    msg: msg.to_string(),
                }
                .into()
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(parse_err("expected `<order>\\t<id>\\t<N>\\t<N1>`"));
            }
            let order: u32 = cols[0].parse().map_err(|_| parse_err("bad order"))?;
            let id: u32 = cols[1].parse().map_err(|_| parse_err("bad feature id"))?;
            let n: u64 = cols[2].parse().map_err(|_| parse_err("bad count"))?;
            let n_class1: u64 = cols[3].parse().map_err(|_| parse_err("bad class count"))?;
            if order == 0 || order > max_order || n_class1 > n {
                return Err(parse_err("inconsistent counts"));
            }
            counts.insert(FeatureId(id), FeatureCounts { order, n, n_class1 });
        }
        Ok(BackoffModel {
            max_order,
            counts,
            total,
            total_class1,
        })
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

    /// Two-token lattice: id 0 is the order-2 pair, ids 1 and 2 its
    /// order-1 parts; ids 3, 4 an alternative pair's pieces.
    fn orders() -> OrderIndex {
        OrderIndex::from_orders(vec![2, 1, 1, 2, 1])
    }

    #[test]
    fn fit_counts_the_whole_lattice() {
        let corpus = vec![ex(&[0, 1, 2], Some(1))];
        let m = BackoffModel::fit(&corpus, &orders(), 2).unwrap();
        for id in [0, 1, 2] {
            let c = m.counts(FeatureId(id)).unwrap();
            assert_eq!((c.n, c.n_class1), (1, 1));
        }
        assert_eq!(m.total_examples(), 1);
    }

    #[test]
    fn duplicate_examples_double_the_counts() {
        let corpus = vec![ex(&[0, 1, 2], Some(1)), ex(&[0, 1, 2], Some(1))];
        let m = BackoffModel::fit(&corpus, &orders(), 2).unwrap();
        let c = m.counts(FeatureId(0)).unwrap();
        assert_eq!((c.n, c.n_class1), (2, 2));
    }

    #[test]
    fn empty_corpus_gives_all_zero_tables() {
        let m = BackoffModel::fit(&[], &orders(), 2).unwrap();
        assert_eq!(m.num_seen(), 0);
        assert_eq!(m.prior(), 0.5);
    }

    #[test]
    fn missing_or_ambiguous_maximal_feature() {
        let no_max = vec![ex(&[1, 2], Some(1))];
        assert!(matches!(
            BackoffModel::fit(&no_max, &orders(), 2),
            Err(BackoffError::MissingMaximalFeature(0))
        ));
        let two_max = vec![ex(&[0, 3], Some(1))];
        assert!(matches!(
            BackoffModel::fit(&two_max, &orders(), 2),
            Err(BackoffError::AmbiguousMaximalFeature(0, 2))
        ));
    }

    #[test]
    fn top_level_ratio_decides_when_seen() {
        // Maximal feature seen 8 times, 6 of them class 1.
        let mut corpus: Vec<Example> = (0..6).map(|_| ex(&[0, 1, 2], Some(1))).collect();
        corpus.extend((0..2).map(|_| ex(&[0, 1, 2], Some(0))));
        let m = BackoffModel::fit(&corpus, &orders(), 2).unwrap();
        let p = m.predict(&ex(&[0, 1, 2], None));
        assert_eq!(p.estimate, 0.75);
        assert!(p.label);
        assert_eq!(p.level, Some(2));
    }

    #[test]
    fn backs_off_to_the_average_of_seen_lower_features() {
        // f1 at 9/10 class 1, f2 at 1/2; their pair never seen together.
        let mut corpus = Vec::new();
        for i in 0..10 {
            corpus.push(ex(&[0, 1], Some((i < 9) as u32))); // pair (f1, _) id 0
        }
        corpus.push(ex(&[3, 2], Some(1))); // pair (_, f2) id 3
        corpus.push(ex(&[3, 2], Some(0)));
        let m = BackoffModel::fit(&corpus, &orders(), 2).unwrap();
        // An instance activating f1 and f2 but no seen pair.
        let p = m.predict(&ex(&[1, 2], None));
        assert_eq!(p.level, Some(1));
        assert!((p.estimate - 0.7).abs() < 1e-12);
        assert!(p.label);
    }

    #[test]
    fn prior_fallback_on_unseen_examples() {
        let corpus = vec![
            ex(&[0, 1, 2], Some(1)),
            ex(&[0, 1, 2], Some(0)),
            ex(&[0, 1, 2], Some(0)),
            ex(&[0, 1, 2], Some(0)),
        ];
        let m = BackoffModel::fit(&corpus, &orders(), 2).unwrap();
        let p = m.predict(&ex(&[10, 11], None));
        assert_eq!(p.level, None);
        assert_eq!(p.estimate, 0.25);
        assert!(!p.label);
    }

    #[test]
    fn estimate_tie_predicts_zero() {
        let corpus = vec![ex(&[0, 1, 2], Some(1)), ex(&[0, 1, 2], Some(0))];
        let m = BackoffModel::fit(&corpus, &orders(), 2).unwrap();
        let p = m.predict(&ex(&[0, 1, 2], None));
        assert_eq!(p.estimate, 0.5);
        assert!(!p.label);
    }

    #[test]
    fn higher_order_support_silences_lower_orders() {
        // Same corpus twice, the second time with extra order-1 counts
        // pushing the other way; examples with order-2 support must not
        // move.
        let base = vec![
            ex(&[0, 1, 2], Some(1)),
            ex(&[0, 1, 2], Some(1)),
            ex(&[0, 1, 2], Some(0)),
        ];
        let m1 = BackoffModel::fit(&base, &orders(), 2).unwrap();
        let mut noisy = base.clone();
        for _ in 0..50 {
            noisy.push(ex(&[3, 1, 4], Some(0))); // floods f1 with class-0
        }
        let m2 = BackoffModel::fit(&noisy, &orders(), 2).unwrap();
        let probe = ex(&[0, 1, 2], None);
        assert_eq!(m1.predict(&probe), m2.predict(&probe));
    }

    fn all_instances() -> Vec<Example> {
        // Vocabulary {a, a'} × {b, b'} with only (a, b) and (a, b')
        // lattices materialized as ids; unseen combinations activate just
        // the order-1 pieces they share.
        vec![
            ex(&[0, 1, 2], None), // (a, b)
            ex(&[3, 1, 4], None), // (a, b')
            ex(&[2], None),       // (a', b)
            ex(&[4], None),       // (a', b')
        ]
    }

    #[test]
    fn export_agrees_on_a_two_level_lattice() {
        let corpus = vec![
            ex(&[0, 1, 2], Some(1)),
            ex(&[0, 1, 2], Some(1)),
            ex(&[0, 1, 2], Some(1)),
            ex(&[3, 1, 4], Some(0)),
        ];
        let m = BackoffModel::fit(&corpus, &orders(), 2).unwrap();
        let sep = m.to_linear(&all_instances()).unwrap();
        for inst in all_instances() {
            assert_eq!(
                sep.predict(&inst),
                m.predict(&inst).label,
                "disagreement on {:?}",
                inst
            );
        }
    }

    #[test]
    fn export_holds_a_tied_top_level_at_zero() {
        // The pair (a, b) ties at 1/2 while its order-1 parts lean hard
        // towards class 1; the tie must still predict 0.
        let corpus = vec![
            ex(&[0, 1, 2], Some(1)),
            ex(&[0, 1, 2], Some(0)),
            ex(&[3, 1, 4], Some(1)),
            ex(&[3, 1, 4], Some(1)),
        ];
        let m = BackoffModel::fit(&corpus, &orders(), 2).unwrap();
        let probe = ex(&[0, 1, 2], None);
        assert!(!m.predict(&probe).label);
        let sep = m.to_linear(&all_instances()).unwrap();
        assert!(!sep.predict(&probe));
        // And every other instance agrees too.
        for inst in all_instances() {
            assert_eq!(sep.predict(&inst), m.predict(&inst).label);
        }
    }

    #[test]
    fn export_of_a_single_order_one_lattice_is_trivially_exact() {
        let orders = OrderIndex::from_orders(vec![1]);
        let corpus = vec![
            ex(&[0], Some(1)),
            ex(&[0], Some(1)),
            ex(&[0], Some(0)),
        ];
        let m = BackoffModel::fit(&corpus, &orders, 1).unwrap();
        let instances = vec![ex(&[0], None), ex(&[], None)];
        let sep = m.to_linear(&instances).unwrap();
        for inst in &instances {
            assert_eq!(sep.predict(inst), m.predict(inst).label);
        }
    }

    #[test]
    fn export_prior_fallback() {
        let corpus = vec![
            ex(&[0, 1, 2], Some(0)),
            ex(&[0, 1, 2], Some(0)),
            ex(&[0, 1, 2], Some(1)),
        ];
        let m = BackoffModel::fit(&corpus, &orders(), 2).unwrap();
        let sep = m.to_linear(&all_instances()).unwrap();
        let nothing_seen = ex(&[9], None);
        assert_eq!(sep.predict(&nothing_seen), m.predict(&nothing_seen).label);
    }

    #[test]
    fn model_round_trip() {
        let corpus = vec![
            ex(&[0, 1, 2], Some(1)),
            ex(&[3, 1, 4], Some(0)),
            ex(&[0, 1, 2], Some(0)),
        ];
        let m = BackoffModel::fit(&corpus, &orders(), 2).unwrap();
        let mut buf = Vec::new();
        m.write_model(&mut buf).unwrap();
        let back = BackoffModel::read_model(&buf[..]).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn read_model_rejects_inconsistent_counts() {
        assert!(BackoffModel::read_model(&b"bo 2 1 1\n1\t0\t1\t2\n"[..]).is_err());
        assert!(BackoffModel::read_model(&b"bo 0 0 0\n"[..]).is_err());
        assert!(BackoffModel::read_model(&b"nb 0.5 1\n"[..]).is_err());
    }
}
