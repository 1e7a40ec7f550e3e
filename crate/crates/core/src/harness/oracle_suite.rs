//! Randomized export-exactness sweeps.
//!
//! Each sweep draws models at random from a seeded stream, exports them to
//! explicit separators and compares native against exported predictions
//! exhaustively — over the full Boolean cube for naive Bayes and decision
//! lists, over the enumerable instance set for back-off lattices. Results
//! aggregate into one [`AgreementReport`].

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HarnessError;
use crate::baselines::decision_list::{DecisionList, Polarity, Rule};
use crate::baselines::{BackoffModel, NbParams, OrderIndex};
use crate::feature_space::{ClassId, Example, Feature, FeatureId, FeatureSpace, Slot, Token};
use crate::oracle::{enumerate_agreement, AgreementReport};
use crate::tasks::ppa::{ppa_features, PpaLabel, PpaRecord, PPA_MAX_ORDER};

/// Random naive Bayes parameters with probabilities comfortably inside
/// (0, 1).
pub fn random_nb(n_features: usize, rng: &mut impl Rng) -> NbParams {
    let p: Vec<f64> = (0..n_features).map(|_| rng.random_range(0.05..0.95)).collect();
    let q: Vec<f64> = (0..n_features).map(|_| rng.random_range(0.05..0.95)).collect();
    let prior1 = rng.random_range(0.2..0.8);
    NbParams::from_probabilities(prior1, 1.0, p, q).expect("probabilities are interior")
}

/// A random canonical decision list: distinct features, random order,
/// random consequents and default.
pub fn random_canonical_dl(
    n_features: u32,
    max_rules: usize,
    rng: &mut impl Rng,
) -> DecisionList {
    let mut features: Vec<u32> = (0..n_features).collect();
    features.shuffle(rng);
    let k = rng.random_range(0..=max_rules.min(n_features as usize));
    let rules = features[..k]
        .iter()
        .map(|&f| Rule {
            feature: FeatureId(f),
            consequent: Polarity::from_bool(rng.random_bool(0.5)),
        })
        .collect();
    DecisionList::new(rules, Polarity::from_bool(rng.random_bool(0.5)))
}

/// A fitted back-off model together with its enumerable instance set.
pub struct LatticeCase {
    pub model: BackoffModel,
    pub instances: Vec<Example>,
}

/// A random attachment-shaped lattice: two word choices per head slot
/// (15 features per instance, 16 instances), a random small training
/// corpus, and the full instance enumeration.
pub fn random_ppa_lattice(rng: &mut impl Rng) -> LatticeCase {
    let vocab: [[&str; 2]; 4] = [["v0", "v1"], ["m0", "m1"], ["p0", "p1"], ["o0", "o1"]];
    let mut space = FeatureSpace::new();
    let record = |choice: [usize; 4], label: PpaLabel| PpaRecord {
        verb: vocab[0][choice[0]].to_string(),
        noun1: vocab[1][choice[1]].to_string(),
        preposition: vocab[2][choice[2]].to_string(),
        noun2: vocab[3][choice[3]].to_string(),
        label,
    };
    let n_records = rng.random_range(6..=40);
    let mut corpus = Vec::with_capacity(n_records);
    for _ in 0..n_records {
        let choice = [(); 4].map(|_| rng.random_range(0..2));
        let label = if rng.random_bool(0.5) {
            PpaLabel::Verb
        } else {
            PpaLabel::Noun
        };
        let r = record(choice, label);
        corpus.push(ppa_features(&r, &mut space, true).expect("encoding succeeds"));
    }
    space.freeze();
    let orders = OrderIndex::from_space(&space);
    let model = BackoffModel::fit(&corpus, &orders, PPA_MAX_ORDER).expect("lattice is complete");

    let mut instances = Vec::with_capacity(16);
    for combo in 0..16usize {
        let choice = [combo & 1, combo >> 1 & 1, combo >> 2 & 1, combo >> 3 & 1];
        let r = record(choice, PpaLabel::Verb);
        let e = ppa_features(&r, &mut space, false).expect("test encoding");
        instances.push(Example::new(e.active().to_vec(), None));
    }
    LatticeCase { model, instances }
}

/// A random two-slot lattice with up to three word choices per slot:
/// singletons plus the pair feature, two levels deep.
pub fn random_two_level_lattice(rng: &mut impl Rng) -> LatticeCase {
    let sizes = [
        rng.random_range(2..=3usize),
        rng.random_range(2..=3usize),
    ];
    let mut space = FeatureSpace::new();
    let feature = |parts: &[(Slot, String)]| {
        Feature::new(
            parts
                .iter()
                .map(|(s, t)| (*s, Token::word(t.clone()).unwrap()))
                .collect(),
        )
        .unwrap()
    };
    let lattice_features = |a: usize, b: usize| {
        let wa = format!("a{a}");
        let wb = format!("b{b}");
        vec![
            feature(&[(Slot::Noun1, wa.clone())]),
            feature(&[(Slot::Noun2, wb.clone())]),
            feature(&[(Slot::Noun1, wa), (Slot::Noun2, wb)]),
        ]
    };
    let n_records = rng.random_range(4..=30);
    let mut corpus = Vec::with_capacity(n_records);
    for _ in 0..n_records {
        let (a, b) = (rng.random_range(0..sizes[0]), rng.random_range(0..sizes[1]));
        let label = Some(ClassId(rng.random_bool(0.5) as u32));
        let e = space
            .encode_train(&lattice_features(a, b), label)
            .expect("registration succeeds");
        corpus.push(e);
    }
    space.freeze();
    let orders = OrderIndex::from_space(&space);
    let model = BackoffModel::fit(&corpus, &orders, 2).expect("lattice is complete");

    let mut instances = Vec::new();
    for a in 0..sizes[0] {
        for b in 0..sizes[1] {
            instances.push(space.encode_test(&lattice_features(a, b), None));
        }
    }
    LatticeCase { model, instances }
}

fn merge(into: &mut AgreementReport, part: AgreementReport) {
    into.total_inputs += part.total_inputs;
    into.disagreements += part.disagreements;
    if into.first_counterexample.is_none() {
        into.first_counterexample = part.first_counterexample;
    }
}

fn empty_report() -> AgreementReport {
    AgreementReport {
        total_inputs: 0,
        disagreements: 0,
        first_counterexample: None,
    }
}

/// Exhaustive native-vs-export agreement over `draws` random naive Bayes
/// models on `n_features` features.
pub fn nb_export_sweep(
    n_features: u32,
    draws: u64,
    base_seed: u64,
) -> Result<AgreementReport, HarnessError> {
    let mut report = empty_report();
    for i in 0..draws {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(i));
        let nb = random_nb(n_features as usize, &mut rng);
        let sep = nb.to_linear()?;
        let part = enumerate_agreement(|e| nb.predict(e), |e| sep.predict(e), n_features)?;
        merge(&mut report, part);
    }
    Ok(report)
}

/// Exhaustive agreement over random canonical decision lists; each draw
/// picks its own universe size up to `max_features`.
pub fn dl_export_sweep(
    max_features: u32,
    max_rules: usize,
    draws: u64,
    base_seed: u64,
) -> Result<AgreementReport, HarnessError> {
    let mut report = empty_report();
    for i in 0..draws {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(i));
        let n = rng.random_range(4..=max_features);
        let dl = random_canonical_dl(n, max_rules, &mut rng);
        let sep = dl.to_linear()?;
        let part = enumerate_agreement(
            |e| dl.evaluate(e).as_bool(),
            |e| sep.predict(e),
            n,
        )?;
        merge(&mut report, part);
    }
    Ok(report)
}

/// Instance-set agreement over random back-off lattices, alternating the
/// attachment shape with simpler two-level shapes.
pub fn bo_export_sweep(draws: u64, base_seed: u64) -> Result<AgreementReport, HarnessError> {
    let mut report = empty_report();
    for i in 0..draws {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(i));
        let case = if i % 2 == 0 {
            random_ppa_lattice(&mut rng)
        } else {
            random_two_level_lattice(&mut rng)
        };
        let sep = case.model.to_linear(&case.instances)?;
        for inst in &case.instances {
            report.total_inputs += 1;
            if case.model.predict(inst).label != sep.predict(inst) {
                report.disagreements += 1;
                if report.first_counterexample.is_none() {
                    report.first_counterexample = Some(inst.clone());
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nb_sweep_is_exact_on_a_few_draws() {
        let report = nb_export_sweep(8, 5, 17).unwrap();
        assert_eq!(report.total_inputs, 5 * 256);
        assert_eq!(report.disagreements, 0, "{}", report.render());
    }

    #[test]
    fn dl_sweep_is_exact_on_a_few_draws() {
        let report = dl_export_sweep(10, 10, 10, 23).unwrap();
        assert_eq!(report.disagreements, 0, "{}", report.render());
    }

    #[test]
    fn bo_sweep_is_exact_on_a_few_draws() {
        let report = bo_export_sweep(8, 31).unwrap();
        assert!(report.total_inputs >= 8 * 4);
        assert_eq!(report.disagreements, 0, "{}", report.render());
    }

    #[test]
    fn ppa_lattice_has_the_expected_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let case = random_ppa_lattice(&mut rng);
        assert_eq!(case.instances.len(), 16);
        // Every instance activates at most 15 features and exactly one of
        // maximal order when fully seen in training.
        for inst in &case.instances {
            assert!(inst.active().len() <= 15);
        }
        assert_eq!(case.model.max_order(), 4);
    }
}
