//! The project's acceptance gate, one test per criterion.
//!
//! Each criterion pins its thresholds and tolerances in code and prints a
//! `PASS criterion-N` line on success (visible under `--nocapture`):
//!
//!  1. naive Bayes exports are exact on all 2^10 inputs, 50 random models;
//!  2. decision-list exports are exact on all 2^n inputs, 100 random lists;
//!  3. back-off exports match on every instance of 50 random toy lattices;
//!  4. Winnow obeys the disjunction mistake bound and scales sub-linearly;
//!  5. the network learns a 3-class synthetic task to >= 0.95 held out,
//!     deterministically per seed;
//!  6. the accuracy measure and the most-common baseline are exact;
//!  7. attachment records encode to exactly 15 features and the loader
//!     round-trips canonical files byte-exactly;
//!  8. the committed fixture corpus drives the three exported separators
//!     into pairwise disagreement;
//!  9. (optional, data-gated) reference accuracy ranges on the standard
//!     attachment train/test files;
//! 10. separators and positive 1-decision lists over two features each
//!     shatter a three-point set.

use ambiguity_lab::baselines::{BackoffModel, DecisionList, NbParams, OrderIndex};
use ambiguity_lab::feature_space::{ClassId, Example, FeatureId, FeatureSpace};
use ambiguity_lab::harness::oracle_suite::{bo_export_sweep, dl_export_sweep, nb_export_sweep};
use ambiguity_lab::harness::synthetic::disjunction_stream;
use ambiguity_lab::harness::{run_experiment, ExperimentConfig, Method, Task, DATA_ROOT_ENV};
use ambiguity_lab::lin_sep::perf;
use ambiguity_lab::oracle::{all_p1dls, grid_separators, shatter_check};
use ambiguity_lab::tasks::ppa::{ppa_features, read_ppa, write_ppa, PpaLabel, PpaRecord};
use ambiguity_lab::tasks::{load_ppa, majority_class, PPA_MAX_ORDER};
use ambiguity_lab::winnow::{LinkPolicy, WinnowConfig, WinnowLearner};

const FIXTURE_CORPUS: &str = include_str!("fixtures/divergence_corpus.ppa");
const FIXTURE_DL: &str = include_str!("fixtures/divergence.dl");

#[test]
fn acceptance_01_nb_export_exactness() {
    let report = nb_export_sweep(10, 50, 0x01).expect("sweep runs");
    assert_eq!(report.total_inputs, 50 * 1024);
    assert_eq!(
        report.disagreements, 0,
        "naive Bayes export diverged: {}",
        report.render()
    );
    println!("PASS criterion-1: nb export exact on {} inputs", report.total_inputs);
}

#[test]
fn acceptance_02_dl_export_exactness() {
    let report = dl_export_sweep(16, 16, 100, 0x02).expect("sweep runs");
    assert!(report.total_inputs >= 100 * (1 << 4));
    assert_eq!(
        report.disagreements, 0,
        "decision-list export diverged: {}",
        report.render()
    );
    println!("PASS criterion-2: dl export exact on {} inputs", report.total_inputs);
}

#[test]
fn acceptance_03_bo_export_exactness() {
    let report = bo_export_sweep(50, 0x03).expect("sweep runs");
    assert!(report.total_inputs >= 50 * 4);
    assert_eq!(
        report.disagreements, 0,
        "back-off export diverged: {}",
        report.render()
    );
    println!("PASS criterion-3: bo export exact on {} instances", report.total_inputs);
}

#[test]
fn acceptance_04_winnow_attribute_efficiency() {
    let k = 5u32;
    let train_mistakes = |n: u32, seed: u64| -> u64 {
        // Activation rate chosen so the disjunction fires about half the
        // time; the bound holds for any stream.
        let p = 1.0 - (0.5f64).powf(1.0 / k as f64);
        let stream = disjunction_stream(n, k, p, 2000, seed);
        let mut learner = WinnowLearner::new(
            WinnowConfig {
                alpha: 2.0,
                beta: 0.5,
                theta: n as f64,
                initial_weight: 1.0,
            },
            LinkPolicy::AllFeatures,
        )
        .expect("valid config");
        learner.train_stream(&stream, 1).expect("labeled stream")
    };

    // Mistake bound at n = 1024: 2 + 3k(1 + log2 n) = 167, on every one of
    // 20 seeded streams.
    let bound = 2 + 3 * k as u64 * (1 + 10);
    assert_eq!(bound, 167);
    let mut mean_1024 = 0.0;
    for seed in 0..20 {
        let m = train_mistakes(1024, seed);
        assert!(m <= bound, "seed {seed}: {m} mistakes exceed the bound {bound}");
        mean_1024 += m as f64 / 20.0;
    }

    // Sub-linear growth: a 16x larger feature space must not cost 16x the
    // mistakes.
    let mut mean_64 = 0.0;
    let mut mean_256 = 0.0;
    for seed in 0..6 {
        mean_64 += train_mistakes(64, seed) as f64 / 6.0;
        mean_256 += train_mistakes(256, seed) as f64 / 6.0;
    }
    assert!(mean_64 > 0.0);
    assert!(
        mean_1024 / mean_64 < 1024.0 / 64.0,
        "mistakes grew linearly: {mean_64:.1} -> {mean_256:.1} -> {mean_1024:.1}"
    );

    // Least-squares fit of mean mistakes against k·log2(n): the slope (the
    // per-relevant-literal, per-doubling cost) must be positive.
    let points = [(6.0, mean_64), (8.0, mean_256), (10.0, mean_1024)];
    let mean_x: f64 = points.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let mean_y: f64 = points.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let slope: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mean_x).powi(2)).sum::<f64>();
    assert!(slope > 0.0, "mistakes did not grow with log2(n): {points:?}");
    println!(
        "PASS criterion-4: winnow mistakes {mean_64:.1}/{mean_256:.1}/{mean_1024:.1} \
         for n=64/256/1024 (slope {slope:.1}/log2 n), bound {bound} held on 20 streams"
    );
}

#[test]
fn acceptance_05_snow_multiclass_synthetic() {
    let cfg = ExperimentConfig {
        task: Task::Synthetic,
        method: Method::Snow,
        epochs: 2,
        seed: 5,
        ..ExperimentConfig::default()
    };
    // Defaults: 3 classes, n = 300, 2000 train / 500 test.
    assert_eq!(cfg.synth.classes, 3);
    assert_eq!(cfg.synth.n_features, 300);
    assert_eq!(cfg.synth.train, 2000);
    assert_eq!(cfg.synth.test, 500);

    let report = run_experiment(&cfg).expect("runs");
    assert!(
        report.accuracy >= 0.95,
        "held-out accuracy {:.4} below 0.95",
        report.accuracy
    );
    // Deterministic per seed: identical machine-readable outcome.
    let again = run_experiment(&cfg).expect("runs");
    assert_eq!(report.machine_line(), again.machine_line());
    assert_eq!(report.node_mistakes, again.node_mistakes);
    println!(
        "PASS criterion-5: snow held-out accuracy {:.4} on 3-class synthetic",
        report.accuracy
    );
}

#[test]
fn acceptance_06_perf_and_baseline_exactness() {
    let ex = |id: u32, label: u32| {
        Example::new(vec![FeatureId(id)], Some(ClassId(label)))
    };
    // Hand-computed ratio: predictor says class 1 iff feature 0 is active.
    let pred = |e: &Example| ClassId(e.is_active(FeatureId(0)) as u32);
    let test = vec![ex(0, 1), ex(0, 1), ex(1, 0), ex(0, 0)];
    assert_eq!(perf(pred, &test).unwrap(), 0.75);
    assert_eq!(perf(pred, &test[..2]).unwrap(), 1.0);
    assert_eq!(perf(pred, &test[2..]).unwrap(), 0.5);

    // The most-common baseline scores exactly the majority-class frequency
    // of the test set (train and test share the majority here).
    let train = vec![ex(0, 1), ex(1, 1), ex(2, 1), ex(3, 0), ex(4, 0)];
    let test: Vec<Example> = (0..10).map(|i| ex(i, (i < 7) as u32)).collect();
    let majority = majority_class(&train).unwrap();
    assert_eq!(majority, ClassId(1));
    let baseline_acc = perf(|_| majority, &test).unwrap();
    let majority_freq =
        test.iter().filter(|e| e.label() == Some(ClassId(1))).count() as f64 / test.len() as f64;
    assert_eq!(baseline_acc, majority_freq);
    assert_eq!(baseline_acc, 0.7);
    println!("PASS criterion-6: perf ratios and baseline frequency exact");
}

#[test]
fn acceptance_07_ppa_encoding_and_round_trip() {
    // Every record encodes to exactly 15 features.
    let records = read_ppa(FIXTURE_CORPUS.as_bytes()).expect("fixture parses");
    let mut space = FeatureSpace::new();
    for r in &records {
        let e = ppa_features(r, &mut space, true).expect("encodes");
        assert_eq!(e.active().len(), 15, "record {r:?}");
    }
    // Byte-exact canonical round-trip.
    let mut out = Vec::new();
    write_ppa(&records, &mut out).expect("writes");
    assert_eq!(out, FIXTURE_CORPUS.as_bytes());
    println!(
        "PASS criterion-7: {} records at 15 features each; byte-exact round-trip",
        records.len()
    );
}

#[test]
fn acceptance_08_method_divergence_fixture() {
    let records = read_ppa(FIXTURE_CORPUS.as_bytes()).expect("fixture parses");
    let mut space = FeatureSpace::new();
    let examples: Vec<Example> = records
        .iter()
        .map(|r| ppa_features(r, &mut space, true).expect("encodes"))
        .collect();
    space.freeze();

    let nb = NbParams::fit(&examples, space.len(), 1.0).expect("fits");
    let orders = OrderIndex::from_space(&space);
    let bo = BackoffModel::fit(&examples, &orders, PPA_MAX_ORDER).expect("fits");
    let dl = DecisionList::read_model(FIXTURE_DL.as_bytes()).expect("fixture parses");

    // The instance set: every head-word combination over the fixture
    // vocabulary.
    let vocab = [["buy", "see"], ["car", "dog"], ["with", "in"], ["money", "park"]];
    let instances: Vec<Example> = (0..16usize)
        .map(|m| {
            let r = PpaRecord {
                verb: vocab[0][m & 1].into(),
                noun1: vocab[1][m >> 1 & 1].into(),
                preposition: vocab[2][m >> 2 & 1].into(),
                noun2: vocab[3][m >> 3 & 1].into(),
                label: PpaLabel::Verb,
            };
            ppa_features(&r, &mut space, false).expect("encodes")
        })
        .collect();

    let nb_sep = nb.to_linear().expect("exports");
    let bo_sep = bo.to_linear(&instances).expect("exports");
    let dl_sep = dl.to_linear().expect("exports");

    let mut nb_vs_bo = 0;
    let mut nb_vs_dl = 0;
    let mut bo_vs_dl = 0;
    for e in &instances {
        let (a, b, c) = (nb_sep.predict(e), bo_sep.predict(e), dl_sep.predict(e));
        nb_vs_bo += (a != b) as u32;
        nb_vs_dl += (a != c) as u32;
        bo_vs_dl += (b != c) as u32;
    }
    assert!(nb_vs_bo > 0, "nb and bo exports agree everywhere");
    assert!(nb_vs_dl > 0, "nb and dl exports agree everywhere");
    assert!(bo_vs_dl > 0, "bo and dl exports agree everywhere");
    println!(
        "PASS criterion-8: pairwise disagreements nb/bo={nb_vs_bo} nb/dl={nb_vs_dl} bo/dl={bo_vs_dl}"
    );
}

/// Reference accuracies on the standard 20801/3097 attachment split. Needs
/// the data files at `$AMBIGUITY_LAB_DATA/ppa/training` and
/// `$AMBIGUITY_LAB_DATA/ppa/test`, which are licensed and cannot ship with
/// the repo; run with `cargo test -- --ignored` when you have them.
#[test]
#[ignore = "needs the licensed attachment data under $AMBIGUITY_LAB_DATA/ppa/"]
fn acceptance_09_ppa_reference_ranges() {
    let Some(root) = std::env::var_os(DATA_ROOT_ENV) else {
        eprintln!("SKIP criterion-9: {DATA_ROOT_ENV} is not set");
        return;
    };
    let root = std::path::PathBuf::from(root).join("ppa");
    let train = root.join("training");
    let test = root.join("test");
    if !train.exists() || !test.exists() {
        eprintln!(
            "SKIP criterion-9: {} or {} not found",
            train.display(),
            test.display()
        );
        return;
    }
    assert_eq!(load_ppa(&train).expect("training parses").len(), 20801);
    assert_eq!(load_ppa(&test).expect("test parses").len(), 3097);

    let run = |method: Method| {
        run_experiment(&ExperimentConfig {
            task: Task::Ppa,
            method,
            train: Some(train.clone()),
            test: Some(test.clone()),
            seed: 0,
            epochs: 2,
            ..ExperimentConfig::default()
        })
        .expect("experiment runs")
    };

    let baseline = run(Method::Baseline).accuracy * 100.0;
    assert!(
        (baseline - 59.0).abs() <= 0.5,
        "baseline {baseline:.2} outside 59.0 +/- 0.5"
    );
    let bo = run(Method::Bo).accuracy * 100.0;
    assert!((bo - 83.7).abs() <= 0.7, "back-off {bo:.2} outside 83.7 +/- 0.7");
    let snow = run(Method::Snow).accuracy * 100.0;
    assert!(
        (snow - 83.9).abs() <= 2.0,
        "snow {snow:.2} outside 83.9 +/- 2.0"
    );
    println!(
        "PASS criterion-9: baseline {baseline:.1}, bo {bo:.1}, snow {snow:.1} on 3097 test cases"
    );
}

#[test]
fn acceptance_10_shattering_demos() {
    let ex = |active: &[u32]| {
        Example::new(active.iter().map(|&i| FeatureId(i)).collect(), None)
    };
    let points = vec![ex(&[]), ex(&[0]), ex(&[1])];

    let grid = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let seps = grid_separators(2, &grid)
        .into_iter()
        .map(|sep| move |e: &Example| sep.predict(e));
    let report = shatter_check(seps, &points, 1_000_000).expect("runs");
    assert!(report.shattered, "separators: {}", report.render());

    let dls = all_p1dls(2, 2)
        .into_iter()
        .map(|dl| move |e: &Example| dl.evaluate(e).as_bool());
    let report = shatter_check(dls, &points, 1_000_000).expect("runs");
    assert!(report.shattered, "p1-dl: {}", report.render());
    println!("PASS criterion-10: both families shatter a 3-point set over n=2");
}
