//! The freeze contracts: frozen spaces, networks and separators are plain
//! shared data — many threads may encode and predict concurrently and see
//! identical results.

use std::thread;

use ambiguity_lab::feature_space::{ClassId, Example, Feature, FeatureId, FeatureSpace, Slot, Token};
use ambiguity_lab::snow::{SnowConfig, SnowNetwork};
use ambiguity_lab::TaskDef;

fn feature(word: &str) -> Feature {
    Feature::unit(Slot::Context, Token::word(word).unwrap())
}

#[test]
fn frozen_space_supports_concurrent_readonly_encoding() {
    let mut space = FeatureSpace::new();
    for i in 0..50 {
        space.register(feature(&format!("w{i}"))).unwrap();
    }
    space.freeze();
    let space = &space;
    thread::scope(|s| {
        let handles: Vec<_> = (0..8)
            .map(|t| {
                s.spawn(move || {
                    let feats: Vec<Feature> = (0..60)
                        .map(|i| feature(&format!("w{}", (i + t) % 60)))
                        .collect();
                    let e = space.encode_test(&feats, None);
                    (e.active().len(), space.len())
                })
            })
            .collect();
        for h in handles {
            let (active, len) = h.join().unwrap();
            assert_eq!(active, 50); // the ten unseen words drop out
            assert_eq!(len, 50); // and nothing was registered
        }
    });
}

#[test]
fn frozen_network_predicts_identically_from_many_threads() {
    let task = TaskDef::new("t", vec!["a".into(), "b".into(), "c".into()]).unwrap();
    let mut net = SnowNetwork::new(task, SnowConfig::default()).unwrap();
    let corpus: Vec<Example> = (0..300)
        .map(|i| {
            Example::new(
                vec![FeatureId(i % 17), FeatureId(17 + i % 5)],
                Some(ClassId(i % 3)),
            )
        })
        .collect();
    net.train_corpus(&corpus, 2, Some(1)).unwrap();
    net.freeze();

    let probes: Vec<Example> = (0..500)
        .map(|i| Example::new(vec![FeatureId(i % 23), FeatureId(i % 29)], None))
        .collect();
    let expected: Vec<ClassId> = probes.iter().map(|e| net.predict(e).label).collect();

    let net = &net;
    let probes = &probes;
    let expected = &expected;
    thread::scope(|s| {
        for _ in 0..8 {
            s.spawn(move || {
                for (e, want) in probes.iter().zip(expected) {
                    assert_eq!(net.predict(e).label, *want);
                }
            });
        }
    });
}
