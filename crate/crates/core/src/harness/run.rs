//! Per-task experiment internals: load, split, encode, train, score.
//!
//! The no-leakage discipline is uniform: data is split before any encoding,
//! training data registers features, the space is frozen, and only then is
//! test data encoded (registering nothing). Splits, shuffles and synthetic
//! draws all derive from the one config seed.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{resolve_data_path, ExperimentConfig, Method, Task};
use super::model_io::{load_model, save_model, Model};
use super::{synthetic, GroupResult, HarnessError, Report};
use crate::baselines::{BackoffModel, DecisionList, NbParams, OrderIndex};
use crate::feature_space::{ClassId, Example, FeatureSpace, TaskDef};
use crate::lin_sep::perf_precomputed;
use crate::snow::{SnowConfig, SnowNetwork};
use crate::tasks::{
    load_confusion_sets, load_pos, load_ppa, majority_class, ppa_features, scan_spelling,
    InitialTagger, SpellingConfig, PPA_MAX_ORDER,
};

/// Gold label for test positions whose tag never occurred in training: no
/// class can predict it, so such positions always count as errors.
const UNSEEN_CLASS: ClassId = ClassId(u32::MAX);

fn io_err(path: &Path, e: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn with_path(path: &Path, e: crate::tasks::TaskError) -> HarnessError {
    match e {
        crate::tasks::TaskError::Io(io) => io_err(path, io),
        other => other.into(),
    }
}

fn required(path: &Option<PathBuf>, what: &str) -> Result<PathBuf, HarnessError> {
    path.clone()
        .map(|p| resolve_data_path(&p))
        .ok_or_else(|| HarnessError::Config(format!("{what} is required here")))
}

/// Seeded shuffle split: the first `ratio` of a shuffled order trains, the
/// rest tests.
fn split_vec<T>(items: Vec<T>, ratio: f64, seed: u64) -> (Vec<T>, Vec<T>) {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = ((items.len() as f64 * ratio).round() as usize).min(items.len());
    let train_idx: std::collections::HashSet<usize> = order[..cut].iter().copied().collect();
    let mut train = Vec::with_capacity(cut);
    let mut test = Vec::with_capacity(items.len() - cut);
    for (i, item) in items.into_iter().enumerate() {
        if train_idx.contains(&i) {
            train.push(item);
        } else {
            test.push(item);
        }
    }
    (train, test)
}

fn train_snow(
    task: &TaskDef,
    train: &[Example],
    cfg: &ExperimentConfig,
) -> Result<(SnowNetwork, Vec<u64>), HarnessError> {
    let mut net = SnowNetwork::new(
        task.clone(),
        SnowConfig {
            winnow: cfg.winnow,
            ..SnowConfig::default()
        },
    )?;
    let mistakes = net.train_corpus(train, cfg.epochs, Some(cfg.seed))?;
    net.freeze();
    Ok((net, mistakes))
}

fn predictions<P: Fn(&Example) -> ClassId>(pred: P, test: &[Example]) -> Vec<ClassId> {
    test.iter().map(pred).collect()
}

fn binary_predictions<P: Fn(&Example) -> bool>(pred: P, test: &[Example]) -> Vec<ClassId> {
    predictions(|e| ClassId::from_bool(pred(e)), test)
}

/// Accuracy restricted to each gold class with test presence.
fn per_class_rows(
    preds: &[ClassId],
    test: &[Example],
    task: &TaskDef,
) -> Result<Vec<GroupResult>, HarnessError> {
    let mut rows = Vec::new();
    for class in task.class_ids() {
        let idx: Vec<usize> = test
            .iter()
            .enumerate()
            .filter(|(_, e)| e.label() == Some(class))
            .map(|(i, _)| i)
            .collect();
        if idx.is_empty() {
            continue;
        }
        let sub_preds: Vec<ClassId> = idx.iter().map(|&i| preds[i]).collect();
        let sub_test: Vec<Example> = idx.iter().map(|&i| test[i].clone()).collect();
        rows.push(GroupResult {
            name: task.class_name(class).unwrap_or("?").to_string(),
            accuracy: perf_precomputed(&sub_preds, &sub_test)?,
            n_test: idx.len(),
        });
    }
    Ok(rows)
}

fn load_dl(cfg: &ExperimentConfig) -> Result<DecisionList, HarnessError> {
    let path = required(&cfg.model, "--model")?;
    load_model(&path)?.into_dl()
}

fn save_with_lexicon(
    out: &Path,
    model: &Model,
    space: Option<&FeatureSpace>,
) -> Result<(), HarnessError> {
    save_model(out, model)?;
    if let Some(space) = space {
        let mut lex_path = out.as_os_str().to_owned();
        lex_path.push(".lex");
        let lex_path = PathBuf::from(lex_path);
        let file = std::fs::File::create(&lex_path).map_err(|e| io_err(&lex_path, e))?;
        space
            .write_lexicon(std::io::BufWriter::new(file))
            .map_err(|e| io_err(&lex_path, e))?;
    }
    Ok(())
}

/// What one method produced on one (train, test) pair.
struct MethodOutcome {
    preds: Vec<ClassId>,
    node_mistakes: Option<Vec<u64>>,
    model: Option<Model>,
}

/// Runs the configured method on an encoded binary-or-multiclass task.
fn run_method(
    cfg: &ExperimentConfig,
    task: &TaskDef,
    train: &[Example],
    test: &[Example],
    space: Option<&FeatureSpace>,
    majority: ClassId,
) -> Result<MethodOutcome, HarnessError> {
    let outcome = match cfg.method {
        Method::Snow => {
            let (net, mistakes) = train_snow(task, train, cfg)?;
            MethodOutcome {
                preds: predictions(|e| net.predict(e).label, test),
                node_mistakes: Some(mistakes),
                model: Some(Model::Snow(net)),
            }
        }
        Method::Nb => {
            let n_features = match (space, cfg.task) {
                (Some(space), _) => space.len(),
                (None, Task::Synthetic) => cfg.synth.n_features as usize,
                (None, _) => unreachable!("file tasks carry a space"),
            };
            let nb = NbParams::fit(train, n_features, cfg.smoothing)?;
            MethodOutcome {
                preds: binary_predictions(|e| nb.predict(e), test),
                node_mistakes: None,
                model: Some(Model::Nb(nb)),
            }
        }
        Method::Bo => {
            let space = space.expect("validate() restricts bo to lattice tasks");
            let orders = OrderIndex::from_space(space);
            let bo = BackoffModel::fit(train, &orders, PPA_MAX_ORDER)?;
            MethodOutcome {
                preds: binary_predictions(|e| bo.predict(e).label, test),
                node_mistakes: None,
                model: Some(Model::Bo(bo)),
            }
        }
        Method::Dl => {
            let dl = load_dl(cfg)?;
            MethodOutcome {
                preds: binary_predictions(|e| dl.evaluate(e).as_bool(), test),
                node_mistakes: None,
                model: None,
            }
        }
        Method::Baseline => MethodOutcome {
            preds: vec![majority; test.len()],
            node_mistakes: None,
            model: None,
        },
    };
    Ok(outcome)
}

fn finish(
    cfg: &ExperimentConfig,
    task: &TaskDef,
    outcome: MethodOutcome,
    test: &[Example],
    baseline: f64,
    n_train: usize,
    space: Option<&FeatureSpace>,
) -> Result<Report, HarnessError> {
    if let (Some(out), Some(model)) = (&cfg.out, &outcome.model) {
        save_with_lexicon(out, model, space)?;
    }
    Ok(Report {
        task: cfg.task,
        method: cfg.method.as_str().to_string(),
        accuracy: perf_precomputed(&outcome.preds, test)?,
        baseline_accuracy: Some(baseline),
        n_train,
        n_test: test.len(),
        per_class: per_class_rows(&outcome.preds, test, task)?,
        groups: Vec::new(),
        node_mistakes: outcome.node_mistakes,
        wall_ms: 0,
    })
}

pub(super) fn run_synthetic(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    if cfg.method == Method::Nb && cfg.synth.classes != 2 {
        return Err(HarnessError::Config(
            "naive Bayes here is binary; set classes=2 for the synthetic task".into(),
        ));
    }
    let (task, train, test) = synthetic::generate(&cfg.synth, cfg.seed)?;
    let majority = majority_class(&train)?;
    let baseline = perf_precomputed(&vec![majority; test.len()], &test)?;
    let outcome = run_method(cfg, &task, &train, &test, None, majority)?;
    finish(cfg, &task, outcome, &test, baseline, train.len(), None)
}

pub(super) fn run_ppa(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let train_path = required(&cfg.train, "--train")?;
    let records = load_ppa(&train_path).map_err(|e| with_path(&train_path, e))?;
    let (train_records, test_records) = match &cfg.test {
        Some(test) => {
            let test_path = resolve_data_path(test);
            let test_records = load_ppa(&test_path).map_err(|e| with_path(&test_path, e))?;
            (records, test_records)
        }
        None => split_vec(records, cfg.split.expect("validated"), cfg.seed),
    };

    // A supplied decision list was built against a saved lexicon; every
    // other method builds a fresh space from its own training data.
    let (mut space, train_examples) = if cfg.method == Method::Dl {
        let lex_path = required(&cfg.lexicon, "--lexicon")?;
        let file = std::fs::File::open(&lex_path).map_err(|e| io_err(&lex_path, e))?;
        let mut space = FeatureSpace::read_lexicon(std::io::BufReader::new(file))?;
        let train_examples = train_records
            .iter()
            .map(|r| ppa_features(r, &mut space, false))
            .collect::<Result<Vec<_>, _>>()?;
        (space, train_examples)
    } else {
        let mut space = FeatureSpace::new();
        let train_examples = train_records
            .iter()
            .map(|r| ppa_features(r, &mut space, true))
            .collect::<Result<Vec<_>, _>>()?;
        space.freeze();
        (space, train_examples)
    };
    let test_examples = test_records
        .iter()
        .map(|r| ppa_features(r, &mut space, false))
        .collect::<Result<Vec<_>, _>>()?;

    let task = TaskDef::binary("attachment", "n", "v")?;
    let majority = majority_class(&train_examples)?;
    let baseline = perf_precomputed(&vec![majority; test_examples.len()], &test_examples)?;
    let outcome = run_method(
        cfg,
        &task,
        &train_examples,
        &test_examples,
        Some(&space),
        majority,
    )?;
    finish(
        cfg,
        &task,
        outcome,
        &test_examples,
        baseline,
        train_examples.len(),
        Some(&space),
    )
}

pub(super) fn run_spell(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let sets_path = required(&cfg.sets, "--sets")?;
    let sets = load_confusion_sets(&sets_path).map_err(|e| with_path(&sets_path, e))?;
    let scfg = SpellingConfig {
        window: cfg.window_k,
        max_colloc_len: cfg.colloc_l,
        ..SpellingConfig::default()
    };
    let train_path = required(&cfg.train, "--train")?;
    let train_file = std::fs::File::open(&train_path).map_err(|e| io_err(&train_path, e))?;
    let scanned = scan_spelling(std::io::BufReader::new(train_file), &sets, &scfg)
        .map_err(|e| with_path(&train_path, e))?;

    // Occurrence lists per set, split before anything is encoded.
    let (train_occ, test_occ) = match &cfg.test {
        Some(test) => {
            let test_path = resolve_data_path(test);
            let test_file = std::fs::File::open(&test_path).map_err(|e| io_err(&test_path, e))?;
            let test_scanned = scan_spelling(std::io::BufReader::new(test_file), &sets, &scfg)
                .map_err(|e| with_path(&test_path, e))?;
            (scanned, test_scanned)
        }
        None => {
            let ratio = cfg.split.expect("validated");
            let mut train = Vec::new();
            let mut test = Vec::new();
            for (i, occ) in scanned.into_iter().enumerate() {
                let (tr, te) = split_vec(occ, ratio, cfg.seed.wrapping_add(i as u64));
                train.push(tr);
                test.push(te);
            }
            (train, test)
        }
    };

    let mut space = FeatureSpace::new();
    let train_examples: Vec<Vec<Example>> = train_occ
        .iter()
        .map(|occs| occs.iter().map(|o| o.encode(&mut space, true)).collect())
        .collect::<Result<_, _>>()?;
    space.freeze();
    let test_examples: Vec<Vec<Example>> = test_occ
        .iter()
        .map(|occs| occs.iter().map(|o| o.encode(&mut space, false)).collect())
        .collect::<Result<_, _>>()?;

    let mut groups = Vec::new();
    let mut weighted_acc = 0.0;
    let mut weighted_base = 0.0;
    let mut n_train = 0;
    let mut n_test = 0;
    let mut single_model = None;
    for ((set, train), test) in sets.iter().zip(&train_examples).zip(&test_examples) {
        n_train += train.len();
        if train.is_empty() || test.is_empty() {
            continue;
        }
        let majority = majority_class(train)?;
        let base = perf_precomputed(&vec![majority; test.len()], test)?;
        let task = TaskDef::new("spelling", set.words().to_vec())?;
        if cfg.method == Method::Nb && set.words().len() != 2 {
            return Err(HarnessError::Config(format!(
                "naive Bayes here is binary; confusion set {} has {} members",
                set.name(),
                set.words().len()
            )));
        }
        if matches!(cfg.method, Method::Bo | Method::Dl) {
            return Err(HarnessError::Config(format!(
                "method {} does not apply to the spelling task",
                cfg.method
            )));
        }
        let outcome = run_method(cfg, &task, train, test, Some(&space), majority)?;
        let accuracy = perf_precomputed(&outcome.preds, test)?;
        single_model = outcome.model;
        weighted_acc += accuracy * test.len() as f64;
        weighted_base += base * test.len() as f64;
        n_test += test.len();
        groups.push(GroupResult {
            name: set.name(),
            accuracy,
            n_test: test.len(),
        });
    }
    if n_test == 0 {
        return Err(HarnessError::Config(
            "no confusion set ended up with both training and test occurrences".into(),
        ));
    }
    if let Some(out) = &cfg.out {
        if sets.len() == 1 {
            if let Some(model) = &single_model {
                save_with_lexicon(out, model, Some(&space))?;
            }
        } else {
            return Err(HarnessError::Config(
                "--out saves one model; run a single confusion set".into(),
            ));
        }
    }
    Ok(Report {
        task: cfg.task,
        method: cfg.method.as_str().to_string(),
        accuracy: weighted_acc / n_test as f64,
        baseline_accuracy: Some(weighted_base / n_test as f64),
        n_train,
        n_test,
        per_class: Vec::new(),
        groups,
        node_mistakes: None,
        wall_ms: 0,
    })
}

/// Featurizes every position of a corpus against initial tags.
fn pos_examples(
    corpus: &crate::tasks::PosCorpus,
    tagger: &InitialTagger,
    task: &TaskDef,
    cfg: &ExperimentConfig,
    space: &mut FeatureSpace,
    register: bool,
) -> Result<(Vec<Example>, Vec<ClassId>), HarnessError> {
    let mut examples = Vec::new();
    let mut baseline_preds = Vec::new();
    for sentence in &corpus.sentences {
        let words: Vec<String> = sentence.iter().map(|(w, _)| w.clone()).collect();
        let initial = tagger.tag_sentence(&words);
        for (i, (word, gold)) in sentence.iter().enumerate() {
            let label = task.class_id(gold).unwrap_or(UNSEEN_CLASS);
            let e = crate::tasks::pos_features(
                &words,
                &initial,
                i,
                cfg.window_k,
                cfg.colloc_l,
                space,
                register,
            )?
            .with_label(label);
            examples.push(e);
            baseline_preds.push(task.class_id(tagger.tag(word)).unwrap_or(UNSEEN_CLASS));
        }
    }
    Ok((examples, baseline_preds))
}

pub(super) fn run_pos(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let train_path = required(&cfg.train, "--train")?;
    let corpus = load_pos(&train_path).map_err(|e| with_path(&train_path, e))?;
    let (train_corpus, test_corpus) = match &cfg.test {
        Some(test) => {
            let test_path = resolve_data_path(test);
            let test_corpus = load_pos(&test_path).map_err(|e| with_path(&test_path, e))?;
            (corpus, test_corpus)
        }
        None => {
            let (tr, te) = split_vec(corpus.sentences, cfg.split.expect("validated"), cfg.seed);
            (
                crate::tasks::PosCorpus::from_sentences(tr),
                crate::tasks::PosCorpus::from_sentences(te),
            )
        }
    };
    let tagger = InitialTagger::fit(&train_corpus)?;
    let task = train_corpus.task_def()?;

    let mut space = FeatureSpace::new();
    let (train_examples, _) = pos_examples(&train_corpus, &tagger, &task, cfg, &mut space, true)?;
    space.freeze();
    let (test_examples, baseline_preds) =
        pos_examples(&test_corpus, &tagger, &task, cfg, &mut space, false)?;

    let baseline = perf_precomputed(&baseline_preds, &test_examples)?;
    let outcome = match cfg.method {
        Method::Snow => {
            let (net, mistakes) = train_snow(&task, &train_examples, cfg)?;
            MethodOutcome {
                preds: predictions(|e| net.predict(e).label, &test_examples),
                node_mistakes: Some(mistakes),
                model: Some(Model::Snow(net)),
            }
        }
        Method::Baseline => MethodOutcome {
            preds: baseline_preds,
            node_mistakes: None,
            model: None,
        },
        other => {
            return Err(HarnessError::Config(format!(
                "method {other} does not apply to multi-class tagging (use snow or baseline)"
            )));
        }
    };
    finish(
        cfg,
        &task,
        outcome,
        &test_examples,
        baseline,
        train_examples.len(),
        Some(&space),
    )
}

/// Evaluates a saved model; the report's method column carries the model
/// kind from the file header.
pub(super) fn evaluate_saved(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let model_path = required(&cfg.model, "--model")?;
    let model = load_model(&model_path)?;
    let kind = model.kind().to_string();

    // The data to score on, plus an optional baseline where training data
    // is around to fit one.
    let (task, test_examples, baseline, n_train) = match cfg.task {
        Task::Synthetic => {
            let (task, train, test) = synthetic::generate(&cfg.synth, cfg.seed)?;
            let majority = majority_class(&train)?;
            let base = perf_precomputed(&vec![majority; test.len()], &test)?;
            (task, test, Some(base), train.len())
        }
        Task::Ppa => {
            let test_path = required(&cfg.test, "--test")?;
            let records = load_ppa(&test_path).map_err(|e| with_path(&test_path, e))?;
            let mut space = load_eval_lexicon(cfg, &model_path)?;
            let examples = records
                .iter()
                .map(|r| ppa_features(r, &mut space, false))
                .collect::<Result<Vec<_>, _>>()?;
            (TaskDef::binary("attachment", "n", "v")?, examples, None, 0)
        }
        Task::Spell | Task::Pos => {
            return Err(HarnessError::Config(format!(
                "eval supports ppa and synthetic test data; re-run training for {}",
                cfg.task
            )));
        }
    };

    let preds = match &model {
        Model::Snow(net) => predictions(|e| net.predict(e).label, &test_examples),
        Model::Nb(nb) => binary_predictions(|e| nb.predict(e), &test_examples),
        Model::Bo(bo) => binary_predictions(|e| bo.predict(e).label, &test_examples),
        Model::Dl(dl) => binary_predictions(|e| dl.evaluate(e).as_bool(), &test_examples),
        Model::LinSep(sep) => binary_predictions(|e| sep.predict(e), &test_examples),
        Model::Winnow(w) => binary_predictions(|e| w.predict(e), &test_examples),
    };
    Ok(Report {
        task: cfg.task,
        method: kind,
        accuracy: perf_precomputed(&preds, &test_examples)?,
        baseline_accuracy: baseline,
        n_train,
        n_test: test_examples.len(),
        per_class: per_class_rows(&preds, &test_examples, &task)?,
        groups: Vec::new(),
        node_mistakes: None,
        wall_ms: 0,
    })
}

fn load_eval_lexicon(
    cfg: &ExperimentConfig,
    model_path: &Path,
) -> Result<FeatureSpace, HarnessError> {
    let lex_path = match &cfg.lexicon {
        Some(p) => resolve_data_path(p),
        None => {
            let mut p = model_path.as_os_str().to_owned();
            p.push(".lex");
            PathBuf::from(p)
        }
    };
    let file = std::fs::File::open(&lex_path).map_err(|e| io_err(&lex_path, e))?;
    Ok(FeatureSpace::read_lexicon(std::io::BufReader::new(file))?)
}
