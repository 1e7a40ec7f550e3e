//! Command-line front end: train, evaluate and compare disambiguation
//! learners, and run the exactness oracles and shattering demos.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ambiguity_lab::feature_space::{Example, FeatureId};
use ambiguity_lab::harness::{
    self, compare, evaluate_saved, oracle_suite, parse_config_file, run_experiment,
    ExperimentConfig, HarnessError, Method, Task,
};
use ambiguity_lab::oracle::{all_p1dls, grid_separators, shatter_check};

#[derive(Parser)]
#[command(
    name = "ambiguity-lab",
    version,
    about = "Sparse Winnow networks and classical baselines for lexical disambiguation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a method on a task and report its test accuracy
    Train(RunArgs),
    /// Evaluate a saved model file on a test set
    Eval(RunArgs),
    /// Run several methods on one task and split, side by side
    Compare(CompareArgs),
    /// Exhaustive agreement sweeps between native predictors and their
    /// linear exports
    Oracle(OracleArgs),
    /// Shattering demonstrations for tiny hypothesis classes
    Shatter(ShatterArgs),
}

#[derive(Args, Default, Clone)]
struct RunArgs {
    /// key=value file supplying defaults for the flags below
    #[arg(long)]
    config: Option<PathBuf>,
    /// spell | ppa | pos | synthetic
    #[arg(long)]
    task: Option<String>,
    /// snow | nb | bo | dl | baseline
    #[arg(long)]
    method: Option<String>,
    /// Training data (resolved against $AMBIGUITY_LAB_DATA when relative)
    #[arg(long)]
    train: Option<PathBuf>,
    /// Test data; omit to carve a test set out of the training data
    #[arg(long)]
    test: Option<PathBuf>,
    /// Confusion-set file for the spelling task
    #[arg(long)]
    sets: Option<PathBuf>,
    /// Saved model to evaluate (dl is always loaded from here)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Lexicon file mapping feature ids for a loaded model
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Train fraction in (0,1) when --test is omitted
    #[arg(long)]
    split: Option<f64>,
    /// Master seed; fixes splits, shuffles and synthetic data
    #[arg(long)]
    seed: Option<u64>,
    /// Winnow promotion factor
    #[arg(long)]
    alpha: Option<f64>,
    /// Winnow demotion factor
    #[arg(long)]
    beta: Option<f64>,
    /// Winnow threshold
    #[arg(long)]
    theta: Option<f64>,
    /// Training passes over the data
    #[arg(long)]
    epochs: Option<usize>,
    /// Context-word window radius
    #[arg(long)]
    k: Option<usize>,
    /// Maximum collocation length
    #[arg(long)]
    l: Option<usize>,
    /// Add-constant smoothing for naive Bayes
    #[arg(long)]
    smoothing: Option<f64>,
    /// Save the trained model here (plus a `.lex` lexicon sidecar)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Synthetic task: number of classes
    #[arg(long)]
    classes: Option<u32>,
    /// Synthetic task: total feature count
    #[arg(long)]
    features: Option<u32>,
    /// Synthetic task: relevant features per class
    #[arg(long)]
    relevant: Option<u32>,
    /// Synthetic task: per-feature activation probability
    #[arg(long)]
    p_active: Option<f64>,
    /// Synthetic task: training examples
    #[arg(long)]
    train_size: Option<usize>,
    /// Synthetic task: test examples
    #[arg(long)]
    test_size: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    /// Comma-separated method list, e.g. baseline,nb,snow
    #[arg(long)]
    methods: String,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct OracleArgs {
    /// nb-export | dl-export | bo-export | all
    #[arg(long, default_value = "all")]
    check: String,
    /// Random model draws per check
    #[arg(long, default_value_t = 50)]
    draws: u64,
    /// Feature universe for the naive Bayes sweep (max 24)
    #[arg(long, default_value_t = 10)]
    features: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ShatterArgs {
    /// linsep | p1dl
    #[arg(long, default_value = "linsep")]
    family: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Train(args) => {
            let cfg = build_config(&args)?;
            let report = run_experiment(&cfg)?;
            print!("{}", report.render());
            println!("{}", report.machine_line());
        }
        Command::Eval(args) => {
            let cfg = build_config(&args)?;
            let report = evaluate_saved(&cfg)?;
            print!("{}", report.render());
            println!("{}", report.machine_line());
        }
        Command::Compare(args) => {
            let base = build_config(&args.run)?;
            let cfgs: Vec<ExperimentConfig> = args
                .methods
                .split(',')
                .map(|m| {
                    Ok(ExperimentConfig {
                        method: Method::parse(m.trim())?,
                        ..base.clone()
                    })
                })
                .collect::<Result<_, HarnessError>>()?;
            let table = compare(&cfgs)?;
            print!("{}", table.render());
            println!("{}", table.machine_lines());
        }
        Command::Oracle(args) => run_oracle(&args)?,
        Command::Shatter(args) => run_shatter(&args)?,
    }
    Ok(())
}

fn run_oracle(args: &OracleArgs) -> Result<(), HarnessError> {
    let run_nb = || -> Result<(), HarnessError> {
        let report = oracle_suite::nb_export_sweep(args.features, args.draws, args.seed)?;
        println!("check nb-export");
        println!("{}", report.render());
        Ok(())
    };
    let run_dl = || -> Result<(), HarnessError> {
        let report = oracle_suite::dl_export_sweep(16, 16, args.draws, args.seed)?;
        println!("check dl-export");
        println!("{}", report.render());
        Ok(())
    };
    let run_bo = || -> Result<(), HarnessError> {
        let report = oracle_suite::bo_export_sweep(args.draws, args.seed)?;
        println!("check bo-export");
        println!("{}", report.render());
        Ok(())
    };
    match args.check.as_str() {
        "nb-export" => run_nb(),
        "dl-export" => run_dl(),
        "bo-export" => run_bo(),
        "all" => {
            run_nb()?;
            run_dl()?;
            run_bo()
        }
        other => Err(HarnessError::Config(format!(
            "unknown check {other:?}; expected nb-export, dl-export, bo-export or all"
        ))),
    }
}

fn run_shatter(args: &ShatterArgs) -> Result<(), HarnessError> {
    let ex = |active: &[u32]| -> Example {
        Example::new(active.iter().map(|&i| FeatureId(i)).collect(), None)
    };
    let points = vec![ex(&[]), ex(&[0]), ex(&[1])];
    let report = match args.family.as_str() {
        "linsep" => {
            let grid = [-2.0, -1.0, 0.0, 1.0, 2.0];
            let hyps = grid_separators(2, &grid)
                .into_iter()
                .map(|sep| move |e: &Example| sep.predict(e));
            shatter_check(hyps, &points, 1_000_000)?
        }
        "p1dl" => {
            let hyps = all_p1dls(2, 2)
                .into_iter()
                .map(|dl| move |e: &Example| dl.evaluate(e).as_bool());
            shatter_check(hyps, &points, 1_000_000)?
        }
        other => {
            return Err(HarnessError::Config(format!(
                "unknown family {other:?}; expected linsep or p1dl"
            )));
        }
    };
    println!("family {}", args.family);
    println!("{}", report.render());
    Ok(())
}

/// CLI flags override config-file entries, which override the defaults.
fn build_config(args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let file: BTreeMap<String, String> = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };
    let known = [
        "task", "method", "train", "test", "sets", "model", "lexicon", "split", "seed", "alpha",
        "beta", "theta", "epochs", "k", "l", "smoothing", "out", "classes", "features",
        "relevant", "p_active", "train_size", "test_size",
    ];
    for key in file.keys() {
        if !known.contains(&key.as_str()) {
            return Err(HarnessError::Config(format!(
                "unknown config key {key:?}"
            )));
        }
    }
    let text = |cli: &Option<String>, key: &str| -> Option<String> {
        cli.clone().or_else(|| file.get(key).cloned())
    };
    let path = |cli: &Option<PathBuf>, key: &str| -> Option<PathBuf> {
        cli.clone().or_else(|| file.get(key).map(PathBuf::from))
    };
    fn num<T: std::str::FromStr>(
        cli: &Option<T>,
        file: &BTreeMap<String, String>,
        key: &str,
    ) -> Result<Option<T>, HarnessError>
    where
        T: Copy,
    {
        if let Some(v) = cli {
            return Ok(Some(*v));
        }
        match file.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| HarnessError::Config(format!("bad value for {key}: {raw:?}"))),
            None => Ok(None),
        }
    }

    let mut cfg = ExperimentConfig::default();
    if let Some(t) = text(&args.task, "task") {
        cfg.task = Task::parse(&t)?;
    }
    if let Some(m) = text(&args.method, "method") {
        cfg.method = Method::parse(&m)?;
    }
    cfg.train = path(&args.train, "train");
    cfg.test = path(&args.test, "test");
    cfg.sets = path(&args.sets, "sets");
    cfg.model = path(&args.model, "model");
    cfg.lexicon = path(&args.lexicon, "lexicon");
    cfg.out = path(&args.out, "out");
    cfg.split = num(&args.split, &file, "split")?;
    if let Some(seed) = num(&args.seed, &file, "seed")? {
        cfg.seed = seed;
    }
    if let Some(alpha) = num(&args.alpha, &file, "alpha")? {
        cfg.winnow.alpha = alpha;
    }
    if let Some(beta) = num(&args.beta, &file, "beta")? {
        cfg.winnow.beta = beta;
    }
    if let Some(theta) = num(&args.theta, &file, "theta")? {
        cfg.winnow.theta = theta;
    }
    if let Some(epochs) = num(&args.epochs, &file, "epochs")? {
        cfg.epochs = epochs;
    }
    if let Some(k) = num(&args.k, &file, "k")? {
        cfg.window_k = k;
    }
    if let Some(l) = num(&args.l, &file, "l")? {
        cfg.colloc_l = l;
    }
    if let Some(s) = num(&args.smoothing, &file, "smoothing")? {
        cfg.smoothing = s;
    }
    if let Some(c) = num(&args.classes, &file, "classes")? {
        cfg.synth.classes = c;
    }
    if let Some(n) = num(&args.features, &file, "features")? {
        cfg.synth.n_features = n;
    }
    if let Some(r) = num(&args.relevant, &file, "relevant")? {
        cfg.synth.relevant_per_class = r;
    }
    if let Some(p) = num(&args.p_active, &file, "p_active")? {
        cfg.synth.p_active = p;
    }
    if let Some(n) = num(&args.train_size, &file, "train_size")? {
        cfg.synth.train = n;
    }
    if let Some(n) = num(&args.test_size, &file, "test_size")? {
        cfg.synth.test = n;
    }
    let _ = harness::DATA_ROOT_ENV; // paths resolve lazily in the runners
    Ok(cfg)
}
