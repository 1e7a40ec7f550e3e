//! End-to-end checks of the command-line surface: subcommands, flags,
//! output formats and exit codes (0 success, 2 data error, 3 config error).

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ambiguity-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_ppa_fixture(dir: &Path) -> std::path::PathBuf {
    let mut text = String::new();
    let preps = ["with", "of", "in", "on"];
    for i in 0..200 {
        let p = preps[i % 4];
        let label = if i % 4 < 2 { "v" } else { "n" };
        text.push_str(&format!("buy{} noun{} {} thing{} {}\n", i % 7, i % 5, p, i % 3, label));
    }
    let path = dir.join("records.ppa");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn train_synthetic_prints_report_and_machine_line() {
    let out = run(&[
        "train", "--task", "synthetic", "--method", "snow", "--epochs", "2", "--seed", "3",
        "--train-size", "400", "--test-size", "100",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("task       synthetic"));
    assert!(text.contains("accuracy"));
    let machine = text
        .lines()
        .find(|l| l.starts_with("result "))
        .expect("machine line present");
    let fields: Vec<&str> = machine.split_whitespace().collect();
    assert_eq!(fields[1], "snow");
    assert_eq!(fields[2], "synthetic");
    assert_eq!(fields[4], "100");
}

#[test]
fn same_seed_gives_byte_identical_reports() {
    let args = [
        "train", "--task", "synthetic", "--method", "snow", "--seed", "11",
        "--train-size", "300", "--test-size", "80",
    ];
    let a = run(&args);
    let b = run(&args);
    // Only the wall-time line may differ.
    let strip = |o: &Output| {
        stdout(o)
            .lines()
            .filter(|l| !l.starts_with("time"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn train_save_then_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_ppa_fixture(dir.path());
    let model = dir.path().join("model.snow");
    let out = run(&[
        "train", "--task", "ppa", "--method", "snow",
        "--train", data.to_str().unwrap(),
        "--split", "0.8", "--seed", "4", "--epochs", "3",
        "--out", model.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    assert!(model.exists());
    assert!(dir.path().join("model.snow.lex").exists());

    let eval = run(&[
        "eval", "--task", "ppa",
        "--model", model.to_str().unwrap(),
        "--test", data.to_str().unwrap(),
    ]);
    assert!(eval.status.success(), "{eval:?}");
    let text = stdout(&eval);
    let machine = text.lines().find(|l| l.starts_with("result ")).unwrap();
    assert!(machine.starts_with("result snow ppa "));
}

#[test]
fn compare_renders_one_row_per_method() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_ppa_fixture(dir.path());
    let out = run(&[
        "compare", "--methods", "baseline,nb,bo,snow",
        "--task", "ppa", "--train", data.to_str().unwrap(),
        "--split", "0.8", "--seed", "2",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    for method in ["baseline", "nb", "bo", "snow"] {
        assert!(
            text.lines().any(|l| l.starts_with(method)),
            "missing row for {method} in:\n{text}"
        );
    }
    assert_eq!(text.matches("result ").count(), 4);
}

#[test]
fn oracle_and_shatter_report_their_formats() {
    let out = run(&["oracle", "--check", "dl-export", "--draws", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("check dl-export"));
    let line = text.lines().find(|l| l.starts_with("agreement ")).unwrap();
    let fields: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(fields.len(), 3);
    assert_eq!(fields[2], "0");

    for family in ["linsep", "p1dl"] {
        let out = run(&["shatter", "--family", family]);
        assert!(out.status.success());
        assert!(stdout(&out).contains("shatter 8/8 shattered"));
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        "task=synthetic\nmethod=baseline\nseed=9\ntrain_size=200\ntest_size=50\n",
    )
    .unwrap();
    let out = run(&["train", "--config", conf.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    assert!(stdout(&out).contains("result baseline synthetic"));

    // CLI flag wins over the file.
    let out = run(&[
        "train", "--config", conf.to_str().unwrap(), "--method", "snow",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("result snow synthetic"));

    std::fs::write(&conf, "nonsense_key=1\n").unwrap();
    let out = run(&["train", "--config", conf.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_codes_distinguish_config_and_data_errors() {
    // Missing required flag combination: config error.
    let out = run(&["train", "--task", "ppa"]);
    assert_eq!(out.status.code(), Some(3));
    // Unknown method: config error.
    let out = run(&["train", "--task", "synthetic", "--method", "svm"]);
    assert_eq!(out.status.code(), Some(3));
    // Unreadable data file: data error.
    let out = run(&[
        "train", "--task", "ppa", "--train", "/no/such/file", "--split", "0.8",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Malformed data line: data error naming the line.
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ppa");
    std::fs::write(&bad, "buy car with money v\nshort line\n").unwrap();
    let out = run(&[
        "train", "--task", "ppa", "--train", bad.to_str().unwrap(), "--split", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn data_root_env_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    write_ppa_fixture(dir.path());
    let out = bin()
        .args([
            "train", "--task", "ppa", "--method", "baseline",
            "--train", "records.ppa", "--split", "0.8",
        ])
        .env("AMBIGUITY_LAB_DATA", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn eval_rejects_model_kind_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_ppa_fixture(dir.path());
    let model = dir.path().join("model.nb");
    let out = run(&[
        "train", "--task", "ppa", "--method", "nb",
        "--train", data.to_str().unwrap(), "--split", "0.8",
        "--out", model.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    // Using the nb model where a decision list is required.
    let out = run(&[
        "train", "--task", "ppa", "--method", "dl",
        "--train", data.to_str().unwrap(), "--split", "0.8",
        "--model", model.to_str().unwrap(),
        "--lexicon", dir.path().join("model.nb.lex").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected dl, found nb"));
}
