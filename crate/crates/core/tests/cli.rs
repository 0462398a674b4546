use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tokeval::io::{load_tokenizer, save_tokenizer};
use tokeval::Tokenizer;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["tokeval"];
    full.extend_from_slice(args);
    let code = tokeval::cli::run(full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let toy = Tokenizer::from_ordered(
            "toy",
            false,
            &["a", "b", "c", "ab", "abc"],
            &[("a", "b"), ("ab", "c")],
        )
        .unwrap();
        save_tokenizer(&toy, dir.path().join("toy.json")).unwrap();
        fs::write(dir.path().join("en_formal.txt"), "abc abc\n").unwrap();
        fs::write(dir.path().join("xx.txt"), "ab\nac\n").unwrap();
        Fixture { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn evaluate_toy_corpus() {
    let f = Fixture::new();
    let (code, out, err) = run(&[
        "evaluate",
        "--tokenizer",
        p(&f.path("toy.json")),
        "--corpus",
        p(&f.path("en_formal.txt")),
        "--format",
        "json",
    ]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let row = &v["rows"][0];
    assert_eq!(row["language"], "en");
    assert_eq!(row["domain"], "formal");
    assert_eq!(row["metrics"][0]["metric"], "fertility");
    assert_eq!(row["metrics"][0]["value"], 1.0);
    assert_eq!(row["metrics"][2]["value"], 3.0);
}

#[test]
fn evaluate_markdown_is_deterministic() {
    let f = Fixture::new();
    let (tok, corpus) = (f.path("toy.json"), f.path("en_formal.txt"));
    let args = ["evaluate", "--tokenizer", p(&tok), "--corpus", p(&corpus)];
    let (code, first, _) = run(&args);
    assert_eq!(code, 0);
    assert!(first.contains("| en | formal | 1.00 |"), "{first}");
    for _ in 0..3 {
        assert_eq!(run(&args).1, first);
    }
}

#[test]
fn evaluate_unknown_symbol_is_a_data_error() {
    let f = Fixture::new();
    fs::write(f.path("zz.txt"), "xyz\n").unwrap();
    let (code, _, err) = run(&[
        "evaluate",
        "--tokenizer",
        p(&f.path("toy.json")),
        "--corpus",
        p(&f.path("zz.txt")),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("error"), "{err}");
}

#[test]
fn usage_and_missing_files() {
    assert_eq!(run(&["evaluate", "--corpus", "x.txt"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--version"]).0, 0);
    let (code, _, err) = run(&[
        "evaluate",
        "--tokenizer",
        "/nonexistent/t.json",
        "--corpus",
        "x.txt",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("/nonexistent/t.json"), "{err}");
}

#[test]
fn strr_toy_wordlist() {
    let f = Fixture::new();
    let (code, out, err) = run(&[
        "strr",
        "--tokenizer",
        p(&f.path("toy.json")),
        "--wordlist",
        p(&f.path("xx.txt")),
        "--format",
        "json",
        "--failures",
    ]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"][0]["metrics"][0]["metric"], "strr_bare");
    assert_eq!(v["rows"][0]["metrics"][0]["value"], 50.0);
    assert_eq!(v["figure"]["groups"][0]["series"][0]["values"][0], 50.0);
    assert_eq!(v["failures"][0]["failures"][0]["word"], "ac");
}

#[test]
fn inject_refuses_in_place_and_writes_a_new_file() {
    let f = Fixture::new();
    let toy = p(&f.path("toy.json")).to_owned();
    let before = fs::read(&toy).unwrap();
    let (code, _, err) = run(&[
        "inject",
        "--tokenizer",
        &toy,
        "--wordlist",
        p(&f.path("xx.txt")),
        "--out-tokenizer",
        &toy,
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("in place"), "{err}");
    assert_eq!(fs::read(&toy).unwrap(), before);

    let out = f.path("toy+.json");
    let plan = f.path("plan.json");
    let (code, stdout, err) = run(&[
        "inject",
        "--tokenizer",
        &toy,
        "--wordlist",
        p(&f.path("xx.txt")),
        "--out-tokenizer",
        p(&out),
        "--plan-out",
        p(&plan),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("STRR 50.00 -> 100.00"), "{stdout}");
    assert!(stdout.contains("[ ] 1."), "{stdout}");
    let (updated, _) = load_tokenizer(&out).unwrap();
    assert_eq!(updated.encode_word("ac", false).unwrap().len(), 1);
    let plan: serde_json::Value = serde_json::from_str(&fs::read_to_string(plan).unwrap()).unwrap();
    assert_eq!(plan["injected"][0], "ac");
}

#[test]
fn train_first_merge() {
    let f = Fixture::new();
    fs::write(f.path("ab.txt"), "ab ab ab\n").unwrap();
    let out = f.path("trained.json");
    let (code, _, err) = run(&[
        "train",
        "--corpus",
        p(&f.path("ab.txt")),
        "--vocab-size",
        "257",
        "--out-tokenizer",
        p(&out),
    ]);
    assert_eq!(code, 0, "{err}");
    let (t, _) = load_tokenizer(&out).unwrap();
    assert_eq!(t.merges()[0], ("a".to_string(), "b".to_string()));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"a b\""), "{text}");

    let (code, _, err) = run(&[
        "train",
        "--corpus",
        p(&f.path("ab.txt")),
        "--vocab-size",
        "1000",
        "--out-tokenizer",
        p(&out),
    ]);
    assert_eq!(code, 0);
    assert!(err.contains("warning"), "{err}");
}

#[test]
fn coverage_full_target_lists_every_word() {
    let f = Fixture::new();
    fs::write(f.path("en_c.txt"), "the cat saw the dog and the bird\n").unwrap();
    let wl = f.path("core.txt");
    let (code, out, err) = run(&[
        "coverage",
        "--corpus",
        p(&f.path("en_c.txt")),
        "--target",
        "1.0",
        "--out-wordlist",
        p(&wl),
    ]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "rank,word,count,cumulative_coverage");
    assert_eq!(lines.len(), 1 + 6);
    assert!(lines[1].starts_with("1,the,3,"));
    assert!(lines[6].ends_with(",1"));
    assert_eq!(
        fs::read_to_string(wl)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .count(),
        6
    );

    assert_eq!(
        run(&[
            "coverage",
            "--corpus",
            p(&f.path("en_c.txt")),
            "--target",
            "0"
        ])
        .0,
        2
    );
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_tokeval");
    let status = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&status.stdout).contains("evaluate"));
    let status = Command::new(bin).args(["strr"]).output().unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn two_tokenizers_match_individual_runs() {
    let f = Fixture::new();
    let other = Tokenizer::from_ordered("flat", false, &["a", "b", "c"], &[]).unwrap();
    save_tokenizer(&other, f.path("flat.json")).unwrap();
    let (toy, flat, corpus) = (
        f.path("toy.json"),
        f.path("flat.json"),
        f.path("en_formal.txt"),
    );
    let csv = |toks: &[&Path]| {
        let mut args = vec!["evaluate", "--format", "csv", "--corpus", p(&corpus)];
        for t in toks {
            args.extend(["--tokenizer", p(t)]);
        }
        let (code, out, _) = run(&args);
        assert_eq!(code, 0);
        out.lines().skip(1).map(String::from).collect::<Vec<_>>()
    };
    let both = csv(&[&toy, &flat]);
    let mut separate = csv(&[&toy]);
    separate.extend(csv(&[&flat]));
    assert_eq!(both, separate);
}

#[test]
fn parallel_list_fully_in_vocab() {
    let f = Fixture::new();
    fs::write(f.path("en-xx.tsv"), "ab\tabc\nabc\tab\n").unwrap();
    let (code, out, err) = run(&[
        "strr",
        "--tokenizer",
        p(&f.path("toy.json")),
        "--wordlist",
        p(&f.path("en-xx.tsv")),
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0, "{err}");
    let values: Vec<&str> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap())
        .collect();
    assert_eq!(values, ["100", "100"]);
    assert!(
        out.contains("en,en-xx,toy") && out.contains("xx,en-xx,toy"),
        "{out}"
    );
}
