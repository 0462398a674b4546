//! The `tokeval` command line.
//!
//! Exit codes: 0 success, 1 data or processing error, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bpe::{Tokenizer, WordForm};
use crate::error::{Error, Result};
use crate::io::{
    load_corpus, load_tokenizer, load_wordlist, save_tokenizer, save_wordlist, Corpus,
    CorpusFormat, Domain, LoadReport, LoadedWordList, WordList,
};
use crate::metrics::{compare, strr, CorpusWordForm, Dataset, EvalPolicy, StrrReport};
use crate::pipeline::{core_vocabulary, inject, train_bpe, TrainOptions};
use crate::report::{
    strr_metric, ReportFormat, ReportRow, ReportTable, StrrFigure, StrrGroup, StrrSeries,
};
use crate::segment::{Dictionary, SegmentMode, SegmentPolicy};

#[derive(Debug, Parser)]
#[command(
    name = "tokeval",
    version,
    about = "Evaluate how BPE tokenizers allocate vocabulary across languages"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fertility, subword entropy and characters-per-token per (tokenizer, corpus).
    Evaluate(EvaluateArgs),
    /// Single-token retention rate per (tokenizer, wordlist language).
    Strr(StrrArgs),
    /// Add wordlist entries that are not single tokens as added tokens.
    Inject(InjectArgs),
    /// Word-frequency coverage curve and the core vocabulary reaching a target share.
    Coverage(CoverageArgs),
    /// Train a BPE tokenizer on corpora.
    Train(TrainArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SegmenterArg {
    Auto,
    Mode(SegmentMode),
}

impl std::str::FromStr for SegmenterArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "auto" {
            Ok(SegmenterArg::Auto)
        } else {
            s.parse().map(SegmenterArg::Mode)
        }
    }
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Corpus file: one document per line, or .jsonl records with a "text" field (repeatable).
    #[arg(long = "corpus", required = true, value_name = "PATH")]
    corpora: Vec<PathBuf>,
    /// Language tag; defaults to the file-name prefix (en_formal.txt -> en).
    #[arg(long)]
    language: Option<String>,
    /// formal, informal or unspecified; defaults to a formal/informal part of the file name.
    #[arg(long)]
    domain: Option<Domain>,
    /// lines or jsonl; defaults by file extension.
    #[arg(long, value_name = "FORMAT")]
    corpus_format: Option<CorpusFormat>,
    /// auto, unicode-words, whitespace, han-per-char or han-greedy-dict.
    #[arg(long, default_value = "auto")]
    segmenter: SegmenterArg,
    /// Wordlist used by han-greedy-dict (defaults to the bundled Chinese list).
    #[arg(long, value_name = "PATH")]
    dictionary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// md, csv or json.
    #[arg(long, default_value = "md")]
    format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Tokenizer file (repeatable).
    #[arg(long = "tokenizer", required = true, value_name = "PATH")]
    tokenizers: Vec<PathBuf>,
    #[command(flatten)]
    corpus: CorpusArgs,
    /// How corpus words are presented: auto, bare or contextual.
    #[arg(long, default_value = "auto")]
    word_form: CorpusWordForm,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PolicyArg {
    One(WordForm),
    All,
}

impl std::str::FromStr for PolicyArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "all-policies" || s == "all" {
            Ok(PolicyArg::All)
        } else {
            s.parse()
                .map(PolicyArg::One)
                .map_err(|e| format!("{e}, or all-policies"))
        }
    }
}

impl PolicyArg {
    fn forms(self) -> Vec<WordForm> {
        match self {
            PolicyArg::One(f) => vec![f],
            PolicyArg::All => WordForm::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
struct StrrArgs {
    /// Tokenizer file (repeatable).
    #[arg(long = "tokenizer", required = true, value_name = "PATH")]
    tokenizers: Vec<PathBuf>,
    /// One-column or two-column (tab-separated, parallel) wordlist (repeatable).
    #[arg(long = "wordlist", required = true, value_name = "PATH")]
    wordlists: Vec<PathBuf>,
    /// bare, space-prefixed, either or all-policies.
    #[arg(long, default_value = "bare")]
    word_policy: PolicyArg,
    /// Language tag for single-column lists (defaults to the file stem).
    #[arg(long)]
    language: Option<String>,
    /// Also list the words that are not single tokens.
    #[arg(long)]
    failures: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Side {
    Source,
    Target,
    Both,
}

#[derive(Debug, Args)]
struct InjectArgs {
    #[arg(long, value_name = "PATH")]
    tokenizer: PathBuf,
    /// Words to inject; for a parallel list see --side.
    #[arg(long, value_name = "PATH")]
    wordlist: PathBuf,
    /// Which column of a parallel wordlist to inject.
    #[arg(long, value_enum, default_value = "target")]
    side: Side,
    /// bare, space-prefixed or either.
    #[arg(long, default_value = "bare")]
    word_policy: WordForm,
    #[arg(long, value_name = "PATH")]
    out_tokenizer: PathBuf,
    /// Write the injection plan as JSON.
    #[arg(long, value_name = "PATH")]
    plan_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CoverageArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Share of word occurrences the core vocabulary must cover.
    #[arg(long, default_value_t = 0.85)]
    target: f64,
    /// List every ranked word, not only the core vocabulary.
    #[arg(long)]
    full_curve: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also write the core vocabulary as a one-column wordlist.
    #[arg(long, value_name = "PATH")]
    out_wordlist: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    vocab_size: usize,
    #[arg(long, value_name = "PATH")]
    out_tokenizer: PathBuf,
    /// Character-level base alphabet instead of the 256 byte symbols.
    #[arg(long)]
    char_level: bool,
    #[arg(long)]
    name: Option<String>,
    /// How training words are presented: auto, bare or contextual.
    #[arg(long, default_value = "auto")]
    word_form: CorpusWordForm,
}

/// Runs the CLI with `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
                return 0;
            }
            let _ = write!(stderr, "{text}");
            return 2;
        }
    };
    let mut ctx = Ctx { stdout, stderr };
    let result = match cli.command {
        Command::Evaluate(a) => cmd_evaluate(&mut ctx, a),
        Command::Strr(a) => cmd_strr(&mut ctx, a),
        Command::Inject(a) => cmd_inject(&mut ctx, a),
        Command::Coverage(a) => cmd_coverage(&mut ctx, a),
        Command::Train(a) => cmd_train(&mut ctx, a),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(ctx.stderr, "error: {msg}");
            2
        }
        Err(CliError::Data(e)) => {
            let _ = writeln!(ctx.stderr, "error: {e}");
            1
        }
    }
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

type CliResult = std::result::Result<i32, CliError>;

struct Ctx<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn warn(&mut self, report: &LoadReport) {
        for w in &report.warnings {
            let _ = writeln!(self.stderr, "warning: {w}");
        }
    }

    fn emit(&mut self, text: &str, out: Option<&Path>) -> Result<()> {
        match out {
            Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
                path: path.to_owned(),
                source: e,
            }),
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::Io {
                    path: "<stdout>".into(),
                    source: e,
                }),
        }
    }

    fn load_tokenizers(&mut self, paths: &[PathBuf]) -> Result<Vec<Tokenizer>> {
        paths
            .iter()
            .map(|p| {
                let (t, report) = load_tokenizer(p)?;
                self.warn(&report);
                Ok(t)
            })
            .collect()
    }

    fn load_corpora(&mut self, args: &CorpusArgs) -> Result<Vec<(Corpus, EvalPolicy)>> {
        args.corpora
            .iter()
            .map(|path| {
                let (stem_lang, stem_domain) = tags_from_stem(path);
                let language = args.language.clone().unwrap_or(stem_lang);
                let domain = args.domain.or(stem_domain).unwrap_or_default();
                let format = args
                    .corpus_format
                    .unwrap_or_else(|| CorpusFormat::from_path(path));
                let (corpus, report) = load_corpus(path, format, &language, domain)?;
                self.warn(&report);
                let segmentation = segment_policy(args, &corpus.language)?;
                Ok((corpus, EvalPolicy::new(segmentation)))
            })
            .collect()
    }
}

/// `en_formal.txt` → (`en`, formal); `zh.jsonl` → (`zh`, none).
fn tags_from_stem(path: &Path) -> (String, Option<Domain>) {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut parts = stem.split(['_', '-', '.']);
    let language = parts.next().unwrap_or_default().to_owned();
    let domain = parts.find_map(|p| match p {
        "formal" => Some(Domain::Formal),
        "informal" => Some(Domain::Informal),
        _ => None,
    });
    (language, domain)
}

fn segment_policy(args: &CorpusArgs, language: &str) -> Result<SegmentPolicy> {
    let dictionary = match &args.dictionary {
        Some(path) => {
            let (list, _) = load_wordlist(path)?;
            Some(Dictionary::new(
                list.sides().into_iter().flat_map(|w| w.words().to_vec()),
            ))
        }
        None => None,
    };
    Ok(match (args.segmenter, dictionary) {
        (SegmenterArg::Auto, None) => SegmentPolicy::default_for_language(language),
        (SegmenterArg::Auto, Some(d)) => {
            let mode = SegmentPolicy::default_for_language(language).mode;
            if mode == SegmentMode::HanGreedyDict {
                SegmentPolicy::with_dictionary(mode, d)
            } else {
                SegmentPolicy::new(mode)
            }
        }
        (SegmenterArg::Mode(SegmentMode::HanGreedyDict), None) => {
            SegmentPolicy::with_dictionary(SegmentMode::HanGreedyDict, Dictionary::default_han())
        }
        (SegmenterArg::Mode(mode), d) => SegmentPolicy {
            mode,
            dictionary: d,
        },
    })
}

fn cmd_evaluate(ctx: &mut Ctx<'_>, args: EvaluateArgs) -> CliResult {
    let tokenizers = ctx.load_tokenizers(&args.tokenizers)?;
    let corpora = ctx.load_corpora(&args.corpus)?;
    for (corpus, policy) in &corpora {
        if matches!(
            policy.segmentation.mode,
            SegmentMode::HanPerChar | SegmentMode::HanGreedyDict
        ) {
            let _ = writeln!(
                ctx.stderr,
                "note: {}: words counted with {} segmentation; Han-script figures depend on this choice",
                corpus.name, policy.segmentation.mode
            );
        }
    }
    let datasets: Vec<Dataset> = corpora
        .into_iter()
        .map(|(corpus, policy)| Dataset::Corpus {
            corpus,
            policy: policy.with_word_form(args.word_form),
        })
        .collect();
    let comparison = compare(&tokenizers, &datasets, &[])?;
    let table = ReportTable::from_comparison(&comparison);
    ctx.emit(
        &table.render(args.output.format),
        args.output.out.as_deref(),
    )?;
    if table.errors.is_empty() {
        Ok(0)
    } else {
        for e in &table.errors {
            let _ = writeln!(ctx.stderr, "error: {e}");
        }
        Ok(1)
    }
}

fn cmd_strr(ctx: &mut Ctx<'_>, args: StrrArgs) -> CliResult {
    let tokenizers = ctx.load_tokenizers(&args.tokenizers)?;
    let forms = args.word_policy.forms();

    let mut groups: Vec<(String, Vec<WordList>)> = Vec::new();
    for path in &args.wordlists {
        let (list, report) = load_wordlist(path)?;
        ctx.warn(&report);
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let sides = match (list, &args.language) {
            (LoadedWordList::Single(mut w), Some(lang)) => {
                w.language = lang.clone();
                vec![w]
            }
            (list, _) => list.sides(),
        };
        groups.push((name, sides));
    }

    let mut table = ReportTable::default();
    let mut figure = StrrFigure::default();
    let mut failures: Vec<StrrReport> = Vec::new();
    for (name, sides) in &groups {
        let mut group = StrrGroup {
            name: name.clone(),
            languages: sides.iter().map(|w| w.language.clone()).collect(),
            series: Vec::new(),
        };
        for tok in &tokenizers {
            for &form in &forms {
                let mut values = Vec::new();
                for side in sides {
                    let report = strr(tok, side, form)?;
                    values.push(report.strr);
                    let metric = strr_metric(&report);
                    match table.rows.iter_mut().find(|r| {
                        r.language == side.language
                            && r.tokenizer == tok.name()
                            && r.domain == *name
                    }) {
                        Some(row) => row.metrics.push(metric),
                        None => table.rows.push(ReportRow {
                            language: side.language.clone(),
                            domain: name.clone(),
                            tokenizer: tok.name().to_owned(),
                            metrics: vec![metric],
                        }),
                    }
                    if args.failures {
                        failures.push(report);
                    }
                }
                group.series.push(StrrSeries {
                    tokenizer: tok.name().to_owned(),
                    word_form: form.to_string(),
                    values,
                });
            }
        }
        figure.groups.push(group);
    }

    let text = match args.output.format {
        ReportFormat::Json => {
            let mut value = serde_json::json!({
                "rows": table.rows,
                "figure": figure,
            });
            if args.failures {
                value["failures"] = serde_json::to_value(
                    failures
                        .iter()
                        .map(|r| {
                            serde_json::json!({
                                "tokenizer": r.tokenizer_name,
                                "language": r.language,
                                "word_form": r.word_form,
                                "failures": r.failures,
                            })
                        })
                        .collect::<Vec<_>>(),
                )
                .expect("plain data");
            }
            let mut s = serde_json::to_string_pretty(&value).expect("plain data");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut s = table.to_csv();
            if args.failures {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["tokenizer", "language", "word_form", "word", "length"])
                    .expect("writing to memory");
                for r in &failures {
                    for f in &r.failures {
                        w.write_record([
                            r.tokenizer_name.as_str(),
                            r.language.as_str(),
                            r.word_form.as_str(),
                            f.word.as_str(),
                            &f.length.to_string(),
                        ])
                        .expect("writing to memory");
                    }
                }
                s.push('\n');
                s.push_str(&String::from_utf8(w.into_inner().expect("in memory")).expect("UTF-8"));
            }
            s
        }
        ReportFormat::Md => {
            let mut s = table.to_markdown();
            for r in &failures {
                s.push_str(&format!(
                    "#### failures: {} / {} / {} ({} of {})\n\n",
                    r.tokenizer_name,
                    r.language,
                    r.word_form,
                    r.failures.len(),
                    r.n
                ));
                for f in &r.failures {
                    s.push_str(&format!("- {} ({} tokens)\n", f.word, f.length));
                }
                s.push('\n');
            }
            s
        }
    };
    ctx.emit(&text, args.output.out.as_deref())?;
    Ok(0)
}

fn same_file(a: &Path, b: &Path) -> bool {
    let canon = |p: &Path| -> Option<PathBuf> {
        if let Ok(c) = p.canonicalize() {
            return Some(c);
        }
        let parent = match p.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.canonicalize().ok()?,
            _ => std::env::current_dir().ok()?,
        };
        Some(parent.join(p.file_name()?))
    };
    match (canon(a), canon(b)) {
        (Some(x), Some(y)) => x == y,
        _ => a == b,
    }
}

fn cmd_inject(ctx: &mut Ctx<'_>, args: InjectArgs) -> CliResult {
    if same_file(&args.tokenizer, &args.out_tokenizer) {
        return Err(CliError::Usage(format!(
            "--out-tokenizer {} is the input tokenizer; refusing to modify it in place",
            args.out_tokenizer.display()
        )));
    }
    let (tokenizer, report) = load_tokenizer(&args.tokenizer)?;
    ctx.warn(&report);
    let (list, report) = load_wordlist(&args.wordlist)?;
    ctx.warn(&report);
    let words: Vec<String> = match list {
        LoadedWordList::Single(w) => w.words().to_vec(),
        LoadedWordList::Parallel(p) => match args.side {
            Side::Source => p.source().words().to_vec(),
            Side::Target => p.target().words().to_vec(),
            Side::Both => {
                WordList::new("both", p.source().words().iter().chain(p.target().words()))?
                    .words()
                    .to_vec()
            }
        },
    };
    let (updated, plan) = inject(&tokenizer, &words, args.word_policy)?;
    save_tokenizer(&updated, &args.out_tokenizer)?;
    if let Some(path) = &args.plan_out {
        ctx.emit(&plan.to_json(), Some(path))?;
    }
    let summary = format!(
        "{}: {} of {} words were not single tokens ({}); injected {}; vocab size {} -> {}\nSTRR {:.2} -> {:.2}\n\n{}",
        tokenizer.name(),
        plan.candidates.len(),
        words.len(),
        plan.word_form,
        plan.injected.len(),
        tokenizer.vocab_size(),
        updated.vocab_size(),
        plan.strr_before,
        plan.strr_after,
        plan.followup_checklist()
    );
    ctx.emit(&summary, None)?;
    Ok(0)
}

fn merged_corpus(corpora: Vec<(Corpus, EvalPolicy)>) -> Option<(Corpus, EvalPolicy)> {
    let mut iter = corpora.into_iter();
    let (mut first, policy) = iter.next()?;
    for (c, _) in iter {
        first.documents.extend(c.documents);
    }
    Some((first, policy))
}

fn cmd_coverage(ctx: &mut Ctx<'_>, args: CoverageArgs) -> CliResult {
    if !(args.target > 0.0 && args.target <= 1.0) {
        return Err(CliError::Usage(format!(
            "--target must be in (0, 1], got {}",
            args.target
        )));
    }
    let corpora = ctx.load_corpora(&args.corpus)?;
    let (corpus, policy) = merged_corpus(corpora).ok_or(Error::EmptyInput("no corpus"))?;
    let core = core_vocabulary(&corpus, &policy.segmentation, args.target)?;

    let shown = if args.full_curve {
        core.curve.len()
    } else {
        core.words.len()
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rank", "word", "count", "cumulative_coverage"])
        .expect("writing to memory");
    for k in 0..shown {
        w.write_record([
            (k + 1).to_string(),
            core.curve.ranked_words()[k].clone(),
            core.curve.counts()[k].to_string(),
            core.curve.cumulative_coverage()[k].to_string(),
        ])
        .expect("writing to memory");
    }
    let text = String::from_utf8(w.into_inner().expect("in memory")).expect("UTF-8");
    ctx.emit(&text, args.out.as_deref())?;
    if let Some(path) = &args.out_wordlist {
        let list = WordList::new(corpus.language.clone(), &core.words)?;
        save_wordlist(&LoadedWordList::Single(list), path)?;
    }
    let _ = writeln!(
        ctx.stderr,
        "{} of {} distinct words cover {:.2}% of {} occurrences (target {:.2}%)",
        core.words.len(),
        core.curve.len(),
        core.coverage * 100.0,
        core.curve.total_occurrences(),
        args.target * 100.0
    );
    Ok(0)
}

fn cmd_train(ctx: &mut Ctx<'_>, args: TrainArgs) -> CliResult {
    let corpora = ctx.load_corpora(&args.corpus)?;
    let (corpus, policy) = merged_corpus(corpora).ok_or(Error::EmptyInput("no corpus"))?;
    let name = args.name.clone().unwrap_or_else(|| {
        args.out_tokenizer
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "trained".into())
    });
    let mut options = TrainOptions::new(name, args.vocab_size);
    options.byte_level = !args.char_level;
    let outcome = train_bpe(&corpus, &policy.with_word_form(args.word_form), &options)?;
    if let Some(w) = &outcome.warning {
        let _ = writeln!(ctx.stderr, "warning: {w}");
    }
    save_tokenizer(&outcome.tokenizer, &args.out_tokenizer)?;
    let _ = writeln!(
        ctx.stderr,
        "wrote {} ({} tokens, {} merges)",
        args.out_tokenizer.display(),
        outcome.tokenizer.vocab_size(),
        outcome.tokenizer.merges().len()
    );
    Ok(0)
}
