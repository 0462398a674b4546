//! Compare two tokenizers across corpora and wordlists and print the report in all
//! three formats.
//!
//! cargo run --example compare_tokenizers

use std::path::Path;

use tokeval::io::{load_corpus, load_wordlist, Corpus, CorpusFormat, Domain};
use tokeval::metrics::{compare, Dataset, EvalPolicy};
use tokeval::pipeline::{train_bpe, TrainOptions};
use tokeval::report::{ReportFormat, ReportTable};
use tokeval::WordForm;

fn main() -> tokeval::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let load = |file: &str, lang: &str, domain| {
        load_corpus(
            data.join("corpora").join(file),
            CorpusFormat::Lines,
            lang,
            domain,
        )
        .map(|(c, _)| c)
    };
    let en = load("en_formal.txt", "en", Domain::Formal)?;
    let fr = load("fr_formal.txt", "fr", Domain::Formal)?;
    let both = Corpus::new(
        "en+fr",
        "mul",
        Domain::Unspecified,
        en.documents.iter().chain(&fr.documents),
    );

    let policy = EvalPolicy::for_language("en");
    let small = train_bpe(&en, &policy, &TrainOptions::new("en-only", 450))?.tokenizer;
    let mixed = train_bpe(&both, &policy, &TrainOptions::new("en+fr", 450))?.tokenizer;

    let (list, _) = load_wordlist(data.join("wordlists/en-fr.tsv"))?;
    let mut datasets = vec![
        Dataset::Corpus {
            policy: EvalPolicy::for_language("en"),
            corpus: en,
        },
        Dataset::Corpus {
            policy: EvalPolicy::for_language("fr"),
            corpus: fr,
        },
    ];
    datasets.extend(list.sides().into_iter().map(Dataset::Words));

    let comparison = compare(
        &[small, mixed],
        &datasets,
        &[WordForm::Bare, WordForm::Either],
    )?;
    let table = ReportTable::from_comparison(&comparison);
    for format in [ReportFormat::Md, ReportFormat::Csv] {
        println!("--- {format}\n{}", table.render(format));
    }
    let json = table.render(ReportFormat::Json);
    println!(
        "--- json ({} bytes)\n{}",
        json.len(),
        &json[..json.len().min(400)]
    );
    Ok(())
}
