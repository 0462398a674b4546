//! Fertility, subword entropy and characters-per-token on the bundled sample corpora,
//! using a small tokenizer trained on all of them.
//!
//! cargo run --example corpus_metrics

use std::path::Path;

use tokeval::io::{load_corpus, Corpus, CorpusFormat, Domain};
use tokeval::metrics::{evaluate_corpus, EvalPolicy};
use tokeval::pipeline::{train_bpe, TrainOptions};

fn main() -> tokeval::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpora");
    let mut corpora = Vec::new();
    for (file, lang, domain) in [
        ("en_formal.txt", "en", Domain::Formal),
        ("en_informal.txt", "en", Domain::Informal),
        ("fr_formal.txt", "fr", Domain::Formal),
        ("es_informal.txt", "es", Domain::Informal),
        ("zh_formal.txt", "zh", Domain::Formal),
    ] {
        let path = dir.join(file);
        corpora.push(load_corpus(&path, CorpusFormat::Lines, lang, domain)?.0);
    }
    let english = Corpus::new(
        "en",
        "en",
        Domain::Unspecified,
        corpora
            .iter()
            .filter(|c| c.language == "en")
            .flat_map(|c| c.documents.clone()),
    );
    let tok = train_bpe(
        &english,
        &EvalPolicy::for_language("en"),
        &TrainOptions::new("en-600", 600),
    )?
    .tokenizer;

    println!(
        "{:<4} {:<10} {:>9} {:>8} {:>8}",
        "lang", "domain", "fertility", "entropy", "chars/t"
    );
    for corpus in &corpora {
        let r = evaluate_corpus(&tok, corpus, &EvalPolicy::for_language(&corpus.language))?;
        println!(
            "{:<4} {:<10} {:>9.2} {:>8.2} {:>8.2}",
            r.language, r.domain, r.fertility, r.entropy_bits, r.chars_per_token
        );
    }
    Ok(())
}
