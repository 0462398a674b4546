//! Single-token retention on the bundled English-X wordlists, for a tokenizer trained
//! on the English sample corpora.
//!
//! cargo run --example strr_wordlists

use std::path::Path;

use tokeval::io::{load_corpus, load_wordlist, CorpusFormat, Domain};
use tokeval::metrics::{strr, EvalPolicy};
use tokeval::pipeline::{train_bpe, TrainOptions};
use tokeval::WordForm;

fn main() -> tokeval::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let (corpus, _) = load_corpus(
        data.join("corpora/en_formal.txt"),
        CorpusFormat::Lines,
        "en",
        Domain::Formal,
    )?;
    let tok = train_bpe(
        &corpus,
        &EvalPolicy::for_language("en"),
        &TrainOptions::new("en-500", 500),
    )?
    .tokenizer;

    for lang in ["fr", "de", "es", "it", "hi", "zh"] {
        let (list, _) = load_wordlist(data.join(format!("wordlists/en-{lang}.tsv")))?;
        for side in list.sides() {
            let bare = strr(&tok, &side, WordForm::Bare)?;
            let either = strr(&tok, &side, WordForm::Either)?;
            println!(
                "en-{lang} {:<3} n={:<4} bare {:>6.2}%  either {:>6.2}%  longest miss: {:?}",
                side.language,
                bare.n,
                bare.strr,
                either.strr,
                bare.failures.first().map(|f| (&f.word, f.length))
            );
        }
    }
    Ok(())
}
