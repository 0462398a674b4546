//! Inject the French side of a wordlist into a tokenizer trained on English text and
//! compare STRR before and after.
//!
//! cargo run --example inject_vocabulary

use std::path::Path;

use tokeval::io::{load_corpus, load_wordlist, CorpusFormat, Domain, LoadedWordList};
use tokeval::metrics::{strr, EvalPolicy};
use tokeval::pipeline::{inject, train_bpe, TrainOptions};
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
        &TrainOptions::new("en-400", 400),
    )?
    .tokenizer;

    let (list, _) = load_wordlist(data.join("wordlists/en-fr.tsv"))?;
    let LoadedWordList::Parallel(pairs) = list else {
        unreachable!()
    };
    let french = pairs.target();
    let english = pairs.source();

    let (updated, plan) = inject(&tok, french.words(), WordForm::SpacePrefixed)?;
    println!(
        "fr: {:.2}% -> {:.2}% ({} tokens added, vocab {} -> {})",
        plan.strr_before,
        plan.strr_after,
        plan.injected.len(),
        tok.vocab_size(),
        updated.vocab_size()
    );
    let en_before = strr(&tok, &english, WordForm::SpacePrefixed)?.strr;
    let en_after = strr(&updated, &english, WordForm::SpacePrefixed)?.strr;
    println!("en: {en_before:.2}% -> {en_after:.2}%");
    print!("{}", plan.followup_checklist());
    Ok(())
}
