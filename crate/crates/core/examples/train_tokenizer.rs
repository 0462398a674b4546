//! Train a byte-level tokenizer, save it, reload it and check the merges replay.
//!
//! cargo run --example train_tokenizer

use tokeval::io::{load_tokenizer, save_tokenizer, Corpus, Domain};
use tokeval::metrics::EvalPolicy;
use tokeval::pipeline::{train_bpe, TrainOptions};

fn main() -> tokeval::Result<()> {
    let corpus = Corpus::new(
        "toy",
        "en",
        Domain::Unspecified,
        [
            "low lower lowest",
            "new newer newest",
            "wide wider widest",
            "low new wide",
        ],
    );
    let outcome = train_bpe(
        &corpus,
        &EvalPolicy::for_language("en"),
        &TrainOptions::new("toy", 270),
    )?;
    if let Some(w) = &outcome.warning {
        println!("warning: {w}");
    }
    for (rank, (l, r)) in outcome.tokenizer.merges().iter().enumerate() {
        println!("{rank:>2}: {l} + {r}");
    }

    let dir = std::env::temp_dir().join("tokeval-train-example");
    std::fs::create_dir_all(&dir).map_err(|e| tokeval::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let path = dir.join("toy.json");
    save_tokenizer(&outcome.tokenizer, &path)?;
    let (reloaded, _) = load_tokenizer(&path)?;
    assert_eq!(reloaded, outcome.tokenizer);

    for unit in outcome.units.iter().take(6) {
        let enc = reloaded.encode_word(&unit.word, unit.space_prefixed)?;
        println!(
            "{:>8} x{} -> {:?}",
            unit.word, unit.count, enc.token_strings
        );
    }
    println!("saved to {}", path.display());
    Ok(())
}
