//! Encode a few words with a hand-written toy tokenizer and decode them back.
//!
//! cargo run --example encode_words

use tokeval::{AddedToken, Tokenizer, WordForm};

fn main() -> tokeval::Result<()> {
    let tok = Tokenizer::from_ordered(
        "toy",
        false,
        &["a", "b", "c", " ", "ab", "abc", " a"],
        &[("a", "b"), ("ab", "c"), (" ", "a")],
    )?
    .with_added_tokens([AddedToken {
        id: 7,
        content: "cab".into(),
    }])?;

    for (word, prefix) in [
        ("abc", false),
        ("abc", true),
        ("cab", false),
        ("bca", false),
    ] {
        let enc = tok.encode_word(word, prefix)?;
        println!(
            "{:>6} prefix={prefix:<5} -> {:?} {:?} -> {:?}",
            word,
            enc.token_strings,
            enc.token_ids,
            tok.decode(&enc.token_ids)?
        );
    }
    for form in WordForm::ALL {
        println!(
            "\"abc\" single token as {form}: {}",
            tok.is_single_token("abc", form)?
        );
    }
    Ok(())
}
