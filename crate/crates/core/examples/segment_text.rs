//! Show how each segmentation mode splits the same text.
//!
//! cargo run --example segment_text

use tokeval::segment::{segment, Dictionary, SegmentMode, SegmentPolicy};

fn main() -> tokeval::Result<()> {
    let samples = [
        "Don't split e-mail, please: 3.5 km!",
        "研究人员发现气温上升。",
        "tokenizer 分词器 test",
    ];
    let policies = [
        SegmentPolicy::unicode_words(),
        SegmentPolicy::new(SegmentMode::Whitespace),
        SegmentPolicy::new(SegmentMode::HanPerChar),
        SegmentPolicy::with_dictionary(SegmentMode::HanGreedyDict, Dictionary::default_han()),
    ];
    for text in samples {
        println!("{text}");
        for policy in &policies {
            let words: Vec<String> = segment(text, policy)?.into_iter().map(|s| s.text).collect();
            println!("  {:<16} {words:?}", policy.mode);
        }
    }
    Ok(())
}
