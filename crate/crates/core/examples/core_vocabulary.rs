//! Word coverage curve of the English samples and the core vocabulary reaching 85%.
//!
//! cargo run --example core_vocabulary

use std::path::Path;

use tokeval::io::{load_corpus, CorpusFormat, Domain};
use tokeval::pipeline::core_vocabulary;
use tokeval::segment::SegmentPolicy;

fn main() -> tokeval::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpora/en_informal.txt");
    let (corpus, _) = load_corpus(&path, CorpusFormat::Lines, "en", Domain::Informal)?;
    let core = core_vocabulary(&corpus, &SegmentPolicy::unicode_words(), 0.85)?;

    let curve = &core.curve;
    for k in (0..curve.len()).step_by(10) {
        println!(
            "top {:>3} words cover {:>5.1}%",
            k + 1,
            curve.cumulative_coverage()[k] * 100.0
        );
    }
    println!(
        "{} of {} distinct words reach {:.1}% (target 85%)",
        core.words.len(),
        curve.len(),
        core.coverage * 100.0
    );
    println!("first ten: {:?}", &core.words[..10.min(core.words.len())]);
    Ok(())
}
