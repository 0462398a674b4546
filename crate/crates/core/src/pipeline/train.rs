//! A small deterministic BPE trainer, mostly for producing test tokenizers.

use std::collections::{BTreeSet, HashMap};

use crate::bpe::{byte_level, TokenId, Tokenizer};
use crate::error::{Error, Result};
use crate::io::Corpus;
use crate::metrics::EvalPolicy;
use crate::segment::segment;

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub name: String,
    pub vocab_size: usize,
    pub byte_level: bool,
}

impl TrainOptions {
    pub fn new(name: impl Into<String>, vocab_size: usize) -> Self {
        TrainOptions {
            name: name.into(),
            vocab_size,
            byte_level: true,
        }
    }

    pub fn char_level(mut self) -> Self {
        self.byte_level = false;
        self
    }
}

/// A training unit (one distinct word form) and the tokens training left it in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainedUnit {
    pub word: String,
    pub space_prefixed: bool,
    pub count: u64,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub tokenizer: Tokenizer,
    /// False when merging stopped before `vocab_size` because no pair occurred twice.
    pub reached_target: bool,
    pub warning: Option<String>,
    pub units: Vec<TrainedUnit>,
}

struct Unit {
    word: String,
    space_prefixed: bool,
    count: u64,
    symbols: Vec<u32>,
}

/// Trains merges on the corpus words until the vocabulary reaches `options.vocab_size`
/// or no adjacent pair occurs at least twice.
///
/// Each round merges the most frequent adjacent pair, counting occurrences weighted by
/// word frequency; ties go to the lexicographically smallest `(left, right)`. The base
/// alphabet is all 256 byte symbols in byte-level mode and the corpus characters
/// otherwise.
pub fn train_bpe(
    corpus: &Corpus,
    policy: &EvalPolicy,
    options: &TrainOptions,
) -> Result<TrainOutcome> {
    policy.segmentation.validate()?;
    let prefix = policy.word_form.prefix_spaces(options.byte_level);

    let mut unit_counts: HashMap<(String, bool), u64> = HashMap::new();
    for doc in &corpus.documents {
        for seg in segment(doc, &policy.segmentation)? {
            let prefixed = prefix && seg.after_space;
            *unit_counts.entry((seg.text, prefixed)).or_insert(0) += 1;
        }
    }
    if unit_counts.is_empty() {
        return Err(Error::EmptyInput("training corpus has no words"));
    }
    let mut keys: Vec<(String, bool)> = unit_counts.keys().cloned().collect();
    keys.sort();

    let as_symbol_text = |word: &str, prefixed: bool| -> String {
        let text = if prefixed {
            format!(" {word}")
        } else {
            word.to_owned()
        };
        if options.byte_level {
            byte_level::encode_str(&text)
        } else {
            text
        }
    };

    let alphabet: Vec<String> = if options.byte_level {
        byte_level::alphabet().map(String::from).collect()
    } else {
        let chars: BTreeSet<char> = keys
            .iter()
            .flat_map(|(w, p)| as_symbol_text(w, *p).chars().collect::<Vec<_>>())
            .collect();
        chars.into_iter().map(String::from).collect()
    };
    if options.vocab_size < alphabet.len() {
        return Err(Error::Config(format!(
            "vocab size {} is smaller than the base alphabet ({} symbols)",
            options.vocab_size,
            alphabet.len()
        )));
    }

    let mut strings: Vec<String> = alphabet.clone();
    let mut lookup: HashMap<String, u32> = strings
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i as u32))
        .collect();
    let mut units: Vec<Unit> = keys
        .into_iter()
        .map(|(word, prefixed)| {
            let symbols = as_symbol_text(&word, prefixed)
                .chars()
                .map(|c| lookup[c.encode_utf8(&mut [0; 4]) as &str])
                .collect();
            let count = unit_counts[&(word.clone(), prefixed)];
            Unit {
                word,
                space_prefixed: prefixed,
                count,
                symbols,
            }
        })
        .collect();

    let mut merges: Vec<(String, String)> = Vec::new();
    let mut vocab_len = alphabet.len();
    let mut reached_target = true;
    while vocab_len < options.vocab_size {
        let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
        for unit in &units {
            for w in unit.symbols.windows(2) {
                *pair_counts.entry((w[0], w[1])).or_insert(0) += unit.count;
            }
        }
        let best = pair_counts
            .into_iter()
            .filter(|&(_, c)| c >= 2)
            .max_by(|(pa, ca), (pb, cb)| {
                ca.cmp(cb).then_with(|| {
                    let a = (&strings[pa.0 as usize], &strings[pa.1 as usize]);
                    let b = (&strings[pb.0 as usize], &strings[pb.1 as usize]);
                    b.cmp(&a)
                })
            });
        let Some(((left, right), _)) = best else {
            reached_target = false;
            break;
        };
        let merged_text = format!("{}{}", strings[left as usize], strings[right as usize]);
        let merged = match lookup.get(&merged_text) {
            Some(&id) => id,
            None => {
                let id = strings.len() as u32;
                strings.push(merged_text.clone());
                lookup.insert(merged_text, id);
                vocab_len += 1;
                id
            }
        };
        merges.push((
            strings[left as usize].clone(),
            strings[right as usize].clone(),
        ));
        for unit in &mut units {
            if unit.symbols.len() < 2 {
                continue;
            }
            let mut out = Vec::with_capacity(unit.symbols.len());
            let mut i = 0;
            while i < unit.symbols.len() {
                if i + 1 < unit.symbols.len()
                    && unit.symbols[i] == left
                    && unit.symbols[i + 1] == right
                {
                    out.push(merged);
                    i += 2;
                } else {
                    out.push(unit.symbols[i]);
                    i += 1;
                }
            }
            unit.symbols = out;
        }
    }

    let vocab: HashMap<String, TokenId> = strings
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i as TokenId))
        .collect();
    let tokenizer = Tokenizer::new(
        options.name.clone(),
        options.byte_level,
        vocab,
        merges,
        Vec::new(),
    )?;
    let warning = (!reached_target).then(|| {
        format!(
            "stopped at vocab size {} (target {}): no adjacent pair occurs twice",
            tokenizer.vocab_size(),
            options.vocab_size
        )
    });
    let units = units
        .into_iter()
        .map(|u| TrainedUnit {
            word: u.word,
            space_prefixed: u.space_prefixed,
            count: u.count,
            tokens: u
                .symbols
                .iter()
                .map(|&s| strings[s as usize].clone())
                .collect(),
        })
        .collect();
    Ok(TrainOutcome {
        tokenizer,
        reached_target,
        warning,
        units,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::Domain;
    use crate::segment::SegmentPolicy;

    fn corpus(docs: &[&str]) -> Corpus {
        Corpus::new("c", "en", Domain::Unspecified, docs.iter().copied())
    }

    fn policy() -> EvalPolicy {
        EvalPolicy::new(SegmentPolicy::unicode_words())
    }

    #[test]
    fn first_merge_is_the_most_frequent_pair() {
        for byte_level in [false, true] {
            let mut opts = TrainOptions::new("t", 0);
            opts.byte_level = byte_level;
            let base = if byte_level { 256 } else { 2 };
            opts.vocab_size = base + 1;
            let out = train_bpe(&corpus(&["ab ab ab"]), &policy(), &opts).unwrap();
            assert_eq!(
                out.tokenizer.merges()[0],
                ("a".to_string(), "b".to_string())
            );
            assert_eq!(out.tokenizer.encode_word("ab", false).unwrap().len(), 1);
            assert!(out.reached_target);
        }
    }

    #[test]
    fn base_size_target_means_no_merges() {
        let out = train_bpe(
            &corpus(&["ab ab ab"]),
            &policy(),
            &TrainOptions::new("t", 2).char_level(),
        )
        .unwrap();
        assert!(out.tokenizer.merges().is_empty());
        assert!(train_bpe(
            &corpus(&["abc"]),
            &policy(),
            &TrainOptions::new("t", 2).char_level()
        )
        .is_err());
    }

    #[test]
    fn deterministic() {
        let c = corpus(&["the cat sat on the mat", "the bat ate the hat"]);
        let a = train_bpe(&c, &policy(), &TrainOptions::new("t", 300)).unwrap();
        let b = train_bpe(&c, &policy(), &TrainOptions::new("t", 300)).unwrap();
        assert_eq!(a.tokenizer.merges(), b.tokenizer.merges());
    }

    #[test]
    fn ties_break_lexicographically() {
        // (a,b) and (c,d) both occur twice
        let out = train_bpe(
            &corpus(&["cd ab cd ab"]),
            &policy(),
            &TrainOptions::new("t", 5).char_level(),
        )
        .unwrap();
        assert_eq!(out.tokenizer.merges()[0], ("a".into(), "b".into()));
    }

    #[test]
    fn unreachable_target_warns() {
        let out = train_bpe(
            &corpus(&["abc"]),
            &policy(),
            &TrainOptions::new("t", 100).char_level(),
        )
        .unwrap();
        assert!(!out.reached_target);
        assert!(out.warning.is_some());
        assert!(train_bpe(&corpus(&[""]), &policy(), &TrainOptions::new("t", 100)).is_err());
    }

    #[test]
    fn replaying_merges_reproduces_training_segmentation() {
        let c = corpus(&[
            "low lower lowest newer newest wider",
            "low low new new wide",
        ]);
        let out = train_bpe(&c, &policy(), &TrainOptions::new("t", 280)).unwrap();
        for unit in &out.units {
            let enc = out
                .tokenizer
                .encode_word(&unit.word, unit.space_prefixed)
                .unwrap();
            assert_eq!(enc.token_strings, unit.tokens, "{}", unit.word);
        }
    }
}
