//! Fertility, subword entropy, characters-per-token and single-token retention.
//!
//! Corpus metrics are computed from exact integer counts aggregated per document in
//! parallel; only the final ratios are floating point. STRR is computed over a
//! reference wordlist, one indicator per word.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::bpe::{TokenId, Tokenizer, WordForm};
use crate::error::{Error, Result};
use crate::io::{Corpus, Domain, WordList};
use crate::segment::{segment, SegmentPolicy};

/// Which form corpus words are encoded in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusWordForm {
    /// `Contextual` for byte-level tokenizers, `Bare` for character-level ones.
    #[default]
    Auto,
    /// Every word encoded without a leading space.
    Bare,
    /// A word gets a leading space when whitespace precedes it in the document, so the
    /// first word of a document and words glued to punctuation or to Han text are bare.
    Contextual,
}

impl CorpusWordForm {
    pub fn as_str(self) -> &'static str {
        match self {
            CorpusWordForm::Auto => "auto",
            CorpusWordForm::Bare => "bare",
            CorpusWordForm::Contextual => "contextual",
        }
    }

    /// Whether words preceded by whitespace get a leading space, for a tokenizer in the
    /// given mode.
    pub fn prefix_spaces(self, byte_level: bool) -> bool {
        match self {
            CorpusWordForm::Auto => byte_level,
            CorpusWordForm::Bare => false,
            CorpusWordForm::Contextual => true,
        }
    }
}

impl fmt::Display for CorpusWordForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for CorpusWordForm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "auto" => Ok(CorpusWordForm::Auto),
            "bare" => Ok(CorpusWordForm::Bare),
            "contextual" => Ok(CorpusWordForm::Contextual),
            other => Err(format!(
                "unknown word form {other:?} (expected auto, bare or contextual)"
            )),
        }
    }
}

/// How a corpus is cut into words and how those words are presented to the tokenizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPolicy {
    pub segmentation: SegmentPolicy,
    pub word_form: CorpusWordForm,
}

impl EvalPolicy {
    pub fn new(segmentation: SegmentPolicy) -> Self {
        EvalPolicy {
            segmentation,
            word_form: CorpusWordForm::Auto,
        }
    }

    pub fn with_word_form(mut self, word_form: CorpusWordForm) -> Self {
        self.word_form = word_form;
        self
    }

    pub fn for_language(language: &str) -> Self {
        EvalPolicy::new(SegmentPolicy::default_for_language(language))
    }
}

/// Exact counts behind the corpus metrics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusCounts {
    pub word_count: u64,
    pub token_count: u64,
    pub char_count: u64,
    pub token_types: HashMap<TokenId, u64>,
}

impl CorpusCounts {
    fn merge(mut self, other: CorpusCounts) -> CorpusCounts {
        self.word_count += other.word_count;
        self.token_count += other.token_count;
        self.char_count += other.char_count;
        let (mut big, small) = if self.token_types.len() >= other.token_types.len() {
            (self.token_types, other.token_types)
        } else {
            (other.token_types, self.token_types)
        };
        for (id, n) in small {
            *big.entry(id).or_insert(0) += n;
        }
        self.token_types = big;
        self
    }

    /// Shannon entropy in bits of the token-type distribution (maximum likelihood).
    pub fn entropy_bits(&self) -> f64 {
        let total = self.token_count as f64;
        if self.token_count == 0 {
            return 0.0;
        }
        let mut counts: Vec<u64> = self.token_types.values().copied().collect();
        counts.sort_unstable();
        counts
            .into_iter()
            .map(|c| {
                let p = c as f64 / total;
                -p * p.log2()
            })
            .sum::<f64>()
            .max(0.0)
    }
}

/// Tokenizes every document of `corpus` and aggregates counts.
pub fn corpus_counts(
    tokenizer: &Tokenizer,
    corpus: &Corpus,
    policy: &EvalPolicy,
) -> Result<CorpusCounts> {
    policy.segmentation.validate()?;
    let prefix = policy.word_form.prefix_spaces(tokenizer.byte_level());
    corpus
        .documents
        .par_iter()
        .enumerate()
        .map(|(doc_index, doc)| {
            let mut counts = CorpusCounts::default();
            for (i, seg) in segment(doc, &policy.segmentation)?.iter().enumerate() {
                let enc = tokenizer
                    .encode_word(&seg.text, prefix && seg.after_space)
                    .map_err(|e| Error::Document {
                        index: doc_index,
                        source: Box::new(Error::Segment {
                            index: i,
                            source: Box::new(e),
                        }),
                    })?;
                counts.word_count += 1;
                counts.token_count += enc.len() as u64;
                counts.char_count += seg.char_count as u64;
                for id in enc.token_ids {
                    *counts.token_types.entry(id).or_insert(0) += 1;
                }
            }
            Ok(counts)
        })
        .try_reduce(CorpusCounts::default, |a, b| Ok(a.merge(b)))
}

/// One (tokenizer, corpus) cell of the corpus metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub tokenizer_name: String,
    pub corpus_name: String,
    pub language: String,
    pub domain: Domain,
    pub fertility: f64,
    pub entropy_bits: f64,
    pub chars_per_token: f64,
    pub word_count: u64,
    pub token_count: u64,
    pub char_count: u64,
    pub type_count: u64,
}

impl MetricReport {
    pub fn from_counts(
        tokenizer: &Tokenizer,
        corpus: &Corpus,
        counts: &CorpusCounts,
    ) -> Result<Self> {
        if counts.word_count == 0 {
            return Err(Error::EmptyInput("corpus has no words after segmentation"));
        }
        Ok(MetricReport {
            tokenizer_name: tokenizer.name().to_owned(),
            corpus_name: corpus.name.clone(),
            language: corpus.language.clone(),
            domain: corpus.domain,
            fertility: counts.token_count as f64 / counts.word_count as f64,
            entropy_bits: counts.entropy_bits(),
            chars_per_token: counts.char_count as f64 / counts.token_count as f64,
            word_count: counts.word_count,
            token_count: counts.token_count,
            char_count: counts.char_count,
            type_count: counts.token_types.len() as u64,
        })
    }

    /// Average characters per word, straight from the counts.
    pub fn chars_per_word(&self) -> f64 {
        self.char_count as f64 / self.word_count as f64
    }
}

/// Fertility, entropy and characters-per-token in one pass.
pub fn evaluate_corpus(
    tokenizer: &Tokenizer,
    corpus: &Corpus,
    policy: &EvalPolicy,
) -> Result<MetricReport> {
    let counts = corpus_counts(tokenizer, corpus, policy)?;
    MetricReport::from_counts(tokenizer, corpus, &counts)
}

/// Tokens per word.
pub fn fertility(tokenizer: &Tokenizer, corpus: &Corpus, policy: &EvalPolicy) -> Result<f64> {
    evaluate_corpus(tokenizer, corpus, policy).map(|r| r.fertility)
}

/// Entropy, in bits, of the token-type distribution of the tokenized corpus.
pub fn subword_entropy(tokenizer: &Tokenizer, corpus: &Corpus, policy: &EvalPolicy) -> Result<f64> {
    evaluate_corpus(tokenizer, corpus, policy).map(|r| r.entropy_bits)
}

/// Word characters (Unicode scalar values, no inter-word whitespace) per token.
pub fn chars_per_token(tokenizer: &Tokenizer, corpus: &Corpus, policy: &EvalPolicy) -> Result<f64> {
    evaluate_corpus(tokenizer, corpus, policy).map(|r| r.chars_per_token)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrrFailure {
    pub word: String,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrrReport {
    pub tokenizer_name: String,
    pub language: String,
    pub word_form: WordForm,
    pub n: usize,
    pub retained: usize,
    pub strr: f64,
    /// Words that take more than one token, longest encodings first.
    pub failures: Vec<StrrFailure>,
}

/// Percentage of `wordlist` entries that encode to exactly one token under `form`.
pub fn strr(tokenizer: &Tokenizer, wordlist: &WordList, form: WordForm) -> Result<StrrReport> {
    if wordlist.is_empty() {
        return Err(Error::EmptyInput("wordlist is empty"));
    }
    let lengths = wordlist
        .words()
        .par_iter()
        .map(|w| tokenizer.form_length(w, form))
        .collect::<Result<Vec<usize>>>()?;
    let mut failures: Vec<StrrFailure> = wordlist
        .words()
        .iter()
        .zip(&lengths)
        .filter(|(_, &len)| len != 1)
        .map(|(w, &length)| StrrFailure {
            word: w.clone(),
            length,
        })
        .collect();
    failures.sort_by(|a, b| b.length.cmp(&a.length).then_with(|| a.word.cmp(&b.word)));
    let n = wordlist.len();
    let retained = n - failures.len();
    Ok(StrrReport {
        tokenizer_name: tokenizer.name().to_owned(),
        language: wordlist.language.clone(),
        word_form: form,
        n,
        retained,
        strr: retained as f64 / n as f64 * 100.0,
        failures,
    })
}

/// Input to [`compare`]: a corpus with its evaluation policy, or a wordlist.
#[derive(Debug, Clone)]
pub enum Dataset {
    Corpus { corpus: Corpus, policy: EvalPolicy },
    Words(WordList),
}

impl Dataset {
    pub fn name(&self) -> String {
        match self {
            Dataset::Corpus { corpus, .. } => corpus.name.clone(),
            Dataset::Words(w) => w.language.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Cell {
    Corpus(MetricReport),
    Strr { reports: Vec<StrrReport> },
}

/// Tokenizer × dataset matrix; `cells[t][d]` in input order.
#[derive(Debug)]
pub struct Comparison {
    pub tokenizers: Vec<String>,
    pub datasets: Vec<String>,
    pub cells: Vec<Vec<Result<Cell>>>,
}

/// Every metric for every (tokenizer, dataset) pair. A failing cell does not stop the others.
pub fn compare(
    tokenizers: &[Tokenizer],
    datasets: &[Dataset],
    forms: &[WordForm],
) -> Result<Comparison> {
    if tokenizers.is_empty() {
        return Err(Error::EmptyInput("no tokenizers to compare"));
    }
    if datasets.is_empty() {
        return Err(Error::EmptyInput("no datasets to compare"));
    }
    let cells = tokenizers
        .par_iter()
        .map(|tok| {
            datasets
                .par_iter()
                .map(|data| match data {
                    Dataset::Corpus { corpus, policy } => {
                        evaluate_corpus(tok, corpus, policy).map(Cell::Corpus)
                    }
                    Dataset::Words(list) => forms
                        .iter()
                        .map(|&f| strr(tok, list, f))
                        .collect::<Result<Vec<_>>>()
                        .map(|reports| Cell::Strr { reports }),
                })
                .collect()
        })
        .collect();
    Ok(Comparison {
        tokenizers: tokenizers.iter().map(|t| t.name().to_owned()).collect(),
        datasets: datasets.iter().map(Dataset::name).collect(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segment::SegmentMode;

    fn toy() -> Tokenizer {
        Tokenizer::from_ordered("toy", false, &["a", "b", "c", "ab"], &[("a", "b")]).unwrap()
    }

    fn corpus(docs: &[&str]) -> Corpus {
        Corpus::new("c", "en", Domain::Formal, docs.iter().copied())
    }

    fn policy() -> EvalPolicy {
        EvalPolicy::new(SegmentPolicy::unicode_words())
    }

    #[test]
    fn fertility_identity_and_trace() {
        assert_eq!(
            fertility(&toy(), &corpus(&["ab c ab"]), &policy()).unwrap(),
            1.0
        );
        let r = evaluate_corpus(&toy(), &corpus(&["abc abc"]), &policy()).unwrap();
        assert_eq!((r.token_count, r.word_count), (4, 2));
        assert_eq!(r.fertility, 2.0);
    }

    #[test]
    fn empty_corpus_is_an_error_not_nan() {
        let err = fertility(&toy(), &corpus(&["", "!!"]), &policy()).unwrap_err();
        assert!(matches!(err, Error::EmptyInput(_)));
        assert!(chars_per_token(&toy(), &corpus(&[]), &policy()).is_err());
        assert!(subword_entropy(&toy(), &corpus(&[]), &policy()).is_err());
    }

    #[test]
    fn entropy_extremes() {
        let t = Tokenizer::from_ordered("t", false, &["a", "b", "c", "d", "e", "f", "g", "h"], &[])
            .unwrap();
        let h = subword_entropy(&t, &corpus(&["a b c d e f g h"]), &policy()).unwrap();
        assert!((h - 3.0).abs() < 1e-12);
        let h = subword_entropy(&t, &corpus(&["a a a a"]), &policy()).unwrap();
        assert_eq!(h, 0.0);
    }

    #[test]
    fn chars_per_token_arithmetic() {
        let t = Tokenizer::from_ordered("t", false, &["a", "b", "c", "d", "e"], &[])
            .unwrap()
            .with_added_tokens([
                crate::bpe::AddedToken {
                    id: 5,
                    content: "abc".into(),
                },
                crate::bpe::AddedToken {
                    id: 6,
                    content: "de".into(),
                },
            ])
            .unwrap();
        let cpt = chars_per_token(&t, &corpus(&["abc de"]), &policy()).unwrap();
        assert_eq!(cpt, 2.5);
        let per_char = chars_per_token(&toy(), &corpus(&["a b c"]), &policy()).unwrap();
        assert_eq!(per_char, 1.0);
    }

    #[test]
    fn strr_toy_trace() {
        let list = WordList::new("en", ["ab", "ac"]).unwrap();
        let r = strr(&toy(), &list, WordForm::Bare).unwrap();
        assert_eq!(r.strr, 50.0);
        assert_eq!(
            r.failures,
            [StrrFailure {
                word: "ac".into(),
                length: 2
            }]
        );

        let all = WordList::new("en", ["a", "ab", "c"]).unwrap();
        assert_eq!(strr(&toy(), &all, WordForm::Bare).unwrap().strr, 100.0);

        let empty = WordList::new("en", Vec::<String>::new()).unwrap();
        assert!(strr(&toy(), &empty, WordForm::Bare).is_err());
    }

    #[test]
    fn failures_sorted_longest_first_then_lexicographic() {
        let list = WordList::new("en", ["cc", "ab", "ccc", "bb", "a"]).unwrap();
        let r = strr(&toy(), &list, WordForm::Bare).unwrap();
        let words: Vec<_> = r
            .failures
            .iter()
            .map(|f| (f.word.as_str(), f.length))
            .collect();
        assert_eq!(words, [("ccc", 3), ("bb", 2), ("cc", 2)]);
        assert_eq!(r.retained, 2);
    }

    #[test]
    fn compare_is_cellwise() {
        let other = Tokenizer::from_ordered("plain", false, &["a", "b", "c"], &[]).unwrap();
        let list = WordList::new("en", ["ab", "ac"]).unwrap();
        let data = [
            Dataset::Words(list.clone()),
            Dataset::Corpus {
                corpus: corpus(&["abc zz"]),
                policy: policy(),
            },
        ];
        let table = compare(&[toy(), other.clone()], &data, &[WordForm::Bare]).unwrap();
        assert_eq!(table.tokenizers, ["toy", "plain"]);
        for (t, tok) in [toy(), other].iter().enumerate() {
            let Ok(Cell::Strr { reports }) = &table.cells[t][0] else {
                panic!()
            };
            assert_eq!(reports[0], strr(tok, &list, WordForm::Bare).unwrap());
            // "zz" is not encodable by either toy tokenizer
            assert!(table.cells[t][1].is_err());
        }
    }

    #[test]
    fn contextual_form_follows_whitespace() {
        let t = Tokenizer::from_ordered(
            "t",
            true,
            &["Ġ", "h", "i", "Ġh", "Ġhi", "hi", ","],
            &[("Ġ", "h"), ("Ġh", "i"), ("h", "i")],
        )
        .unwrap();
        let c = corpus(&["hi hi,hi"]);
        let p = EvalPolicy::new(SegmentPolicy::new(SegmentMode::UnicodeWords));
        let counts = corpus_counts(&t, &c, &p).unwrap();
        assert_eq!(counts.token_types[&4], 1); // " hi"
        assert_eq!(counts.token_types[&5], 2); // "hi" document-initial and after ","
    }
}
