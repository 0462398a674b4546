//! Corpora, wordlists and tokenizer files.

mod corpus;
mod tokenizer_file;
mod wordlist;

pub use corpus::{load_corpus, Corpus, CorpusFormat, Domain};
pub use tokenizer_file::{load_tokenizer, save_tokenizer, tokenizer_from_json, tokenizer_to_json};
pub use wordlist::{
    load_wordlist, parse_wordlist, save_wordlist, LoadedWordList, ParallelWordList, WordList,
};

/// What a loader had to skip or ignore. Nothing is dropped without being counted here.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub skipped_lines: usize,
    pub warnings: Vec<String>,
}
