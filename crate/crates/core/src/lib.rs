//! Tokenizer evaluation: how a BPE vocabulary is spent across languages.
//!
//! * [`bpe`]: byte-level BPE encoding and decoding with whole-segment added tokens.
//! * [`segment`]: the word units metrics are defined over.
//! * [`metrics`]: fertility, subword entropy, characters-per-token and single-token
//!   retention rate (STRR).
//! * [`io`]: tokenizer files, corpora and wordlists.
//! * [`pipeline`]: word coverage, core-vocabulary selection, vocabulary injection and a
//!   small BPE trainer.
//! * [`report`]: markdown / CSV / JSON tables.
//!
//! ```
//! use tokeval::bpe::{Tokenizer, WordForm};
//! use tokeval::io::WordList;
//! use tokeval::metrics::strr;
//!
//! let tok = Tokenizer::from_ordered("toy", false, &["a", "b", "c", "ab"], &[("a", "b")]).unwrap();
//! let words = WordList::new("en", ["ab", "ac"]).unwrap();
//! assert_eq!(strr(&tok, &words, WordForm::Bare).unwrap().strr, 50.0);
//! ```

pub mod bpe;
pub mod cli;
pub mod error;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod segment;

pub use bpe::{AddedToken, Encoding, TokenId, Tokenizer, WordForm};
pub use error::{Error, Result};
