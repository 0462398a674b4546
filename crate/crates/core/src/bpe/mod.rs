//! Deterministic BPE encoder/decoder with whole-segment added tokens.
//!
//! A [`Tokenizer`] is built once from a vocabulary, a ranked merge list and a set of
//! added tokens, and is immutable afterwards. Encoding a word either matches an added
//! token exactly or maps the word to base symbols (bytes through the printable alphabet
//! in byte-level mode, characters otherwise) and then repeatedly applies the lowest-rank
//! merge present, leftmost occurrence first.

pub mod byte_level;

use std::borrow::Cow;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type TokenId = u32;

type SymbolId = u32;
type Rank = u32;

/// A whole-segment vocabulary entry, matched before any merging happens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AddedToken {
    pub id: TokenId,
    pub content: String,
}

/// How a reference word is presented to the tokenizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WordForm {
    /// The word as is.
    Bare,
    /// The word with one leading space, the form it takes inside running text.
    SpacePrefixed,
    /// Single-token if either of the two forms is.
    Either,
}

impl WordForm {
    pub const ALL: [WordForm; 3] = [WordForm::Bare, WordForm::SpacePrefixed, WordForm::Either];

    pub fn as_str(self) -> &'static str {
        match self {
            WordForm::Bare => "bare",
            WordForm::SpacePrefixed => "space-prefixed",
            WordForm::Either => "either",
        }
    }
}

impl fmt::Display for WordForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for WordForm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "bare" => Ok(WordForm::Bare),
            "space-prefixed" | "space_prefixed" => Ok(WordForm::SpacePrefixed),
            "either" => Ok(WordForm::Either),
            other => Err(format!(
                "unknown word form {other:?} (expected bare, space-prefixed or either)"
            )),
        }
    }
}

/// The tokens one word (or segment) encodes to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    pub token_ids: Vec<TokenId>,
    /// Vocabulary strings of the tokens; byte-level symbols in byte-level mode,
    /// literal text for added tokens.
    pub token_strings: Vec<String>,
    pub source: String,
    pub space_prefixed: bool,
}

impl Encoding {
    pub fn len(&self) -> usize {
        self.token_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.token_ids.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
enum TokenEntry {
    Vocab,
    Added,
}

/// An immutable BPE tokenizer.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    name: String,
    byte_level: bool,
    vocab: HashMap<String, TokenId>,
    merges: Vec<(String, String)>,
    added_tokens: Vec<AddedToken>,

    id_to_token: HashMap<TokenId, (String, TokenEntry)>,
    added_lookup: HashMap<String, TokenId>,
    symbol_ids: HashMap<String, SymbolId>,
    char_symbols: HashMap<char, SymbolId>,
    symbol_tokens: Vec<Option<TokenId>>,
    merge_table: HashMap<(SymbolId, SymbolId), (Rank, SymbolId)>,
}

impl PartialEq for Tokenizer {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.byte_level == other.byte_level
            && self.vocab == other.vocab
            && self.merges == other.merges
            && self.added_tokens == other.added_tokens
    }
}

impl Eq for Tokenizer {}

fn is_base_symbol(symbol: &str, byte_level: bool) -> bool {
    let mut chars = symbol.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => !byte_level || byte_level::char_to_byte(c).is_some(),
        _ => false,
    }
}

fn vocab_spelling(text: &str, byte_level: bool) -> Cow<'_, str> {
    if byte_level {
        Cow::Owned(byte_level::encode_str(text))
    } else {
        Cow::Borrowed(text)
    }
}

impl Tokenizer {
    /// Validates and indexes the given parts.
    ///
    /// Token ids must be unique across the vocabulary and the added tokens (an added
    /// token may repeat a vocabulary entry only with the same id). Every merge side must
    /// be a vocabulary entry or a base symbol, and every merge result a vocabulary entry.
    pub fn new(
        name: impl Into<String>,
        byte_level: bool,
        vocab: HashMap<String, TokenId>,
        merges: Vec<(String, String)>,
        added_tokens: Vec<AddedToken>,
    ) -> Result<Self> {
        let mut id_to_token: HashMap<TokenId, (String, TokenEntry)> =
            HashMap::with_capacity(vocab.len() + added_tokens.len());
        for (token, &id) in &vocab {
            if token.is_empty() {
                return Err(Error::InvalidTokenizer(format!(
                    "empty vocabulary entry with id {id}"
                )));
            }
            if let Some((other, _)) = id_to_token.insert(id, (token.clone(), TokenEntry::Vocab)) {
                let (a, b) = if *other < **token {
                    (other, token.clone())
                } else {
                    (token.clone(), other)
                };
                return Err(Error::InvalidTokenizer(format!(
                    "duplicate id {id} for vocabulary entries {a:?} and {b:?}"
                )));
            }
        }

        let mut added_lookup = HashMap::with_capacity(added_tokens.len());
        for added in &added_tokens {
            if added.content.is_empty() {
                return Err(Error::InvalidTokenizer(format!(
                    "added token with id {} has empty content",
                    added.id
                )));
            }
            if added_lookup
                .insert(added.content.clone(), added.id)
                .is_some()
            {
                return Err(Error::InvalidTokenizer(format!(
                    "added token {:?} listed twice",
                    added.content
                )));
            }
            let key = vocab_spelling(&added.content, byte_level);
            match vocab.get(key.as_ref()) {
                Some(&id) if id == added.id => {}
                Some(&id) => {
                    return Err(Error::InvalidTokenizer(format!(
                        "added token {:?} has id {} but the vocabulary maps it to {id}",
                        added.content, added.id
                    )))
                }
                None => {
                    if let Some((other, _)) = id_to_token.get(&added.id) {
                        return Err(Error::InvalidTokenizer(format!(
                            "duplicate id {} for added token {:?} and {other:?}",
                            added.id, added.content
                        )));
                    }
                    id_to_token.insert(added.id, (added.content.clone(), TokenEntry::Added));
                }
            }
        }

        let mut symbol_ids: HashMap<String, SymbolId> = HashMap::new();
        let mut symbol_tokens: Vec<Option<TokenId>> = Vec::new();
        let mut intern = |s: &str, symbol_ids: &mut HashMap<String, SymbolId>| -> SymbolId {
            if let Some(&id) = symbol_ids.get(s) {
                return id;
            }
            let id = symbol_tokens.len() as SymbolId;
            symbol_tokens.push(vocab.get(s).copied());
            symbol_ids.insert(s.to_owned(), id);
            id
        };
        if byte_level {
            for c in byte_level::alphabet() {
                intern(c.encode_utf8(&mut [0; 4]), &mut symbol_ids);
            }
        }
        let mut sorted_vocab: Vec<&String> = vocab.keys().collect();
        sorted_vocab.sort_by_key(|t| vocab[*t]);
        for token in sorted_vocab {
            intern(token, &mut symbol_ids);
        }

        let mut merge_table = HashMap::with_capacity(merges.len());
        for (rank, (left, right)) in merges.iter().enumerate() {
            for side in [left, right] {
                if !vocab.contains_key(side) && !is_base_symbol(side, byte_level) {
                    return Err(Error::InvalidTokenizer(format!(
                        "merge {rank} ({left:?}, {right:?}) references unknown symbol {side:?}"
                    )));
                }
            }
            let merged = format!("{left}{right}");
            if !vocab.contains_key(&merged) {
                return Err(Error::InvalidTokenizer(format!(
                    "merge {rank} ({left:?}, {right:?}) produces {merged:?}, which is not in the vocabulary"
                )));
            }
            let l = intern(left, &mut symbol_ids);
            let r = intern(right, &mut symbol_ids);
            let m = symbol_ids[&merged];
            merge_table.entry((l, r)).or_insert((rank as Rank, m));
        }

        let char_symbols = symbol_ids
            .iter()
            .filter_map(|(s, &id)| {
                let mut chars = s.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Some((c, id)),
                    _ => None,
                }
            })
            .collect();

        Ok(Tokenizer {
            name: name.into(),
            byte_level,
            vocab,
            merges,
            added_tokens,
            id_to_token,
            added_lookup,
            symbol_ids,
            char_symbols,
            symbol_tokens,
            merge_table,
        })
    }

    /// Builds a tokenizer whose ids follow the order of `tokens`.
    pub fn from_ordered(
        name: impl Into<String>,
        byte_level: bool,
        tokens: &[&str],
        merges: &[(&str, &str)],
    ) -> Result<Self> {
        let vocab = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.to_string(), i as TokenId))
            .collect::<HashMap<_, _>>();
        if vocab.len() != tokens.len() {
            return Err(Error::InvalidTokenizer("repeated vocabulary entry".into()));
        }
        let merges = merges
            .iter()
            .map(|(l, r)| (l.to_string(), r.to_string()))
            .collect();
        Tokenizer::new(name, byte_level, vocab, merges, Vec::new())
    }

    /// A copy of this tokenizer with `extra` appended to the added tokens.
    pub fn with_added_tokens(&self, extra: impl IntoIterator<Item = AddedToken>) -> Result<Self> {
        let mut added = self.added_tokens.clone();
        added.extend(extra);
        Tokenizer::new(
            self.name.clone(),
            self.byte_level,
            self.vocab.clone(),
            self.merges.clone(),
            added,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn byte_level(&self) -> bool {
        self.byte_level
    }

    pub fn vocab(&self) -> &HashMap<String, TokenId> {
        &self.vocab
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn added_tokens(&self) -> &[AddedToken] {
        &self.added_tokens
    }

    /// `|vocab|` plus the added tokens that are not already vocabulary entries.
    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
            + self
                .added_tokens
                .iter()
                .filter(|a| !self.vocab.contains_key(self.vocab_key(&a.content).as_ref()))
                .count()
    }

    /// How raw `text` is spelled as a vocabulary key (byte-mapped in byte-level mode).
    pub fn vocab_key<'a>(&self, text: &'a str) -> Cow<'a, str> {
        vocab_spelling(text, self.byte_level)
    }

    /// Largest id in use, if any.
    pub fn max_id(&self) -> Option<TokenId> {
        self.id_to_token.keys().copied().max()
    }

    pub fn token_id(&self, token: &str) -> Option<TokenId> {
        self.vocab
            .get(token)
            .or_else(|| self.added_lookup.get(token))
            .copied()
    }

    pub fn id_to_token(&self, id: TokenId) -> Option<&str> {
        self.id_to_token.get(&id).map(|(s, _)| s.as_str())
    }

    pub fn is_added_token(&self, text: &str) -> bool {
        self.added_lookup.contains_key(text)
    }

    /// Encodes one pretokenized word.
    ///
    /// With `space_prefix` a single space is prepended before anything else, so it takes
    /// part in added-token matching and in merging.
    pub fn encode_word(&self, word: &str, space_prefix: bool) -> Result<Encoding> {
        if word.is_empty() {
            return Err(Error::EmptyInput("cannot encode an empty word"));
        }
        let text: std::borrow::Cow<'_, str> = if space_prefix {
            format!(" {word}").into()
        } else {
            word.into()
        };

        if let Some(&id) = self.added_lookup.get(text.as_ref()) {
            return Ok(Encoding {
                token_ids: vec![id],
                token_strings: vec![text.into_owned()],
                source: word.to_owned(),
                space_prefixed: space_prefix,
            });
        }

        let mut symbols = self.base_symbols(word, &text)?;
        self.apply_merges(&mut symbols);

        let mut token_ids = Vec::with_capacity(symbols.len());
        let mut token_strings = Vec::with_capacity(symbols.len());
        for sym in symbols {
            let id = self.symbol_tokens[sym as usize].ok_or_else(|| Error::UnknownSymbol {
                word: word.to_owned(),
                symbol: self.symbol_string(sym),
            })?;
            token_ids.push(id);
            token_strings.push(self.id_to_token[&id].0.clone());
        }
        Ok(Encoding {
            token_ids,
            token_strings,
            source: word.to_owned(),
            space_prefixed: space_prefix,
        })
    }

    /// Number of tokens `word` encodes to, without materialising the token strings.
    pub fn token_count(&self, word: &str, space_prefix: bool) -> Result<usize> {
        if word.is_empty() {
            return Err(Error::EmptyInput("cannot encode an empty word"));
        }
        let text: std::borrow::Cow<'_, str> = if space_prefix {
            format!(" {word}").into()
        } else {
            word.into()
        };
        if self.added_lookup.contains_key(text.as_ref()) {
            return Ok(1);
        }
        let mut symbols = self.base_symbols(word, &text)?;
        self.apply_merges(&mut symbols);
        if let Some(&sym) = symbols
            .iter()
            .find(|&&s| self.symbol_tokens[s as usize].is_none())
        {
            return Err(Error::UnknownSymbol {
                word: word.to_owned(),
                symbol: self.symbol_string(sym),
            });
        }
        Ok(symbols.len())
    }

    /// Encodes each segment bare, in order.
    pub fn encode_text<S: AsRef<str>>(&self, segments: &[S]) -> Result<Vec<Encoding>> {
        segments
            .iter()
            .enumerate()
            .map(|(index, s)| {
                self.encode_word(s.as_ref(), false)
                    .map_err(|e| Error::Segment {
                        index,
                        source: Box::new(e),
                    })
            })
            .collect()
    }

    /// Concatenates the tokens' text, undoing the byte-level mapping where it applies.
    pub fn decode(&self, token_ids: &[TokenId]) -> Result<String> {
        let mut bytes = Vec::new();
        for &id in token_ids {
            let (token, entry) = self.id_to_token.get(&id).ok_or(Error::UnknownTokenId(id))?;
            match entry {
                TokenEntry::Vocab if self.byte_level => {
                    byte_level::decode_to_bytes(token, &mut bytes).map_err(|c| {
                        Error::Internal(format!(
                            "token {token:?} (id {id}) contains {c:?}, which is outside the byte alphabet"
                        ))
                    })?
                }
                _ => bytes.extend_from_slice(token.as_bytes()),
            }
        }
        String::from_utf8(bytes)
            .map_err(|e| Error::Internal(format!("decoded bytes are not valid UTF-8: {e}")))
    }

    /// Whether `word` is a single token under `form`.
    pub fn is_single_token(&self, word: &str, form: WordForm) -> Result<bool> {
        Ok(match form {
            WordForm::Bare => self.token_count(word, false)? == 1,
            WordForm::SpacePrefixed => self.token_count(word, true)? == 1,
            WordForm::Either => {
                self.token_count(word, false)? == 1 || self.token_count(word, true)? == 1
            }
        })
    }

    /// Encoding length of `word` under `form`; for [`WordForm::Either`] the shorter of the two.
    pub fn form_length(&self, word: &str, form: WordForm) -> Result<usize> {
        match form {
            WordForm::Bare => self.token_count(word, false),
            WordForm::SpacePrefixed => self.token_count(word, true),
            WordForm::Either => Ok(self
                .token_count(word, false)?
                .min(self.token_count(word, true)?)),
        }
    }

    fn symbol_string(&self, sym: SymbolId) -> String {
        self.symbol_ids
            .iter()
            .find(|(_, &id)| id == sym)
            .map(|(s, _)| s.clone())
            .unwrap_or_default()
    }

    fn base_symbols(&self, word: &str, text: &str) -> Result<Vec<SymbolId>> {
        let unknown = |c: char| Error::UnknownSymbol {
            word: word.to_owned(),
            symbol: c.to_string(),
        };
        if self.byte_level {
            text.bytes()
                .map(|b| {
                    let c = byte_level::byte_to_char(b);
                    self.char_symbols
                        .get(&c)
                        .copied()
                        .ok_or_else(|| Error::Internal(format!("byte {b:#04x} has no base symbol")))
                })
                .collect()
        } else {
            text.chars()
                .map(|c| self.char_symbols.get(&c).copied().ok_or_else(|| unknown(c)))
                .collect()
        }
    }

    /// Lowest rank first, leftmost first among equal ranks.
    fn apply_merges(&self, symbols: &mut Vec<SymbolId>) {
        if symbols.len() < 2 || self.merge_table.is_empty() {
            return;
        }
        const NONE: usize = usize::MAX;
        let n = symbols.len();
        let mut prev: Vec<usize> = (0..n).map(|i| i.wrapping_sub(1)).collect();
        let mut next: Vec<usize> = (1..=n).map(|i| if i == n { NONE } else { i }).collect();
        let mut alive = vec![true; n];

        let mut heap = BinaryHeap::new();
        for i in 0..n - 1 {
            if let Some(&(rank, _)) = self.merge_table.get(&(symbols[i], symbols[i + 1])) {
                heap.push(Reverse((rank, i)));
            }
        }

        while let Some(Reverse((rank, pos))) = heap.pop() {
            if !alive[pos] {
                continue;
            }
            let right = next[pos];
            if right == NONE {
                continue;
            }
            let merged = match self.merge_table.get(&(symbols[pos], symbols[right])) {
                Some(&(r, merged)) if r == rank => merged,
                _ => continue,
            };
            symbols[pos] = merged;
            alive[right] = false;
            let after = next[right];
            next[pos] = after;
            if after != NONE {
                prev[after] = pos;
            }
            let before = prev[pos];
            if before != NONE {
                if let Some(&(r, _)) = self.merge_table.get(&(symbols[before], merged)) {
                    heap.push(Reverse((r, before)));
                }
            }
            if after != NONE {
                if let Some(&(r, _)) = self.merge_table.get(&(merged, symbols[after])) {
                    heap.push(Reverse((r, pos)));
                }
            }
        }

        let mut write = 0;
        for read in 0..n {
            if alive[read] {
                symbols[write] = symbols[read];
                write += 1;
            }
        }
        symbols.truncate(write);
    }

    /// Every distinct token id in use (vocabulary and added tokens).
    pub fn token_ids(&self) -> HashSet<TokenId> {
        self.id_to_token.keys().copied().collect()
    }
}
