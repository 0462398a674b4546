//! Tokenizer files.
//!
//! The native layout is a single JSON object:
//!
//! ```json
//! {
//!   "name": "toy",
//!   "byte_level": false,
//!   "vocab": {"a": 0, "b": 1, "ab": 2},
//!   "merges": ["a b"],
//!   "added_tokens": [{"id": 3, "content": "ac"}]
//! }
//! ```
//!
//! Vocabulary entries are written in id order. A merge whose sides contain a space
//! (possible only for character-level tokenizers) is written as a two-element array.
//!
//! Files in the common public serialization (`{"model": {"type": "BPE", "vocab", "merges"},
//! "added_tokens": [...], "pre_tokenizer": ...}`) are also accepted; byte-level mode is
//! detected from a `ByteLevel` pre-tokenizer or decoder.

use std::collections::HashMap;
use std::path::Path;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::Value;

use super::LoadReport;
use crate::bpe::{AddedToken, TokenId, Tokenizer};
use crate::error::{Error, Result};

const NATIVE_FIELDS: [&str; 5] = ["name", "byte_level", "vocab", "merges", "added_tokens"];

pub fn load_tokenizer(path: impl AsRef<Path>) -> Result<(Tokenizer, LoadReport)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    tokenizer_from_json(&text, path)
}

/// Parses either layout; `path` names the source in errors and supplies the default name.
pub fn tokenizer_from_json(text: &str, path: &Path) -> Result<(Tokenizer, LoadReport)> {
    let value: Value = serde_json::from_str(text).map_err(|source| Error::Json {
        path: path.to_owned(),
        source,
    })?;
    let Value::Object(root) = value else {
        return Err(Error::format(path, "top level must be a JSON object"));
    };
    let default_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "tokenizer".into());
    let mut report = LoadReport::default();

    let (name, byte_level, vocab, merges, added) = if let Some(model) = root.get("model") {
        let model = model
            .as_object()
            .ok_or_else(|| Error::format(path, "\"model\" must be an object"))?;
        if let Some(kind) = model.get("type").and_then(Value::as_str) {
            if kind != "BPE" {
                return Err(Error::format(
                    path,
                    format!("unsupported model type {kind:?}"),
                ));
            }
        }
        for flag in ["ignore_merges", "byte_fallback"] {
            if model.get(flag).and_then(Value::as_bool) == Some(true) {
                report.warnings.push(format!(
                    "{}: model.{flag} is not supported and was ignored",
                    path.display()
                ));
            }
        }
        for affix in ["continuing_subword_prefix", "end_of_word_suffix"] {
            if model.get(affix).is_some_and(|v| !v.is_null() && v != "") {
                report.warnings.push(format!(
                    "{}: model.{affix} is not supported and was ignored",
                    path.display()
                ));
            }
        }
        if root.get("normalizer").is_some_and(|v| !v.is_null()) {
            report
                .warnings
                .push(format!("{}: normalizer is not applied", path.display()));
        }
        let byte_level = ["pre_tokenizer", "decoder"]
            .iter()
            .any(|k| root.get(*k).is_some_and(mentions_byte_level));
        (
            default_name,
            byte_level,
            parse_vocab(model.get("vocab"), path)?,
            parse_merges(model.get("merges"), path)?,
            root.get("added_tokens"),
        )
    } else {
        for key in root.keys() {
            if !NATIVE_FIELDS.contains(&key.as_str()) {
                report.warnings.push(format!(
                    "{}: ignoring unknown field {key:?}",
                    path.display()
                ));
            }
        }
        let name = match root.get("name") {
            None | Some(Value::Null) => default_name,
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(Error::format(path, "\"name\" must be a string")),
        };
        let byte_level = match root.get("byte_level") {
            None => false,
            Some(Value::Bool(b)) => *b,
            Some(_) => return Err(Error::format(path, "\"byte_level\" must be a boolean")),
        };
        (
            name,
            byte_level,
            parse_vocab(root.get("vocab"), path)?,
            parse_merges(root.get("merges"), path)?,
            root.get("added_tokens"),
        )
    };

    let added = parse_added(added, &vocab, path)?;
    let tokenizer = Tokenizer::new(name, byte_level, vocab, merges, added)
        .map_err(|e| Error::format(path, e.to_string()))?;
    Ok((tokenizer, report))
}

fn mentions_byte_level(value: &Value) -> bool {
    match value {
        Value::Object(map) => {
            map.get("type").and_then(Value::as_str) == Some("ByteLevel")
                || map.values().any(mentions_byte_level)
        }
        Value::Array(items) => items.iter().any(mentions_byte_level),
        _ => false,
    }
}

fn parse_vocab(value: Option<&Value>, path: &Path) -> Result<HashMap<String, TokenId>> {
    let Some(Value::Object(map)) = value else {
        return Err(Error::format(path, "missing or non-object \"vocab\""));
    };
    let mut vocab = HashMap::with_capacity(map.len());
    let mut by_id: HashMap<TokenId, &str> = HashMap::with_capacity(map.len());
    for (token, id) in map {
        let id = id
            .as_u64()
            .and_then(|id| TokenId::try_from(id).ok())
            .ok_or_else(|| {
                Error::format(
                    path,
                    format!("vocab entry {token:?}: id must be a non-negative 32-bit integer"),
                )
            })?;
        if let Some(other) = by_id.insert(id, token) {
            return Err(Error::format(
                path,
                format!("duplicate id {id} for vocab entries {other:?} and {token:?}"),
            ));
        }
        vocab.insert(token.clone(), id);
    }
    Ok(vocab)
}

fn parse_merges(value: Option<&Value>, path: &Path) -> Result<Vec<(String, String)>> {
    let items = match value {
        None | Some(Value::Null) => return Ok(Vec::new()),
        Some(Value::Array(items)) => items,
        Some(_) => return Err(Error::format(path, "\"merges\" must be an array")),
    };
    items
        .iter()
        .enumerate()
        .map(|(rank, item)| {
            let bad = |what: &str| Error::format(path, format!("merge {rank}: {what}"));
            match item {
                Value::String(s) => {
                    let mut parts = s.split(' ');
                    match (parts.next(), parts.next(), parts.next()) {
                        (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                            Ok((l.to_owned(), r.to_owned()))
                        }
                        _ => Err(bad(&format!(
                            "expected two space-separated symbols, got {s:?}"
                        ))),
                    }
                }
                Value::Array(pair) => match pair.as_slice() {
                    [Value::String(l), Value::String(r)] if !l.is_empty() && !r.is_empty() => {
                        Ok((l.clone(), r.clone()))
                    }
                    _ => Err(bad("expected a pair of non-empty strings")),
                },
                _ => Err(bad("expected a string or a two-element array")),
            }
        })
        .collect()
}

fn parse_added(
    value: Option<&Value>,
    vocab: &HashMap<String, TokenId>,
    path: &Path,
) -> Result<Vec<AddedToken>> {
    let items = match value {
        None | Some(Value::Null) => return Ok(Vec::new()),
        Some(Value::Array(items)) => items,
        Some(_) => return Err(Error::format(path, "\"added_tokens\" must be an array")),
    };
    let mut next_id = vocab.values().copied().max().map_or(0, |m| m + 1);
    let mut out = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let bad = |what: &str| Error::format(path, format!("added token {i}: {what}"));
        let token = match item {
            Value::String(content) => {
                let id = match vocab.get(content) {
                    Some(&id) => id,
                    None => {
                        next_id += 1;
                        next_id - 1
                    }
                };
                AddedToken {
                    id,
                    content: content.clone(),
                }
            }
            Value::Object(map) => {
                let content = map
                    .get("content")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("missing \"content\" string"))?;
                let id = map
                    .get("id")
                    .and_then(Value::as_u64)
                    .and_then(|id| TokenId::try_from(id).ok())
                    .ok_or_else(|| bad("missing or invalid \"id\""))?;
                next_id = next_id.max(id + 1);
                AddedToken {
                    id,
                    content: content.to_owned(),
                }
            }
            _ => return Err(bad("expected a string or an object")),
        };
        out.push(token);
    }
    Ok(out)
}

struct VocabById<'a>(Vec<(&'a str, TokenId)>);

impl Serialize for VocabById<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (token, id) in &self.0 {
            map.serialize_entry(token, id)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum MergeEntry<'a> {
    Joined(String),
    Pair([&'a str; 2]),
}

#[derive(Serialize)]
struct NativeFile<'a> {
    name: &'a str,
    byte_level: bool,
    vocab: VocabById<'a>,
    merges: Vec<MergeEntry<'a>>,
    added_tokens: &'a [AddedToken],
}

/// The native JSON text for `tokenizer`. Output is deterministic.
pub fn tokenizer_to_json(tokenizer: &Tokenizer) -> String {
    let mut vocab: Vec<(&str, TokenId)> = tokenizer
        .vocab()
        .iter()
        .map(|(t, &id)| (t.as_str(), id))
        .collect();
    vocab.sort_by_key(|&(_, id)| id);
    let merges = tokenizer
        .merges()
        .iter()
        .map(|(l, r)| {
            if l.contains(' ') || r.contains(' ') {
                MergeEntry::Pair([l, r])
            } else {
                MergeEntry::Joined(format!("{l} {r}"))
            }
        })
        .collect();
    let file = NativeFile {
        name: tokenizer.name(),
        byte_level: tokenizer.byte_level(),
        vocab: VocabById(vocab),
        merges,
        added_tokens: tokenizer.added_tokens(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("serializing plain data cannot fail");
    text.push('\n');
    text
}

pub fn save_tokenizer(tokenizer: &Tokenizer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, tokenizer_to_json(tokenizer)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<(Tokenizer, LoadReport)> {
        tokenizer_from_json(text, Path::new("toy.json"))
    }

    #[test]
    fn native_file() {
        let (t, report) = parse(
            r#"{"name":"toy","byte_level":false,"vocab":{"a":0,"b":1,"c":2,"ab":3},"merges":["a b"],"added_tokens":[]}"#,
        )
        .unwrap();
        assert_eq!(t.vocab_size(), 4);
        assert_eq!(t.name(), "toy");
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn no_merges_splits_fully() {
        let (t, _) = parse(r#"{"vocab":{"a":0,"b":1}}"#).unwrap();
        assert_eq!(t.encode_word("abab", false).unwrap().len(), 4);
        assert_eq!(t.name(), "toy");
    }

    #[test]
    fn errors_are_distinct() {
        let malformed = parse("{not json").unwrap_err();
        assert!(matches!(malformed, Error::Json { .. }));

        let unknown = parse(r#"{"vocab":{"a":0,"b":1},"merges":["a b"]}"#).unwrap_err();
        assert!(unknown.to_string().contains("merge 0"), "{unknown}");

        let dup = parse(r#"{"vocab":{"a":0,"b":0}}"#).unwrap_err();
        assert!(dup.to_string().contains("duplicate id 0"), "{dup}");

        let bad_merge = parse(r#"{"vocab":{"a":0},"merges":["ab"]}"#).unwrap_err();
        assert!(bad_merge.to_string().contains("merge 0"), "{bad_merge}");
    }

    #[test]
    fn unknown_fields_warn() {
        let (_, report) = parse(r#"{"vocab":{"a":0},"version":"2"}"#).unwrap();
        assert_eq!(report.warnings.len(), 1);
        assert!(report.warnings[0].contains("version"));
    }

    #[test]
    fn public_layout() {
        let text = r#"{
            "version": "1.0",
            "added_tokens": [{"id": 5, "content": "<|end|>", "special": true}],
            "normalizer": null,
            "pre_tokenizer": {"type": "Sequence", "pretokenizers": [{"type": "ByteLevel", "add_prefix_space": false}]},
            "model": {"type": "BPE", "vocab": {"Ġ": 0, "h": 1, "i": 2, "Ġh": 3, "Ġhi": 4},
                      "merges": [["Ġ", "h"], "Ġh i"]}
        }"#;
        let (t, report) = tokenizer_from_json(text, Path::new("vendor/tokenizer.json")).unwrap();
        assert!(t.byte_level());
        assert_eq!(t.vocab_size(), 6);
        assert_eq!(t.encode_word("hi", true).unwrap().token_ids, [4]);
        assert_eq!(t.encode_word("<|end|>", false).unwrap().token_ids, [5]);
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
    }

    #[test]
    fn roundtrip_is_field_exact() {
        let t = Tokenizer::from_ordered("x", false, &[" ", "a", " a", "b"], &[(" ", "a")])
            .unwrap()
            .with_added_tokens([AddedToken {
                id: 9,
                content: "zz".into(),
            }])
            .unwrap();
        let text = tokenizer_to_json(&t);
        let (back, _) = parse(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(tokenizer_to_json(&back), text);
    }

    #[test]
    fn save_to_missing_directory_fails() {
        let t = Tokenizer::from_ordered("x", false, &["a"], &[]).unwrap();
        let err = save_tokenizer(&t, "/nonexistent-dir/t.json").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
