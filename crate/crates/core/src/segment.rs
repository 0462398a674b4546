//! Splitting raw text into the word units that fertility, characters-per-token and
//! coverage are defined over.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::error::{Error, Result};

/// Common Chinese words, one per line, used by the default Chinese segmenter.
pub const DEFAULT_HAN_DICTIONARY: &str = include_str!("../data/zh_dictionary.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentMode {
    UnicodeWords,
    Whitespace,
    HanPerChar,
    HanGreedyDict,
}

impl SegmentMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SegmentMode::UnicodeWords => "unicode-words",
            SegmentMode::Whitespace => "whitespace",
            SegmentMode::HanPerChar => "han-per-char",
            SegmentMode::HanGreedyDict => "han-greedy-dict",
        }
    }
}

impl fmt::Display for SegmentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for SegmentMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "unicode-words" => Ok(SegmentMode::UnicodeWords),
            "whitespace" => Ok(SegmentMode::Whitespace),
            "han-per-char" => Ok(SegmentMode::HanPerChar),
            "han-greedy-dict" => Ok(SegmentMode::HanGreedyDict),
            other => Err(format!(
                "unknown segmenter {other:?} (expected unicode-words, whitespace, han-per-char or han-greedy-dict)"
            )),
        }
    }
}

/// Longest-match dictionary for Han spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    words: HashSet<String>,
    max_chars: usize,
}

impl Dictionary {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let words: HashSet<String> = words
            .into_iter()
            .map(Into::into)
            .filter(|w| !w.is_empty())
            .collect();
        let max_chars = words.iter().map(|w| w.chars().count()).max().unwrap_or(0);
        Dictionary { words, max_chars }
    }

    /// The shipped dictionary of common Chinese words.
    pub fn default_han() -> Self {
        Dictionary::new(
            DEFAULT_HAN_DICTIONARY
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentPolicy {
    pub mode: SegmentMode,
    pub dictionary: Option<Dictionary>,
}

impl SegmentPolicy {
    pub fn new(mode: SegmentMode) -> Self {
        SegmentPolicy {
            mode,
            dictionary: None,
        }
    }

    pub fn with_dictionary(mode: SegmentMode, dictionary: Dictionary) -> Self {
        SegmentPolicy {
            mode,
            dictionary: Some(dictionary),
        }
    }

    pub fn unicode_words() -> Self {
        SegmentPolicy::new(SegmentMode::UnicodeWords)
    }

    /// Default policy for a language tag: Chinese goes through the shipped dictionary,
    /// everything else through Unicode word boundaries.
    pub fn default_for_language(language: &str) -> Self {
        let primary = language
            .split(['-', '_'])
            .next()
            .unwrap_or_default()
            .to_ascii_lowercase();
        if matches!(primary.as_str(), "zh" | "chinese" | "cmn") {
            let dict = Dictionary::default_han();
            if dict.is_empty() {
                SegmentPolicy::new(SegmentMode::HanPerChar)
            } else {
                SegmentPolicy::with_dictionary(SegmentMode::HanGreedyDict, dict)
            }
        } else {
            SegmentPolicy::unicode_words()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == SegmentMode::HanGreedyDict
            && self.dictionary.as_ref().is_none_or(Dictionary::is_empty)
        {
            return Err(Error::Config(
                "han-greedy-dict segmentation requires a non-empty dictionary".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Script {
    Spaced,
    Han,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub text: String,
    /// Unicode scalar values in `text`.
    pub char_count: usize,
    pub script: Script,
    /// Whether whitespace immediately precedes the segment in the source document.
    pub after_space: bool,
}

impl Segment {
    fn new(text: &str, after_space: bool) -> Self {
        Segment {
            text: text.to_owned(),
            char_count: text.chars().count(),
            script: classify_script(text),
            after_space,
        }
    }
}

/// Han ideographs (CJK unified ideographs and extensions, compatibility ideographs,
/// and the ideographic iteration/number marks).
pub fn is_han(c: char) -> bool {
    matches!(c as u32,
        0x2E80..=0x2E99 | 0x2E9B..=0x2EF3 | 0x2F00..=0x2FD5
        | 0x3005 | 0x3007 | 0x3021..=0x3029 | 0x3038..=0x303B
        | 0x3400..=0x4DBF | 0x4E00..=0x9FFF | 0xF900..=0xFA6D | 0xFA70..=0xFAD9
        | 0x20000..=0x2A6DF | 0x2A700..=0x2EBEF | 0x2F800..=0x2FA1D
        | 0x30000..=0x323AF)
}

/// `Han` if every letter is Han, `Spaced` if none is, `Mixed` otherwise.
pub fn classify_script(text: &str) -> Script {
    let (mut han, mut other) = (false, false);
    for c in text.chars().filter(|c| c.is_alphabetic()) {
        if is_han(c) {
            han = true;
        } else {
            other = true;
        }
    }
    match (han, other) {
        (true, false) => Script::Han,
        (true, true) => Script::Mixed,
        _ => Script::Spaced,
    }
}

fn preceded_by_space(text: &str, offset: usize) -> bool {
    text[..offset]
        .chars()
        .next_back()
        .is_some_and(char::is_whitespace)
}

fn push_unicode_words(doc: &str, base: usize, span: &str, out: &mut Vec<Segment>) {
    for (offset, word) in span.split_word_bound_indices() {
        if word.chars().any(char::is_alphanumeric) {
            out.push(Segment::new(word, preceded_by_space(doc, base + offset)));
        }
    }
}

/// Splits `text` into alternating Han / non-Han spans with their byte offsets.
fn han_spans(text: &str) -> Vec<(usize, &str, bool)> {
    let mut spans = Vec::new();
    let mut start = 0;
    let mut current: Option<bool> = None;
    for (i, c) in text.char_indices() {
        let han = is_han(c);
        match current {
            Some(h) if h == han => {}
            Some(h) => {
                spans.push((start, &text[start..i], h));
                start = i;
                current = Some(han);
            }
            None => current = Some(han),
        }
    }
    if let Some(h) = current {
        spans.push((start, &text[start..], h));
    }
    spans
}

/// Splits a document into segments according to `policy`.
pub fn segment(text: &str, policy: &SegmentPolicy) -> Result<Vec<Segment>> {
    policy.validate()?;
    let mut out = Vec::new();
    match policy.mode {
        SegmentMode::UnicodeWords => push_unicode_words(text, 0, text, &mut out),
        SegmentMode::Whitespace => {
            let base = text.as_ptr() as usize;
            for word in text.split_whitespace() {
                let offset = word.as_ptr() as usize - base;
                out.push(Segment::new(word, preceded_by_space(text, offset)));
            }
        }
        SegmentMode::HanPerChar | SegmentMode::HanGreedyDict => {
            let dict = policy
                .dictionary
                .as_ref()
                .filter(|_| policy.mode == SegmentMode::HanGreedyDict);
            for (start, span, han) in han_spans(text) {
                if !han {
                    push_unicode_words(text, start, span, &mut out);
                    continue;
                }
                let chars: Vec<(usize, char)> = span.char_indices().collect();
                let mut i = 0;
                while i < chars.len() {
                    let mut take = 1;
                    if let Some(dict) = dict {
                        let longest = dict.max_chars.min(chars.len() - i);
                        for len in (2..=longest).rev() {
                            let end = chars.get(i + len).map_or(span.len(), |&(b, _)| b);
                            if dict.contains(&span[chars[i].0..end]) {
                                take = len;
                                break;
                            }
                        }
                    }
                    let from = chars[i].0;
                    let to = chars.get(i + take).map_or(span.len(), |&(b, _)| b);
                    out.push(Segment::new(
                        &span[from..to],
                        preceded_by_space(text, start + from),
                    ));
                    i += take;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(segments: &[Segment]) -> Vec<&str> {
        segments.iter().map(|s| s.text.as_str()).collect()
    }

    #[test]
    fn unicode_words_drop_punctuation() {
        let p = SegmentPolicy::unicode_words();
        assert_eq!(
            texts(&segment("hello world", &p).unwrap()),
            ["hello", "world"]
        );
        assert_eq!(
            texts(&segment("hello, world!", &p).unwrap()),
            ["hello", "world"]
        );
        assert_eq!(
            texts(&segment("It costs 3.50 today", &p).unwrap()),
            ["It", "costs", "3.50", "today"]
        );
    }

    #[test]
    fn whitespace_mode_keeps_punctuation() {
        let p = SegmentPolicy::new(SegmentMode::Whitespace);
        let segs = segment("hello,  world!\tok", &p).unwrap();
        assert_eq!(texts(&segs), ["hello,", "world!", "ok"]);
        assert_eq!(
            segs.iter().map(|s| s.after_space).collect::<Vec<_>>(),
            [false, true, true]
        );
    }

    #[test]
    fn han_per_char() {
        let p = SegmentPolicy::new(SegmentMode::HanPerChar);
        assert_eq!(texts(&segment("我们去", &p).unwrap()), ["我", "们", "去"]);
        let segs = segment("我们 like 北京!", &p).unwrap();
        assert_eq!(texts(&segs), ["我", "们", "like", "北", "京"]);
        assert!(segs[2].after_space && segs[3].after_space && !segs[4].after_space);
    }

    #[test]
    fn han_greedy_longest_match() {
        let dict = Dictionary::new(["我们", "北京", "北京大学", "大学"]);
        let p = SegmentPolicy::with_dictionary(SegmentMode::HanGreedyDict, dict);
        assert_eq!(
            texts(&segment("我们去北京大学了", &p).unwrap()),
            ["我们", "去", "北京大学", "了"]
        );
    }

    #[test]
    fn greedy_without_dictionary_is_a_config_error() {
        let p = SegmentPolicy::new(SegmentMode::HanGreedyDict);
        assert!(matches!(segment("我们", &p), Err(Error::Config(_))));
    }

    #[test]
    fn scripts() {
        assert_eq!(classify_script("hello"), Script::Spaced);
        assert_eq!(classify_script("我们"), Script::Han);
        assert_eq!(classify_script("hello我们"), Script::Mixed);
        assert_eq!(classify_script("2024"), Script::Spaced);
    }

    #[test]
    fn char_counts_are_scalar_values() {
        let segs = segment("naïve नमस्ते", &SegmentPolicy::unicode_words()).unwrap();
        assert_eq!(segs[0].char_count, 5);
        assert_eq!(segs[1].char_count, "नमस्ते".chars().count());
    }

    #[test]
    fn default_policy_routes_chinese() {
        assert_eq!(
            SegmentPolicy::default_for_language("zh-CN").mode,
            SegmentMode::HanGreedyDict
        );
        assert_eq!(
            SegmentPolicy::default_for_language("en").mode,
            SegmentMode::UnicodeWords
        );
        assert!(Dictionary::default_han().contains("我们"));
    }

    fn letters_digits(s: &str) -> String {
        s.chars().filter(|c| c.is_alphanumeric()).collect()
    }

    proptest::proptest! {
        #[test]
        fn segments_preserve_letter_order(text in "[a-z0-9 ,.!我们去北京大学]{0,40}") {
            for mode in [SegmentMode::UnicodeWords, SegmentMode::Whitespace, SegmentMode::HanPerChar] {
                let segs = segment(&text, &SegmentPolicy::new(mode)).unwrap();
                let joined: String = segs.iter().map(|s| letters_digits(&s.text)).collect();
                proptest::prop_assert_eq!(joined, letters_digits(&text));
                for s in &segs {
                    proptest::prop_assert!(s.char_count >= 1);
                    proptest::prop_assert_eq!(s.char_count, s.text.chars().count());
                }
            }
        }

        #[test]
        fn han_per_char_is_one_segment_per_scalar(text in "[我们去北京大学]{1,30}") {
            let segs = segment(&text, &SegmentPolicy::new(SegmentMode::HanPerChar)).unwrap();
            proptest::prop_assert_eq!(segs.len(), text.chars().count());
        }
    }
}
