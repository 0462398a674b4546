use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use unicode_normalization::UnicodeNormalization;

use super::LoadReport;
use crate::error::{Error, Result};

/// Reference words of one language, NFC-normalised and deduplicated in first-seen order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordList {
    pub language: String,
    words: Vec<String>,
}

impl WordList {
    /// Normalises to NFC and drops repeats. Entries must be non-empty and free of whitespace.
    pub fn new<I, S>(language: impl Into<String>, words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for word in words {
            let word = normalize_entry(word.as_ref()).map_err(Error::Config)?;
            if seen.insert(word.clone()) {
                out.push(word);
            }
        }
        Ok(WordList {
            language: language.into(),
            words: out,
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Index-aligned translation pairs between two languages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelWordList {
    pub source_language: String,
    pub target_language: String,
    pairs: Vec<(String, String)>,
}

impl ParallelWordList {
    pub fn new<I, S, T>(
        source_language: impl Into<String>,
        target_language: impl Into<String>,
        pairs: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (s, t) in pairs {
            let pair = (
                normalize_entry(s.as_ref()).map_err(Error::Config)?,
                normalize_entry(t.as_ref()).map_err(Error::Config)?,
            );
            if seen.insert(pair.clone()) {
                out.push(pair);
            }
        }
        Ok(ParallelWordList {
            source_language: source_language.into(),
            target_language: target_language.into(),
            pairs: out,
        })
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Source-side words, deduplicated (two pairs may share a source word).
    pub fn source(&self) -> WordList {
        WordList::new(
            self.source_language.clone(),
            self.pairs.iter().map(|p| &p.0),
        )
        .expect("pair entries are already validated")
    }

    /// Target-side words, deduplicated (two source words may share a translation).
    pub fn target(&self) -> WordList {
        WordList::new(
            self.target_language.clone(),
            self.pairs.iter().map(|p| &p.1),
        )
        .expect("pair entries are already validated")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadedWordList {
    Single(WordList),
    Parallel(ParallelWordList),
}

impl LoadedWordList {
    /// The one or two per-language lists STRR is computed over.
    pub fn sides(&self) -> Vec<WordList> {
        match self {
            LoadedWordList::Single(w) => vec![w.clone()],
            LoadedWordList::Parallel(p) => vec![p.source(), p.target()],
        }
    }
}

fn normalize_entry(raw: &str) -> std::result::Result<String, String> {
    let word: String = raw.nfc().collect();
    if word.is_empty() {
        return Err("empty wordlist entry".into());
    }
    if word.chars().any(char::is_whitespace) {
        return Err(format!("wordlist entry {word:?} contains whitespace"));
    }
    Ok(word)
}

/// Language tags from a file stem: `en-fr` → (`en`, `fr`), `en` → (`en`, `en`).
fn languages_from_stem(path: &Path) -> (String, String) {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    match stem.split_once(['-', '_']) {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => (a.to_owned(), b.to_owned()),
        _ if stem.is_empty() => ("unknown".into(), "unknown".into()),
        _ => (stem.clone(), stem),
    }
}

/// Reads a one-column (single) or two-column tab-separated (parallel) wordlist.
///
/// Languages come from the file stem (`en.txt`, `en-hi.tsv`).
pub fn load_wordlist(path: impl AsRef<Path>) -> Result<(LoadedWordList, LoadReport)> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|e| {
        let valid = e.utf8_error().valid_up_to();
        let line = e.as_bytes()[..valid]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1;
        Error::line(path, line, "invalid UTF-8")
    })?;
    let (source, target) = languages_from_stem(path);
    parse_wordlist(&text, path, &source, &target)
}

/// Parses wordlist text; `path` is only used in error messages.
pub fn parse_wordlist(
    text: &str,
    path: &Path,
    source_language: &str,
    target_language: &str,
) -> Result<(LoadedWordList, LoadReport)> {
    let mut report = LoadReport::default();
    let mut columns: Option<(usize, usize)> = None;
    let mut rows: Vec<Vec<&str>> = Vec::new();
    let mut duplicates = 0;

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim_end_matches('\r');
        if line.starts_with('#') || line.trim().is_empty() {
            report.skipped_lines += 1;
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() > 2 {
            return Err(Error::line(
                path,
                line_no,
                format!(
                    "expected 1 or 2 tab-separated columns, found {}",
                    fields.len()
                ),
            ));
        }
        match columns {
            Some((n, first)) if n != fields.len() => {
                return Err(Error::line(
                    path,
                    line_no,
                    format!(
                        "mixed column counts: {} here, {n} on line {first}",
                        fields.len()
                    ),
                ))
            }
            Some(_) => {}
            None => columns = Some((fields.len(), line_no)),
        }
        for field in &fields {
            normalize_entry(field).map_err(|m| Error::line(path, line_no, m))?;
        }
        rows.push(fields);
    }

    let Some((n_columns, _)) = columns else {
        return Err(Error::format(path, "wordlist is empty"));
    };
    let loaded = if n_columns == 1 {
        let list = WordList::new(source_language, rows.iter().map(|r| r[0]))?;
        duplicates = rows.len() - list.len();
        LoadedWordList::Single(list)
    } else {
        let list = ParallelWordList::new(
            source_language,
            target_language,
            rows.iter().map(|r| (r[0], r[1])),
        )?;
        duplicates += rows.len() - list.len();
        LoadedWordList::Parallel(list)
    };
    if duplicates > 0 {
        report.skipped_lines += duplicates;
        report.warnings.push(format!(
            "{}: dropped {duplicates} duplicate entr{}",
            path.display(),
            if duplicates == 1 { "y" } else { "ies" }
        ));
    }
    Ok((loaded, report))
}

/// Writes the normalised list back out in the format [`load_wordlist`] reads.
pub fn save_wordlist(list: &LoadedWordList, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    match list {
        LoadedWordList::Single(w) => {
            for word in w.words() {
                let _ = writeln!(out, "{word}");
            }
        }
        LoadedWordList::Parallel(p) => {
            for (s, t) in p.pairs() {
                let _ = writeln!(out, "{s}\t{t}");
            }
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<(LoadedWordList, LoadReport)> {
        parse_wordlist(text, Path::new("test.tsv"), "en", "fr")
    }

    #[test]
    fn single_column() {
        let (list, _) = parse("the\nof\nand\n").unwrap();
        let LoadedWordList::Single(w) = list else {
            panic!()
        };
        assert_eq!(w.words(), ["the", "of", "and"]);
    }

    #[test]
    fn parallel_dedup_by_pair() {
        let (list, report) = parse("the\tle\nof\tde\nthe\tle\n").unwrap();
        let LoadedWordList::Parallel(p) = list else {
            panic!()
        };
        assert_eq!(p.len(), 2);
        assert_eq!(report.skipped_lines, 1);
    }

    #[test]
    fn three_columns_name_the_line() {
        let err = parse("a\tb\nthe\tle\tx\n").unwrap_err();
        assert!(matches!(err, Error::Line { line: 2, .. }), "{err}");
    }

    #[test]
    fn mixed_columns_rejected() {
        let err = parse("a\tb\nc\n").unwrap_err();
        assert!(err.to_string().contains("mixed column counts"), "{err}");
    }

    #[test]
    fn comments_and_empty_files() {
        let (list, report) = parse("# header\nword\n").unwrap();
        assert_eq!(list.sides()[0].len(), 1);
        assert_eq!(report.skipped_lines, 1);
        assert!(parse("# only a comment\n\n").is_err());
    }

    #[test]
    fn nfc_dedup() {
        // "é" precomposed and decomposed
        let (list, _) = parse("caf\u{e9}\ncafe\u{301}\n").unwrap();
        assert_eq!(list.sides()[0].words(), ["caf\u{e9}"]);
    }

    #[test]
    fn internal_whitespace_rejected() {
        assert!(parse("two words\n").is_err());
        assert!(WordList::new("en", ["a b"]).is_err());
    }

    #[test]
    fn language_tags_from_file_stem() {
        assert_eq!(
            languages_from_stem(Path::new("lists/en-hi.tsv")),
            ("en".into(), "hi".into())
        );
        assert_eq!(
            languages_from_stem(Path::new("zh.txt")),
            ("zh".into(), "zh".into())
        );
    }

    #[test]
    fn sides_dedup_shared_translations() {
        let p = ParallelWordList::new("en", "fr", [("big", "grand"), ("large", "grand")]).unwrap();
        assert_eq!(p.source().len(), 2);
        assert_eq!(p.target().len(), 1);
    }
}
