use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LoadReport;
use crate::error::{Error, Result};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Formal,
    Informal,
    #[default]
    Unspecified,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Formal => "formal",
            Domain::Informal => "informal",
            Domain::Unspecified => "unspecified",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "formal" => Ok(Domain::Formal),
            "informal" => Ok(Domain::Informal),
            "unspecified" | "" => Ok(Domain::Unspecified),
            other => Err(format!(
                "unknown domain {other:?} (expected formal, informal or unspecified)"
            )),
        }
    }
}

/// A tagged collection of documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub name: String,
    pub language: String,
    pub domain: Domain,
    pub documents: Vec<String>,
}

impl Corpus {
    pub fn new<I, S>(
        name: impl Into<String>,
        language: impl Into<String>,
        domain: Domain,
        documents: I,
    ) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Corpus {
            name: name.into(),
            language: language.into(),
            domain,
            documents: documents.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// One document per line.
    Lines,
    /// One JSON object per line with a `"text"` field.
    Jsonl,
}

impl CorpusFormat {
    /// `jsonl` for `.jsonl`/`.ndjson` files, `lines` otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "ndjson") => CorpusFormat::Jsonl,
            _ => CorpusFormat::Lines,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lines" => Ok(CorpusFormat::Lines),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(format!(
                "unknown corpus format {other:?} (expected lines or jsonl)"
            )),
        }
    }
}

#[derive(Deserialize)]
struct JsonlRecord {
    text: Option<String>,
    language: Option<String>,
    domain: Option<String>,
}

/// Reads a corpus; `language` and `domain` are the caller's tags, which per-record
/// `"language"`/`"domain"` fields in a jsonl file override.
pub fn load_corpus(
    path: impl AsRef<Path>,
    format: CorpusFormat,
    language: &str,
    domain: Domain,
) -> Result<(Corpus, LoadReport)> {
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

    let mut report = LoadReport::default();
    let mut documents = Vec::new();
    let mut language_tag: Option<(String, usize)> = None;
    let mut domain_tag: Option<(Domain, usize)> = None;

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        if raw.trim().is_empty() {
            report.skipped_lines += 1;
            continue;
        }
        match format {
            CorpusFormat::Lines => documents.push(raw.to_owned()),
            CorpusFormat::Jsonl => {
                let record: JsonlRecord = serde_json::from_str(raw)
                    .map_err(|e| Error::line(path, line_no, format!("malformed JSON: {e}")))?;
                let Some(doc) = record.text else {
                    return Err(Error::line(
                        path,
                        line_no,
                        "record has no \"text\" string field",
                    ));
                };
                if let Some(lang) = record.language {
                    match &language_tag {
                        Some((seen, first)) if *seen != lang => {
                            return Err(Error::line(
                                path,
                                line_no,
                                format!(
                                    "language {lang:?} conflicts with {seen:?} from line {first}"
                                ),
                            ))
                        }
                        Some(_) => {}
                        None => language_tag = Some((lang, line_no)),
                    }
                }
                if let Some(dom) = record.domain {
                    let dom: Domain = dom
                        .parse()
                        .map_err(|e: String| Error::line(path, line_no, e))?;
                    match &domain_tag {
                        Some((seen, first)) if *seen != dom => {
                            return Err(Error::line(
                                path,
                                line_no,
                                format!("domain {dom} conflicts with {seen} from line {first}"),
                            ))
                        }
                        Some(_) => {}
                        None => domain_tag = Some((dom, line_no)),
                    }
                }
                if doc.trim().is_empty() {
                    report.skipped_lines += 1;
                } else {
                    documents.push(doc);
                }
            }
        }
    }
    if report.skipped_lines > 0 {
        report.warnings.push(format!(
            "{}: skipped {} empty line(s)",
            path.display(),
            report.skipped_lines
        ));
    }

    let language = language_tag.map_or_else(|| language.to_owned(), |(l, _)| l);
    if language.is_empty() {
        return Err(Error::format(path, "corpus has no language tag"));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok((
        Corpus {
            name,
            language,
            domain: domain_tag.map_or(domain, |(d, _)| d),
            documents,
        },
        report,
    ))
}
