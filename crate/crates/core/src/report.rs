//! Report tables in markdown, CSV and JSON.
//!
//! Markdown groups rows by (language, domain) with one column per tokenizer and rounds
//! to two decimals. CSV and JSON carry full precision plus the integer counts each
//! ratio was computed from.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::metrics::{Cell, Comparison, MetricReport, StrrReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Md,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "md" | "markdown" => Ok(ReportFormat::Md),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!(
                "unknown format {other:?} (expected md, csv or json)"
            )),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            ReportFormat::Md => "md",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

/// A metric value with the integer ratio it came from, when there is one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub metric: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub numerator: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub denominator: Option<u64>,
}

impl MetricValue {
    fn ratio(metric: &str, numerator: u64, denominator: u64, value: f64) -> Self {
        MetricValue {
            metric: metric.to_owned(),
            value,
            numerator: Some(numerator),
            denominator: Some(denominator),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub language: String,
    pub domain: String,
    pub tokenizer: String,
    pub metrics: Vec<MetricValue>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportTable {
    pub rows: Vec<ReportRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

pub fn corpus_metrics(report: &MetricReport) -> Vec<MetricValue> {
    vec![
        MetricValue::ratio(
            "fertility",
            report.token_count,
            report.word_count,
            report.fertility,
        ),
        MetricValue {
            metric: "entropy_bits".into(),
            value: report.entropy_bits,
            numerator: None,
            denominator: None,
        },
        MetricValue::ratio(
            "chars_per_token",
            report.char_count,
            report.token_count,
            report.chars_per_token,
        ),
    ]
}

pub fn strr_metric(report: &StrrReport) -> MetricValue {
    MetricValue::ratio(
        &format!("strr_{}", report.word_form.as_str().replace('-', "_")),
        report.retained as u64,
        report.n as u64,
        report.strr,
    )
}

impl ReportTable {
    pub fn from_comparison(comparison: &Comparison) -> Self {
        let mut table = ReportTable::default();
        for (t, row) in comparison.cells.iter().enumerate() {
            for (d, cell) in row.iter().enumerate() {
                match cell {
                    Ok(Cell::Corpus(r)) => table.rows.push(ReportRow {
                        language: r.language.clone(),
                        domain: r.domain.to_string(),
                        tokenizer: r.tokenizer_name.clone(),
                        metrics: corpus_metrics(r),
                    }),
                    Ok(Cell::Strr { reports }) => {
                        if let Some(first) = reports.first() {
                            table.rows.push(ReportRow {
                                language: first.language.clone(),
                                domain: "unspecified".into(),
                                tokenizer: first.tokenizer_name.clone(),
                                metrics: reports.iter().map(strr_metric).collect(),
                            });
                        }
                    }
                    Err(e) => table.errors.push(format!(
                        "{} x {}: {e}",
                        comparison.tokenizers[t], comparison.datasets[d]
                    )),
                }
            }
        }
        table
    }

    /// Metric names in first-seen order.
    pub fn metric_names(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for m in self.rows.iter().flat_map(|r| &r.metrics) {
            if !names.contains(&m.metric) {
                names.push(m.metric.clone());
            }
        }
        names
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Md => self.to_markdown(),
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => self.to_json(),
        }
    }

    /// One section per metric: (language, domain) rows, tokenizer columns, 2 decimals.
    pub fn to_markdown(&self) -> String {
        let mut tokenizers: Vec<&str> = Vec::new();
        let mut keys: Vec<(&str, &str)> = Vec::new();
        for r in &self.rows {
            if !tokenizers.contains(&r.tokenizer.as_str()) {
                tokenizers.push(&r.tokenizer);
            }
            let key = (r.language.as_str(), r.domain.as_str());
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        let mut out = String::new();
        for metric in self.metric_names() {
            let _ = writeln!(out, "### {metric}\n");
            let _ = write!(out, "| Language | Domain |");
            for t in &tokenizers {
                let _ = write!(out, " {t} |");
            }
            let _ = write!(out, "\n|---|---|");
            for _ in &tokenizers {
                out.push_str("---:|");
            }
            out.push('\n');
            let has_metric = |language: &str, domain: &str| {
                self.rows.iter().any(|r| {
                    r.language == language
                        && r.domain == domain
                        && r.metrics.iter().any(|m| m.metric == metric)
                })
            };
            for (language, domain) in keys.iter().filter(|(l, d)| has_metric(l, d)) {
                let _ = write!(out, "| {language} | {domain} |");
                for t in &tokenizers {
                    let value = self
                        .rows
                        .iter()
                        .filter(|r| {
                            r.language == *language && r.domain == *domain && r.tokenizer == *t
                        })
                        .flat_map(|r| &r.metrics)
                        .find(|m| m.metric == metric);
                    match value {
                        Some(m) => {
                            let _ = write!(out, " {:.2} |", m.value);
                        }
                        None => out.push_str(" - |"),
                    }
                }
                out.push('\n');
            }
            out.push('\n');
        }
        for e in &self.errors {
            let _ = writeln!(out, "> error: {e}");
        }
        out
    }

    /// Long format: one line per (row, metric).
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "language",
            "domain",
            "tokenizer",
            "metric",
            "value",
            "numerator",
            "denominator",
        ])
        .expect("writing to memory");
        for r in &self.rows {
            for m in &r.metrics {
                let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
                w.write_record([
                    r.language.as_str(),
                    r.domain.as_str(),
                    r.tokenizer.as_str(),
                    m.metric.as_str(),
                    &m.value.to_string(),
                    &opt(m.numerator),
                    &opt(m.denominator),
                ])
                .expect("writing to memory");
            }
        }
        String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is UTF-8")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializing plain data cannot fail");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Parses the output of [`ReportTable::to_csv`]; errors are not carried by CSV.
    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut table = ReportTable::default();
        for record in reader.records() {
            let record = record.map_err(|e| e.to_string())?;
            let field = |i: usize| record.get(i).unwrap_or_default().to_owned();
            let int = |i: usize| -> Result<Option<u64>, String> {
                let f = field(i);
                if f.is_empty() {
                    Ok(None)
                } else {
                    f.parse().map(Some).map_err(|e| format!("{f:?}: {e}"))
                }
            };
            let metric = MetricValue {
                metric: field(3),
                value: field(4)
                    .parse()
                    .map_err(|e| format!("{:?}: {e}", field(4)))?,
                numerator: int(5)?,
                denominator: int(6)?,
            };
            let (language, domain, tokenizer) = (field(0), field(1), field(2));
            match table.rows.last_mut() {
                Some(last)
                    if last.language == language
                        && last.domain == domain
                        && last.tokenizer == tokenizer =>
                {
                    last.metrics.push(metric)
                }
                _ => table.rows.push(ReportRow {
                    language,
                    domain,
                    tokenizer,
                    metrics: vec![metric],
                }),
            }
        }
        Ok(table)
    }
}

/// One tokenizer's bars within a group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrrSeries {
    pub tokenizer: String,
    pub word_form: String,
    pub values: Vec<f64>,
}

/// A wordlist (one language, or a source/target pair) and its bars.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrrGroup {
    pub name: String,
    pub languages: Vec<String>,
    pub series: Vec<StrrSeries>,
}

/// Grouped-bar plot data for STRR across tokenizers and languages.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct StrrFigure {
    pub groups: Vec<StrrGroup>,
}
