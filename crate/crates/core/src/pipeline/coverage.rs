//! Word-frequency coverage and core-vocabulary selection.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::Corpus;
use crate::segment::{segment, SegmentPolicy};

/// Cumulative share of word occurrences covered by the top-k most frequent words.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageCurve {
    ranked_words: Vec<String>,
    counts: Vec<u64>,
    cumulative_coverage: Vec<f64>,
    total: u64,
}

impl CoverageCurve {
    /// Ranks by descending count, ties broken lexicographically. Zero counts are dropped.
    pub fn from_counts(counts: HashMap<String, u64>) -> Result<Self> {
        let mut ranked: Vec<(String, u64)> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        if ranked.is_empty() {
            return Err(Error::EmptyInput("no word occurrences to rank"));
        }
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let total: u64 = ranked.iter().map(|(_, c)| c).sum();
        let mut running = 0u64;
        let cumulative_coverage = ranked
            .iter()
            .map(|(_, c)| {
                running += c;
                running as f64 / total as f64
            })
            .collect();
        let (ranked_words, counts) = ranked.into_iter().unzip();
        Ok(CoverageCurve {
            ranked_words,
            counts,
            cumulative_coverage,
            total,
        })
    }

    pub fn ranked_words(&self) -> &[String] {
        &self.ranked_words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `cumulative_coverage()[k]` is the share covered by the top `k + 1` words.
    pub fn cumulative_coverage(&self) -> &[f64] {
        &self.cumulative_coverage
    }

    pub fn total_occurrences(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.ranked_words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked_words.is_empty()
    }

    /// Size of the shortest ranked prefix whose coverage reaches `target`.
    pub fn core_size(&self, target: f64) -> Result<usize> {
        check_target(target)?;
        let k = self
            .cumulative_coverage
            .iter()
            .position(|&c| c >= target)
            .unwrap_or(self.len() - 1);
        Ok(k + 1)
    }
}

fn check_target(target: f64) -> Result<()> {
    if target > 0.0 && target <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "coverage target must be in (0, 1], got {target}"
        )))
    }
}

/// Occurrence count of every segment of the corpus.
pub fn word_frequencies(corpus: &Corpus, policy: &SegmentPolicy) -> Result<HashMap<String, u64>> {
    policy.validate()?;
    corpus
        .documents
        .par_iter()
        .map(|doc| {
            let mut counts = HashMap::new();
            for seg in segment(doc, policy)? {
                *counts.entry(seg.text).or_insert(0u64) += 1;
            }
            Ok(counts)
        })
        .try_reduce(HashMap::new, |mut a, b| {
            for (w, n) in b {
                *a.entry(w).or_insert(0) += n;
            }
            Ok(a)
        })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreVocabulary {
    pub curve: CoverageCurve,
    pub target: f64,
    pub words: Vec<String>,
    /// Coverage actually reached by `words`.
    pub coverage: f64,
}

impl CoreVocabulary {
    pub fn from_curve(curve: CoverageCurve, target: f64) -> Result<Self> {
        let k = curve.core_size(target)?;
        Ok(CoreVocabulary {
            words: curve.ranked_words[..k].to_vec(),
            coverage: curve.cumulative_coverage[k - 1],
            curve,
            target,
        })
    }
}

/// The smallest set of most frequent words covering `target` of all word occurrences.
pub fn core_vocabulary(
    corpus: &Corpus,
    policy: &SegmentPolicy,
    target: f64,
) -> Result<CoreVocabulary> {
    check_target(target)?;
    let counts = word_frequencies(corpus, policy)?;
    if counts.is_empty() {
        return Err(Error::EmptyInput("corpus has no words after segmentation"));
    }
    CoreVocabulary::from_curve(CoverageCurve::from_counts(counts)?, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::Domain;

    fn counts(pairs: &[(&str, u64)]) -> HashMap<String, u64> {
        pairs.iter().map(|&(w, c)| (w.to_owned(), c)).collect()
    }

    #[test]
    fn single_repeated_word() {
        let corpus = Corpus::new("c", "en", Domain::Unspecified, ["the the the", "the"]);
        let core = core_vocabulary(&corpus, &SegmentPolicy::unicode_words(), 0.8).unwrap();
        assert_eq!(core.words, ["the"]);
        assert_eq!(core.coverage, 1.0);
    }

    #[test]
    fn cumulative_sum_threshold() {
        let curve =
            CoverageCurve::from_counts(counts(&[("w1", 4), ("w2", 2), ("w3", 1), ("w4", 1)]))
                .unwrap();
        assert_eq!(curve.cumulative_coverage(), [0.5, 0.75, 0.875, 1.0]);
        let core = CoreVocabulary::from_curve(curve, 0.5).unwrap();
        assert_eq!(core.words, ["w1"]);
    }

    #[test]
    fn ties_rank_lexicographically() {
        let curve = CoverageCurve::from_counts(counts(&[("b", 2), ("a", 2), ("c", 5)])).unwrap();
        assert_eq!(curve.ranked_words(), ["c", "a", "b"]);
    }

    #[test]
    fn full_target_lists_every_word() {
        let curve = CoverageCurve::from_counts(counts(&[("a", 3), ("b", 1), ("c", 1)])).unwrap();
        assert_eq!(curve.core_size(1.0).unwrap(), 3);
    }

    #[test]
    fn bad_targets_and_empty_input() {
        let curve = CoverageCurve::from_counts(counts(&[("a", 1)])).unwrap();
        assert!(curve.core_size(0.0).is_err());
        assert!(curve.core_size(1.5).is_err());
        assert!(CoverageCurve::from_counts(HashMap::new()).is_err());
        let empty = Corpus::new("c", "en", Domain::Unspecified, ["...", ""]);
        assert!(core_vocabulary(&empty, &SegmentPolicy::unicode_words(), 0.85).is_err());
    }
}
