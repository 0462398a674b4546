//! Core-vocabulary identification, vocabulary injection, and BPE training.

pub mod coverage;
pub mod inject;
pub mod train;

pub use coverage::{core_vocabulary, word_frequencies, CoreVocabulary, CoverageCurve};
pub use inject::{inject, InjectionPlan, FOLLOWUP_STEPS};
pub use train::{train_bpe, TrainOptions, TrainOutcome, TrainedUnit};
