//! Corpus bias auditing with the bipol metric.
//!
//! bipol scores a corpus in two stages. A classifier first labels every
//! sample biased or unbiased; the fraction labeled biased is the corpus
//! score. The biased samples are then matched against multi-axes lexica
//! (gender: female/male, racial: black/white, ...) and, per axis, the gap
//! between the two most frequent types is divided by the axis total. The
//! mean of those gaps is the sentence score, and
//! `bipol = corpus * sentence` (or just `corpus` when the sentence score is
//! zero).
//!
//! ```
//! use bipol::{builtin_lexicon, evaluate_corpus, Label, Prediction, PredictionSet, Sample};
//!
//! let lexicon = builtin_lexicon("en").unwrap();
//! let samples = vec![
//!     Sample::new("0", "He said he would call him."),
//!     Sample::new("1", "The weather was fine."),
//! ];
//! let mut labels = PredictionSet::new();
//! labels.insert(Prediction { id: "0".into(), label: Label::Biased, confidence: 0.9 }).unwrap();
//! labels.insert(Prediction { id: "1".into(), label: Label::Unbiased, confidence: 0.1 }).unwrap();
//!
//! let report = evaluate_corpus(&samples, &labels, &lexicon).unwrap();
//! assert_eq!(report.corpus_score, 0.5);
//! assert_eq!(report.sentence_score, 1.0);
//! assert_eq!(report.bipol, 0.5);
//! ```

pub mod classifier;
pub mod cli;
pub mod error;
pub mod explain;
pub mod ingest;
pub mod lexica;
pub mod scorer;
pub mod textproc;

pub use classifier::{
    confusion, error_rate, load_predictions, macro_f1, predict, train_bow_classifier, BowModel,
    ConfusionMatrix, GoldLabels, Label, Labeler, Prediction, PredictionSet, Sample,
};
pub use error::{Error, Result};
pub use explain::{
    dominant_type, emit_chart, frequency_report, top_k_terms, ChartFormat, Dominance,
    ExplainReport, TopTerms,
};
pub use ingest::{dataset_stats, read_dataset, Dataset, DatasetSpec, DatasetStats, Format};
pub use lexica::{builtin_lexicon, extend_lexicon, load_lexicon, Axis, AxisType, Lexicon};
pub use scorer::{
    aggregate_sentence_score, axis_sentence_score, combine, corpus_score, evaluate_corpus,
    sentence_score, AxisScore, BipolReport, Evaluator,
};
pub use textproc::{normalize, term_frequencies, FrequencyTable, TermMatcher, TokenSeq};
