//! Stage two and the full bipol pipeline.
//!
//! * corpus score `b_c`: predicted-biased samples over all samples.
//! * sentence score `b_s`: for every predicted-biased sample, and every axis
//!   with at least one term occurrence, take the two largest per-type term
//!   sums and divide their absolute difference by the axis total; average
//!   over the sample's axes, then over samples.
//! * bipol `b = b_c * b_s` when `b_s > 0`, else `b_c`.
//!
//! An axis without any occurrence in a sample is left out of that sample's
//! average, and a sample without any occurrence at all is left out of the
//! sample average. `0/0` is never evaluated.

use std::collections::HashSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::classifier::{
    error_rate, macro_f1, ConfusionMatrix, GoldLabels, Label, Labeler, Prediction, Sample,
};
use crate::error::{Error, Result};
use crate::explain::{report_from_total, ExplainReport};
use crate::lexica::Lexicon;
use crate::textproc::{FrequencyTable, TermMatcher};

/// One axis of one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisScore {
    pub axis: String,
    /// Largest per-type term sum.
    pub top1_sum: u64,
    /// Second largest per-type term sum.
    pub top2_sum: u64,
    /// Sum over every term of the axis.
    pub axis_total: u64,
    pub score: f64,
}

/// `None` when the axis has no term occurrences in `freqs`.
///
/// # Panics
///
/// If `axis` is not a valid axis index of `lexicon`.
pub fn axis_sentence_score(freqs: &FrequencyTable, lexicon: &Lexicon, axis: usize) -> Option<AxisScore> {
    let total = freqs.axis_total(axis);
    if total == 0 {
        return None;
    }
    let mut sums = freqs.type_sums(axis);
    sums.sort_unstable_by(|a, b| b.cmp(a));
    let top1 = sums[0];
    let top2 = sums.get(1).copied().unwrap_or(0);
    Some(AxisScore {
        axis: lexicon.axes()[axis].name().to_owned(),
        top1_sum: top1,
        top2_sum: top2,
        axis_total: total,
        score: (top1 - top2) as f64 / total as f64,
    })
}

fn axis_scores(freqs: &FrequencyTable, lexicon: &Lexicon) -> Vec<AxisScore> {
    (0..lexicon.axes().len())
        .filter_map(|a| axis_sentence_score(freqs, lexicon, a))
        .collect()
}

fn mean_of_axes(scores: &[AxisScore]) -> Option<f64> {
    if scores.is_empty() {
        return None;
    }
    let mut sum = NeumaierSum::default();
    for s in scores {
        sum.add(s.score);
    }
    Some(sum.total() / scores.len() as f64)
}

/// Mean of the defined axis scores of one sample; `None` when no axis has
/// any occurrence.
pub fn sentence_score(sample_freqs: &FrequencyTable, lexicon: &Lexicon) -> Option<f64> {
    mean_of_axes(&axis_scores(sample_freqs, lexicon))
}

/// Mean of the defined per-sample scores; 0 when none is defined.
pub fn aggregate_sentence_score(scores: &[Option<f64>]) -> f64 {
    let mut sum = NeumaierSum::default();
    let mut r = 0usize;
    for s in scores.iter().flatten() {
        sum.add(*s);
        r += 1;
    }
    if r == 0 {
        0.0
    } else {
        sum.total() / r as f64
    }
}

/// Fraction of predictions labeled biased.
pub fn corpus_score(predictions: &[Prediction]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::EmptyData("corpus score of an empty prediction list".into()));
    }
    let biased = predictions.iter().filter(|p| p.label.is_biased()).count();
    Ok(biased as f64 / predictions.len() as f64)
}

/// `b_c * b_s` when `b_s > 0`, otherwise `b_c`.
pub fn combine(corpus: f64, sentence: f64) -> Result<f64> {
    for (name, v) in [("corpus", corpus), ("sentence", sentence)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Input(format!("{name} score {v} outside [0, 1]")));
        }
    }
    Ok(if sentence > 0.0 { corpus * sentence } else { corpus })
}

/// Compensated summation so the result barely depends on the order of the
/// terms.
#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.compensation
    }
}

/// Stage-two breakdown for one predicted-biased sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleScore {
    pub id: String,
    /// Only axes with at least one occurrence.
    pub axes: Vec<AxisScore>,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSummary {
    /// Biased samples in which the axis had at least one occurrence.
    pub scored_samples: usize,
    /// Mean axis score over those samples.
    pub mean_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierStats {
    #[serde(flatten)]
    pub confusion: ConfusionMatrix,
    pub error_rate: Option<f64>,
    pub macro_f1: Option<f64>,
}

impl ClassifierStats {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Self {
        ClassifierStats {
            error_rate: error_rate(&confusion),
            macro_f1: macro_f1(&confusion).ok(),
            confusion,
        }
    }
}

/// Everything one bipol evaluation produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipolReport {
    pub corpus_score: f64,
    pub sentence_score: f64,
    pub bipol: f64,
    pub total_count: usize,
    pub biased_count: usize,
    pub scored_count: usize,
    pub per_axis: IndexMap<String, AxisSummary>,
    pub samples: Vec<SampleScore>,
    pub explain: ExplainReport,
    pub classifier_stats: Option<ClassifierStats>,
    pub seed: Option<u64>,
}

impl BipolReport {
    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Configurable pipeline driver. [`evaluate_corpus`] is the default run.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    lexicon: &'a Lexicon,
    gold: Option<&'a GoldLabels>,
    workers: usize,
    seed: Option<u64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(lexicon: &'a Lexicon) -> Self {
        Evaluator {
            lexicon,
            gold: None,
            workers: 1,
            seed: None,
        }
    }

    /// Gold labels; when present the report carries classifier statistics.
    pub fn gold(mut self, gold: &'a GoldLabels) -> Self {
        self.gold = Some(gold);
        self
    }

    /// Worker threads for labeling and term counting. Output does not
    /// depend on this.
    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    /// Seed recorded in the report (the seed any labeler training used).
    pub fn seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn run(&self, samples: &[Sample], labeler: &dyn Labeler) -> Result<BipolReport> {
        if samples.is_empty() {
            return Err(Error::EmptyData("cannot evaluate an empty corpus".into()));
        }
        let mut ids = HashSet::with_capacity(samples.len());
        if let Some(dup) = samples.iter().find(|s| !ids.insert(s.id.as_str())) {
            return Err(Error::Input(format!("duplicate sample id `{}`", dup.id)));
        }

        let predictions: Vec<Prediction> = par_map(samples, self.workers, |s| labeler.label(s))
            .into_iter()
            .collect::<Result<_>>()?;
        let biased: Vec<&Sample> = samples
            .iter()
            .zip(&predictions)
            .filter(|(_, p)| p.label.is_biased())
            .map(|(s, _)| s)
            .collect();

        let matcher = TermMatcher::new(self.lexicon);
        let tables = par_map(&biased, self.workers, |s| matcher.count_text(&s.text));

        let mut total = FrequencyTable::zeros(self.lexicon);
        let mut sample_scores = Vec::with_capacity(biased.len());
        let mut per_axis_sums = vec![(0usize, NeumaierSum::default()); self.lexicon.axes().len()];
        for (sample, table) in biased.iter().zip(&tables) {
            total.add_assign(table)?;
            let axes = axis_scores(table, self.lexicon);
            for score in &axes {
                let a = self
                    .lexicon
                    .axis_index(&score.axis)
                    .expect("score comes from this lexicon");
                per_axis_sums[a].0 += 1;
                per_axis_sums[a].1.add(score.score);
            }
            sample_scores.push(SampleScore {
                id: sample.id.clone(),
                score: mean_of_axes(&axes),
                axes,
            });
        }

        let per_sample: Vec<Option<f64>> = sample_scores.iter().map(|s| s.score).collect();
        let corpus = biased.len() as f64 / samples.len() as f64;
        let sentence = aggregate_sentence_score(&per_sample);
        let bipol = combine(corpus, sentence)?;

        let per_axis = self
            .lexicon
            .axes()
            .iter()
            .zip(per_axis_sums)
            .map(|(axis, (n, sum))| {
                let summary = AxisSummary {
                    scored_samples: n,
                    mean_score: (n > 0).then(|| sum.total() / n as f64),
                };
                (axis.name().to_owned(), summary)
            })
            .collect();

        let classifier_stats = match self.gold {
            Some(gold) => Some(ClassifierStats::from_confusion(confusion_against(
                samples,
                &predictions,
                gold,
            )?)),
            None => None,
        };

        Ok(BipolReport {
            corpus_score: corpus,
            sentence_score: sentence,
            bipol,
            total_count: samples.len(),
            biased_count: biased.len(),
            scored_count: per_sample.iter().flatten().count(),
            per_axis,
            samples: sample_scores,
            explain: report_from_total(&total, self.lexicon),
            classifier_stats,
            seed: self.seed,
        })
    }
}

fn confusion_against(
    samples: &[Sample],
    predictions: &[Prediction],
    gold: &GoldLabels,
) -> Result<ConfusionMatrix> {
    if gold.len() != samples.len() {
        return Err(Error::Metric(format!(
            "id mismatch: {} samples vs {} gold labels",
            samples.len(),
            gold.len()
        )));
    }
    let pairs: Vec<(Label, Label)> = samples
        .iter()
        .zip(predictions)
        .map(|(s, p)| {
            gold.get(&s.id)
                .map(|&g| (g, p.label))
                .ok_or_else(|| Error::Metric(format!("id mismatch: no gold label for `{}`", s.id)))
        })
        .collect::<Result<_>>()?;
    Ok(ConfusionMatrix::from_pairs(pairs))
}

/// Run both stages over `samples` with default settings.
pub fn evaluate_corpus(samples: &[Sample], labeler: &dyn Labeler, lexicon: &Lexicon) -> Result<BipolReport> {
    Evaluator::new(lexicon).run(samples, labeler)
}

/// Order-preserving parallel map over contiguous chunks.
fn par_map<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if workers <= 1 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}
