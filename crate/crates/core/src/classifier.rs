//! Stage one: label samples biased or unbiased.
//!
//! Labels come either from the built-in multinomial bag-of-words model
//! ([`BowModel`]) or from a predictions file produced by an external model
//! ([`PredictionSet`]). Both implement [`Labeler`]. Biased is the positive
//! class throughout.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textproc::normalize;

pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_SMOOTHING: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Biased,
    Unbiased,
}

impl Label {
    pub fn is_biased(self) -> bool {
        self == Label::Biased
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Biased => "biased",
            Label::Unbiased => "unbiased",
        }
    }

    fn index(self) -> usize {
        match self {
            Label::Biased => 0,
            Label::Unbiased => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "biased" => Ok(Label::Biased),
            "unbiased" => Ok(Label::Unbiased),
            other => Err(format!("unknown label `{other}` (expected biased or unbiased)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub text: String,
}

impl Sample {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Sample {
            id: id.into(),
            text: text.into(),
        }
    }
}

/// A label plus the probability the labeler gave to the biased class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub label: Label,
    pub confidence: f64,
}

/// Gold labels keyed by sample id.
pub type GoldLabels = IndexMap<String, Label>;

/// Anything that can assign a biased/unbiased label to a sample.
pub trait Labeler: Sync {
    fn label(&self, sample: &Sample) -> Result<Prediction>;
}

// ---------------------------------------------------------------------------
// Predictions file

/// Predictions keyed by sample id, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PredictionSet {
    by_id: IndexMap<String, Prediction>,
}

impl PredictionSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a prediction; fails on a repeated id.
    pub fn insert(&mut self, prediction: Prediction) -> Result<()> {
        if self.by_id.contains_key(&prediction.id) {
            return Err(Error::Labeler(format!("duplicate id `{}`", prediction.id)));
        }
        self.by_id.insert(prediction.id.clone(), prediction);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Prediction> {
        self.by_id.get(id)
    }

    pub fn len(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Prediction> {
        self.by_id.values()
    }

    /// Parse the tab-separated `id<TAB>label<TAB>confidence` format.
    /// Blank lines are skipped.
    pub fn parse(reader: impl BufRead) -> Result<Self> {
        let mut set = PredictionSet::new();
        for (n, line) in reader.lines().enumerate() {
            let line_no = n + 1;
            let bad = |message: String| Error::Predictions {
                line: line_no,
                message,
            };
            let line = line.map_err(|e| bad(e.to_string()))?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [id, label, confidence] = fields[..] else {
                return Err(bad(format!(
                    "expected 3 tab-separated fields, found {}",
                    fields.len()
                )));
            };
            if id.is_empty() {
                return Err(bad("empty id".into()));
            }
            let label: Label = label.parse().map_err(bad)?;
            let confidence: f64 = confidence
                .trim()
                .parse()
                .map_err(|_| bad(format!("confidence `{confidence}` is not a number")))?;
            if !(0.0..=1.0).contains(&confidence) {
                return Err(bad(format!("confidence {confidence} outside [0, 1]")));
            }
            if set.by_id.contains_key(id) {
                return Err(bad(format!("duplicate id `{id}`")));
            }
            set.by_id.insert(
                id.to_owned(),
                Prediction {
                    id: id.to_owned(),
                    label,
                    confidence,
                },
            );
        }
        Ok(set)
    }

    /// Write in the predictions file format. Confidences are printed with
    /// enough digits to parse back to the same value.
    pub fn write_to(&self, mut out: impl Write) -> std::io::Result<()> {
        for p in self.by_id.values() {
            writeln!(out, "{}\t{}\t{}", p.id, p.label, p.confidence)?;
        }
        Ok(())
    }
}

impl Labeler for PredictionSet {
    fn label(&self, sample: &Sample) -> Result<Prediction> {
        self.get(&sample.id)
            .cloned()
            .ok_or_else(|| Error::Labeler(format!("no prediction for sample id `{}`", sample.id)))
    }
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<PredictionSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    PredictionSet::parse(BufReader::new(file))
}

// ---------------------------------------------------------------------------
// Bag-of-words model

/// Multinomial naive Bayes over normalized unigram tokens with additive
/// smoothing. Tokens outside the vocabulary are ignored at prediction time,
/// so a text made only of unknown words is labeled by the priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BowModel {
    /// Class priors, `[biased, unbiased]`.
    priors: [f64; 2],
    /// Per-token log-likelihoods, `[biased, unbiased]`.
    vocabulary: BTreeMap<String, [f64; 2]>,
    smoothing: f64,
    threshold: f64,
    seed: u64,
    /// Training documents per class, `[biased, unbiased]`.
    class_counts: [u64; 2],
}

/// Fit a [`BowModel`]. The corpus must contain both classes.
pub fn train_bow_classifier(
    corpus: &[(Sample, Label)],
    smoothing: f64,
    seed: u64,
) -> Result<BowModel> {
    if corpus.is_empty() {
        return Err(Error::Training("empty training corpus".into()));
    }
    if !(smoothing.is_finite() && smoothing > 0.0) {
        return Err(Error::Training(format!(
            "smoothing must be a positive number, got {smoothing}"
        )));
    }
    let mut docs = [0u64; 2];
    let mut token_totals = [0u64; 2];
    let mut counts: BTreeMap<String, [u64; 2]> = BTreeMap::new();
    for (sample, label) in corpus {
        let c = label.index();
        docs[c] += 1;
        for token in normalize(&sample.text).into_inner() {
            counts.entry(token).or_default()[c] += 1;
            token_totals[c] += 1;
        }
    }
    if docs.contains(&0) {
        let missing = if docs[0] == 0 { Label::Biased } else { Label::Unbiased };
        return Err(Error::Training(format!(
            "training data has no `{missing}` samples; both classes are required"
        )));
    }
    let n = docs[0] + docs[1];
    let priors = [docs[0] as f64 / n as f64, docs[1] as f64 / n as f64];
    let v = counts.len() as f64;
    let denom = [
        token_totals[0] as f64 + smoothing * v,
        token_totals[1] as f64 + smoothing * v,
    ];
    let vocabulary = counts
        .into_iter()
        .map(|(tok, [b, u])| {
            let ll = [
                ((b as f64 + smoothing) / denom[0]).ln(),
                ((u as f64 + smoothing) / denom[1]).ln(),
            ];
            (tok, ll)
        })
        .collect();
    Ok(BowModel {
        priors,
        vocabulary,
        smoothing,
        threshold: DEFAULT_THRESHOLD,
        seed,
        class_counts: docs,
    })
}

impl BowModel {
    pub fn priors(&self) -> [f64; 2] {
        self.priors
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    pub fn vocabulary_len(&self) -> usize {
        self.vocabulary.len()
    }

    /// Set the probability at or above which a sample is labeled biased.
    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::Config(format!("threshold {threshold} outside [0, 1]")));
        }
        self.threshold = threshold;
        Ok(self)
    }

    /// Posterior probability of the biased class.
    pub fn biased_probability(&self, text: &str) -> f64 {
        let mut log_post = [self.priors[0].ln(), self.priors[1].ln()];
        for token in normalize(text).iter() {
            if let Some(ll) = self.vocabulary.get(token) {
                log_post[0] += ll[0];
                log_post[1] += ll[1];
            }
        }
        // p_b = 1 / (1 + exp(l_u - l_b)), computed without overflow
        let d = log_post[1] - log_post[0];
        if d > 0.0 {
            let e = (-d).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + d.exp())
        }
    }

    pub fn predict(&self, sample: &Sample) -> Prediction {
        let confidence = self.biased_probability(&sample.text);
        let label = if confidence >= self.threshold {
            Label::Biased
        } else {
            Label::Unbiased
        };
        Prediction {
            id: sample.id.clone(),
            label,
            confidence,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: BowModel = serde_json::from_str(&src)
            .map_err(|e| Error::Labeler(format!("{}: invalid model: {e}", path.display())))?;
        let sum = model.priors[0] + model.priors[1];
        if (sum - 1.0).abs() > 1e-9 || model.priors.iter().any(|p| p.is_nan() || *p <= 0.0) {
            return Err(Error::Labeler(format!(
                "{}: model priors must be positive and sum to 1",
                path.display()
            )));
        }
        Ok(model)
    }
}

pub fn predict(model: &BowModel, sample: &Sample) -> Prediction {
    model.predict(sample)
}

impl Labeler for BowModel {
    fn label(&self, sample: &Sample) -> Result<Prediction> {
        Ok(self.predict(sample))
    }
}

// ---------------------------------------------------------------------------
// Evaluation

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        ConfusionMatrix { tp, fp, tn, fn_ }
    }

    /// Tally `(gold, predicted)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Label, Label)>) -> Self {
        let mut cm = ConfusionMatrix::default();
        for (gold, predicted) in pairs {
            match (gold, predicted) {
                (Label::Biased, Label::Biased) => cm.tp += 1,
                (Label::Unbiased, Label::Biased) => cm.fp += 1,
                (Label::Unbiased, Label::Unbiased) => cm.tn += 1,
                (Label::Biased, Label::Unbiased) => cm.fn_ += 1,
            }
        }
        cm
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| (self.tp + self.tn) as f64 / total as f64)
    }
}

/// Compare predictions against gold labels. Both sides must cover exactly
/// the same ids.
pub fn confusion(preds: &PredictionSet, gold: &GoldLabels) -> Result<ConfusionMatrix> {
    if preds.len() != gold.len() {
        return Err(Error::Metric(format!(
            "id mismatch: {} predictions vs {} gold labels",
            preds.len(),
            gold.len()
        )));
    }
    let mut pairs = Vec::with_capacity(gold.len());
    for (id, &g) in gold {
        let p = preds
            .get(id)
            .ok_or_else(|| Error::Metric(format!("id mismatch: no prediction for `{id}`")))?;
        pairs.push((g, p.label));
    }
    Ok(ConfusionMatrix::from_pairs(pairs))
}

/// Positive error rate `fp / (fp + tp)`; `None` when nothing was predicted
/// biased.
pub fn error_rate(cm: &ConfusionMatrix) -> Option<f64> {
    let predicted_biased = cm.fp + cm.tp;
    (predicted_biased > 0).then(|| cm.fp as f64 / predicted_biased as f64)
}

/// Unweighted mean of the biased-class and unbiased-class F1 scores.
pub fn macro_f1(cm: &ConfusionMatrix) -> Result<f64> {
    if cm.tp + cm.fn_ == 0 || cm.tn + cm.fp == 0 {
        return Err(Error::Metric(
            "macro F1 needs gold support for both classes".into(),
        ));
    }
    let f1 = |tp: u64, fp: u64, fn_: u64| 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64;
    let biased = f1(cm.tp, cm.fp, cm.fn_);
    let unbiased = f1(cm.tn, cm.fn_, cm.fp);
    Ok((biased + unbiased) / 2.0)
}
