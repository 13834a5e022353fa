//! Brute-force reference for the bipol pipeline, plus random case
//! generation. Shares nothing with the library's scoring path: texts are
//! built from plain ASCII words, tokenized by splitting on separators, and
//! every quantity is recounted by direct enumeration.

#![allow(dead_code, clippy::type_complexity)]

use bipol::{Label, Lexicon, Prediction, PredictionSet, Sample};
use rand::seq::IndexedRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// axis name -> [(type name, terms)]
#[derive(Debug, Clone)]
pub struct RawLexicon {
    pub axes: Vec<(String, Vec<(String, Vec<String>)>)>,
}

impl RawLexicon {
    pub fn to_text(&self) -> String {
        let mut out = String::from("language = xx\n");
        for (axis, types) in &self.axes {
            for (ty, terms) in types {
                out.push_str(&format!("[axis.{axis}.{ty}]\n"));
                for t in terms {
                    out.push_str(t);
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn build(&self) -> Lexicon {
        self.to_text().parse().expect("generated lexicon is valid")
    }
}

#[derive(Debug, Clone)]
pub struct Case {
    pub lexicon: RawLexicon,
    pub texts: Vec<String>,
    pub biased: Vec<bool>,
}

impl Case {
    pub fn samples(&self) -> Vec<Sample> {
        self.texts
            .iter()
            .enumerate()
            .map(|(i, t)| Sample::new(format!("s{i}"), t.clone()))
            .collect()
    }

    pub fn predictions(&self) -> PredictionSet {
        let mut set = PredictionSet::new();
        for (i, &b) in self.biased.iter().enumerate() {
            set.insert(Prediction {
                id: format!("s{i}"),
                label: if b { Label::Biased } else { Label::Unbiased },
                confidence: if b { 0.9 } else { 0.1 },
            })
            .unwrap();
        }
        set
    }
}

const WORDS: [&str; 16] = [
    "ab", "cd", "ef", "gh", "ij", "kl", "mn", "op", "qr", "st", "uv", "wx", "yz", "abc", "def", "ghi",
];
const FILLER: [&str; 6] = ["the", "of", "and", "abx", "cdab", "ab-cd"];
const SEPARATORS: [&str; 5] = [" ", " ", ", ", ". ", " ; "];

/// Random lexicon with at most `max_terms` terms, 1-2 axes, 2-3 types per
/// axis, a mix of one- and two-word terms.
pub fn random_lexicon(rng: &mut Rng, max_terms: usize) -> RawLexicon {
    let n_axes = rng.random_range(1..=2);
    let mut axes = Vec::new();
    let mut budget = max_terms;
    for a in 0..n_axes {
        let n_types = rng.random_range(2..=3usize).min(budget.max(2));
        let mut used: Vec<String> = Vec::new();
        let mut types = Vec::new();
        for t in 0..n_types {
            let axes_left = n_axes - a - 1;
            let types_left = n_types - t - 1;
            let reserve = types_left + 2 * axes_left;
            let max_here = budget.saturating_sub(reserve).clamp(1, 3);
            let n_terms = rng.random_range(1..=max_here);
            let mut terms = Vec::new();
            while terms.len() < n_terms {
                let term = if rng.random_bool(0.25) {
                    format!("{} {}", WORDS.choose(rng).unwrap(), WORDS.choose(rng).unwrap())
                } else {
                    WORDS.choose(rng).unwrap().to_string()
                };
                if !used.contains(&term) {
                    used.push(term.clone());
                    terms.push(term);
                }
            }
            budget = budget.saturating_sub(terms.len());
            types.push((format!("t{t}"), terms));
        }
        axes.push((format!("a{a}"), types));
    }
    RawLexicon { axes }
}

pub fn random_text(rng: &mut Rng) -> String {
    let n = rng.random_range(0..12);
    let mut text = String::new();
    for i in 0..n {
        if i > 0 {
            text.push_str(SEPARATORS.choose(rng).unwrap());
        }
        let word = if rng.random_bool(0.6) {
            WORDS.choose(rng).unwrap()
        } else {
            FILLER.choose(rng).unwrap()
        };
        if rng.random_bool(0.1) {
            text.push_str(&word.to_uppercase());
        } else {
            text.push_str(word);
        }
    }
    if rng.random_bool(0.3) {
        text.push('.');
    }
    text
}

pub fn random_case(rng: &mut Rng) -> Case {
    let lexicon = random_lexicon(rng, 10);
    let n = rng.random_range(1..=50);
    let texts = (0..n).map(|_| random_text(rng)).collect();
    let p = rng.random_range(0.0..=1.0);
    let biased = (0..n).map(|_| rng.random_bool(p)).collect();
    Case { lexicon, texts, biased }
}

/// Split ASCII text on spaces and sentence punctuation.
pub fn oracle_tokens(text: &str) -> Vec<String> {
    text.to_ascii_lowercase()
        .replace([',', '.', ';'], " ")
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Occurrences of `term` as a contiguous whole-token run.
pub fn oracle_count(tokens: &[String], term: &str) -> u64 {
    let needle: Vec<&str> = term.split(' ').collect();
    let mut count = 0;
    for start in 0..tokens.len() {
        if start + needle.len() > tokens.len() {
            break;
        }
        if (0..needle.len()).all(|k| tokens[start + k] == needle[k]) {
            count += 1;
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleAxis {
    pub axis: String,
    pub top1: u64,
    pub top2: u64,
    pub total: u64,
    pub score: f64,
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub corpus: f64,
    pub sentence: f64,
    pub bipol: f64,
    pub biased_count: usize,
    pub scored_count: usize,
    /// Per biased sample, defined axes only.
    pub per_sample: Vec<(String, Vec<OracleAxis>, Option<f64>)>,
    /// axis -> type -> term -> count over biased samples.
    pub explain: Vec<(String, Vec<(String, Vec<(String, u64)>)>)>,
}

pub fn oracle(case: &Case) -> OracleResult {
    let n = case.texts.len();
    let biased_idx: Vec<usize> = (0..n).filter(|&i| case.biased[i]).collect();
    let corpus = biased_idx.len() as f64 / n as f64;

    let mut explain: Vec<(String, Vec<(String, Vec<(String, u64)>)>)> = case
        .lexicon
        .axes
        .iter()
        .map(|(a, types)| {
            (
                a.clone(),
                types
                    .iter()
                    .map(|(t, terms)| (t.clone(), terms.iter().map(|w| (w.clone(), 0)).collect()))
                    .collect(),
            )
        })
        .collect();

    let mut per_sample = Vec::new();
    let mut sum = 0.0;
    let mut r = 0;
    for &i in &biased_idx {
        let tokens = oracle_tokens(&case.texts[i]);
        let mut axes = Vec::new();
        for (a, (axis, types)) in case.lexicon.axes.iter().enumerate() {
            let mut sums = Vec::new();
            for (t, (_, terms)) in types.iter().enumerate() {
                let mut s = 0;
                for (w, term) in terms.iter().enumerate() {
                    let c = oracle_count(&tokens, term);
                    explain[a].1[t].1[w].1 += c;
                    s += c;
                }
                sums.push(s);
            }
            let total: u64 = sums.iter().sum();
            if total == 0 {
                continue;
            }
            // two largest by exhaustive pair search
            let mut best = (0, 0);
            for x in 0..sums.len() {
                for y in 0..sums.len() {
                    if x != y && sums[x] >= sums[y] && (sums[x], sums[y]) > best {
                        best = (sums[x], sums[y]);
                    }
                }
            }
            axes.push(OracleAxis {
                axis: axis.clone(),
                top1: best.0,
                top2: best.1,
                total,
                score: (best.0 - best.1) as f64 / total as f64,
            });
        }
        let score = if axes.is_empty() {
            None
        } else {
            Some(axes.iter().map(|a| a.score).sum::<f64>() / axes.len() as f64)
        };
        if let Some(s) = score {
            sum += s;
            r += 1;
        }
        per_sample.push((format!("s{i}"), axes, score));
    }
    let sentence = if r == 0 { 0.0 } else { sum / r as f64 };
    let bipol = if sentence > 0.0 { corpus * sentence } else { corpus };
    OracleResult {
        corpus,
        sentence,
        bipol,
        biased_count: biased_idx.len(),
        scored_count: r,
        per_sample,
        explain,
    }
}

/// Compare a library report against the oracle. Returns a description of
/// the first difference.
pub fn compare(report: &bipol::BipolReport, expected: &OracleResult, tol: f64) -> Result<(), String> {
    let close = |name: &str, got: f64, want: f64| {
        if (got - want).abs() <= tol {
            Ok(())
        } else {
            Err(format!("{name}: got {got}, oracle {want}"))
        }
    };
    close("corpus", report.corpus_score, expected.corpus)?;
    close("sentence", report.sentence_score, expected.sentence)?;
    close("bipol", report.bipol, expected.bipol)?;
    if report.biased_count != expected.biased_count {
        return Err(format!("biased_count {} vs {}", report.biased_count, expected.biased_count));
    }
    if report.scored_count != expected.scored_count {
        return Err(format!("scored_count {} vs {}", report.scored_count, expected.scored_count));
    }
    if report.samples.len() != expected.per_sample.len() {
        return Err("per-sample length".into());
    }
    for (got, (id, axes, score)) in report.samples.iter().zip(&expected.per_sample) {
        if &got.id != id || got.axes.len() != axes.len() {
            return Err(format!("sample {id}: axes {:?} vs {axes:?}", got.axes));
        }
        for (g, w) in got.axes.iter().zip(axes) {
            if g.axis != w.axis || g.top1_sum != w.top1 || g.top2_sum != w.top2 || g.axis_total != w.total {
                return Err(format!("sample {id}: {g:?} vs {w:?}"));
            }
            close("axis score", g.score, w.score)?;
        }
        match (got.score, score) {
            (Some(g), Some(w)) => close("sample score", g, *w)?,
            (None, None) => {}
            other => return Err(format!("sample {id} score {other:?}")),
        }
    }
    for ((axis, types), got_axis) in expected.explain.iter().zip(&report.explain.axes) {
        if &got_axis.name != axis {
            return Err(format!("explain axis {} vs {axis}", got_axis.name));
        }
        for ((ty, terms), got_ty) in types.iter().zip(&got_axis.types) {
            let got_terms: Vec<(String, u64)> =
                got_ty.terms.iter().map(|(k, v)| (k.clone(), *v)).collect();
            if &got_ty.name != ty || &got_terms != terms {
                return Err(format!("explain {axis}/{ty}: {got_terms:?} vs {terms:?}"));
            }
        }
    }
    Ok(())
}
