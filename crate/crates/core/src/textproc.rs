//! Text normalization and whole-token lexicon matching.
//!
//! Text is NFC-normalized, lowercased and split on anything that is not part
//! of a word. Hyphens and apostrophes survive only between two word
//! characters, so `man-sized` stays one token while `-- he` yields `he`.
//! A lexicon term matches only a contiguous run of whole tokens: `she` never
//! matches inside `shed`, and `he'd` is a single token that does not contain
//! `he`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::lexica::Lexicon;

/// Longest multi-word term, in tokens, that the matcher will look for.
pub const MAX_TERM_TOKENS: usize = 4;

/// A normalized token sequence. Tokens are lowercase, non-empty and contain
/// no whitespace.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSeq {
    tokens: Vec<String>,
}

impl TokenSeq {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }

    /// Tokens joined by single spaces; the dedup key for a text.
    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }

    pub fn into_inner(self) -> Vec<String> {
        self.tokens
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_combining_mark(c)
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}' | '\u{2010}' | '\u{2011}')
}

/// Lowercase `text`, turn punctuation into separators, and split it into
/// tokens.
pub fn normalize(text: &str) -> TokenSeq {
    let lowered: Vec<char> = text.nfc().flat_map(char::to_lowercase).collect();
    let mut cleaned = String::with_capacity(lowered.len());
    for (i, &c) in lowered.iter().enumerate() {
        if is_word_char(c) {
            cleaned.push(c);
        } else if is_joiner(c)
            && i > 0
            && is_word_char(lowered[i - 1])
            && lowered.get(i + 1).is_some_and(|&n| is_word_char(n))
        {
            // Typographic variants fold onto their ASCII form.
            cleaned.push(match c {
                '\'' | '\u{2019}' => '\'',
                _ => '-',
            });
        } else {
            cleaned.push(' ');
        }
    }
    TokenSeq {
        tokens: cleaned.split_whitespace().map(str::to_owned).collect(),
    }
}

/// Per-axis, per-type, per-term occurrence counts for one text (or the sum
/// over several texts). Indices follow the lexicon's axis, type and term
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    counts: Vec<Vec<Vec<u64>>>,
}

impl FrequencyTable {
    /// All-zero table shaped like `lexicon`.
    pub fn zeros(lexicon: &Lexicon) -> Self {
        let counts = lexicon
            .axes()
            .iter()
            .map(|axis| {
                axis.types()
                    .iter()
                    .map(|ty| vec![0; ty.terms().len()])
                    .collect()
            })
            .collect();
        FrequencyTable { counts }
    }

    /// True when this table has the axis/type/term shape of `lexicon`.
    pub fn fits(&self, lexicon: &Lexicon) -> bool {
        self.counts.len() == lexicon.axes().len()
            && self.counts.iter().zip(lexicon.axes()).all(|(axis, lx)| {
                axis.len() == lx.types().len()
                    && axis
                        .iter()
                        .zip(lx.types())
                        .all(|(ty, lt)| ty.len() == lt.terms().len())
            })
    }

    pub fn axis_count(&self) -> usize {
        self.counts.len()
    }

    /// Term counts of one type, in lexicon term order.
    pub fn term_counts(&self, axis: usize, ty: usize) -> &[u64] {
        &self.counts[axis][ty]
    }

    pub fn count(&self, axis: usize, ty: usize, term: usize) -> u64 {
        self.counts[axis][ty][term]
    }

    /// Summed frequency of every term of one type.
    pub fn type_sum(&self, axis: usize, ty: usize) -> u64 {
        self.counts[axis][ty].iter().sum()
    }

    /// Per-type sums of one axis, in lexicon type order.
    pub fn type_sums(&self, axis: usize) -> Vec<u64> {
        (0..self.counts[axis].len())
            .map(|ty| self.type_sum(axis, ty))
            .collect()
    }

    /// Summed frequency of every term in the axis.
    pub fn axis_total(&self, axis: usize) -> u64 {
        self.counts[axis].iter().flatten().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().flatten().flatten().all(|&c| c == 0)
    }

    /// Look a count up by names. `None` when the lexicon has no such term.
    pub fn get(&self, lexicon: &Lexicon, axis: &str, ty: &str, term: &str) -> Option<u64> {
        let (a, t, w) = lexicon.position(axis, ty, term)?;
        self.counts.get(a)?.get(t)?.get(w).copied()
    }

    /// Element-wise sum. Both tables must come from the same lexicon shape.
    pub fn add_assign(&mut self, other: &FrequencyTable) -> Result<()> {
        let same_shape = self.counts.len() == other.counts.len()
            && self.counts.iter().zip(&other.counts).all(|(a, b)| {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.len() == y.len())
            });
        if !same_shape {
            return Err(Error::Mismatch("tables have different shapes".into()));
        }
        for (dst, src) in self
            .counts
            .iter_mut()
            .flatten()
            .flatten()
            .zip(other.counts.iter().flatten().flatten())
        {
            *dst += src;
        }
        Ok(())
    }

    pub(crate) fn bump(&mut self, axis: usize, ty: usize, term: usize) {
        self.counts[axis][ty][term] += 1;
    }
}

/// Precomputed term index for a lexicon. Build once, count many texts.
#[derive(Debug, Clone)]
pub struct TermMatcher<'a> {
    lexicon: &'a Lexicon,
    index: HashMap<&'a str, Vec<(usize, usize, usize)>>,
    max_tokens: usize,
}

impl<'a> TermMatcher<'a> {
    pub fn new(lexicon: &'a Lexicon) -> Self {
        let mut index: HashMap<&str, Vec<_>> = HashMap::new();
        let mut max_tokens = 1;
        for (a, axis) in lexicon.axes().iter().enumerate() {
            for (t, ty) in axis.types().iter().enumerate() {
                for (w, term) in ty.terms().iter().enumerate() {
                    max_tokens = max_tokens.max(term.split(' ').count());
                    index.entry(term.as_str()).or_default().push((a, t, w));
                }
            }
        }
        TermMatcher {
            lexicon,
            index,
            max_tokens: max_tokens.min(MAX_TERM_TOKENS),
        }
    }

    pub fn lexicon(&self) -> &'a Lexicon {
        self.lexicon
    }

    /// Count every whole-token occurrence of every term in `tokens`.
    pub fn count(&self, tokens: &TokenSeq) -> FrequencyTable {
        let mut table = FrequencyTable::zeros(self.lexicon);
        let toks = tokens.tokens();
        let mut window = String::new();
        for start in 0..toks.len() {
            window.clear();
            for (n, tok) in toks[start..].iter().take(self.max_tokens).enumerate() {
                if n > 0 {
                    window.push(' ');
                }
                window.push_str(tok);
                if let Some(hits) = self.index.get(window.as_str()) {
                    for &(a, t, w) in hits {
                        table.bump(a, t, w);
                    }
                }
            }
        }
        table
    }

    pub fn count_text(&self, text: &str) -> FrequencyTable {
        self.count(&normalize(text))
    }
}

/// Count whole-token term occurrences of `lexicon` in `tokens`.
pub fn term_frequencies(tokens: &TokenSeq, lexicon: &Lexicon) -> FrequencyTable {
    TermMatcher::new(lexicon).count(tokens)
}
