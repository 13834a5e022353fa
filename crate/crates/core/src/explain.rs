//! Explainability output: term-frequency dictionaries over the biased
//! samples and top-k chart data.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexica::Lexicon;
use crate::textproc::FrequencyTable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeFrequencies {
    pub name: String,
    /// Every lexicon term of the type, zero counts included, lexicon order.
    pub terms: IndexMap<String, u64>,
}

impl TypeFrequencies {
    pub fn total(&self) -> u64 {
        self.terms.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisFrequencies {
    pub name: String,
    pub types: Vec<TypeFrequencies>,
}

/// Per-axis, per-type term frequencies summed over the biased samples.
///
/// Serialized as
/// `{"dictionary": {axis: [{term: count, ...}, ...]}, "types": {axis: [type, ...]}}`
/// where the i-th mapping in `dictionary[axis]` belongs to `types[axis][i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ExplainJson", try_from = "ExplainJson")]
pub struct ExplainReport {
    pub axes: Vec<AxisFrequencies>,
}

#[derive(Serialize, Deserialize)]
struct ExplainJson {
    dictionary: IndexMap<String, Vec<IndexMap<String, u64>>>,
    types: IndexMap<String, Vec<String>>,
}

impl From<ExplainReport> for ExplainJson {
    fn from(report: ExplainReport) -> Self {
        let mut dictionary = IndexMap::new();
        let mut types = IndexMap::new();
        for axis in report.axes {
            types.insert(
                axis.name.clone(),
                axis.types.iter().map(|t| t.name.clone()).collect(),
            );
            dictionary.insert(axis.name, axis.types.into_iter().map(|t| t.terms).collect());
        }
        ExplainJson { dictionary, types }
    }
}

impl TryFrom<ExplainJson> for ExplainReport {
    type Error = String;

    fn try_from(mut json: ExplainJson) -> std::result::Result<Self, String> {
        let mut axes = Vec::with_capacity(json.dictionary.len());
        for (axis, maps) in json.dictionary {
            let names = json
                .types
                .shift_remove(&axis)
                .ok_or_else(|| format!("no type names for axis `{axis}`"))?;
            if names.len() != maps.len() {
                return Err(format!(
                    "axis `{axis}` has {} type names but {} term mappings",
                    names.len(),
                    maps.len()
                ));
            }
            axes.push(AxisFrequencies {
                name: axis,
                types: names
                    .into_iter()
                    .zip(maps)
                    .map(|(name, terms)| TypeFrequencies { name, terms })
                    .collect(),
            });
        }
        if let Some(extra) = json.types.keys().next() {
            return Err(format!("type names given for unknown axis `{extra}`"));
        }
        Ok(ExplainReport { axes })
    }
}

impl ExplainReport {
    /// All-zero report with the lexicon's full term inventory.
    pub fn empty(lexicon: &Lexicon) -> Self {
        ExplainReport {
            axes: lexicon
                .axes()
                .iter()
                .map(|axis| AxisFrequencies {
                    name: axis.name().to_owned(),
                    types: axis
                        .types()
                        .iter()
                        .map(|ty| TypeFrequencies {
                            name: ty.name().to_owned(),
                            terms: ty.terms().iter().map(|t| (t.clone(), 0)).collect(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn axis(&self, name: &str) -> Option<&AxisFrequencies> {
        self.axes.iter().find(|a| a.name == name)
    }

    fn axis_or_err(&self, name: &str) -> Result<&AxisFrequencies> {
        self.axis(name)
            .ok_or_else(|| Error::UnknownAxis(name.to_owned()))
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Sum per-sample tables into a report. Every table must be shaped like
/// `lexicon`.
pub fn frequency_report(biased_freqs: &[FrequencyTable], lexicon: &Lexicon) -> Result<ExplainReport> {
    let mut total = FrequencyTable::zeros(lexicon);
    for (i, table) in biased_freqs.iter().enumerate() {
        if !table.fits(lexicon) {
            return Err(Error::Mismatch(format!("table {i} is not shaped like the lexicon")));
        }
        total.add_assign(table)?;
    }
    Ok(report_from_total(&total, lexicon))
}

pub(crate) fn report_from_total(total: &FrequencyTable, lexicon: &Lexicon) -> ExplainReport {
    let mut report = ExplainReport::empty(lexicon);
    for (a, axis) in report.axes.iter_mut().enumerate() {
        for (t, ty) in axis.types.iter_mut().enumerate() {
            for (count, &c) in ty.terms.values_mut().zip(total.term_counts(a, t)) {
                *count = c;
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedType {
    pub name: String,
    pub terms: Vec<(String, u64)>,
}

/// The k most frequent terms of each type of one axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopTerms {
    pub axis: String,
    pub types: Vec<RankedType>,
}

impl TopTerms {
    pub fn rows(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.types.iter().flat_map(|ty| {
            ty.terms
                .iter()
                .map(move |(term, c)| (ty.name.as_str(), term.as_str(), *c))
        })
    }
}

/// Rank each type's terms by count (descending, ties lexicographic) and keep
/// the first `k` nonzero ones.
pub fn top_k_terms(report: &ExplainReport, axis: &str, k: usize) -> Result<TopTerms> {
    if k == 0 {
        return Err(Error::Config("top-k must be at least 1".into()));
    }
    let axis = report.axis_or_err(axis)?;
    let types = axis
        .types
        .iter()
        .map(|ty| {
            let mut terms: Vec<(String, u64)> = ty
                .terms
                .iter()
                .filter(|(_, &c)| c > 0)
                .map(|(t, &c)| (t.clone(), c))
                .collect();
            terms.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            terms.truncate(k);
            RankedType {
                name: ty.name.clone(),
                terms,
            }
        })
        .collect();
    Ok(TopTerms {
        axis: axis.name.clone(),
        types,
    })
}

/// Which type of an axis carries the most term occurrences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dominance {
    Type(String),
    Tie,
}

impl fmt::Display for Dominance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dominance::Type(name) => f.write_str(name),
            Dominance::Tie => f.write_str("tie"),
        }
    }
}

pub fn dominant_type(report: &ExplainReport, axis: &str) -> Result<Dominance> {
    let axis = report.axis_or_err(axis)?;
    let mut totals: Vec<(u64, &str)> = axis.types.iter().map(|t| (t.total(), t.name.as_str())).collect();
    totals.sort_by_key(|t| std::cmp::Reverse(t.0));
    Ok(match totals.as_slice() {
        [(top, _), (second, _), ..] if top == second => Dominance::Tie,
        [(_, name), ..] => Dominance::Type((*name).to_owned()),
        [] => Dominance::Tie,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartFormat {
    Csv,
    Json,
    Svg,
}

impl ChartFormat {
    pub const ALL: [ChartFormat; 3] = [ChartFormat::Csv, ChartFormat::Json, ChartFormat::Svg];

    pub fn extension(self) -> &'static str {
        match self {
            ChartFormat::Csv => "csv",
            ChartFormat::Json => "json",
            ChartFormat::Svg => "svg",
        }
    }
}

impl FromStr for ChartFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ChartFormat::Csv),
            "json" => Ok(ChartFormat::Json),
            "svg" => Ok(ChartFormat::Svg),
            other => Err(format!("unknown chart format `{other}` (csv, json, svg)")),
        }
    }
}

#[derive(Serialize)]
struct ChartRow<'a> {
    axis: &'a str,
    #[serde(rename = "type")]
    ty: &'a str,
    term: &'a str,
    count: u64,
}

/// Render top-k data as csv, json or svg.
pub fn render_chart(topk: &TopTerms, format: ChartFormat) -> Result<String> {
    let rows = topk.rows().map(|(ty, term, count)| ChartRow {
        axis: &topk.axis,
        ty,
        term,
        count,
    });
    Ok(match format {
        ChartFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(Vec::new());
            w.write_record(["axis", "type", "term", "count"])
                .expect("writing to memory");
            for row in rows {
                w.serialize(row).expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 input")
        }
        ChartFormat::Json => {
            let body = serde_json::json!({
                "axis": topk.axis,
                "rows": rows.collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&body)? + "\n"
        }
        ChartFormat::Svg => render_svg(topk),
    })
}

pub fn emit_chart(topk: &TopTerms, path: impl AsRef<Path>, format: ChartFormat) -> Result<()> {
    let path = path.as_ref();
    let body = render_chart(topk, format)?;
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

const BAR_W: u32 = 36;
const BAR_GAP: u32 = 8;
const GROUP_GAP: u32 = 32;
const PLOT_H: u32 = 240;
const MARGIN: u32 = 40;
const PALETTE: [&str; 6] = ["#d1495b", "#00798c", "#edae49", "#66a182", "#2e4057", "#8d96a3"];

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn render_svg(topk: &TopTerms) -> String {
    let max = topk.rows().map(|(_, _, c)| c).max().unwrap_or(0);
    let bars: u32 = topk.types.iter().map(|t| t.terms.len() as u32).sum();
    let groups = topk.types.len() as u32;
    let width = 2 * MARGIN + bars * (BAR_W + BAR_GAP) + groups.saturating_sub(1) * GROUP_GAP + BAR_W;
    let height = PLOT_H + 2 * MARGIN + 40;
    let base = MARGIN + PLOT_H;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r#"<title>Top {} frequent terms: {}</title>"#,
        topk.types.iter().map(|t| t.terms.len()).max().unwrap_or(0),
        xml_escape(&topk.axis)
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#,
        width - MARGIN
    );
    let mut x = MARGIN + BAR_W / 2;
    for (g, ty) in topk.types.iter().enumerate() {
        let colour = PALETTE[g % PALETTE.len()];
        let group_start = x;
        for (term, count) in &ty.terms {
            let h = if max == 0 {
                0
            } else {
                ((*count as f64 / max as f64) * PLOT_H as f64).round() as u32
            };
            let _ = writeln!(
                svg,
                r#"<rect x="{x}" y="{}" width="{BAR_W}" height="{h}" fill="{colour}" data-type="{}" data-term="{}" data-count="{count}"/>"#,
                base - h,
                xml_escape(&ty.name),
                xml_escape(term)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="middle">{count}</text>"#,
                x + BAR_W / 2,
                base - h - 4
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                x + BAR_W / 2,
                base + 14,
                xml_escape(term)
            );
            x += BAR_W + BAR_GAP;
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-weight="bold">{}</text>"#,
            (group_start + x.saturating_sub(BAR_GAP)) / 2,
            base + 32,
            xml_escape(&ty.name)
        );
        x += GROUP_GAP;
    }
    svg.push_str("</svg>\n");
    svg
}
