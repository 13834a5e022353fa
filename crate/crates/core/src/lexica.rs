//! Multi-axes lexica of sensitive terms.
//!
//! A [`Lexicon`] holds one language's axes (gender, racial, ...). Each
//! [`Axis`] has at least two [`AxisType`]s (female/male, black/white, ...)
//! and each type an ordered set of terms. Terms are stored in normalized
//! form: lowercase tokens joined by single spaces, at most
//! [`MAX_TERM_TOKENS`] tokens.
//!
//! # File format
//!
//! ```text
//! # comment
//! language = en
//!
//! [axis.gender.female]
//! she
//! better half
//!
//! [axis.gender.male]
//! he
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Sections of the same
//! axis may appear anywhere in the file; axis and type order follow first
//! appearance.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::textproc::{normalize, MAX_TERM_TOKENS};

const EN: &str = include_str!("../lexica/en.lex");
const SV: &str = include_str!("../lexica/sv.lex");

/// One group within an axis, e.g. `female` within `gender`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisType {
    name: String,
    terms: Vec<String>,
}

impl AxisType {
    /// Builds a type from raw terms; terms are normalized and must be
    /// distinct after normalization.
    pub fn new<S: AsRef<str>>(name: &str, terms: impl IntoIterator<Item = S>) -> Result<Self> {
        check_ident(name, || format!("type `{name}`"))?;
        let mut ty = AxisType {
            name: name.to_owned(),
            terms: Vec::new(),
        };
        for raw in terms {
            let term = canonical_term(raw.as_ref())
                .map_err(|msg| Error::lexicon(format!("type `{name}`"), msg))?;
            if ty.contains(&term) {
                return Err(Error::lexicon(
                    format!("type `{name}`, term `{term}`"),
                    "duplicate term within type",
                ));
            }
            ty.terms.push(term);
        }
        Ok(ty)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.iter().any(|t| t == term)
    }
}

/// A bias dimension with two or more types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    name: String,
    types: Vec<AxisType>,
}

impl Axis {
    pub fn new(name: &str, types: Vec<AxisType>) -> Result<Self> {
        let axis = Axis {
            name: name.to_owned(),
            types,
        };
        axis.validate()?;
        Ok(axis)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn types(&self) -> &[AxisType] {
        &self.types
    }

    pub fn type_index(&self, name: &str) -> Option<usize> {
        self.types.iter().position(|t| t.name == name)
    }

    pub fn term_count(&self) -> usize {
        self.types.iter().map(|t| t.terms.len()).sum()
    }

    fn validate(&self) -> Result<()> {
        let here = |extra: &str| format!("axis `{}`{extra}", self.name);
        check_ident(&self.name, || here(""))?;
        if self.types.len() < 2 {
            return Err(Error::lexicon(here(""), "an axis needs at least two types"));
        }
        let mut owner: HashMap<&str, &str> = HashMap::new();
        for (i, ty) in self.types.iter().enumerate() {
            let loc = |t: &str| here(&format!(", type `{}`{t}", ty.name));
            check_ident(&ty.name, || loc(""))?;
            if self.types[..i].iter().any(|t| t.name == ty.name) {
                return Err(Error::lexicon(loc(""), "duplicate type name"));
            }
            if ty.terms.is_empty() {
                return Err(Error::lexicon(loc(""), "type has no terms"));
            }
            for term in &ty.terms {
                let tloc = || loc(&format!(", term `{term}`"));
                match canonical_term(term) {
                    Ok(c) if &c == term => {}
                    Ok(_) => return Err(Error::lexicon(tloc(), "term is not normalized")),
                    Err(msg) => return Err(Error::lexicon(tloc(), msg)),
                }
                match owner.insert(term, &ty.name) {
                    Some(prev) if prev == ty.name => {
                        return Err(Error::lexicon(tloc(), "duplicate term within type"))
                    }
                    Some(prev) => {
                        return Err(Error::lexicon(
                            tloc(),
                            format!("duplicate term across types (also in `{prev}`)"),
                        ))
                    }
                    None => {}
                }
            }
        }
        Ok(())
    }
}

/// All axes of sensitive terms for one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    language: String,
    axes: Vec<Axis>,
}

impl Lexicon {
    pub fn new(language: &str, axes: Vec<Axis>) -> Result<Self> {
        let lexicon = Lexicon {
            language: language.to_owned(),
            axes,
        };
        lexicon.validate()?;
        Ok(lexicon)
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, name: &str) -> Option<&Axis> {
        self.axes.iter().find(|a| a.name == name)
    }

    pub fn axis_index(&self, name: &str) -> Option<usize> {
        self.axes.iter().position(|a| a.name == name)
    }

    /// (axis, type, term) indices of a term, if present.
    pub fn position(&self, axis: &str, ty: &str, term: &str) -> Option<(usize, usize, usize)> {
        let a = self.axis_index(axis)?;
        let t = self.axes[a].type_index(ty)?;
        let w = self.axes[a].types[t].terms.iter().position(|x| x == term)?;
        Some((a, t, w))
    }

    pub fn term_count(&self) -> usize {
        self.axes.iter().map(Axis::term_count).sum()
    }

    fn validate(&self) -> Result<()> {
        check_ident(&self.language, || "language".to_owned())?;
        if self.axes.is_empty() {
            return Err(Error::lexicon("lexicon", "no axes defined"));
        }
        for (i, axis) in self.axes.iter().enumerate() {
            if self.axes[..i].iter().any(|a| a.name == axis.name) {
                return Err(Error::lexicon(
                    format!("axis `{}`", axis.name),
                    "duplicate axis name",
                ));
            }
            axis.validate()?;
        }
        Ok(())
    }

    /// Render in the lexicon file format. [`Lexicon::from_str`] reads it
    /// back unchanged.
    pub fn to_text(&self) -> String {
        let mut out = format!("language = {}\n", self.language);
        for axis in &self.axes {
            for ty in &axis.types {
                let _ = write!(out, "\n[axis.{}.{}]\n", axis.name, ty.name);
                for term in &ty.terms {
                    out.push_str(term);
                    out.push('\n');
                }
            }
        }
        out
    }
}

impl FromStr for Lexicon {
    type Err = Error;

    fn from_str(src: &str) -> Result<Self> {
        parse(src, "<input>")
    }
}

type Sections = Vec<(String, Vec<(String, Vec<(usize, String)>)>)>;

fn parse(src: &str, origin: &str) -> Result<Lexicon> {
    let mut language: Option<String> = None;
    // axis name -> (type name -> raw terms), both in first-seen order
    let mut sections: Sections = Vec::new();
    let mut current: Option<(usize, usize)> = None;

    for (n, raw) in src.lines().enumerate() {
        let lineno = n + 1;
        let at = || format!("{origin}:{lineno}");
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| Error::lexicon(at(), "unterminated section header"))?;
            let mut parts = header.split('.');
            let (Some("axis"), Some(axis), Some(ty), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::lexicon(
                    at(),
                    format!("expected `[axis.<name>.<type>]`, found `[{header}]`"),
                ));
            };
            let (axis, ty) = (axis.trim(), ty.trim());
            check_ident(axis, at)?;
            check_ident(ty, at)?;
            let a = match sections.iter().position(|(name, _)| name == axis) {
                Some(a) => a,
                None => {
                    sections.push((axis.to_owned(), Vec::new()));
                    sections.len() - 1
                }
            };
            if sections[a].1.iter().any(|(name, _)| name == ty) {
                return Err(Error::lexicon(
                    at(),
                    format!("section `[axis.{axis}.{ty}]` declared twice"),
                ));
            }
            sections[a].1.push((ty.to_owned(), Vec::new()));
            current = Some((a, sections[a].1.len() - 1));
            continue;
        }
        if current.is_none() {
            if let Some((key, value)) = line.split_once('=') {
                if key.trim() == "language" {
                    if language.is_some() {
                        return Err(Error::lexicon(at(), "language declared twice"));
                    }
                    let tag = value.trim();
                    check_ident(tag, at)?;
                    language = Some(tag.to_owned());
                    continue;
                }
            }
            return Err(Error::lexicon(
                at(),
                format!("unexpected line before first section: `{line}`"),
            ));
        }
        let (a, t) = current.expect("checked above");
        sections[a].1[t].1.push((lineno, line.to_owned()));
    }

    let language =
        language.ok_or_else(|| Error::lexicon(origin, "missing `language = <tag>` header"))?;
    let mut axes = Vec::with_capacity(sections.len());
    for (axis_name, types) in sections {
        let mut built = Vec::with_capacity(types.len());
        for (type_name, lines) in types {
            let mut terms: Vec<String> = Vec::with_capacity(lines.len());
            for (lineno, raw) in lines {
                let here = || {
                    format!("{origin}:{lineno} (axis `{axis_name}`, type `{type_name}`, term `{raw}`)")
                };
                let term = canonical_term(&raw).map_err(|msg| Error::lexicon(here(), msg))?;
                if terms.contains(&term) {
                    return Err(Error::lexicon(here(), "duplicate term within type"));
                }
                terms.push(term);
            }
            built.push(AxisType {
                name: type_name,
                terms,
            });
        }
        axes.push(Axis {
            name: axis_name,
            types: built,
        });
    }
    let lexicon = Lexicon { language, axes };
    lexicon.validate().map_err(|e| match e {
        Error::Lexicon { location, message } => Error::Lexicon {
            location: format!("{origin}: {location}"),
            message,
        },
        other => other,
    })?;
    Ok(lexicon)
}

/// Normalized storage form of a term, or a message explaining why the term
/// is unusable.
fn canonical_term(raw: &str) -> std::result::Result<String, String> {
    let tokens = normalize(raw);
    if tokens.is_empty() {
        return Err("empty term".into());
    }
    if tokens.len() > MAX_TERM_TOKENS {
        return Err(format!(
            "term has {} tokens, at most {MAX_TERM_TOKENS} allowed",
            tokens.len()
        ));
    }
    Ok(tokens.joined())
}

fn check_ident(name: &str, location: impl FnOnce() -> String) -> Result<()> {
    let ok = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '-');
    if ok {
        Ok(())
    } else {
        Err(Error::lexicon(
            location(),
            format!("`{name}` is not a valid name (letters, digits, `_`, `-`)"),
        ))
    }
}

/// Read and validate a lexicon file.
pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&src, &path.display().to_string())
}

/// One of the shipped lexica: `en` or `sv`.
pub fn builtin_lexicon(language: &str) -> Result<Lexicon> {
    let (src, origin) = match language {
        "en" => (EN, "builtin:en"),
        "sv" => (SV, "builtin:sv"),
        other => return Err(Error::UnknownLanguage(other.to_owned())),
    };
    parse(src, origin)
}

/// Return a copy of `lexicon` with `terms` added to `axis`/`ty`.
///
/// Missing types are created within an existing axis. A new axis is only
/// accepted once it has two types, so declare its types one call at a time
/// with [`Lexicon::with_axis`] instead. Terms already present in the target
/// type are skipped.
pub fn extend_lexicon<S: AsRef<str>>(
    lexicon: &Lexicon,
    axis: &str,
    ty: &str,
    terms: impl IntoIterator<Item = S>,
) -> Result<Lexicon> {
    let mut out = lexicon.clone();
    let a = match out.axis_index(axis) {
        Some(a) => a,
        None => {
            check_ident(axis, || format!("axis `{axis}`"))?;
            out.axes.push(Axis {
                name: axis.to_owned(),
                types: Vec::new(),
            });
            out.axes.len() - 1
        }
    };
    let t = match out.axes[a].type_index(ty) {
        Some(t) => t,
        None => {
            check_ident(ty, || format!("axis `{axis}`, type `{ty}`"))?;
            out.axes[a].types.push(AxisType {
                name: ty.to_owned(),
                terms: Vec::new(),
            });
            out.axes[a].types.len() - 1
        }
    };
    for raw in terms {
        let term = canonical_term(raw.as_ref()).map_err(|msg| {
            Error::lexicon(format!("axis `{axis}`, type `{ty}`, term `{}`", raw.as_ref()), msg)
        })?;
        let target = &mut out.axes[a].types[t];
        if !target.contains(&term) {
            target.terms.push(term);
        }
    }
    out.validate()?;
    Ok(out)
}

impl Lexicon {
    /// Return a copy with a whole new axis appended.
    pub fn with_axis(&self, axis: Axis) -> Result<Lexicon> {
        let mut out = self.clone();
        out.axes.push(axis);
        out.validate()?;
        Ok(out)
    }
}
