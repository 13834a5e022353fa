//! C ABI over the bipol library.
//!
//! Every fallible function returns a [`BipolStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`bipol_last_error`] on the same thread. Handles are opaque and must be
//! released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use bipol::{BipolReport as CoreReport, BowModel, Evaluator, Label, Lexicon, Prediction, PredictionSet, Sample};

/// Result codes. The non-zero error codes match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BipolStatus {
    Ok = 0,
    Config = 1,
    Data = 2,
    Labeler = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// A loaded lexicon.
pub struct BipolLexicon(Lexicon);

/// A trained bag-of-words classifier.
pub struct BipolModel(BowModel);

/// The result of one evaluation run.
pub struct BipolReport(CoreReport);

/// Headline numbers of a report.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BipolScores {
    pub corpus_score: f64,
    pub sentence_score: f64,
    pub bipol: f64,
    pub total_count: usize,
    pub biased_count: usize,
    pub scored_count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

struct Failure(BipolStatus, String);

impl From<bipol::Error> for Failure {
    fn from(e: bipol::Error) -> Self {
        let status = match e.exit_code() {
            1 => BipolStatus::Config,
            3 => BipolStatus::Labeler,
            _ => BipolStatus::Data,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(BipolStatus::NullPointer, format!("`{name}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BipolStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BipolStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            BipolStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(BipolStatus::InvalidUtf8, format!("`{name}` is not valid UTF-8")))
}

unsafe fn texts_arg(texts: *const *const c_char, n: usize) -> Result<Vec<Sample>, Failure> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if texts.is_null() {
        return Err(null("texts"));
    }
    std::slice::from_raw_parts(texts, n)
        .iter()
        .enumerate()
        .map(|(i, &p)| Ok(Sample::new(i.to_string(), str_arg(p, "texts[i]")?)))
        .collect()
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message for the most recent failure on this thread, or NULL. The
/// pointer stays valid until the next bipol call on the same thread.
#[no_mangle]
pub extern "C" fn bipol_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn bipol_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Load a builtin lexicon ("en" or "sv").
///
/// # Safety
/// `language` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bipol_lexicon_builtin(language: *const c_char, out: *mut *mut BipolLexicon) -> BipolStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let lexicon = bipol::builtin_lexicon(str_arg(language, "language")?)?;
        write_out(out, BipolLexicon(lexicon));
        Ok(())
    })
}

/// Load a lexicon file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bipol_lexicon_load(path: *const c_char, out: *mut *mut BipolLexicon) -> BipolStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let lexicon = bipol::load_lexicon(Path::new(str_arg(path, "path")?))?;
        write_out(out, BipolLexicon(lexicon));
        Ok(())
    })
}

/// Parse a lexicon from its text form.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bipol_lexicon_parse(text: *const c_char, out: *mut *mut BipolLexicon) -> BipolStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let lexicon: Lexicon = str_arg(text, "text")?.parse()?;
        write_out(out, BipolLexicon(lexicon));
        Ok(())
    })
}

/// # Safety
/// `lexicon` must be NULL or a handle from a `bipol_lexicon_*` constructor
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn bipol_lexicon_free(lexicon: *mut BipolLexicon) {
    if !lexicon.is_null() {
        drop(Box::from_raw(lexicon));
    }
}

/// Load a model written by `bipol train`. Any failure is reported as
/// `BIPOL_STATUS_LABELER`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bipol_model_load(path: *const c_char, out: *mut *mut BipolModel) -> BipolStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let model = BowModel::load(Path::new(str_arg(path, "path")?))
            .map_err(|e| Failure(BipolStatus::Labeler, e.to_string()))?;
        write_out(out, BipolModel(model));
        Ok(())
    })
}

/// Probability that `text` is biased under `model`.
///
/// # Safety
/// `model` must be a live handle, `text` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bipol_model_biased_probability(
    model: *const BipolModel,
    text: *const c_char,
    out: *mut f64,
) -> BipolStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = model.0.biased_probability(str_arg(text, "text")?);
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a live handle from [`bipol_model_load`].
#[no_mangle]
pub unsafe extern "C" fn bipol_model_free(model: *mut BipolModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Evaluate `n` texts with externally supplied labels: `biased[i]` non-zero
/// marks text `i` as biased.
///
/// # Safety
/// `lexicon` must be a live handle; `texts` and `biased` must point to `n`
/// elements each (either may be NULL when `n` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bipol_evaluate_labels(
    lexicon: *const BipolLexicon,
    texts: *const *const c_char,
    biased: *const u8,
    n: usize,
    out: *mut *mut BipolReport,
) -> BipolStatus {
    guard(|| {
        let lexicon = lexicon.as_ref().ok_or_else(|| null("lexicon"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let samples = texts_arg(texts, n)?;
        let flags: &[u8] = match n {
            0 => &[],
            _ if biased.is_null() => return Err(null("biased")),
            _ => std::slice::from_raw_parts(biased, n),
        };
        let mut labels = PredictionSet::new();
        for (sample, &flag) in samples.iter().zip(flags) {
            let label = if flag != 0 { Label::Biased } else { Label::Unbiased };
            labels.insert(Prediction {
                id: sample.id.clone(),
                label,
                confidence: if flag != 0 { 1.0 } else { 0.0 },
            })?;
        }
        let report = Evaluator::new(&lexicon.0).run(&samples, &labels)?;
        write_out(out, BipolReport(report));
        Ok(())
    })
}

/// Evaluate `n` texts labeled by `model` using up to `workers` threads
/// (0 means one).
///
/// # Safety
/// `lexicon` and `model` must be live handles; `texts` must point to `n`
/// NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bipol_evaluate_model(
    lexicon: *const BipolLexicon,
    model: *const BipolModel,
    texts: *const *const c_char,
    n: usize,
    workers: usize,
    out: *mut *mut BipolReport,
) -> BipolStatus {
    guard(|| {
        let lexicon = lexicon.as_ref().ok_or_else(|| null("lexicon"))?;
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let samples = texts_arg(texts, n)?;
        let report = Evaluator::new(&lexicon.0)
            .workers(workers)
            .seed(Some(model.0.seed()))
            .run(&samples, &model.0)?;
        write_out(out, BipolReport(report));
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bipol_report_scores(report: *const BipolReport, out: *mut BipolScores) -> BipolStatus {
    guard(|| {
        let report = &report.as_ref().ok_or_else(|| null("report"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = BipolScores {
            corpus_score: report.corpus_score,
            sentence_score: report.sentence_score,
            bipol: report.bipol,
            total_count: report.total_count,
            biased_count: report.biased_count,
            scored_count: report.scored_count,
        };
        Ok(())
    })
}

/// Serialize the full report as JSON. Free the string with
/// [`bipol_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bipol_report_to_json(report: *const BipolReport, out: *mut *mut c_char) -> BipolStatus {
    guard(|| {
        let report = &report.as_ref().ok_or_else(|| null("report"))?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let json = report.to_json_pretty()?;
        *out = CString::new(json)
            .map_err(|_| Failure(BipolStatus::Data, "report contains a NUL byte".into()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a live handle from a `bipol_evaluate_*` call.
#[no_mangle]
pub unsafe extern "C" fn bipol_report_free(report: *mut BipolReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bipol_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Combine corpus and sentence scores into the bipol score.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bipol_combine(corpus: f64, sentence: f64, out: *mut f64) -> BipolStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = bipol::combine(corpus, sentence)?;
        Ok(())
    })
}

/// Error rate and macro F1 for a binary confusion matrix. Returns
/// `BIPOL_STATUS_DATA` when either metric is undefined.
///
/// # Safety
/// `error_rate` and `macro_f1` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bipol_confusion_metrics(
    tp: u64,
    fp: u64,
    tn: u64,
    fn_: u64,
    error_rate: *mut f64,
    macro_f1: *mut f64,
) -> BipolStatus {
    guard(|| {
        if error_rate.is_null() || macro_f1.is_null() {
            return Err(null("out"));
        }
        let cm = bipol::ConfusionMatrix::new(tp, fp, tn, fn_);
        let er = bipol::error_rate(&cm)
            .ok_or_else(|| Failure(BipolStatus::Data, "empty confusion matrix".into()))?;
        let f1 = bipol::macro_f1(&cm)?;
        *error_rate = er;
        *macro_f1 = f1;
        Ok(())
    })
}
