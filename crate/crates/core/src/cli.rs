//! `bipol` command-line front end.
//!
//! Every option may also come from a TOML config file given with
//! `--config`; flags win over the file. Exit codes: 0 success, 1 config
//! error, 2 data error, 3 labeler error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::classifier::{
    error_rate, load_predictions, macro_f1, train_bow_classifier, BowModel, ConfusionMatrix, Label,
    Labeler, PredictionSet, Sample, DEFAULT_SMOOTHING, DEFAULT_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::explain::{dominant_type, emit_chart, top_k_terms, ChartFormat, ExplainReport};
use crate::ingest::{dataset_stats, read_dataset, Dataset, DatasetSpec, Format};
use crate::lexica::{builtin_lexicon, load_lexicon, Lexicon};
use crate::scorer::{BipolReport, Evaluator};

pub const DEFAULT_TOP_K: usize = 5;
pub const DEFAULT_SEED: u64 = 42;
const HOLDOUT_FRACTION: f64 = 0.1;

#[derive(Debug, Parser)]
#[command(name = "bipol", version, about = "Audit text corpora for social bias with the bipol metric")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct GlobalArgs {
    /// Plain-text (TOML) config file; flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Lexicon file (overrides --language)
    #[arg(long, global = true, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,

    /// Builtin lexicon language: en or sv
    #[arg(long, global = true)]
    pub language: Option<String>,

    /// Dataset format: csv, tsv or jsonl (default: from the file extension)
    #[arg(long, global = true)]
    pub format: Option<Format>,

    /// Column or key holding the text
    #[arg(long, global = true)]
    pub text_field: Option<String>,

    /// Column or key holding the sample id (default: row index)
    #[arg(long, global = true)]
    pub id_field: Option<String>,

    /// Column or key holding gold labels (biased/unbiased)
    #[arg(long, global = true)]
    pub label_field: Option<String>,

    /// Read only the first N rows (applied before deduplication)
    #[arg(long, global = true)]
    pub limit: Option<usize>,

    /// Keep rows whose normalized text repeats an earlier row
    #[arg(long, global = true)]
    pub no_dedup: bool,

    /// Terms per type in top-k charts
    #[arg(long, global = true)]
    pub top_k: Option<usize>,

    /// Biased-class probability at or above which a sample is biased
    #[arg(long, global = true)]
    pub threshold: Option<f64>,

    /// Seed for every random choice (train/test split)
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory (evaluate, explain) or file (train, predict)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Worker threads (default: available cores)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Label a dataset, score the biased samples and write reports
    Evaluate(EvaluateArgs),
    /// Train the built-in bag-of-words classifier on a labeled csv
    Train(TrainArgs),
    /// Write a predictions file for a dataset using a trained model
    Predict(PredictArgs),
    /// Emit top-k charts from a saved report
    Explain(ExplainArgs),
    /// Print dataset counts
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Dataset file (csv, tsv or jsonl)
    pub dataset: Option<PathBuf>,
    /// Predictions file (id<TAB>label<TAB>confidence)
    #[arg(long, conflicts_with_all = ["model", "train"])]
    pub predictions: Option<PathBuf>,
    /// Trained model file
    #[arg(long, conflicts_with = "train")]
    pub model: Option<PathBuf>,
    /// Labeled csv to train a model on before evaluating
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Additive smoothing for --train
    #[arg(long)]
    pub smoothing: Option<f64>,
    /// Chart formats, comma separated
    #[arg(long, value_delimiter = ',')]
    pub charts: Option<Vec<ChartFormat>>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled csv with `comment_text` and `label` columns
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub smoothing: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    /// Report JSON written by `evaluate` (bipol or explain report)
    pub report: PathBuf,
    /// Axis to chart (default: every axis)
    #[arg(long)]
    pub axis: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub charts: Option<Vec<ChartFormat>>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub dataset: Option<PathBuf>,
}

/// Values accepted in the config file. Keys mirror the long flag names with
/// `_` in place of `-`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub dataset: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub language: Option<String>,
    pub format: Option<String>,
    pub text_field: Option<String>,
    pub id_field: Option<String>,
    pub label_field: Option<String>,
    pub limit: Option<usize>,
    pub dedup: Option<bool>,
    pub top_k: Option<usize>,
    pub threshold: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub predictions: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub train: Option<PathBuf>,
    pub smoothing: Option<f64>,
    pub charts: Option<Vec<String>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let src = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&src).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Where stage-one labels come from.
#[derive(Debug, Clone, PartialEq)]
pub enum LabelerSource {
    Model(PathBuf),
    Predictions(PathBuf),
    TrainInline { data: PathBuf, smoothing: f64 },
}

/// Fully resolved settings for one `evaluate` run.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    pub dataset: DatasetSpec,
    pub lexicon: LexiconSource,
    pub labeler: LabelerSource,
    pub out: PathBuf,
    pub charts: Vec<ChartFormat>,
    pub top_k: usize,
    pub threshold: f64,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LexiconSource {
    Builtin(String),
    File(PathBuf),
}

impl LexiconSource {
    pub fn load(&self) -> Result<Lexicon> {
        match self {
            LexiconSource::Builtin(tag) => builtin_lexicon(tag),
            LexiconSource::File(path) => load_lexicon(path).map_err(|e| match e {
                Error::Io { path, source } => {
                    Error::Config(format!("lexicon {}: {source}", path.display()))
                }
                other => other,
            }),
        }
    }
}

/// Flags merged over the config file.
struct Resolved {
    global: GlobalArgs,
    file: ConfigFile,
}

impl Resolved {
    fn new(global: GlobalArgs) -> Result<Self> {
        let file = match &global.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        Ok(Resolved { global, file })
    }

    fn lexicon(&self) -> LexiconSource {
        if let Some(path) = self.global.lexicon.clone() {
            return LexiconSource::File(path);
        }
        if let Some(tag) = self.global.language.clone() {
            return LexiconSource::Builtin(tag);
        }
        match (&self.file.lexicon, &self.file.language) {
            (Some(path), _) => LexiconSource::File(path.clone()),
            (None, Some(tag)) => LexiconSource::Builtin(tag.clone()),
            (None, None) => LexiconSource::Builtin("en".into()),
        }
    }

    fn dataset(&self, path: Option<PathBuf>, default_text: &str, default_label: Option<&str>) -> Result<DatasetSpec> {
        let path = path
            .or_else(|| self.file.dataset.clone())
            .ok_or_else(|| Error::Config("no dataset given".into()))?;
        let format = match (self.global.format, &self.file.format) {
            (Some(f), _) => f,
            (None, Some(f)) => f.parse().map_err(Error::Config)?,
            (None, None) => Format::from_path(&path).unwrap_or(Format::Csv),
        };
        let spec = DatasetSpec {
            format,
            text_field: self
                .global
                .text_field
                .clone()
                .or_else(|| self.file.text_field.clone())
                .unwrap_or_else(|| default_text.to_owned()),
            id_field: self.global.id_field.clone().or_else(|| self.file.id_field.clone()),
            label_field: self
                .global
                .label_field
                .clone()
                .or_else(|| self.file.label_field.clone())
                .or_else(|| default_label.map(str::to_owned)),
            limit: self.global.limit.or(self.file.limit),
            dedup: !self.global.no_dedup && self.file.dedup.unwrap_or(true),
            path,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn top_k(&self) -> Result<usize> {
        let k = self.global.top_k.or(self.file.top_k).unwrap_or(DEFAULT_TOP_K);
        if k == 0 {
            return Err(Error::Config("top-k must be at least 1".into()));
        }
        Ok(k)
    }

    /// Threshold given by flag or file, if any.
    fn explicit_threshold(&self) -> Result<Option<f64>> {
        match self.global.threshold.or(self.file.threshold) {
            Some(t) if !(0.0..=1.0).contains(&t) => {
                Err(Error::Config(format!("threshold {t} outside [0, 1]")))
            }
            t => Ok(t),
        }
    }

    fn threshold(&self) -> Result<f64> {
        Ok(self.explicit_threshold()?.unwrap_or(DEFAULT_THRESHOLD))
    }

    fn seed(&self) -> u64 {
        self.global.seed.or(self.file.seed).unwrap_or(DEFAULT_SEED)
    }

    fn out(&self, default: &str) -> PathBuf {
        self.global
            .out
            .clone()
            .or_else(|| self.file.out.clone())
            .unwrap_or_else(|| PathBuf::from(default))
    }

    fn workers(&self) -> usize {
        self.global
            .workers
            .or(self.file.workers)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from))
            .max(1)
    }

    fn smoothing(&self, flag: Option<f64>) -> f64 {
        flag.or(self.file.smoothing).unwrap_or(DEFAULT_SMOOTHING)
    }

    fn charts(&self, flag: Option<Vec<ChartFormat>>) -> Result<Vec<ChartFormat>> {
        match (flag, &self.file.charts) {
            (Some(c), _) => Ok(c),
            (None, Some(names)) => names
                .iter()
                .map(|n| n.parse().map_err(Error::Config))
                .collect(),
            (None, None) => Ok(ChartFormat::ALL.to_vec()),
        }
    }

    fn audit_config(&self, args: EvaluateArgs) -> Result<AuditConfig> {
        let predictions = args.predictions.or_else(|| self.file.predictions.clone());
        let model = args.model.or_else(|| self.file.model.clone());
        let train = args.train.or_else(|| self.file.train.clone());
        let labeler = match (predictions, model, train) {
            (Some(p), None, None) => LabelerSource::Predictions(p),
            (None, Some(m), None) => LabelerSource::Model(m),
            (None, None, Some(data)) => LabelerSource::TrainInline {
                data,
                smoothing: self.smoothing(args.smoothing),
            },
            (None, None, None) => {
                return Err(Error::Config(
                    "no labeler: give one of --predictions, --model or --train".into(),
                ))
            }
            _ => {
                return Err(Error::Config(
                    "give exactly one of --predictions, --model or --train".into(),
                ))
            }
        };
        Ok(AuditConfig {
            dataset: self.dataset(args.dataset, "text", None)?,
            lexicon: self.lexicon(),
            labeler,
            out: self.out("bipol-out"),
            charts: self.charts(args.charts)?,
            top_k: self.top_k()?,
            threshold: self.threshold()?,
            seed: self.seed(),
            workers: self.workers(),
        })
    }
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let cfg = Resolved::new(cli.global)?;
    match cli.command {
        Command::Evaluate(args) => {
            let audit = cfg.audit_config(args)?;
            cmd_evaluate(&audit, out).map(|_| ())
        }
        Command::Train(args) => {
            let spec = cfg.dataset(args.data, "comment_text", Some("label"))?;
            let smoothing = cfg.smoothing(args.smoothing);
            cmd_train(&spec, smoothing, cfg.threshold()?, cfg.seed(), &cfg.out("model.json"), out)
        }
        Command::Predict(args) => {
            let model = args
                .model
                .or_else(|| cfg.file.model.clone())
                .ok_or_else(|| Error::Config("predict needs --model".into()))?;
            let spec = cfg.dataset(args.dataset, "text", None)?;
            let threshold = cfg.explicit_threshold()?;
            cmd_predict(&model, &spec, threshold, &cfg.out("predictions.tsv"), out)
        }
        Command::Explain(args) => {
            let charts = cfg.charts(args.charts)?;
            cmd_explain(&args.report, args.axis.as_deref(), cfg.top_k()?, &charts, &cfg.out("bipol-out"), out)
        }
        Command::Stats(args) => {
            let spec = cfg.dataset(args.dataset, "text", None)?;
            cmd_stats(&spec, out)
        }
    }
}

fn as_labeler_error(e: Error) -> Error {
    match e.exit_code() {
        3 => e,
        _ => Error::Labeler(e.to_string()),
    }
}

fn out_io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

/// Run a full audit and write its reports. Returns the report.
pub fn cmd_evaluate(config: &AuditConfig, out: &mut dyn Write) -> Result<BipolReport> {
    let lexicon = config.lexicon.load()?;
    let dataset = read_dataset(&config.dataset)?;

    let (labeler, seed): (Box<dyn Labeler>, Option<u64>) = match &config.labeler {
        LabelerSource::Predictions(path) => (Box::new(load_predictions(path)?), None),
        LabelerSource::Model(path) => {
            let model = BowModel::load(path)
                .and_then(|m| m.with_threshold(config.threshold))
                .map_err(as_labeler_error)?;
            let seed = model.seed();
            (Box::new(model), Some(seed))
        }
        LabelerSource::TrainInline { data, smoothing } => {
            let spec = DatasetSpec {
                text_field: "comment_text".into(),
                label_field: Some("label".into()),
                id_field: None,
                limit: None,
                ..DatasetSpec::new(data, "comment_text")
            };
            let model = read_dataset(&spec)
                .and_then(|ds| {
                    let labeled = ds.labeled().expect("label field requested");
                    train_bow_classifier(&labeled, *smoothing, config.seed)
                })
                .and_then(|m| m.with_threshold(config.threshold))
                .map_err(as_labeler_error)?;
            (Box::new(model), Some(config.seed))
        }
    };

    let gold = dataset.gold();
    let mut evaluator = Evaluator::new(&lexicon).workers(config.workers).seed(seed);
    if let Some(gold) = &gold {
        evaluator = evaluator.gold(gold);
    }
    let report = evaluator.run(&dataset.samples, labeler.as_ref())?;

    fs::create_dir_all(&config.out).map_err(out_io(&config.out))?;
    let report_path = config.out.join("bipol_report.json");
    fs::write(&report_path, report.to_json_pretty()?).map_err(out_io(&report_path))?;
    let explain_path = config.out.join("explain_report.json");
    fs::write(&explain_path, report.explain.to_json_pretty()? + "\n").map_err(out_io(&explain_path))?;
    write_charts(&report.explain, None, config.top_k, &config.charts, &config.out)?;

    print_summary(&report, &lexicon, out).map_err(|e| Error::io("<stdout>", e))?;
    Ok(report)
}

fn print_summary(report: &BipolReport, lexicon: &Lexicon, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "samples         {}", report.total_count)?;
    writeln!(out, "biased          {}", report.biased_count)?;
    writeln!(out, "scored          {}", report.scored_count)?;
    writeln!(out, "corpus score    {:.4}", report.corpus_score)?;
    writeln!(out, "sentence score  {:.4}", report.sentence_score)?;
    writeln!(out, "bipol           {:.4}", report.bipol)?;
    if let Some(stats) = &report.classifier_stats {
        let c = &stats.confusion;
        writeln!(out, "confusion       tp={} fp={} tn={} fn={}", c.tp, c.fp, c.tn, c.fn_)?;
        writeln!(out, "error rate      {}", fmt_opt(stats.error_rate))?;
        writeln!(out, "macro f1        {}", fmt_opt(stats.macro_f1))?;
    }
    for axis in lexicon.axes() {
        if let Ok(d) = dominant_type(&report.explain, axis.name()) {
            writeln!(out, "dominant {:<7}{d}", axis.name())?;
        }
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_owned(), |v| format!("{v:.4}"))
}

fn write_charts(
    report: &ExplainReport,
    axis: Option<&str>,
    k: usize,
    formats: &[ChartFormat],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let axes: Vec<&str> = match axis {
        Some(a) => vec![a],
        None => report.axes.iter().map(|a| a.name.as_str()).collect(),
    };
    let mut written = Vec::new();
    for name in axes {
        let top = top_k_terms(report, name, k)?;
        for &format in formats {
            let path = dir.join(format!("top{k}_{name}.{}", format.extension()));
            emit_chart(&top, &path, format)?;
            written.push(path);
        }
    }
    Ok(written)
}

type Labeled = Vec<(Sample, Label)>;

/// Stratified split: a `fraction` of each class goes to the held-out part.
fn split_holdout(labeled: Labeled, fraction: f64, seed: u64) -> (Labeled, Labeled) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in [Label::Biased, Label::Unbiased] {
        let mut part: Vec<_> = labeled.iter().filter(|(_, l)| *l == class).cloned().collect();
        part.shuffle(&mut rng);
        let n_test = if part.len() >= 2 {
            ((part.len() as f64 * fraction).round() as usize).clamp(1, part.len() - 1)
        } else {
            0
        };
        test.extend(part.drain(..n_test));
        train.extend(part);
    }
    (train, test)
}

/// Train on 90% of `spec`, report held-out metrics, save the model.
pub fn cmd_train(
    spec: &DatasetSpec,
    smoothing: f64,
    threshold: f64,
    seed: u64,
    model_path: &Path,
    out: &mut dyn Write,
) -> Result<()> {
    let dataset = read_dataset(spec)?;
    let labeled = dataset
        .labeled()
        .ok_or_else(|| Error::Config("training needs a label field".into()))?;
    let (train, test) = split_holdout(labeled, HOLDOUT_FRACTION, seed);
    let model = train_bow_classifier(&train, smoothing, seed)?.with_threshold(threshold)?;
    let cm = ConfusionMatrix::from_pairs(test.iter().map(|(s, gold)| (*gold, model.predict(s).label)));
    if let Some(dir) = model_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(out_io(dir))?;
    }
    model.save(model_path)?;
    let io = |e| Error::io("<stdout>", e);
    writeln!(out, "trained on      {} samples (seed {seed})", train.len()).map_err(io)?;
    writeln!(out, "held out        {} samples", test.len()).map_err(io)?;
    writeln!(out, "macro f1        {}", fmt_opt(macro_f1(&cm).ok())).map_err(io)?;
    writeln!(out, "error rate      {}", fmt_opt(error_rate(&cm))).map_err(io)?;
    writeln!(out, "model           {}", model_path.display()).map_err(io)?;
    Ok(())
}

/// Label every sample of `spec` with a saved model and write a predictions
/// file.
pub fn cmd_predict(
    model_path: &Path,
    spec: &DatasetSpec,
    threshold: Option<f64>,
    out_path: &Path,
    out: &mut dyn Write,
) -> Result<()> {
    let mut model = BowModel::load(model_path).map_err(as_labeler_error)?;
    if let Some(t) = threshold {
        model = model.with_threshold(t)?;
    }
    let dataset: Dataset = read_dataset(spec)?;
    let mut set = PredictionSet::new();
    for sample in &dataset.samples {
        set.insert(model.predict(sample))?;
    }
    if let Some(dir) = out_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(out_io(dir))?;
    }
    let mut buf = Vec::new();
    set.write_to(&mut buf).expect("writing to memory");
    fs::write(out_path, buf).map_err(out_io(out_path))?;
    writeln!(out, "wrote {} predictions to {}", set.len(), out_path.display())
        .map_err(|e| Error::io("<stdout>", e))
}

fn load_explain(path: &Path) -> Result<ExplainReport> {
    let src = fs::read_to_string(path).map_err(out_io(path))?;
    let mut value: serde_json::Value = serde_json::from_str(&src)?;
    let explain = match value.get_mut("explain") {
        Some(inner) => inner.take(),
        None => value,
    };
    Ok(serde_json::from_value(explain)?)
}

/// Chart the top-k terms of a saved report and print each axis's dominant
/// type.
pub fn cmd_explain(
    report_path: &Path,
    axis: Option<&str>,
    k: usize,
    formats: &[ChartFormat],
    dir: &Path,
    out: &mut dyn Write,
) -> Result<()> {
    let report = load_explain(report_path)?;
    if let Some(a) = axis {
        if report.axis(a).is_none() {
            return Err(Error::UnknownAxis(a.to_owned()));
        }
    }
    fs::create_dir_all(dir).map_err(out_io(dir))?;
    let written = write_charts(&report, axis, k, formats, dir)?;
    let io = |e| Error::io("<stdout>", e);
    let names: Vec<&str> = match axis {
        Some(a) => vec![a],
        None => report.axes.iter().map(|a| a.name.as_str()).collect(),
    };
    for name in names {
        writeln!(out, "{name}: {}", dominant_type(&report, name)?).map_err(io)?;
    }
    for path in written {
        writeln!(out, "wrote {}", path.display()).map_err(io)?;
    }
    Ok(())
}

pub fn cmd_stats(spec: &DatasetSpec, out: &mut dyn Write) -> Result<()> {
    let dataset = read_dataset(spec)?;
    let stats = dataset_stats(&dataset.samples, dataset.labels.as_deref());
    let io = |e| Error::io("<stdout>", e);
    writeln!(out, "count           {}", stats.count).map_err(io)?;
    writeln!(out, "unique          {}", stats.unique_count).map_err(io)?;
    if let Some(h) = stats.labels {
        writeln!(out, "biased          {}", h.biased).map_err(io)?;
        writeln!(out, "unbiased        {}", h.unbiased).map_err(io)?;
    }
    Ok(())
}
