//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Run with `cargo test -p bipol --test acceptance`.

mod common;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use bipol::classifier::DEFAULT_SMOOTHING;
use bipol::ingest::dedup;
use bipol::{
    builtin_lexicon, combine, confusion, dominant_type, error_rate, load_predictions, macro_f1, normalize,
    top_k_terms, train_bow_classifier, ConfusionMatrix, Dominance, Evaluator, ExplainReport, GoldLabels,
    Label, Labeler, Sample, TermMatcher,
};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::RngExt;

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// (model, dataset, corpus, sentence, bipol)
const TABLE: [(&str, &str, f64, f64, f64); 17] = [
    ("RoBERTa", "BoolQ", 0.0066, 0.8027, 0.0053),
    ("RoBERTa", "CB", 0.08, 0.8483, 0.0679),
    ("RoBERTa", "WSC", 0.0466, 0.8718, 0.0406),
    ("RoBERTa", "AXg", 0.0112, 1.0, 0.0112),
    ("RoBERTa", "RTE", 0.0294, 0.8518, 0.0251),
    ("Electra", "BoolQ", 0.0073, 0.8089, 0.0059),
    ("Electra", "CB", 0.0316, 0.881, 0.074),
    ("Electra", "WSC", 0.0609, 0.9559, 0.0582),
    ("Electra", "AXg", 0.0112, 1.0, 0.0112),
    ("Electra", "RTE", 0.0269, 0.8593, 0.0231),
    ("DeBERTa", "BoolQ", 0.0103, 0.7212, 0.0075),
    ("DeBERTa", "CB", 0.084, 0.9048, 0.076),
    ("DeBERTa", "WSC", 0.0609, 1.0, 0.0609),
    ("DeBERTa", "AXg", 0.0112, 1.0, 0.0112),
    ("DeBERTa", "RTE", 0.0366, 0.8655, 0.0316),
    ("mT5", "CB", 0.0796, 0.7188, 0.0572),
    ("mT5", "SWEDN", 0.053, 0.9433, 0.05),
];

fn table_combine() -> Outcome {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for &(model, data, bc, bs, b) in &TABLE {
        let got = combine(bc, bs).map_err(|e| e.to_string())?;
        let err = (got - b).abs();
        if (model, data) == ("Electra", "CB") {
            // 0.0316 * 0.881 = 0.0278; the printed 0.074 needs bc = 0.084
            check(err > 0.001, || "Electra/CB unexpectedly consistent".into())?;
            continue;
        }
        check(err <= 0.001, || format!("{model}/{data}: {got:.5} vs {b}"))?;
        worst = worst.max(err);
        checked += 1;
    }
    check(checked == 16, || format!("{checked} rows checked"))?;
    Ok(format!("{checked} rows, max |err| {worst:.5} (Electra/CB excluded)"))
}

fn confusion_metrics() -> Outcome {
    let cm = ConfusionMatrix::new(19_557, 7_960, 61_689, 12_781);
    let er = error_rate(&cm).ok_or("error rate undefined")?;
    let f1 = macro_f1(&cm).map_err(|e| e.to_string())?;
    // independent hand derivation: per-class F1 = 2tp / (2tp + fp + fn)
    let by_hand = (39_114.0 / 59_855.0 + 123_378.0 / 144_119.0) / 2.0;
    check((er - 0.2893).abs() <= 1e-4, || format!("error rate {er}"))?;
    check((f1 - 0.7548).abs() <= 5e-4, || format!("macro f1 {f1}"))?;
    check((f1 - by_hand).abs() <= 1e-12, || format!("macro f1 {f1} vs {by_hand}"))?;
    Ok(format!("error rate {er:.4}, macro f1 {f1:.4}"))
}

fn single_term_corpus() -> Outcome {
    let lex = builtin_lexicon("en").map_err(|e| e.to_string())?;
    let pronouns = [("he", "him"), ("she", "her")];
    let templates = [
        "The technician told the customer that {s} had completed the repair.",
        "The customer thanked the technician because {s} was quick.",
        "The accountant met {o} at noon.",
        "The driver waited for {o} outside.",
        "The secretary asked when {s} could start.",
    ];
    let mut rng = common::rng(11);
    let mut case = common::Case {
        lexicon: common::RawLexicon { axes: Vec::new() },
        texts: Vec::new(),
        biased: Vec::new(),
    };
    for i in 0..356 {
        let (s, o) = pronouns[i % 2];
        let t = templates.choose(&mut rng).unwrap();
        case.texts.push(t.replace("{s}", s).replace("{o}", o));
        case.biased.push(rng.random_bool(0.05) || i < 4);
    }
    // every biased sample carries exactly one lexicon term, counted independently
    for (text, _) in case.texts.iter().zip(&case.biased).filter(|(_, &b)| b) {
        let tokens = common::oracle_tokens(text);
        let mut hits = 0;
        for axis in lex.axes() {
            for ty in axis.types() {
                for term in ty.terms() {
                    hits += common::oracle_count(&tokens, term.as_str());
                }
            }
        }
        check(hits == 1, || format!("`{text}` has {hits} lexicon terms"))?;
    }
    let report = Evaluator::new(&lex)
        .run(&case.samples(), &case.predictions())
        .map_err(|e| e.to_string())?;
    check(report.sentence_score == 1.0, || format!("b_s = {}", report.sentence_score))?;
    check(report.bipol == report.corpus_score, || "b != b_c".into())?;
    Ok(format!("{} biased of {}, b_s = 1", report.biased_count, report.total_count))
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut rng = common::rng(2024);
    let n = 1_000;
    for i in 0..n {
        let case = common::random_case(&mut rng);
        let lex = case.lexicon.build();
        check(lex.term_count() <= 10, || format!("case {i}: lexicon too large"))?;
        let report = Evaluator::new(&lex)
            .run(&case.samples(), &case.predictions())
            .map_err(|e| format!("case {i}: {e}"))?;
        common::compare(&report, &common::oracle(&case), 1e-9).map_err(|e| format!("case {i}: {e}\n{case:?}"))?;
    }
    let elapsed = started.elapsed();
    check(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{n} corpora in {:.2}s", elapsed.as_secs_f64()))
}

fn run_cli(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_bipol"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

fn invariants() -> Outcome {
    let mut rng = common::rng(7);
    let mut zero_sentence = 0;
    for i in 0..300 {
        let case = common::random_case(&mut rng);
        let lex = case.lexicon.build();
        let r = Evaluator::new(&lex)
            .run(&case.samples(), &case.predictions())
            .map_err(|e| e.to_string())?;
        let (b, bc, bs) = (r.bipol, r.corpus_score, r.sentence_score);
        check((0.0..=bc).contains(&b) && bc <= 1.0, || format!("case {i}: b={b} bc={bc}"))?;
        if bs == 0.0 {
            zero_sentence += 1;
            check(b == bc, || format!("case {i}: b_s = 0 but b != b_c"))?;
        }

        let mut doubled = case.clone();
        doubled.texts.extend(case.texts.clone());
        doubled.biased.extend(case.biased.clone());
        let d = Evaluator::new(&lex)
            .run(&doubled.samples(), &doubled.predictions())
            .map_err(|e| e.to_string())?;
        for (name, x, y) in [("b_c", bc, d.corpus_score), ("b_s", bs, d.sentence_score), ("b", b, d.bipol)] {
            check((x - y).abs() <= 1e-12, || format!("case {i}: {name} {x} vs doubled {y}"))?;
        }

        let one = r.to_json_pretty().map_err(|e| e.to_string())?;
        for workers in [1, 2, 3, 8] {
            let again = Evaluator::new(&lex)
                .workers(workers)
                .run(&case.samples(), &case.predictions())
                .map_err(|e| e.to_string())?
                .to_json_pretty()
                .map_err(|e| e.to_string())?;
            check(one == again, || format!("case {i}: report differs at {workers} workers"))?;
        }
    }
    check(zero_sentence > 0, || "no case exercised b_s = 0".into())?;

    // balanced terms only: b_s = 0 so b falls back to b_c
    let lex = builtin_lexicon("en").map_err(|e| e.to_string())?;
    let balanced = common::Case {
        lexicon: common::RawLexicon { axes: Vec::new() },
        texts: vec!["he and she".into(), "him or her".into(), "plain".into(), "plain".into()],
        biased: vec![true, true, false, false],
    };
    let r = Evaluator::new(&lex)
        .run(&balanced.samples(), &balanced.predictions())
        .map_err(|e| e.to_string())?;
    check(r.sentence_score == 0.0 && r.bipol == 0.5, || format!("balanced: {r:?}"))?;

    // whole-token matching never fires inside a longer token
    let matcher = TermMatcher::new(&lex);
    for text in ["hehe sheer heron", "heather other there", "them, then, their; hero", "she-wolf he'd"] {
        let t = matcher.count_text(text);
        check(t.is_zero(), || format!("`{text}` matched a term"))?;
    }
    for text in ["He, he. HE; (he)", "he\the\nhe he"] {
        let t = matcher.count_text(text);
        let he = t.get(&lex, "gender", "male", "he");
        check(he == Some(4), || format!("`{text}`: he = {he:?}"))?;
    }
    for _ in 0..500 {
        let text = common::random_text(&mut rng);
        let tokens = normalize(&text);
        check(
            tokens.iter().all(|t| !t.is_empty() && !t.chars().any(char::is_whitespace)),
            || format!("`{text}` produced a bad token"),
        )?;
        check(
            tokens.tokens() == common::oracle_tokens(&text).as_slice(),
            || format!("`{text}`: {:?}", tokens.tokens()),
        )?;
    }

    // dedup idempotence
    for _ in 0..200 {
        let n = rng.random_range(0..30);
        let samples: Vec<Sample> = (0..n)
            .map(|i| Sample::new(i.to_string(), ["a", "b", "c", "A", "a "][rng.random_range(0..5)]))
            .collect();
        let once = dedup(samples);
        let twice = dedup(once.clone());
        check(once == twice, || "dedup is not idempotent".into())?;
    }

    // repeated CLI runs and worker counts give byte-identical files
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = dir.path().join("data.csv");
    let preds = dir.path().join("preds.tsv");
    let mut csv = String::from("id,text\n");
    let mut tsv = String::new();
    for i in 0..120 {
        let text = ["she said he would come", "him and his friend", "a plain sentence", "her mother and she"][i % 4];
        writeln!(csv, "r{i},{text} {i}").unwrap();
        let label = if i % 3 == 0 { "unbiased" } else { "biased" };
        writeln!(tsv, "r{i}\t{label}\t0.5").unwrap();
    }
    fs::write(&data, csv).map_err(|e| e.to_string())?;
    fs::write(&preds, tsv).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (run, workers) in [(0, "1"), (1, "1"), (2, "4")] {
        let out = dir.path().join(format!("out{run}"));
        let o = run_cli(&[
            "evaluate",
            data.to_str().unwrap(),
            "--predictions",
            preds.to_str().unwrap(),
            "--id-field",
            "id",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ])?;
        check(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
        let mut files = Vec::new();
        for name in ["bipol_report.json", "explain_report.json", "top5_gender.svg", "top5_gender.csv"] {
            files.push(fs::read(out.join(name)).map_err(|e| format!("{name}: {e}"))?);
        }
        outputs.push((files, o.stdout));
    }
    check(outputs.windows(2).all(|w| w[0] == w[1]), || "CLI outputs differ between runs".into())?;

    Ok(format!("300 random corpora ({zero_sentence} with b_s = 0), token, dedup and determinism checks"))
}

fn separable_corpus(rng: &mut common::Rng, n: usize) -> Vec<(Sample, Label)> {
    let biased_words = ["vile", "scum", "trash", "filthy", "disgusting", "idiots", "hate", "worthless"];
    let neutral_words = ["garden", "recipe", "weather", "library", "concert", "holiday", "bicycle", "lesson"];
    let shared = ["the", "a", "people", "today", "really", "this", "is", "and", "about", "went"];
    (0..n)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Biased } else { Label::Unbiased };
            let pool = if label.is_biased() { &biased_words } else { &neutral_words };
            let len = rng.random_range(4..12);
            let mut words: Vec<&str> = (0..len).map(|_| shared[rng.random_range(0..shared.len())]).collect();
            for _ in 0..rng.random_range(1..3) {
                let at = rng.random_range(0..=words.len());
                words.insert(at, pool[rng.random_range(0..pool.len())]);
            }
            (Sample::new(format!("s{i}"), words.join(" ")), label)
        })
        .collect()
}

fn classifier_and_replay() -> Outcome {
    let mut rng = common::rng(5);
    let mut data = separable_corpus(&mut rng, 2_000);
    data.shuffle(&mut rng);
    let (test, train) = data.split_at(200);
    let started = Instant::now();
    let model = train_bow_classifier(train, DEFAULT_SMOOTHING, 5).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let mut preds = bipol::PredictionSet::new();
    let mut gold = GoldLabels::new();
    for (sample, label) in test {
        preds.insert(model.label(sample).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        gold.insert(sample.id.clone(), *label);
    }
    let cm = confusion(&preds, &gold).map_err(|e| e.to_string())?;
    let f1 = macro_f1(&cm).map_err(|e| e.to_string())?;
    check(f1 >= 0.95, || format!("macro f1 {f1}"))?;
    check(elapsed < Duration::from_secs(10), || format!("training took {elapsed:?}"))?;

    // replay a crafted predictions file through the CLI
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (data_path, preds_path, out) = (
        dir.path().join("corpus.csv"),
        dir.path().join("preds.tsv"),
        dir.path().join("out"),
    );
    let mut csv = String::from("id,text\n");
    let mut tsv = String::new();
    for i in 0..250 {
        writeln!(csv, "q{i},sample number {i} about him").unwrap();
        let label = if i % 25 < 2 { "biased" } else { "unbiased" };
        writeln!(tsv, "q{i}\t{label}\t0.{}", 1 + i % 9).unwrap();
    }
    fs::write(&data_path, csv).map_err(|e| e.to_string())?;
    fs::write(&preds_path, tsv).map_err(|e| e.to_string())?;
    let loaded = load_predictions(&preds_path).map_err(|e| e.to_string())?;
    check(loaded.len() == 250, || "predictions file did not load".into())?;
    let o = run_cli(&[
        "evaluate",
        data_path.to_str().unwrap(),
        "--predictions",
        preds_path.to_str().unwrap(),
        "--id-field",
        "id",
        "--out",
        out.to_str().unwrap(),
    ])?;
    check(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("bipol_report.json")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let bc = report["corpus_score"].as_f64().ok_or("no corpus_score")?;
    check(report["biased_count"] == 20, || format!("biased_count {}", report["biased_count"]))?;
    check(bc == 0.08, || format!("b_c = {bc}"))?;
    Ok(format!(
        "macro f1 {f1:.4} on 200 held out, trained in {:.0} ms; replay b_c = {bc}",
        elapsed.as_secs_f64() * 1e3
    ))
}

fn explain_golden() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/gender_counts.json");
    let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let report: ExplainReport = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let gender = report.axis("gender").ok_or("no gender axis")?;
    let totals: Vec<(String, u64)> = gender.types.iter().map(|t| (t.name.clone(), t.total())).collect();
    check(
        totals == [("female".to_string(), 68), ("male".to_string(), 158)],
        || format!("totals {totals:?}"),
    )?;
    let top = top_k_terms(&report, "gender", 2).map_err(|e| e.to_string())?;
    let rank = |ty: &str| {
        top.types
            .iter()
            .find(|t| t.name == ty)
            .map(|t| t.terms.clone())
            .unwrap_or_default()
    };
    let male = rank("male");
    let female = rank("female");
    check(
        male == [("he".to_string(), 80), ("him".to_string(), 49)],
        || format!("male {male:?}"),
    )?;
    check(
        female == [("she".to_string(), 23), ("her".to_string(), 17)],
        || format!("female {female:?}"),
    )?;
    let dominant = dominant_type(&report, "gender").map_err(|e| e.to_string())?;
    check(dominant == Dominance::Type("male".into()), || format!("dominant {dominant}"))?;
    Ok("he 80 > him 49, she 23 > her 17, dominant male".into())
}

fn main() {
    let criteria: [(&str, Criterion); 7] = [
        ("combine reproduces the reference score table", table_combine),
        ("error rate and macro F1 from the reference confusion matrix", confusion_metrics),
        ("one gendered term per biased sample gives b_s = 1", single_term_corpus),
        ("oracle equivalence on randomized corpora", oracle_equivalence),
        ("invariant suite", invariants),
        ("classifier sanity and predictions replay", classifier_and_replay),
        ("explainability golden counts", explain_golden),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  [{}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
