use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rationale_core::corpus::{
    corpus_stats, filter_rationales, generate_synthetic_corpus, load_corpus, Corpus, Label,
};
use rationale_core::eval::{
    document_examples, prepare_folds, rationale_eval_with_models, rationale_examples,
    render_snippet_stats, snippet_classification_eval, snippet_stats, word_savings, EvalConfig,
};
use rationale_core::exec::with_threads;
use rationale_core::model::{train_with_trace, LinearClassifier, ModelKind, TrainConfig};
use rationale_core::rationale::{
    render_report, run_pipeline, write_results_jsonl, MatchMode, Method, ModelSet,
};
use rationale_core::text::Vocabulary;
use rationale_core::Execution;
use serde::Serialize;

use crate::config::RunConfig;
use crate::{
    Cli, Command, EvalCommon, ExtractArgs, FilterArgs, GenCorpusArgs, MatchArg, MethodArg,
    ReportSavingsArgs, SnippetStatsArgs, StatsArgs, TrainArgs, WhichModels,
};

pub const VOCAB_FILE: &str = "vocab.json";
pub const DOCUMENT_MODEL_FILE: &str = "document_model.json";
pub const RATIONALE_MODEL_FILE: &str = "rationale_model.json";

struct Session {
    config: RunConfig,
    seed: u64,
    exec: Execution,
}

pub fn run(cli: Cli) -> Result<()> {
    let config = RunConfig::load(cli.config.as_deref())?;
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    let threads = cli.threads.or(config.threads).unwrap_or(0);
    let exec = if threads == 1 {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let ctx = Session { config, seed, exec };
    with_threads(threads, move || match cli.command {
        Command::GenCorpus(a) => gen_corpus(&ctx, a),
        Command::Stats(a) => stats(a),
        Command::Train(a) => train_models(&ctx, a),
        Command::Extract(a) => extract(&ctx, a),
        Command::EvalSnippets(a) => eval_snippets(&ctx, &a.common, &a.out_dir),
        Command::EvalRationales(a) => {
            let mut ctx = ctx;
            if let Some(n) = a.n {
                ctx.config.eval.window_sizes = n;
            }
            if let Some(k) = a.max_k {
                ctx.config.eval.max_k = k;
            }
            if let Some(m) = a.match_mode {
                ctx.config.eval.match_mode = match_mode(m);
            }
            eval_rationales(&ctx, &a.common, &a.out, a.table.as_deref())
        }
        Command::SnippetStats(a) => snippet_stats_cmd(&ctx, a),
        Command::ReportSavings(a) => report_savings(a),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_file(path, &s)
}

fn read_corpus(path: &Path) -> Result<Corpus> {
    let loaded = load_corpus(path).with_context(|| format!("cannot load corpus {}", path.display()))?;
    if !loaded.unresolved.is_empty() {
        eprintln!(
            "warning: {} rationale annotation(s) could not be located and were dropped",
            loaded.unresolved.len()
        );
    }
    if loaded.corpus.is_empty() {
        bail!("corpus {} is empty", path.display());
    }
    Ok(loaded.corpus)
}

fn match_mode(m: MatchArg) -> MatchMode {
    match m {
        MatchArg::Overlap => MatchMode::Overlap,
        MatchArg::Containment => MatchMode::Containment,
    }
}

fn filter_bounds(ctx: &Session, f: &FilterArgs) -> (usize, usize) {
    (
        f.min_words.unwrap_or(ctx.config.train.min_rationale_words),
        f.max_words.unwrap_or(ctx.config.train.max_rationale_words),
    )
}

fn gen_corpus(ctx: &Session, a: GenCorpusArgs) -> Result<()> {
    let mut cfg = ctx.config.synthetic.clone();
    cfg.seed = ctx.seed;
    macro_rules! set {
        ($field:expr, $flag:expr) => {
            if let Some(v) = $flag {
                $field = v;
            }
        };
    }
    set!(cfg.n_docs, a.n_docs);
    set!(cfg.responsive_rate, a.responsive_rate);
    set!(cfg.doc_length.mean, a.doc_mean);
    set!(cfg.doc_length.std, a.doc_std);
    set!(cfg.rationale_length.mean, a.rationale_mean);
    set!(cfg.rationale_length.std, a.rationale_std);
    set!(cfg.background_vocab_size, a.background_vocab);
    set!(cfg.topic_vocab_size, a.topic_vocab);
    set!(cfg.topic_mix, a.topic_mix);
    let corpus = generate_synthetic_corpus(&cfg).context("invalid synthetic corpus configuration")?;
    corpus
        .save(&a.out)
        .with_context(|| format!("cannot write {}", a.out.display()))?;
    println!(
        "wrote {} documents ({} responsive) to {}",
        corpus.len(),
        corpus.count(Label::Responsive),
        a.out.display()
    );
    Ok(())
}

fn stats(a: StatsArgs) -> Result<()> {
    let mut corpus = read_corpus(&a.corpus.corpus)?;
    if a.filter {
        corpus = filter_rationales(
            &corpus,
            a.filter_args.min_words.unwrap_or(rationale_core::corpus::MIN_RATIONALE_WORDS),
            a.filter_args.max_words.unwrap_or(rationale_core::corpus::MAX_RATIONALE_WORDS),
        );
    }
    let s = corpus_stats(&corpus, a.threshold);
    match &a.out {
        Some(out) => {
            write_json(out, &s)?;
            println!(
                "{} documents, {} responsive ({:.1}%), mean length {:.1} words; {} rationales, mean {:.1} words (std {:.1})",
                s.documents,
                s.responsive,
                s.responsive_rate * 100.0,
                s.doc_length_mean,
                s.rationale_count,
                s.rationale_length_mean,
                s.rationale_length_std
            );
        }
        None => println!("{}", serde_json::to_string_pretty(&s)?),
    }
    Ok(())
}

fn train_config(ctx: &Session, l2: Option<f64>, max_iters: Option<usize>, tolerance: Option<f64>) -> TrainConfig {
    let mut t = ctx.config.train.train_config(ctx.seed);
    t.l2_lambda = l2.unwrap_or(t.l2_lambda);
    t.max_iters = max_iters.unwrap_or(t.max_iters);
    t.tolerance = tolerance.unwrap_or(t.tolerance);
    t.execution = ctx.exec;
    t
}

fn train_models(ctx: &Session, a: TrainArgs) -> Result<()> {
    let corpus = read_corpus(&a.corpus.corpus)?;
    let (lo, hi) = filter_bounds(ctx, &a.filter_args);
    let corpus = filter_rationales(&corpus, lo, hi);
    let labeled: Vec<&[String]> = corpus
        .documents
        .iter()
        .filter(|d| d.label != Label::Unlabeled)
        .map(|d| d.tokens.as_slice())
        .collect();
    if labeled.is_empty() {
        bail!("corpus has no labeled documents");
    }
    let min_df = a.min_df.unwrap_or(ctx.config.train.min_df);
    let vocab = Vocabulary::build(&labeled, min_df)?;
    let cfg = train_config(ctx, a.l2, a.max_iters, a.tolerance);

    fs::create_dir_all(&a.out_dir).with_context(|| format!("cannot create {}", a.out_dir.display()))?;
    write_file(&a.out_dir.join(VOCAB_FILE), &vocab.to_json()?)?;
    println!("vocabulary: {} terms (min_df {min_df})", vocab.len());

    let fit = |name: &str, kind: ModelKind, examples: Vec<_>, file: &str| -> Result<()> {
        let (model, trace) = train_with_trace(&examples, &vocab, kind, &cfg)
            .with_context(|| format!("cannot train the {name}"))?;
        write_file(&a.out_dir.join(file), &model.to_json()?)?;
        println!(
            "{name}: {} examples, {} iterations, loss {:.6}, converged {}",
            examples.len(),
            trace.iterations,
            trace.losses.last().copied().unwrap_or(f64::NAN),
            trace.converged
        );
        Ok(())
    };
    if matches!(a.models, WhichModels::Document | WhichModels::Both) {
        fit(
            "document model",
            ModelKind::DocumentModel,
            document_examples(&corpus.documents, &vocab),
            DOCUMENT_MODEL_FILE,
        )?;
    }
    if matches!(a.models, WhichModels::Rationale | WhichModels::Both) {
        let docs: Vec<_> = corpus.documents.iter().collect();
        fit(
            "rationale model",
            ModelKind::RationaleModel,
            rationale_examples(&docs, &vocab, ctx.seed),
            RATIONALE_MODEL_FILE,
        )?;
    }
    Ok(())
}

fn read_model(path: &Path) -> Result<LinearClassifier> {
    let json = fs::read_to_string(path).with_context(|| format!("cannot read model {}", path.display()))?;
    LinearClassifier::from_json(&json).with_context(|| format!("invalid model file {}", path.display()))
}

fn extract(ctx: &Session, a: ExtractArgs) -> Result<()> {
    let corpus = read_corpus(&a.corpus.corpus)?;
    let vocab_path = a.models.join(VOCAB_FILE);
    let vocab = Vocabulary::from_json(
        &fs::read_to_string(&vocab_path).with_context(|| format!("cannot read {}", vocab_path.display()))?,
    )
    .with_context(|| format!("invalid vocabulary file {}", vocab_path.display()))?;
    let document = read_model(&a.models.join(DOCUMENT_MODEL_FILE))?;
    let rationale_path = a.models.join(RATIONALE_MODEL_FILE);
    let rationale = if rationale_path.exists() {
        Some(read_model(&rationale_path)?)
    } else {
        None
    };

    let mut cfg = ctx.config.extract;
    if let Some(m) = a.method {
        cfg.method = match m {
            MethodArg::Document => Method::DocumentModel,
            MethodArg::Rationale => Method::RationaleModel,
        };
    }
    cfg.n = a.n.unwrap_or(cfg.n);
    cfg.top_k = a.top_k.unwrap_or(cfg.top_k);
    cfg.responsive_threshold = a.threshold.unwrap_or(cfg.responsive_threshold);
    cfg.refine |= a.refine;
    if let Some(m) = a.match_mode {
        cfg.match_mode = match_mode(m);
    }
    if cfg.method == Method::RationaleModel && rationale.is_none() {
        bail!(
            "the rationale method needs {}; train it or pass --method document",
            rationale_path.display()
        );
    }

    let models = ModelSet {
        vocab: &vocab,
        document: &document,
        rationale: rationale.as_ref(),
    };
    let results = run_pipeline(&corpus, &models, &cfg, ctx.exec)?;
    let mut buf = Vec::new();
    write_results_jsonl(&results, &mut buf)?;
    write_file(&a.out, std::str::from_utf8(&buf)?)?;
    if let Some(report) = &a.report {
        write_file(report, &render_report(&corpus, &results, 40))?;
    }
    let annotated: Vec<_> = results.iter().filter_map(|r| r.matched.as_ref()).collect();
    print!(
        "{} of {} documents identified as responsive; {} rationale(s) written to {}",
        results.len(),
        corpus.len(),
        results.iter().map(|r| r.rationales.len()).sum::<usize>(),
        a.out.display()
    );
    if !annotated.is_empty() {
        let hit = annotated.iter().filter(|m| m.iter().any(|&b| b)).count();
        print!("; annotation matched in {hit}/{} annotated documents", annotated.len());
    }
    println!();
    Ok(())
}

fn eval_config(ctx: &Session, c: &EvalCommon) -> EvalConfig {
    let mut cfg = ctx.config.eval_config(ctx.seed);
    cfg.folds = c.folds.unwrap_or(cfg.folds);
    cfg.min_df = c.min_df.unwrap_or(cfg.min_df);
    cfg.train.l2_lambda = c.l2.unwrap_or(cfg.train.l2_lambda);
    cfg.train.max_iters = c.max_iters.unwrap_or(cfg.train.max_iters);
    let (lo, hi) = filter_bounds(ctx, &c.filter_args);
    cfg.min_rationale_words = lo;
    cfg.max_rationale_words = hi;
    cfg.execution = ctx.exec;
    cfg
}

fn eval_snippets(ctx: &Session, c: &EvalCommon, out_dir: &Path) -> Result<()> {
    let corpus = read_corpus(&c.corpus.corpus)?;
    let cfg = eval_config(ctx, c);
    let (filtered, folds) = prepare_folds(&corpus, &cfg)?;
    let report = snippet_classification_eval(&filtered, &folds, &cfg)?;
    fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    write_json(&out_dir.join("pr_curves.json"), &report)?;
    for m in &report.methods {
        write_file(&out_dir.join(format!("pr_{}.csv", m.method.name())), &m.averaged.to_csv())?;
    }
    println!(
        "{}-fold snippet classification: {} positive / {} negative test snippets",
        cfg.folds,
        report.test_positives.iter().sum::<usize>(),
        report.test_negatives.iter().sum::<usize>()
    );
    for m in &report.methods {
        println!(
            "{:>16}: precision {:.1}% at 80% recall, {:.1}% at 75% recall (positive rate {:.1}%)",
            m.method.name(),
            m.precision_at_80 * 100.0,
            m.precision_at_75 * 100.0,
            m.averaged.positive_rate * 100.0
        );
    }
    Ok(())
}

fn eval_rationales(ctx: &Session, c: &EvalCommon, out: &Path, table: Option<&Path>) -> Result<()> {
    let corpus = read_corpus(&c.corpus.corpus)?;
    let cfg = eval_config(ctx, c);
    let (filtered, folds) = prepare_folds(&corpus, &cfg)?;
    let recall = rationale_eval_with_models(&filtered, &folds, &cfg)?;
    write_json(out, &recall)?;
    let rendered = recall.render();
    if let Some(t) = table {
        write_file(t, &rendered)?;
    }
    print!("{rendered}");
    Ok(())
}

fn snippet_stats_cmd(ctx: &Session, a: SnippetStatsArgs) -> Result<()> {
    let corpus = read_corpus(&a.corpus.corpus)?;
    let (lo, hi) = filter_bounds(ctx, &a.filter_args);
    let corpus = filter_rationales(&corpus, lo, hi);
    let docs: Vec<_> = corpus.documents.iter().filter(|d| d.has_usable_rationales()).collect();
    let rows = a
        .n
        .iter()
        .map(|&n| snippet_stats(docs.iter().copied(), n))
        .collect::<rationale_core::Result<Vec<_>>>()?;
    if let Some(out) = &a.out {
        write_json(out, &rows)?;
    }
    print!("{}", render_snippet_stats(&rows));
    Ok(())
}

fn report_savings(a: ReportSavingsArgs) -> Result<()> {
    let coverage = a.coverage_min.zip(a.coverage_max);
    let report = word_savings(a.avg_doc_words, a.n, a.k, a.docs, a.recall, coverage)?;
    if let Some(out) = &a.out {
        write_json(out, &report)?;
    }
    print!("{}", report.render());
    Ok(())
}
