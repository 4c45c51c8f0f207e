//! Cross-validated experiments and reports: snippet-classification PR
//! curves, rationale recall@K, window statistics and word-savings arithmetic.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::{filter_rationales, Corpus, Document, Label, MAX_RATIONALE_WORDS, MIN_RATIONALE_WORDS};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{train, LinearClassifier, ModelKind, TrainConfig};
use crate::rationale::{match_rationale, rank_windows, MatchMode, Method};
use crate::seed::{derive_seed, rng_for};
use crate::snippets::{sample_negatives, window_spans, ModelScorer, Snippet, SnippetScorer, Span, WindowConfig};
use crate::text::{featurize, Vocabulary, DEFAULT_MIN_DF};

pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_WINDOW_SIZES: [usize; 3] = [50, 100, 200];
pub const RECALL_GRID_STEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub fold_id: usize,
    /// Corpus indices, ascending.
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified k-fold split. Each label class is shuffled with a seeded
/// generator and dealt round-robin, the dealing position carrying over from
/// one class to the next so fold sizes differ by at most one.
pub fn kfold_split(corpus: &Corpus, k: usize, seed: u64) -> Result<Vec<FoldSplit>> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("k must be >= 2, got {k}")));
    }
    let mut rng = rng_for(seed, "kfold", k as u64);
    let mut assignment = vec![0usize; corpus.len()];
    let mut dealt = 0usize;
    for (label, name) in [
        (Label::Responsive, "responsive"),
        (Label::NotResponsive, "not_responsive"),
        (Label::Unlabeled, "unlabeled"),
    ] {
        let mut members: Vec<usize> = corpus
            .documents
            .iter()
            .enumerate()
            .filter(|(_, d)| d.label == label)
            .map(|(i, _)| i)
            .collect();
        if label != Label::Unlabeled && members.len() < k {
            return Err(Error::ClassTooSmall {
                class: name,
                count: members.len(),
                k,
            });
        }
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = dealt % k;
            dealt += 1;
        }
    }
    Ok((0..k)
        .map(|fold_id| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..corpus.len()).partition(|&i| assignment[i] == fold_id);
            FoldSplit { fold_id, train, test }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub recall: f64,
    pub precision: f64,
    /// Score cutoff (`score >= threshold` predicts positive); absent on
    /// fold-averaged curves.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
    pub positive_rate: f64,
}

impl PrCurve {
    /// Precision at `recall`, linearly interpolated between the two curve
    /// points that bracket it. Below the first point's recall the first
    /// point's precision is used.
    pub fn precision_at(&self, recall: f64) -> f64 {
        let pts = &self.points;
        match pts.iter().position(|p| p.recall >= recall) {
            None => pts.last().map_or(0.0, |p| p.precision),
            Some(0) => pts[0].precision,
            Some(i) => {
                let (a, b) = (pts[i - 1], pts[i]);
                let t = (recall - a.recall) / (b.recall - a.recall);
                a.precision + t * (b.precision - a.precision)
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("recall,precision,threshold\n");
        for p in &self.points {
            let t = p.threshold.map(|t| t.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{}", p.recall, p.precision, t);
        }
        out
    }
}

/// Step precision-recall curve over every distinct score, highest first.
pub fn pr_curve(scored: &[(f64, bool)]) -> Result<PrCurve> {
    let positives = scored.iter().filter(|(_, y)| *y).count();
    if positives == 0 {
        return Err(Error::NoPositives(0));
    }
    let mut sorted: Vec<(f64, bool)> = scored.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut points = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == threshold {
            if sorted[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(PrPoint {
            recall: tp as f64 / positives as f64,
            precision: tp as f64 / (tp + fp) as f64,
            threshold: Some(threshold),
        });
    }
    Ok(PrCurve {
        points,
        positive_rate: positives as f64 / scored.len() as f64,
    })
}

/// Averages precision across curves at recall `0.00, 0.01, …, 1.00`.
pub fn average_curves(curves: &[PrCurve]) -> PrCurve {
    let n = curves.len().max(1) as f64;
    let points = (0..=RECALL_GRID_STEPS)
        .map(|i| {
            let recall = i as f64 / RECALL_GRID_STEPS as f64;
            PrPoint {
                recall,
                precision: curves.iter().map(|c| c.precision_at(recall)).sum::<f64>() / n,
                threshold: None,
            }
        })
        .collect();
    PrCurve {
        points,
        positive_rate: curves.iter().map(|c| c.positive_rate).sum::<f64>() / n,
    }
}

/// Per-fold curves and their recall-grid average for one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodCurves {
    pub method: Method,
    pub folds: Vec<PrCurve>,
    pub averaged: PrCurve,
    /// Averaged precision at recall 0.75 and 0.80.
    pub precision_at_75: f64,
    pub precision_at_80: f64,
}

pub fn curves_from_scores(method: Method, per_fold: &[Vec<(f64, bool)>]) -> Result<MethodCurves> {
    let folds = per_fold
        .iter()
        .enumerate()
        .map(|(i, s)| pr_curve(s).map_err(|_| Error::NoPositives(i)))
        .collect::<Result<Vec<_>>>()?;
    let averaged = average_curves(&folds);
    Ok(MethodCurves {
        method,
        precision_at_75: averaged.precision_at(0.75),
        precision_at_80: averaged.precision_at(0.80),
        folds,
        averaged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub folds: usize,
    pub seed: u64,
    pub min_df: usize,
    pub train: TrainConfig,
    pub min_rationale_words: usize,
    pub max_rationale_words: usize,
    pub window_sizes: Vec<usize>,
    pub max_k: usize,
    pub match_mode: MatchMode,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            folds: DEFAULT_FOLDS,
            seed: 0,
            min_df: DEFAULT_MIN_DF,
            train: TrainConfig::default(),
            min_rationale_words: MIN_RATIONALE_WORDS,
            max_rationale_words: MAX_RATIONALE_WORDS,
            window_sizes: DEFAULT_WINDOW_SIZES.to_vec(),
            max_k: 5,
            match_mode: MatchMode::Overlap,
            execution: Execution::default(),
        }
    }
}

/// Vocabulary and both models trained on one fold's training split.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldModels {
    pub split: FoldSplit,
    pub vocab: Vocabulary,
    pub document: LinearClassifier,
    pub rationale: LinearClassifier,
}

/// Seed shared by every negative draw in an experiment.
pub fn negative_seed(seed: u64) -> u64 {
    derive_seed(seed, "negatives", 0)
}

/// Document-model examples: every labeled document, featurized whole.
pub fn document_examples<'a>(docs: impl IntoIterator<Item = &'a Document>, vocab: &Vocabulary) -> Vec<(crate::text::SparseVector, bool)> {
    docs.into_iter()
        .filter(|d| d.label != Label::Unlabeled)
        .map(|d| (featurize(&d.tokens, vocab), d.is_responsive()))
        .collect()
}

/// Rationale-model examples: annotated spans of usable responsive documents
/// as positives, one sampled snippet per not-responsive document as negatives.
pub fn rationale_examples(
    docs: &[&Document],
    vocab: &Vocabulary,
    seed: u64,
) -> Vec<(crate::text::SparseVector, bool)> {
    let mut examples: Vec<_> = docs
        .iter()
        .filter(|d| d.has_usable_rationales())
        .flat_map(|d| {
            d.rationales
                .iter()
                .map(|s| (featurize(&d.tokens[s.start_token..s.end_token], vocab), true))
        })
        .collect();
    let by_id: std::collections::HashMap<&str, &Document> = docs.iter().map(|d| (d.id.as_str(), *d)).collect();
    for s in sample_negatives(docs.iter().copied(), negative_seed(seed)).snippets {
        let d = by_id[s.doc_id.as_str()];
        examples.push((featurize(&d.tokens[s.start_token..s.end_token], vocab), false));
    }
    examples
}

pub fn train_fold(corpus: &Corpus, split: &FoldSplit, config: &EvalConfig) -> Result<FoldModels> {
    let train_docs: Vec<&Document> = split.train.iter().map(|&i| &corpus.documents[i]).collect();
    let labeled: Vec<&[String]> = train_docs
        .iter()
        .filter(|d| d.label != Label::Unlabeled)
        .map(|d| d.tokens.as_slice())
        .collect();
    let vocab = Vocabulary::build(&labeled, config.min_df)?;
    let train_cfg = TrainConfig {
        execution: config.execution,
        ..config.train
    };
    let document = train(
        &document_examples(train_docs.iter().copied(), &vocab),
        &vocab,
        ModelKind::DocumentModel,
        &train_cfg,
    )?;
    let rationale = train(
        &rationale_examples(&train_docs, &vocab, config.seed),
        &vocab,
        ModelKind::RationaleModel,
        &train_cfg,
    )?;
    Ok(FoldModels {
        split: split.clone(),
        vocab,
        document,
        rationale,
    })
}

/// Filters rationales, splits, and trains both models on every fold.
pub fn prepare_folds(corpus: &Corpus, config: &EvalConfig) -> Result<(Corpus, Vec<FoldModels>)> {
    let filtered = filter_rationales(corpus, config.min_rationale_words, config.max_rationale_words);
    let splits = kfold_split(&filtered, config.folds, config.seed)?;
    let models = config
        .execution
        .try_map(&splits, |s| train_fold(&filtered, s, config))?;
    Ok((filtered, models))
}

impl FoldModels {
    pub fn scorer(&self, method: Method) -> ModelScorer<'_> {
        let model = match method {
            Method::DocumentModel => &self.document,
            Method::RationaleModel => &self.rationale,
        };
        ModelScorer::new(&self.vocab, model).expect("fold models share the fold vocabulary")
    }

    pub fn test_docs<'c>(&self, corpus: &'c Corpus) -> Vec<&'c Document> {
        self.split.test.iter().map(|&i| &corpus.documents[i]).collect()
    }
}

/// Test snippets of one fold: annotated rationales (positive) and one
/// sampled snippet per not-responsive test document (negative).
pub fn snippet_test_set<'c>(test_docs: &[&'c Document], seed: u64) -> Vec<(&'c Document, Span, bool)> {
    let mut set: Vec<(&Document, Span, bool)> = test_docs
        .iter()
        .filter(|d| d.has_usable_rationales())
        .flat_map(|d| {
            d.rationales
                .iter()
                .map(move |s| (*d, Span::new(s.start_token, s.end_token), true))
        })
        .collect();
    let by_id: std::collections::HashMap<&str, &Document> = test_docs.iter().map(|d| (d.id.as_str(), *d)).collect();
    let negatives: Vec<Snippet> = sample_negatives(test_docs.iter().copied(), negative_seed(seed)).snippets;
    set.extend(
        negatives
            .iter()
            .map(|s| (by_id[s.doc_id.as_str()], s.span(), false)),
    );
    set
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnippetEvalReport {
    pub methods: Vec<MethodCurves>,
    pub test_positives: Vec<usize>,
    pub test_negatives: Vec<usize>,
}

/// Scores each fold's snippet test set with both fold models and builds
/// per-method PR curves averaged over folds.
pub fn snippet_classification_eval(corpus: &Corpus, folds: &[FoldModels], config: &EvalConfig) -> Result<SnippetEvalReport> {
    let sets: Vec<Vec<(&Document, Span, bool)>> = folds
        .iter()
        .map(|f| snippet_test_set(&f.test_docs(corpus), config.seed))
        .collect();
    let mut methods = Vec::new();
    for method in Method::ALL {
        let per_fold: Vec<Vec<(f64, bool)>> = folds
            .iter()
            .zip(&sets)
            .map(|(f, set)| {
                let scorer = f.scorer(method);
                config
                    .execution
                    .map(set, |&(d, span, y)| (scorer.score(d, span), y))
            })
            .collect();
        methods.push(curves_from_scores(method, &per_fold)?);
    }
    Ok(SnippetEvalReport {
        methods,
        test_positives: sets.iter().map(|s| s.iter().filter(|x| x.2).count()).collect(),
        test_negatives: sets.iter().map(|s| s.iter().filter(|x| !x.2).count()).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnippetStats {
    pub n: usize,
    pub total_snippets: usize,
    pub documents: usize,
    pub average_per_document: f64,
}

pub fn snippet_stats<'a>(docs: impl IntoIterator<Item = &'a Document>, n: usize) -> Result<SnippetStats> {
    let window = WindowConfig::new(n)?;
    let (mut total, mut count) = (0usize, 0usize);
    for d in docs {
        total += window_spans(d.len(), window).len();
        count += 1;
    }
    Ok(SnippetStats {
        n,
        total_snippets: total,
        documents: count,
        average_per_document: if count == 0 { 0.0 } else { total as f64 / count as f64 },
    })
}

pub fn render_snippet_stats(rows: &[SnippetStats]) -> String {
    let mut out = format!(
        "{:>15}  {:>24}  {:>19}  {:>26}\n",
        "Snippet Setting", "Total Number of Snippets", "Number of Documents", "Average Number of Snippets"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>15}  {:>24}  {:>19}  {:>26.0}",
            r.n, r.total_snippets, r.documents, r.average_per_document
        );
    }
    out
}

/// One fold's evaluation input: its annotated responsive test documents and
/// a scorer per method.
pub struct FoldScorers<'a> {
    pub test_docs: Vec<&'a Document>,
    pub scorers: Vec<(Method, &'a dyn SnippetScorer)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallRow {
    pub n: usize,
    pub k: usize,
    pub method: Method,
    /// Mean of the per-fold recalls.
    pub recall: f64,
    pub per_fold: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallAtKTable {
    pub match_mode: MatchMode,
    pub rows: Vec<RecallRow>,
    pub documents_per_fold: Vec<usize>,
}

impl RecallAtKTable {
    pub fn get(&self, n: usize, k: usize, method: Method) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.k == k && r.method == method)
            .map(|r| r.recall)
    }

    /// Aligned text table: one line per (n, K), one column per method.
    pub fn render(&self) -> String {
        let methods: Vec<Method> = Method::ALL
            .into_iter()
            .filter(|m| self.rows.iter().any(|r| r.method == *m))
            .collect();
        let mut out = format!("{:>24}  {:>14}", "Number of words in Snippet", "Top K Snippets");
        for m in &methods {
            let title = match m {
                Method::RationaleModel => "Rationale Model",
                Method::DocumentModel => "Document Model",
            };
            let _ = write!(out, "  {title:>15}");
        }
        out.push('\n');
        let mut keys: Vec<(usize, usize)> = self.rows.iter().map(|r| (r.n, r.k)).collect();
        keys.dedup();
        let mut last_n = None;
        for (n, k) in keys {
            let n_cell = if last_n == Some(n) { String::new() } else { n.to_string() };
            last_n = Some(n);
            let _ = write!(out, "{n_cell:>26}  {k:>14}");
            for m in &methods {
                match self.get(n, k, *m) {
                    Some(r) => {
                        let _ = write!(out, "  {:>14.1}%", r * 100.0);
                    }
                    None => {
                        let _ = write!(out, "  {:>15}", "-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Number of documents whose annotation is matched within the top `k`
/// windows, for each `k` in `ks`.
pub fn hits_at_k<S: SnippetScorer + ?Sized>(
    docs: &[&Document],
    window: WindowConfig,
    ks: &[usize],
    scorer: &S,
    mode: MatchMode,
    exec: Execution,
) -> Vec<usize> {
    // Rank of the first matching window, per document.
    let first_hit: Vec<Option<usize>> = exec.map(docs, |d| {
        rank_windows(d, window, scorer)
            .iter()
            .position(|s| match_rationale(s.span, &d.rationales, mode))
    });
    ks.iter()
        .map(|&k| first_hit.iter().filter(|h| matches!(h, Some(r) if *r < k)).count())
        .collect()
}

/// Recall@K per (n, K, method), averaged over folds that contain at least one
/// annotated responsive test document.
pub fn rationale_identification_eval(
    folds: &[FoldScorers],
    window_sizes: &[usize],
    ks: &[usize],
    mode: MatchMode,
    exec: Execution,
) -> Result<RecallAtKTable> {
    let windows = window_sizes
        .iter()
        .map(|&n| WindowConfig::new(n))
        .collect::<Result<Vec<_>>>()?;
    if ks.contains(&0) {
        return Err(Error::InvalidConfig("K must be >= 1".into()));
    }
    let docs: Vec<Vec<&Document>> = folds
        .iter()
        .map(|f| f.test_docs.iter().copied().filter(|d| d.has_usable_rationales()).collect())
        .collect();
    if docs.iter().all(|d| d.is_empty()) {
        return Err(Error::NoPositives(0));
    }
    let methods: Vec<Method> = Method::ALL
        .into_iter()
        .filter(|m| folds.iter().all(|f| f.scorers.iter().any(|(fm, _)| fm == m)))
        .collect();
    let mut rows = Vec::new();
    for window in &windows {
        for &method in &methods {
            let per_fold_hits: Vec<Option<Vec<f64>>> = folds
                .iter()
                .zip(&docs)
                .map(|(f, d)| {
                    if d.is_empty() {
                        return None;
                    }
                    let scorer = f.scorers.iter().find(|(m, _)| *m == method).expect("filtered").1;
                    let hits = hits_at_k(d, *window, ks, scorer, mode, exec);
                    Some(hits.iter().map(|&h| h as f64 / d.len() as f64).collect())
                })
                .collect();
            for (ki, &k) in ks.iter().enumerate() {
                let per_fold: Vec<f64> = per_fold_hits.iter().flatten().map(|r| r[ki]).collect();
                rows.push(RecallRow {
                    n: window.n,
                    k,
                    method,
                    recall: per_fold.iter().sum::<f64>() / per_fold.len() as f64,
                    per_fold,
                });
            }
        }
    }
    rows.sort_by_key(|r| (r.n, r.k, r.method != Method::RationaleModel));
    Ok(RecallAtKTable {
        match_mode: mode,
        rows,
        documents_per_fold: docs.iter().map(Vec::len).collect(),
    })
}

/// Recall@K over fold-trained models.
pub fn rationale_eval_with_models(corpus: &Corpus, folds: &[FoldModels], config: &EvalConfig) -> Result<RecallAtKTable> {
    let scorers: Vec<(ModelScorer, ModelScorer)> = folds
        .iter()
        .map(|f| (f.scorer(Method::RationaleModel), f.scorer(Method::DocumentModel)))
        .collect();
    let inputs: Vec<FoldScorers> = folds
        .iter()
        .zip(&scorers)
        .map(|(f, (r, d))| FoldScorers {
            test_docs: f.test_docs(corpus),
            scorers: vec![
                (Method::RationaleModel, r as &dyn SnippetScorer),
                (Method::DocumentModel, d as &dyn SnippetScorer),
            ],
        })
        .collect();
    let ks: Vec<usize> = (1..=config.max_k).collect();
    rationale_identification_eval(&inputs, &config.window_sizes, &ks, config.match_mode, config.execution)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordSavingsReport {
    pub avg_doc_words: u64,
    pub n: u64,
    pub k: u64,
    pub responsive_docs: u64,
    pub coverage_min: u64,
    pub coverage_max: u64,
    pub savings_per_doc_min: u64,
    pub savings_per_doc_max: u64,
    pub total_savings_min: u64,
    pub total_savings_max: u64,
    pub doc_equivalents_min: u64,
    pub doc_equivalents_max: u64,
    /// Document equivalents as a share of `responsive_docs`.
    pub doc_share_min: f64,
    pub doc_share_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recall: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Words an attorney skips by reading only the top-`k` `n`-word snippets.
///
/// Coverage ranges from `n + (k − 1)·n/2` (maximally overlapping
/// neighbours) to `k·n` (disjoint), unless `coverage_override` supplies the
/// bounds. Savings are floored at zero.
pub fn word_savings(
    avg_doc_words: u64,
    n: u64,
    k: u64,
    responsive_docs: u64,
    recall: Option<f64>,
    coverage_override: Option<(u64, u64)>,
) -> Result<WordSavingsReport> {
    if avg_doc_words == 0 || n == 0 || k == 0 || responsive_docs == 0 {
        return Err(Error::InvalidConfig("word-savings inputs must be positive".into()));
    }
    let (coverage_min, coverage_max) = match coverage_override {
        Some((lo, hi)) if lo > hi => {
            return Err(Error::InvalidConfig(format!("coverage override {lo} > {hi}")));
        }
        Some(bounds) => bounds,
        None => (n + (k - 1) * n / 2, k * n),
    };
    let warning = (coverage_max >= avg_doc_words).then(|| {
        let w = format!(
            "snippet coverage up to {coverage_max} words reaches the average document length {avg_doc_words}; savings floored at 0"
        );
        log::warn!("{w}");
        w
    });
    let savings_per_doc_min = avg_doc_words.saturating_sub(coverage_max);
    let savings_per_doc_max = avg_doc_words.saturating_sub(coverage_min);
    let total_savings_min = savings_per_doc_min * responsive_docs;
    let total_savings_max = savings_per_doc_max * responsive_docs;
    let doc_equivalents_min = total_savings_min / avg_doc_words;
    let doc_equivalents_max = total_savings_max / avg_doc_words;
    Ok(WordSavingsReport {
        avg_doc_words,
        n,
        k,
        responsive_docs,
        coverage_min,
        coverage_max,
        savings_per_doc_min,
        savings_per_doc_max,
        total_savings_min,
        total_savings_max,
        doc_equivalents_min,
        doc_equivalents_max,
        doc_share_min: doc_equivalents_min as f64 / responsive_docs as f64,
        doc_share_max: doc_equivalents_max as f64 / responsive_docs as f64,
        recall,
        warning,
    })
}

impl WordSavingsReport {
    pub fn render(&self) -> String {
        let range = |a: u64, b: u64| if a == b { a.to_string() } else { format!("{a} to {b}") };
        let mut out = String::new();
        let _ = writeln!(out, "average document words : {}", self.avg_doc_words);
        let _ = writeln!(out, "snippets               : top {} x {} words", self.k, self.n);
        let _ = writeln!(out, "words reviewed per doc : {}", range(self.coverage_min, self.coverage_max));
        let _ = writeln!(out, "words saved per doc    : {}", range(self.savings_per_doc_min, self.savings_per_doc_max));
        let _ = writeln!(
            out,
            "total words saved      : {} over {} documents",
            range(self.total_savings_min, self.total_savings_max),
            self.responsive_docs
        );
        let _ = writeln!(
            out,
            "document equivalents   : {} ({:.0}% to {:.0}%)",
            range(self.doc_equivalents_min, self.doc_equivalents_max),
            self.doc_share_min * 100.0,
            self.doc_share_max * 100.0
        );
        if let Some(r) = self.recall {
            let _ = writeln!(out, "recall                 : {:.0}%", r * 100.0);
        }
        if let Some(w) = &self.warning {
            let _ = writeln!(out, "warning                : {w}");
        }
        out
    }
}
