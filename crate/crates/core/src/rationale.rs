//! End-to-end rationale identification: find responsive documents with the
//! document model, window them, score every window with the chosen model,
//! and keep the top K windows as rationales.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, RationaleSpan};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{LinearClassifier, ModelKind};
use crate::snippets::{
    refine_snippet, window_spans, ModelScorer, RefineConfig, ScoredSpan, Snippet, SnippetScorer,
    Span, WindowConfig,
};
use crate::text::{featurize, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Score windows with the document model.
    DocumentModel,
    /// Score windows with the rationale model.
    RationaleModel,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::RationaleModel, Method::DocumentModel];

    pub fn name(self) -> &'static str {
        match self {
            Method::DocumentModel => "document_model",
            Method::RationaleModel => "rationale_model",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// Snippet and annotation share at least one token.
    #[default]
    Overlap,
    /// Some annotation lies entirely inside the snippet.
    Containment,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractionConfig {
    pub method: Method,
    pub n: usize,
    pub top_k: usize,
    pub responsive_threshold: f64,
    pub refine: bool,
    pub refine_config: RefineConfig,
    pub match_mode: MatchMode,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            method: Method::RationaleModel,
            n: 50,
            top_k: 1,
            responsive_threshold: 0.5,
            refine: false,
            refine_config: RefineConfig::default(),
            match_mode: MatchMode::Overlap,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<WindowConfig> {
        if self.top_k == 0 {
            return Err(Error::InvalidConfig("top_k must be >= 1".into()));
        }
        if !(self.responsive_threshold > 0.0 && self.responsive_threshold < 1.0) {
            return Err(Error::InvalidConfig("responsive_threshold must lie in (0, 1)".into()));
        }
        WindowConfig::new(self.n)
    }
}

/// The vocabulary plus the trained models a pipeline run needs.
#[derive(Debug, Clone, Copy)]
pub struct ModelSet<'a> {
    pub vocab: &'a Vocabulary,
    pub document: &'a LinearClassifier,
    pub rationale: Option<&'a LinearClassifier>,
}

impl<'a> ModelSet<'a> {
    pub fn scorer(&self, method: Method) -> Result<ModelScorer<'a>> {
        match method {
            Method::DocumentModel => ModelScorer::new(self.vocab, self.document),
            Method::RationaleModel => {
                let model = self.rationale.ok_or(Error::MissingModel("rationale model"))?;
                ModelScorer::new(self.vocab, model)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationaleResult {
    pub doc_id: String,
    /// Document-model probability, when the document was selected by it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doc_score: Option<f64>,
    /// Ranked by score, best first.
    pub rationales: Vec<Snippet>,
    /// Per annotated span: whether any returned rationale matches it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matched: Option<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedDocument {
    pub index: usize,
    pub id: String,
    pub score: f64,
}

/// Documents whose document-model probability is `>= threshold`, ranked by
/// score (ties keep corpus order).
pub fn identify_responsive(
    vocab: &Vocabulary,
    doc_model: &LinearClassifier,
    corpus: &Corpus,
    threshold: f64,
    exec: Execution,
) -> Result<Vec<RankedDocument>> {
    doc_model.check_vocabulary(vocab)?;
    let scores = exec.try_map(&corpus.documents, |d| {
        doc_model.predict_proba(&featurize(&d.tokens, vocab))
    })?;
    let mut ranked: Vec<RankedDocument> = scores
        .into_iter()
        .enumerate()
        .filter(|&(_, s)| s >= threshold)
        .map(|(index, score)| RankedDocument {
            index,
            id: corpus.documents[index].id.clone(),
            score,
        })
        .collect();
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
    Ok(ranked)
}

/// Higher score first; then earlier start; then shorter span.
pub fn rank_order(a: &ScoredSpan, b: &ScoredSpan) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.span.start.cmp(&b.span.start))
        .then(a.span.len().cmp(&b.span.len()))
}

/// Every window of `doc`, scored and ranked.
pub fn rank_windows<S: SnippetScorer + ?Sized>(doc: &Document, window: WindowConfig, scorer: &S) -> Vec<ScoredSpan> {
    let mut scored: Vec<ScoredSpan> = window_spans(doc.len(), window)
        .into_iter()
        .map(|span| ScoredSpan {
            span,
            score: scorer.score(doc, span),
        })
        .collect();
    scored.sort_by(rank_order);
    scored
}

pub fn match_rationale(snippet: Span, annotations: &[RationaleSpan], mode: MatchMode) -> bool {
    annotations.iter().any(|a| {
        let a = Span {
            start: a.start_token,
            end: a.end_token,
        };
        match mode {
            MatchMode::Overlap => snippet.overlaps(&a),
            MatchMode::Containment => snippet.contains(&a),
        }
    })
}

/// Windows, scores and selects the top-K rationales of one document using
/// `scorer`. With `config.refine`, each selected window is refined with the
/// same scorer before the final re-ranking.
pub fn extract_with_scorer<S: SnippetScorer + ?Sized>(
    doc: &Document,
    config: &ExtractionConfig,
    scorer: &S,
) -> Result<RationaleResult> {
    let window = config.validate()?;
    if doc.is_empty() {
        return Err(Error::EmptyDocument(doc.id.clone()));
    }
    let mut top: Vec<ScoredSpan> = rank_windows(doc, window, scorer);
    top.truncate(config.top_k);
    if config.refine {
        top = top
            .into_iter()
            .map(|seed| refine_snippet(doc, scorer, seed, config.refine_config).best)
            .collect();
        top.sort_by(rank_order);
        top.dedup_by(|a, b| a.span == b.span);
    }
    let rationales: Vec<Snippet> = top
        .iter()
        .map(|s| Snippet::new(doc.id.clone(), s.span, Some(s.score)))
        .collect();
    let matched = (!doc.rationales.is_empty()).then(|| {
        doc.rationales
            .iter()
            .map(|a| {
                top.iter()
                    .any(|s| match_rationale(s.span, std::slice::from_ref(a), config.match_mode))
            })
            .collect()
    });
    Ok(RationaleResult {
        doc_id: doc.id.clone(),
        doc_score: None,
        rationales,
        matched,
    })
}

/// Extraction with the model the configured method calls for. Refinement is
/// applied only for the document-model method.
pub fn extract_rationales(doc: &Document, config: &ExtractionConfig, models: &ModelSet) -> Result<RationaleResult> {
    let scorer = models.scorer(config.method)?;
    debug_assert_eq!(
        scorer.model().kind,
        match config.method {
            Method::DocumentModel => ModelKind::DocumentModel,
            Method::RationaleModel => ModelKind::RationaleModel,
        }
    );
    let config = ExtractionConfig {
        refine: config.refine && config.method == Method::DocumentModel,
        ..*config
    };
    extract_with_scorer(doc, &config, &scorer)
}

/// Identifies responsive documents and extracts rationales from each, in
/// descending document-score order.
pub fn run_pipeline(
    corpus: &Corpus,
    models: &ModelSet,
    config: &ExtractionConfig,
    exec: Execution,
) -> Result<Vec<RationaleResult>> {
    config.validate()?;
    models.scorer(config.method)?;
    let ranked = identify_responsive(models.vocab, models.document, corpus, config.responsive_threshold, exec)?;
    exec.try_map(&ranked, |r| {
        let doc = &corpus.documents[r.index];
        let mut result = extract_rationales(doc, config, models)?;
        result.doc_score = Some(r.score);
        Ok(result)
    })
}

pub fn write_results_jsonl<W: std::io::Write>(results: &[RationaleResult], mut w: W) -> std::io::Result<()> {
    for r in results {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Human-readable listing of each document's rationales with token excerpts.
pub fn render_report(corpus: &Corpus, results: &[RationaleResult], max_excerpt_tokens: usize) -> String {
    let by_id: std::collections::HashMap<&str, &Document> =
        corpus.documents.iter().map(|d| (d.id.as_str(), d)).collect();
    let mut out = String::new();
    let _ = writeln!(out, "{} responsive document(s)", results.len());
    for r in results {
        let _ = write!(out, "\n{}", r.doc_id);
        if let Some(p) = r.doc_score {
            let _ = write!(out, "  p(responsive)={p:.4}");
        }
        if let Some(m) = &r.matched {
            let hits = m.iter().filter(|&&b| b).count();
            let _ = write!(out, "  annotations matched {hits}/{}", m.len());
        }
        out.push('\n');
        let Some(doc) = by_id.get(r.doc_id.as_str()) else {
            continue;
        };
        for (rank, s) in r.rationales.iter().enumerate() {
            let tokens = &doc.tokens[s.start_token..s.end_token];
            let shown = tokens.len().min(max_excerpt_tokens);
            let mut excerpt = tokens[..shown].join(" ");
            if shown < tokens.len() {
                excerpt.push_str(" …");
            }
            let _ = writeln!(
                out,
                "  #{} [{}, {}) score={:.4}  {}",
                rank + 1,
                s.start_token,
                s.end_token,
                s.score.unwrap_or(f64::NAN),
                excerpt
            );
        }
    }
    out
}
