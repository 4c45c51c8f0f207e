//! Candidate snippets: overlapping windows, negative sampling from
//! not-responsive documents, and iterative refinement of high-scoring
//! windows into smaller ones.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Label};
use crate::error::{Error, Result};
use crate::model::{probability, LinearClassifier};
use crate::seed::rng_for;
use crate::text::{featurize, Vocabulary};

pub const NEGATIVE_MIN_WORDS: usize = 10;
pub const NEGATIVE_MAX_WORDS: usize = 250;

/// Half-open token range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start < end, "empty span {start}..{end}");
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snippet {
    pub doc_id: String,
    pub start_token: usize,
    pub end_token: usize,
    pub score: Option<f64>,
}

impl Snippet {
    pub fn span(&self) -> Span {
        Span::new(self.start_token, self.end_token)
    }

    pub fn new(doc_id: impl Into<String>, span: Span, score: Option<f64>) -> Self {
        Snippet {
            doc_id: doc_id.into(),
            start_token: span.start,
            end_token: span.end,
            score,
        }
    }
}

/// Window size `n` with stride `n / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub n: usize,
}

impl WindowConfig {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "window size must be even and >= 2, got {n}"
            )));
        }
        Ok(WindowConfig { n })
    }

    pub fn stride(&self) -> usize {
        self.n / 2
    }
}

/// Windows of `n` tokens at starts `0, n/2, n, …` (while `< len`), each
/// truncated at `len`. A window contained in the previously kept one is
/// dropped, so a document of `len <= n` yields the single window `[0, len)`.
pub fn window_spans(len: usize, config: WindowConfig) -> Vec<Span> {
    let mut spans: Vec<Span> = Vec::with_capacity(len / config.stride() + 1);
    let mut start = 0;
    while start < len {
        let end = (start + config.n).min(len);
        if spans.last().is_none_or(|prev| end > prev.end) {
            spans.push(Span::new(start, end));
        }
        start += config.stride();
    }
    spans
}

pub fn window_document(doc: &Document, config: WindowConfig) -> Vec<Snippet> {
    window_spans(doc.len(), config)
        .into_iter()
        .map(|s| Snippet::new(doc.id.clone(), s, None))
        .collect()
}

/// Draws one negative snippet: length uniform in `10..=250`, clamped to the
/// document length, then a uniform start in `0..=len - length`.
pub fn sample_negative_snippet<R: Rng>(doc: &Document, rng: &mut R) -> Result<Snippet> {
    if doc.label != Label::NotResponsive {
        return Err(Error::InvalidConfig(format!(
            "negative snippets come from not-responsive documents; {:?} is {:?}",
            doc.id, doc.label
        )));
    }
    let len = doc.len();
    if len < NEGATIVE_MIN_WORDS {
        return Err(Error::NotSampleable {
            id: doc.id.clone(),
            len,
            min: NEGATIVE_MIN_WORDS,
        });
    }
    let width = rng.random_range(NEGATIVE_MIN_WORDS..=NEGATIVE_MAX_WORDS).min(len);
    let start = rng.random_range(0..=len - width);
    Ok(Snippet::new(doc.id.clone(), Span::new(start, start + width), None))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NegativeSample {
    pub snippets: Vec<Snippet>,
    /// Not-responsive documents too short to sample from.
    pub skipped: usize,
}

/// One negative per not-responsive document.
///
/// Each document's draw is seeded from `(seed, document id)`, so a document
/// receives the same negative whichever subset it is sampled in.
pub fn sample_negatives<'a>(docs: impl IntoIterator<Item = &'a Document>, seed: u64) -> NegativeSample {
    let mut snippets = Vec::new();
    let mut skipped = 0;
    for doc in docs.into_iter().filter(|d| d.label == Label::NotResponsive) {
        let mut rng = rng_for(seed, &format!("negative:{}", doc.id), 0);
        match sample_negative_snippet(doc, &mut rng) {
            Ok(s) => snippets.push(s),
            Err(_) => skipped += 1,
        }
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} not-responsive document(s) shorter than {NEGATIVE_MIN_WORDS} tokens");
    }
    NegativeSample { snippets, skipped }
}

/// Assigns a probability to a token span of a document.
pub trait SnippetScorer: Sync {
    fn score(&self, doc: &Document, span: Span) -> f64;
}

/// Scores spans with a trained classifier over its vocabulary.
#[derive(Debug, Clone, Copy)]
pub struct ModelScorer<'a> {
    vocab: &'a Vocabulary,
    model: &'a LinearClassifier,
}

impl<'a> ModelScorer<'a> {
    pub fn new(vocab: &'a Vocabulary, model: &'a LinearClassifier) -> Result<Self> {
        model.check_vocabulary(vocab)?;
        Ok(ModelScorer { vocab, model })
    }

    pub fn model(&self) -> &LinearClassifier {
        self.model
    }
}

impl SnippetScorer for ModelScorer<'_> {
    fn score(&self, doc: &Document, span: Span) -> f64 {
        let x = featurize(&doc.tokens[span.start..span.end], self.vocab);
        probability(x.dot(&self.model.weights) + self.model.intercept)
    }
}

impl<F> SnippetScorer for F
where
    F: Fn(&Document, Span) -> f64 + Sync,
{
    fn score(&self, doc: &Document, span: Span) -> f64 {
        self(doc, span)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefineConfig {
    /// Smallest child window size.
    pub min_size: usize,
    /// A child must beat its parent's score by more than this.
    pub epsilon: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            min_size: 25,
            epsilon: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSpan {
    pub span: Span,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub best: ScoredSpan,
    /// Accepted shrink steps; each at least halves the span.
    pub steps: usize,
    /// Scores of the seed and of every accepted child, strictly increasing.
    pub trajectory: Vec<f64>,
}

/// Child window size for a parent of `size` tokens: `size / 2` rounded down
/// to even.
pub fn child_size(size: usize) -> usize {
    (size / 2) & !1
}

/// Repeatedly re-windows the current best span at half its size (stride a
/// quarter) and moves to the best-scoring child while that child improves on
/// its parent by more than `epsilon`. Stops when no child improves or the
/// child size would fall below `min_size`. Ties go to the earliest child.
pub fn refine_snippet<S: SnippetScorer + ?Sized>(
    doc: &Document,
    scorer: &S,
    seed: ScoredSpan,
    config: RefineConfig,
) -> Refinement {
    let min_size = config.min_size.max(2);
    let mut best = seed;
    let mut trajectory = vec![seed.score];
    let mut steps = 0;
    loop {
        let child = child_size(best.span.len());
        if child < min_size {
            break;
        }
        let window = WindowConfig { n: child };
        let mut top: Option<ScoredSpan> = None;
        for local in window_spans(best.span.len(), window) {
            let span = Span::new(best.span.start + local.start, best.span.start + local.end);
            let score = scorer.score(doc, span);
            if top.is_none_or(|t| score > t.score) {
                top = Some(ScoredSpan { span, score });
            }
        }
        match top {
            Some(t) if t.score > best.score + config.epsilon => {
                best = t;
                trajectory.push(t.score);
                steps += 1;
            }
            _ => break,
        }
    }
    Refinement {
        best,
        steps,
        trajectory,
    }
}

pub fn write_snippets_jsonl<W: std::io::Write>(snippets: &[Snippet], mut w: W) -> std::io::Result<()> {
    for s in snippets {
        serde_json::to_writer(&mut w, s)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
