//! Annotated corpora: JSONL loading, rationale resolution, length filtering,
//! descriptive statistics, and a seeded synthetic generator with planted
//! rationale segments.

use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_for;
use crate::text::tokenize;

pub const MIN_RATIONALE_WORDS: usize = 10;
pub const MAX_RATIONALE_WORDS: usize = 250;
pub const MIN_SYNTHETIC_DOC_WORDS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Responsive,
    NotResponsive,
    Unlabeled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanSource {
    /// Given as token offsets (or planted by the generator).
    Annotated,
    /// Given as text and located in the token sequence.
    Resolved,
}

/// Half-open token range `[start_token, end_token)` of a ground-truth rationale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationaleSpan {
    pub start_token: usize,
    pub end_token: usize,
    pub source: SpanSource,
}

impl RationaleSpan {
    pub fn annotated(start_token: usize, end_token: usize) -> Self {
        RationaleSpan {
            start_token,
            end_token,
            source: SpanSource::Annotated,
        }
    }

    pub fn len(&self) -> usize {
        self.end_token - self.start_token
    }

    pub fn is_empty(&self) -> bool {
        self.end_token <= self.start_token
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub label: Label,
    pub rationales: Vec<RationaleSpan>,
    /// Set by [`filter_rationales`] on responsive documents left without a
    /// usable span; such documents stay available as document-model
    /// positives but take no part in rationale evaluation.
    pub excluded: bool,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Label) -> Self {
        let text = text.into();
        Document {
            id: id.into(),
            tokens: tokenize(&text),
            text,
            label,
            rationales: Vec::new(),
            excluded: false,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn is_responsive(&self) -> bool {
        self.label == Label::Responsive
    }

    /// Responsive, annotated, and not excluded by filtering.
    pub fn has_usable_rationales(&self) -> bool {
        self.is_responsive() && !self.excluded && !self.rationales.is_empty()
    }

    /// Adds a span after checking it lies within the token sequence.
    pub fn push_rationale(&mut self, span: RationaleSpan) -> Result<()> {
        if span.start_token >= span.end_token || span.end_token > self.len() {
            return Err(Error::SpanOutOfBounds {
                id: self.id.clone(),
                start: span.start_token,
                end: span.end_token,
                len: self.len(),
            });
        }
        self.rationales.push(span);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Loaded,
    Synthetic { seed: u64, config: SyntheticConfig },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub provenance: Provenance,
}

impl Corpus {
    pub fn new(documents: Vec<Document>, provenance: Provenance) -> Result<Self> {
        let mut seen = HashSet::new();
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::DuplicateId(d.id.clone()));
            }
        }
        Ok(Corpus {
            documents,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.documents.iter().filter(|d| d.label == label).count()
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = Vec::new();
        self.write_jsonl(&mut out)
            .map_err(|e| Error::io("<memory>", e))?;
        Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for d in &self.documents {
            let record = RecordOut {
                id: &d.id,
                text: &d.text,
                label: match d.label {
                    Label::Responsive => Some("responsive"),
                    Label::NotResponsive => Some("not_responsive"),
                    Label::Unlabeled => None,
                },
                rationales: d
                    .rationales
                    .iter()
                    .map(|s| SpanOut {
                        start_token: s.start_token,
                        end_token: s.end_token,
                    })
                    .collect(),
            };
            serde_json::to_writer(&mut w, &record)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_jsonl(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path.display().to_string(), e))
    }
}

#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    text: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'static str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    rationales: Vec<SpanOut>,
}

#[derive(Serialize)]
struct SpanOut {
    start_token: usize,
    end_token: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordIn {
    id: String,
    text: String,
    #[serde(default)]
    label: Option<LabelIn>,
    #[serde(default)]
    rationales: Vec<RationaleIn>,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum LabelIn {
    Responsive,
    NotResponsive,
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum RationaleIn {
    Span { start_token: usize, end_token: usize },
    Text { text: String },
}

/// A rationale annotation given as text that could not be found in its document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnresolvedRationale {
    pub doc_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedCorpus {
    pub corpus: Corpus,
    pub unresolved: Vec<UnresolvedRationale>,
}

pub fn load_corpus(path: &Path) -> Result<LoadedCorpus> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    read_corpus(std::io::BufReader::new(file))
}

/// Parses a JSONL corpus. Blank lines are skipped.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<LoadedCorpus> {
    let mut documents = Vec::new();
    let mut unresolved = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(format!("line {line_no}"), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RecordIn = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            line: line_no,
            message: e.to_string(),
        })?;
        if !seen.insert(record.id.clone()) {
            return Err(Error::DuplicateId(record.id));
        }
        let label = match record.label {
            Some(LabelIn::Responsive) => Label::Responsive,
            Some(LabelIn::NotResponsive) => Label::NotResponsive,
            None => Label::Unlabeled,
        };
        let mut doc = Document::new(record.id, record.text, label);
        for r in record.rationales {
            match r {
                RationaleIn::Span {
                    start_token,
                    end_token,
                } => doc.push_rationale(RationaleSpan::annotated(start_token, end_token))?,
                RationaleIn::Text { text } => match locate_rationale(&doc, &text) {
                    Some(span) => doc.rationales.push(span),
                    None => unresolved.push(UnresolvedRationale {
                        doc_id: doc.id.clone(),
                        text,
                    }),
                },
            }
        }
        documents.push(doc);
    }
    if !unresolved.is_empty() {
        log::warn!(
            "dropped {} rationale annotation(s) not found in their documents",
            unresolved.len()
        );
    }
    Ok(LoadedCorpus {
        corpus: Corpus::new(documents, Provenance::Loaded)?,
        unresolved,
    })
}

/// First exact token-sequence match of the tokenized `rationale_text`.
pub fn locate_rationale(doc: &Document, rationale_text: &str) -> Option<RationaleSpan> {
    let needle = tokenize(rationale_text);
    if needle.is_empty() || needle.len() > doc.len() {
        return None;
    }
    doc.tokens
        .windows(needle.len())
        .position(|w| w == needle.as_slice())
        .map(|start| RationaleSpan {
            start_token: start,
            end_token: start + needle.len(),
            source: SpanSource::Resolved,
        })
}

/// Keeps responsive spans with `min_words <= len < max_words`; responsive
/// documents left with none are flagged excluded.
pub fn filter_rationales(corpus: &Corpus, min_words: usize, max_words: usize) -> Corpus {
    let documents = corpus
        .documents
        .iter()
        .map(|d| {
            if !d.is_responsive() {
                return d.clone();
            }
            let mut d = d.clone();
            d.rationales
                .retain(|s| s.len() >= min_words && s.len() < max_words);
            d.excluded = d.rationales.is_empty();
            d
        })
        .collect();
    Corpus {
        documents,
        provenance: corpus.provenance.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthDist {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub n_docs: usize,
    pub responsive_rate: f64,
    pub doc_length: LengthDist,
    pub rationale_length: LengthDist,
    pub min_words: usize,
    pub max_words: usize,
    pub background_vocab_size: usize,
    pub topic_vocab_size: usize,
    /// Fraction of planted-rationale tokens drawn from the topic vocabulary.
    pub topic_mix: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_docs: 2000,
            responsive_rate: 0.065,
            doc_length: LengthDist {
                mean: 970.0,
                std: 300.0,
            },
            rationale_length: LengthDist {
                mean: 52.0,
                std: 30.0,
            },
            min_words: MIN_RATIONALE_WORDS,
            max_words: MAX_RATIONALE_WORDS,
            background_vocab_size: 5000,
            topic_vocab_size: 40,
            topic_mix: 0.7,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_owned()));
        if self.n_docs == 0 {
            return bad("n_docs must be positive");
        }
        if !(self.responsive_rate > 0.0 && self.responsive_rate < 1.0) {
            return bad("responsive_rate must lie in (0, 1)");
        }
        if !(self.topic_mix > 0.5 && self.topic_mix <= 1.0) {
            return bad("topic_mix must lie in (0.5, 1]");
        }
        if self.background_vocab_size < 10 || self.topic_vocab_size < 10 {
            return bad("vocabulary sizes must be >= 10");
        }
        if self.min_words == 0 || self.min_words > self.max_words {
            return bad("rationale bounds must satisfy 0 < min_words <= max_words");
        }
        if self.min_words > MIN_SYNTHETIC_DOC_WORDS {
            return bad("min_words must not exceed the minimum document length (20)");
        }
        for (name, d) in [("doc_length", self.doc_length), ("rationale_length", self.rationale_length)] {
            if !(d.mean.is_finite() && d.mean > 0.0 && d.std.is_finite() && d.std >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} needs a positive mean and non-negative std"
                )));
            }
        }
        Ok(())
    }
}

const BACKGROUND_CONSONANTS: &[char] = &['b', 'd', 'f', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'v'];
const TOPIC_CONSONANTS: &[char] = &['q', 'x', 'z'];
const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u'];

/// Pronounceable pseudo-word for `index`, at least two syllables long.
///
/// Writes `index + |syllables|` in bijective base-|syllables| so distinct
/// indices never collide. Background and topic words use disjoint consonant
/// sets, so the two vocabularies never overlap.
fn pseudo_word(index: usize, consonants: &[char]) -> String {
    let base = consonants.len() * VOWELS.len();
    let mut n = index + base + 1;
    let mut syllables = Vec::new();
    while n > 0 {
        let digit = (n - 1) % base;
        syllables.push((consonants[digit / VOWELS.len()], VOWELS[digit % VOWELS.len()]));
        n = (n - 1) / base;
    }
    syllables.iter().rev().flat_map(|&(c, v)| [c, v]).collect()
}

fn sample_length<R: Rng>(rng: &mut R, dist: LengthDist, lo: usize, hi: usize) -> usize {
    let x = if dist.std > 0.0 {
        Normal::new(dist.mean, dist.std)
            .expect("validated std")
            .sample(rng)
    } else {
        dist.mean
    };
    (x.round().max(0.0) as usize).clamp(lo, hi)
}

/// Renders tokens as sentences: capitalized first word, period at the end.
fn render_text<R: Rng>(rng: &mut R, tokens: &[String]) -> String {
    let mut text = String::with_capacity(tokens.len() * 7);
    let mut i = 0;
    while i < tokens.len() {
        let len = rng.random_range(8..=20).min(tokens.len() - i);
        for (j, t) in tokens[i..i + len].iter().enumerate() {
            if j == 0 {
                let mut chars = t.chars();
                if let Some(first) = chars.next() {
                    text.extend(first.to_uppercase());
                    text.push_str(chars.as_str());
                }
            } else {
                text.push(' ');
                text.push_str(t);
            }
        }
        text.push_str(". ");
        i += len;
    }
    text.truncate(text.trim_end().len());
    text
}

/// Seeded synthetic corpus: background text everywhere, plus one planted
/// topic-heavy segment per responsive document recorded as its rationale.
///
/// Each document draws from its own stream derived from `(seed, index)`.
pub fn generate_synthetic_corpus(config: &SyntheticConfig) -> Result<Corpus> {
    config.validate()?;
    let background: Vec<String> = (0..config.background_vocab_size)
        .map(|i| pseudo_word(i, BACKGROUND_CONSONANTS))
        .collect();
    let topic: Vec<String> = (0..config.topic_vocab_size)
        .map(|i| pseudo_word(i, TOPIC_CONSONANTS))
        .collect();
    // Zipf-like background frequencies.
    let zipf = WeightedIndex::new((0..background.len()).map(|r| 1.0 / (r as f64 + 1.0)))
        .expect("non-empty positive weights");

    let width = config.n_docs.to_string().len().max(6);
    let mut documents = Vec::with_capacity(config.n_docs);
    for index in 0..config.n_docs {
        let mut rng = rng_for(config.seed, "synthetic-doc", index as u64);
        let responsive = rng.random_bool(config.responsive_rate);
        let doc_len = sample_length(&mut rng, config.doc_length, MIN_SYNTHETIC_DOC_WORDS, usize::MAX);
        let mut tokens: Vec<String> = (0..doc_len)
            .map(|_| background[zipf.sample(&mut rng)].clone())
            .collect();
        let mut span = None;
        if responsive {
            let len = sample_length(&mut rng, config.rationale_length, config.min_words, config.max_words)
                .min(doc_len);
            let start = rng.random_range(0..=doc_len - len);
            for t in &mut tokens[start..start + len] {
                if rng.random_bool(config.topic_mix) {
                    *t = topic[rng.random_range(0..topic.len())].clone();
                }
            }
            span = Some(RationaleSpan::annotated(start, start + len));
        }
        let text = render_text(&mut rng, &tokens);
        let label = if responsive {
            Label::Responsive
        } else {
            Label::NotResponsive
        };
        let mut doc = Document::new(format!("doc-{index:0width$}"), text, label);
        debug_assert_eq!(doc.tokens, tokens);
        if let Some(span) = span {
            doc.push_rationale(span)?;
        }
        documents.push(doc);
    }
    Corpus::new(
        documents,
        Provenance::Synthetic {
            seed: config.seed,
            config: config.clone(),
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub documents: usize,
    pub responsive: usize,
    pub not_responsive: usize,
    pub unlabeled: usize,
    /// Responsive share of labeled documents.
    pub responsive_rate: f64,
    pub doc_length_mean: f64,
    pub doc_length_std: f64,
    pub responsive_doc_length_mean: f64,
    pub rationale_count: usize,
    pub rationale_length_mean: f64,
    pub rationale_length_std: f64,
    pub rationale_threshold: usize,
    /// Share of rationales strictly shorter than `rationale_threshold`.
    pub fraction_rationales_below: f64,
    pub excluded_responsive: usize,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Counts by label, length moments (population std), and the share of
/// rationales under `threshold` words. Rationales of responsive documents only.
pub fn corpus_stats(corpus: &Corpus, threshold: usize) -> CorpusStats {
    let responsive = corpus.count(Label::Responsive);
    let not_responsive = corpus.count(Label::NotResponsive);
    let labeled = responsive + not_responsive;
    let doc_lengths: Vec<f64> = corpus.documents.iter().map(|d| d.len() as f64).collect();
    let responsive_lengths: Vec<f64> = corpus
        .documents
        .iter()
        .filter(|d| d.is_responsive())
        .map(|d| d.len() as f64)
        .collect();
    let rationale_lengths: Vec<f64> = corpus
        .documents
        .iter()
        .filter(|d| d.is_responsive())
        .flat_map(|d| d.rationales.iter().map(|s| s.len() as f64))
        .collect();
    let (doc_length_mean, doc_length_std) = mean_std(&doc_lengths);
    let (rationale_length_mean, rationale_length_std) = mean_std(&rationale_lengths);
    let below = rationale_lengths
        .iter()
        .filter(|&&l| l < threshold as f64)
        .count();
    CorpusStats {
        documents: corpus.len(),
        responsive,
        not_responsive,
        unlabeled: corpus.count(Label::Unlabeled),
        responsive_rate: if labeled == 0 {
            0.0
        } else {
            responsive as f64 / labeled as f64
        },
        doc_length_mean,
        doc_length_std,
        responsive_doc_length_mean: mean_std(&responsive_lengths).0,
        rationale_count: rationale_lengths.len(),
        rationale_length_mean,
        rationale_length_std,
        rationale_threshold: threshold,
        fraction_rationales_below: if rationale_lengths.is_empty() {
            0.0
        } else {
            below as f64 / rationale_lengths.len() as f64
        },
        excluded_responsive: corpus
            .documents
            .iter()
            .filter(|d| d.is_responsive() && d.excluded)
            .count(),
    }
}
