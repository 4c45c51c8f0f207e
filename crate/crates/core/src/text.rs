//! Tokenization, vocabulary construction and normalized-frequency
//! bag-of-words features shared by the document and rationale models.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DEFAULT_MIN_DF: usize = 2;

/// Splits `text` into lowercased maximal runs of Unicode letters and digits.
///
/// Everything else is a separator. No stemming, no stopword removal.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// A dense, lexicographically ordered 1-gram vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, u32>,
    min_df: usize,
    fingerprint: String,
}

impl Vocabulary {
    /// Builds a vocabulary of every term with document frequency `>= min_df`.
    ///
    /// Indices follow lexicographic term order, so the result does not depend
    /// on document order.
    pub fn build<D, T>(docs: &[D], min_df: usize) -> Result<Self>
    where
        D: AsRef<[T]>,
        T: AsRef<str>,
    {
        if docs.is_empty() {
            return Err(Error::InvalidConfig(
                "cannot build a vocabulary from zero documents".into(),
            ));
        }
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            let unique: BTreeSet<&str> = doc.as_ref().iter().map(|t| t.as_ref()).collect();
            for term in unique {
                *df.entry(term).or_default() += 1;
            }
        }
        let terms: Vec<String> = df
            .into_iter()
            .filter(|&(_, count)| count >= min_df)
            .map(|(term, _)| term.to_owned())
            .collect();
        if terms.is_empty() {
            return Err(Error::EmptyVocabulary { min_df });
        }
        Ok(Self::from_sorted_terms(terms, min_df))
    }

    fn from_sorted_terms(terms: Vec<String>, min_df: usize) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        let fingerprint = fingerprint(&terms);
        Vocabulary {
            terms,
            index,
            min_df,
            fingerprint,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_df(&self) -> usize {
        self.min_df
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: u32) -> Option<&str> {
        self.terms.get(index as usize).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Stable hash of the ordered term list; binds models to this vocabulary.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(&VocabularyFile {
            min_df: self.min_df,
            terms: self
                .terms
                .iter()
                .enumerate()
                .map(|(i, t)| (t.clone(), i as u32))
                .collect(),
        })
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: VocabularyFile = serde_json::from_str(json)?;
        let mut by_index: Vec<(u32, String)> =
            file.terms.into_iter().map(|(t, i)| (i, t)).collect();
        by_index.sort();
        for (expected, (i, _)) in by_index.iter().enumerate() {
            if *i as usize != expected {
                return Err(Error::InvalidConfig(format!(
                    "vocabulary indices are not dense: expected {expected}, found {i}"
                )));
            }
        }
        let terms: Vec<String> = by_index.into_iter().map(|(_, t)| t).collect();
        if terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "vocabulary indices are not in lexicographic term order".into(),
            ));
        }
        if terms.is_empty() {
            return Err(Error::EmptyVocabulary {
                min_df: file.min_df,
            });
        }
        Ok(Self::from_sorted_terms(terms, file.min_df))
    }
}

/// On-disk form: a term → index map plus the min_df it was built with.
#[derive(Serialize, Deserialize)]
struct VocabularyFile {
    min_df: usize,
    terms: BTreeMap<String, u32>,
}

fn fingerprint(terms: &[String]) -> String {
    let mut h = Sha256::new();
    for t in terms {
        h.update((t.len() as u64).to_le_bytes());
        h.update(t.as_bytes());
    }
    let digest = h.finalize();
    digest[..16].iter().map(|b| format!("{b:02x}")).collect()
}

/// Sorted `(index, value)` pairs over a vocabulary of `dim` terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
    dim: usize,
    token_count: usize,
}

impl SparseVector {
    /// Builds a vector from arbitrary entries; duplicate indices are summed
    /// and non-positive values dropped.
    pub fn from_entries(mut entries: Vec<(u32, f64)>, dim: usize) -> Result<Self> {
        entries.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            if i as usize >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: i as usize + 1,
                });
            }
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => merged.push((i, v)),
            }
        }
        merged.retain(|&(_, v)| v > 0.0);
        Ok(SparseVector {
            entries: merged,
            dim,
            token_count: 0,
        })
    }

    pub fn zero(dim: usize) -> Self {
        SparseVector {
            entries: Vec::new(),
            dim,
            token_count: 0,
        }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of tokens (including out-of-vocabulary ones) that produced
    /// this vector; zero flags a featurized empty token list.
    pub fn token_count(&self) -> usize {
        self.token_count
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v).sum()
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, v)| dense[i as usize] * v)
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SparseVector {
            entries: self.entries.iter().map(|&(i, v)| (i, v * factor)).collect(),
            dim: self.dim,
            token_count: self.token_count,
        }
    }
}

/// Normalized term frequencies: `count(t) / total tokens`, where the
/// denominator includes out-of-vocabulary tokens.
pub fn featurize<T: AsRef<str>>(tokens: &[T], vocab: &Vocabulary) -> SparseVector {
    let total = tokens.len();
    if total == 0 {
        return SparseVector::zero(vocab.len());
    }
    let mut counts: HashMap<u32, u32> = HashMap::new();
    for t in tokens {
        if let Some(i) = vocab.index_of(t.as_ref()) {
            *counts.entry(i).or_default() += 1;
        }
    }
    let mut entries: Vec<(u32, f64)> = counts
        .into_iter()
        .map(|(i, c)| (i, c as f64 / total as f64))
        .collect();
    entries.sort_by_key(|&(i, _)| i);
    SparseVector {
        entries,
        dim: vocab.len(),
        token_count: total,
    }
}
