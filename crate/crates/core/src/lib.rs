//! Explainable predictive coding: a document model finds responsive
//! documents, and either the document model or a rationale model trained on
//! annotated snippets picks the top-scoring windows of each responsive
//! document as its rationales.
//!
//! The pipeline, in module order:
//!
//! - [`corpus`]: annotated corpora (JSONL), rationale filtering, synthetic data.
//! - [`text`]: tokenizer, vocabulary, normalized-frequency bag-of-words.
//! - [`model`]: L2-regularized logistic regression.
//! - [`snippets`]: overlapping windows, negative sampling, refinement.
//! - [`rationale`]: responsive-document identification and top-K extraction.
//! - [`eval`]: k-fold experiments, PR curves, recall@K, word savings.
//!
//! Scoring and evaluation loops run on rayon when the `parallel` feature is
//! enabled (the default); see [`exec`].

pub mod corpus;
pub mod error;
pub mod eval;
pub mod exec;
pub mod model;
pub mod rationale;
pub mod seed;
pub mod snippets;
pub mod text;

pub use error::{Error, Result};
pub use exec::Execution;
