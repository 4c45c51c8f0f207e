//! File-based run configuration. Every section is optional; command-line
//! flags override whatever the file sets.

use std::path::Path;

use anyhow::{Context, Result};
use rationale_core::corpus::{SyntheticConfig, MAX_RATIONALE_WORDS, MIN_RATIONALE_WORDS};
use rationale_core::eval::EvalConfig;
use rationale_core::model::TrainConfig;
use rationale_core::rationale::ExtractionConfig;
use rationale_core::text::DEFAULT_MIN_DF;
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Global seed; every stage derives its own stream from it.
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub synthetic: SyntheticConfig,
    pub train: TrainSection,
    pub extract: ExtractionConfig,
    pub eval: EvalSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub min_df: usize,
    pub l2_lambda: f64,
    pub max_iters: usize,
    pub tolerance: f64,
    pub min_rationale_words: usize,
    pub max_rationale_words: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        TrainSection {
            min_df: DEFAULT_MIN_DF,
            l2_lambda: t.l2_lambda,
            max_iters: t.max_iters,
            tolerance: t.tolerance,
            min_rationale_words: MIN_RATIONALE_WORDS,
            max_rationale_words: MAX_RATIONALE_WORDS,
        }
    }
}

impl TrainSection {
    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            l2_lambda: self.l2_lambda,
            max_iters: self.max_iters,
            tolerance: self.tolerance,
            seed,
            ..TrainConfig::default()
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub folds: usize,
    pub window_sizes: Vec<usize>,
    pub max_k: usize,
    pub match_mode: rationale_core::rationale::MatchMode,
}

impl Default for EvalSection {
    fn default() -> Self {
        let e = EvalConfig::default();
        EvalSection {
            folds: e.folds,
            window_sizes: e.window_sizes,
            max_k: e.max_k,
            match_mode: e.match_mode,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
    }

    pub fn eval_config(&self, seed: u64) -> EvalConfig {
        EvalConfig {
            folds: self.eval.folds,
            seed,
            min_df: self.train.min_df,
            train: self.train.train_config(seed),
            min_rationale_words: self.train.min_rationale_words,
            max_rationale_words: self.train.max_rationale_words,
            window_sizes: self.eval.window_sizes.clone(),
            max_k: self.eval.max_k,
            match_mode: self.eval.match_mode,
            ..EvalConfig::default()
        }
    }
}
