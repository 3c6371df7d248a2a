//! Corpus-level unigram model and per-prompt information density (mean surprisal).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::corpus::{tokenize_basic, Prompt, PromptCorpus};

/// Add-k smoothed unigram distribution over `tokenize_basic` tokens.
///
/// `P(w) = (count(w) + k) / (total + k * (vocab_size + 1))`; the extra `+1`
/// reserves mass `k / denominator` for every unseen token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnigramModel {
    counts: BTreeMap<String, u64>,
    total: u64,
    k: f64,
}

impl UnigramModel {
    pub fn from_texts<'a, I>(texts: I, k: f64) -> Result<Self, MetricsError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        if !(k > 0.0 && k.is_finite()) {
            return Err(MetricsError::BadSmoothing(k));
        }
        let mut counts = BTreeMap::new();
        let mut total = 0;
        for text in texts {
            for tok in tokenize_basic(text) {
                *counts.entry(tok).or_insert(0) += 1;
                total += 1;
            }
        }
        if total == 0 {
            return Err(MetricsError::EmptyInput);
        }
        Ok(Self { counts, total, k })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn vocab_size(&self) -> usize {
        self.counts.len()
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn count(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    fn denominator(&self) -> f64 {
        self.total as f64 + self.k * (self.vocab_size() as f64 + 1.0)
    }

    pub fn prob(&self, token: &str) -> f64 {
        (self.count(token) as f64 + self.k) / self.denominator()
    }

    /// Mass held back for all unseen tokens together.
    pub fn unseen_mass(&self) -> f64 {
        self.k / self.denominator()
    }

    pub fn vocab(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(t, &c)| (t.as_str(), c))
    }

    /// Mean `ln(1/P(w))` over the tokens of `text`; `None` for no tokens.
    pub fn mean_surprisal(&self, text: &str) -> Option<(f64, usize)> {
        let toks = tokenize_basic(text);
        if toks.is_empty() {
            return None;
        }
        let sum: f64 = toks.iter().map(|t| -self.prob(t).ln()).sum();
        Some((sum / toks.len() as f64, toks.len()))
    }
}

/// Fit counts over every prompt in the corpus (default `k = 1`).
pub fn fit_unigram(corpus: &PromptCorpus, k: f64) -> Result<UnigramModel, MetricsError> {
    UnigramModel::from_texts(corpus.prompts().iter().map(|p| p.text.as_str()), k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityScore {
    /// Nats per token.
    pub mean_surprisal: f64,
    pub token_count: usize,
    /// No tokens; `mean_surprisal` is 0 by convention.
    pub degenerate: bool,
}

pub fn information_density(model: &UnigramModel, prompt: &Prompt) -> DensityScore {
    match model.mean_surprisal(&prompt.text) {
        Some((mean_surprisal, token_count)) => DensityScore {
            mean_surprisal,
            token_count,
            degenerate: false,
        },
        None => DensityScore {
            mean_surprisal: 0.0,
            token_count: 0,
            degenerate: true,
        },
    }
}
