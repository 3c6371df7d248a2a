//! Text metrics: BLEU (the drift gate), unigram information density and
//! correlation statistics.

mod bleu;
mod density;
mod stats;

use thiserror::Error;

pub use bleu::{
    corpus_bleu, sentence_bleu, tokenize_13a, BleuScore, BleuStats, BLEU_SIGNATURE, MAX_ORDER,
};
pub use density::{fit_unigram, information_density, DensityScore, UnigramModel};
pub use stats::{average_ranks, correlation, normalize_minmax, CorrelationMethod};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    EmptyInput,
    #[error("zero variance")]
    ZeroVariance,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("smoothing constant must be positive and finite, got {0}")]
    BadSmoothing(f64),
}
