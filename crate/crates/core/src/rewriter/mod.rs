//! Template-based rewrite candidates and the trainable linear reranker that
//! picks among them.

mod candidates;
mod features;
mod model;
mod select;
mod templates;

use thiserror::Error;

pub use candidates::{generate_candidates, RewriteCandidate, ATTEMPTS_PER_CANDIDATE};
pub use features::{
    bigram_bucket, extract_features, hashed_counts, unigram_bucket, FeatureContext, FeatureVector,
    FEATURE_DIM, HASH_BUCKETS, LEXICON_HITS_INDEX, SCALAR_FEATURES, SURPRISAL_INDEX,
    TOKEN_COUNT_INDEX,
};
pub use model::{rerank_score, RerankerModel};
pub use select::{select_rewrite, Selection};
pub use templates::{
    default_templates, extended_templates, load_templates, parse_templates, InstructionTemplate,
    Slot,
};

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("template {id:?}: {reason}")]
    BadTemplate { id: String, reason: String },
    #[error("template file: {0}")]
    TemplateFile(String),
    #[error("no templates")]
    NoTemplates,
    #[error("number of candidates must be at least 1")]
    ZeroCandidates,
    #[error("no candidates for prompt {0:?}")]
    NoCandidates(String),
    #[error("prompt {prompt_id:?}: could only produce {got} of {wanted} distinct candidates")]
    CannotFill {
        prompt_id: String,
        wanted: usize,
        got: usize,
    },
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("numeric overflow")]
    NumericOverflow,
    #[error("model has non-finite parameters")]
    NonFiniteWeights,
    #[error("model file: {0}")]
    ModelFile(String),
}
