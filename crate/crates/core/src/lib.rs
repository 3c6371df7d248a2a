//! Prompt rewriting with alignment feedback.
//!
//! Under-specified prompts are expanded into template rewrite candidates, the
//! candidates are scored by a pluggable text-audio alignment scorer, and a
//! linear reranker is trained on the resulting preference pairs with a margin
//! ranking loss. Training stops when the selected rewrites drift too far from
//! the original prompts, measured by sentence BLEU.
//!
//! Reranker math is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the usual `f64` instantiation.

pub mod alignment;
pub mod corpus;
pub mod metrics;
pub mod rewriter;
pub mod rng;
mod scalar;
pub mod synth;
pub mod trainer;

pub use scalar::Scalar;

pub use alignment::{AlignmentScore, AudioneseLexicon, ScorerSpec};
pub use corpus::{Origin, Prompt, PromptCorpus};
pub use trainer::{RewriteSetup, TrainConfig};

pub type Reranker = rewriter::RerankerModel<f64>;
pub type RerankerF32 = rewriter::RerankerModel<f32>;
pub type Features = rewriter::FeatureVector<f64>;
pub type FeaturesF32 = rewriter::FeatureVector<f32>;
pub type Pair = trainer::RankedPair<f64>;
pub type PairF32 = trainer::RankedPair<f32>;
