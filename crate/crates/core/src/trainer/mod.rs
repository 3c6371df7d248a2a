//! Alignment-feedback pairs, margin ranking loss, SGD training under a BLEU
//! gate, gradient checking and held-out evaluation.

mod eval;
mod gradcheck;
mod loss;
mod pairs;
mod train;

use thiserror::Error;

pub use eval::{evaluate, EvalReport, EvalRow, EvalSummary};
pub use gradcheck::{
    grad_check, GradCheckReport, COORDS_PER_PAIR, DEFAULT_KINK_EXCLUSION, ERROR_FLOOR,
};
pub use loss::{loss_gradient, margin_rank_loss, pair_loss, Gradient};
pub use pairs::{
    build_pairs, pairs_for_prompt, ranking_accuracy, score_prompts, PairMember, PairMode,
    RankedPair, ScoredPrompt,
};
pub use train::{
    curve_csv, selection_means, train, CurvePoint, StopReason, TrainConfig, TrainReport,
    DEFAULT_LENGTH_PRIOR,
};

use crate::alignment::{AudioneseLexicon, ScoreError};
use crate::metrics::UnigramModel;
use crate::rewriter::{default_templates, FeatureContext, InstructionTemplate, RewriteError};

pub const DEFAULT_K: usize = 8;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("scoring prompt {prompt_id}: {source}")]
    Score {
        prompt_id: String,
        #[source]
        source: ScoreError,
    },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("non-finite loss at step {step}, epoch {epoch}, pair {pair} (scores {scores:?})")]
    NonFiniteLoss {
        step: usize,
        epoch: usize,
        pair: String,
        scores: (f64, f64),
    },
    #[error("schedule needs {needed} prompts, got {got}")]
    NotEnoughPrompts { needed: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl TrainError {
    /// Numeric failures, as opposed to scorer or configuration problems.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            TrainError::NonFiniteLoss { .. }
                | TrainError::Rewrite(RewriteError::NumericOverflow)
                | TrainError::Rewrite(RewriteError::NonFiniteWeights)
        )
    }
}

/// Everything needed to produce and featurize rewrite candidates.
#[derive(Debug, Clone)]
pub struct RewriteSetup {
    pub templates: Vec<InstructionTemplate>,
    pub ctx: FeatureContext,
    /// Candidates per prompt.
    pub k: usize,
    /// Seed for slot-fill draws.
    pub seed: u64,
}

impl RewriteSetup {
    pub fn new(unigram: UnigramModel, lexicon: AudioneseLexicon, seed: u64) -> Self {
        Self {
            templates: default_templates(),
            ctx: FeatureContext::new(unigram, lexicon),
            k: DEFAULT_K,
            seed,
        }
    }
}
