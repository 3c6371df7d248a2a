//! Text-audio alignment scoring behind one pluggable interface: a synthetic
//! lexicon oracle, a hashed random-projection embedding, or a remote service.

mod embed;
mod external;
mod lexicon;
mod oracle;
mod report;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use embed::{embed_score, project, projection_entry, EmbeddingScorer, EMBED_DIM};
pub use external::{
    ExternalScorer, DEFAULT_BACKOFF, DEFAULT_MAX_IN_FLIGHT, DEFAULT_RETRIES, DEFAULT_TIMEOUT,
    MAX_BATCH, SCORER_URL_ENV,
};
pub use lexicon::AudioneseLexicon;
pub use oracle::{oracle_from_hits, oracle_score, ORACLE_BASE, ORACLE_DECAY, ORACLE_SPAN};
pub use report::{
    correlation_report, CorrelationReport, OriginMeans, ReportError, ReportRow, REPORT_HEADER,
};

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("batch {batch}: transport failure after retries: {message}")]
    Transport { batch: usize, message: String },
    #[error("batch {batch}: HTTP status {status}")]
    HttpStatus { batch: usize, status: u16 },
    #[error("batch {batch}: malformed response: {message}")]
    Malformed { batch: usize, message: String },
    #[error("batch {batch}: score out of range: {value}")]
    OutOfRange { batch: usize, value: f64 },
    #[error("batch {batch}: expected {expected} scores, got {got}")]
    LengthMismatch {
        batch: usize,
        expected: usize,
        got: usize,
    },
    #[error("score batch is empty")]
    EmptyBatch,
    #[error("bad lexicon: {0}")]
    BadLexicon(String),
    #[error("external scorer requires a URL (flag, config or {SCORER_URL_ENV})")]
    MissingUrl,
}

/// Alignment in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AlignmentScore(f64);

impl AlignmentScore {
    pub fn new(value: f64) -> Result<Self, f64> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(value)
        }
    }

    /// Clamp into range; NaN becomes 0.
    pub fn clamped(value: f64) -> Self {
        if value.is_nan() {
            Self(0.0)
        } else {
            Self(value.clamp(0.0, 1.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for AlignmentScore {
    type Error = String;

    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Self::new(v).map_err(|v| format!("alignment score out of range: {v}"))
    }
}

impl From<AlignmentScore> for f64 {
    fn from(s: AlignmentScore) -> f64 {
        s.0
    }
}

impl fmt::Display for AlignmentScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

/// Which scorer to use, with its parameters.
#[derive(Debug, Clone)]
pub enum ScorerSpec {
    SyntheticOracle {
        lexicon: AudioneseLexicon,
    },
    Embedding {
        seed: u64,
        lexicon: AudioneseLexicon,
    },
    External(ExternalScorer),
}

impl ScorerSpec {
    pub fn oracle(lexicon: AudioneseLexicon) -> Self {
        ScorerSpec::SyntheticOracle { lexicon }
    }

    pub fn embedding(seed: u64, lexicon: AudioneseLexicon) -> Self {
        ScorerSpec::Embedding { seed, lexicon }
    }

    /// External scorer at `url`, or at `$AUDIONESE_SCORER_URL` when `url` is `None`.
    pub fn external(url: Option<&str>) -> Result<Self, ScoreError> {
        let url = match url {
            Some(u) if !u.trim().is_empty() => u.to_string(),
            _ => std::env::var(SCORER_URL_ENV)
                .ok()
                .filter(|u| !u.trim().is_empty())
                .ok_or(ScoreError::MissingUrl)?,
        };
        Ok(ScorerSpec::External(ExternalScorer::new(url)))
    }

    pub fn describe(&self) -> String {
        match self {
            ScorerSpec::SyntheticOracle { lexicon } => {
                format!("synthetic_oracle(lexicon={})", lexicon.version())
            }
            ScorerSpec::Embedding { seed, lexicon } => {
                format!("embedding(seed={seed},lexicon={})", lexicon.version())
            }
            ScorerSpec::External(e) => format!("external({})", e.endpoint()),
        }
    }
}

/// Score `texts` in input order.
pub fn score_batch(
    scorer: &ScorerSpec,
    texts: &[String],
) -> Result<Vec<AlignmentScore>, ScoreError> {
    if texts.is_empty() {
        return Err(ScoreError::EmptyBatch);
    }
    match scorer {
        ScorerSpec::SyntheticOracle { lexicon } => {
            Ok(texts.iter().map(|t| oracle_score(lexicon, t)).collect())
        }
        ScorerSpec::Embedding { seed, lexicon } => {
            let s = EmbeddingScorer::new(*seed, lexicon);
            Ok(texts.iter().map(|t| s.score(t)).collect())
        }
        ScorerSpec::External(client) => client.score_batch(texts),
    }
}
