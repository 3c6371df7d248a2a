//! Client for a remote alignment scorer.
//!
//! Wire protocol: `POST {base_url}/v1/score` with `{"prompts": [...]}`,
//! answered by `{"scores": [...]}` of the same length, each in [0, 1].

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{AlignmentScore, ScoreError};

pub const SCORER_URL_ENV: &str = "AUDIONESE_SCORER_URL";
pub const MAX_BATCH: usize = 64;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
pub const DEFAULT_MAX_IN_FLIGHT: usize = 4;
pub const DEFAULT_RETRIES: u32 = 3;
pub const DEFAULT_BACKOFF: Duration = Duration::from_millis(250);

type BatchResult = Result<Vec<AlignmentScore>, ScoreError>;

#[derive(Serialize)]
struct ScoreRequest<'a> {
    prompts: &'a [String],
}

#[derive(Deserialize)]
struct ScoreResponse {
    scores: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ExternalScorer {
    base_url: String,
    pub timeout: Duration,
    pub max_in_flight: usize,
    /// Retries after the first attempt, on transport failures only.
    pub retries: u32,
    /// Delay before retry `k` (0-based) is `backoff * 2^k`.
    pub backoff: Duration,
}

impl ExternalScorer {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            timeout: DEFAULT_TIMEOUT,
            max_in_flight: DEFAULT_MAX_IN_FLIGHT,
            retries: DEFAULT_RETRIES,
            backoff: DEFAULT_BACKOFF,
        }
    }

    pub fn endpoint(&self) -> String {
        format!("{}/v1/score", self.base_url)
    }

    fn client(&self) -> Result<reqwest::blocking::Client, ScoreError> {
        reqwest::blocking::Client::builder()
            .timeout(self.timeout)
            .build()
            .map_err(|e| ScoreError::Transport {
                batch: 0,
                message: e.to_string(),
            })
    }

    fn score_one_batch(
        &self,
        client: &reqwest::blocking::Client,
        batch: usize,
        texts: &[String],
    ) -> Result<Vec<AlignmentScore>, ScoreError> {
        let url = self.endpoint();
        let mut attempt = 0;
        let response = loop {
            match client
                .post(&url)
                .json(&ScoreRequest { prompts: texts })
                .send()
            {
                Ok(r) => break r,
                Err(_) if attempt < self.retries => {
                    thread::sleep(self.backoff * 2u32.pow(attempt));
                    attempt += 1;
                }
                Err(e) => {
                    return Err(ScoreError::Transport {
                        batch,
                        message: e.to_string(),
                    })
                }
            }
        };
        let status = response.status();
        if status != reqwest::StatusCode::OK {
            return Err(ScoreError::HttpStatus {
                batch,
                status: status.as_u16(),
            });
        }
        let body = response.text().map_err(|e| ScoreError::Transport {
            batch,
            message: e.to_string(),
        })?;
        let parsed: ScoreResponse =
            serde_json::from_str(&body).map_err(|e| ScoreError::Malformed {
                batch,
                message: e.to_string(),
            })?;
        if parsed.scores.len() != texts.len() {
            return Err(ScoreError::LengthMismatch {
                batch,
                expected: texts.len(),
                got: parsed.scores.len(),
            });
        }
        parsed
            .scores
            .into_iter()
            .map(|v| AlignmentScore::new(v).map_err(|_| ScoreError::OutOfRange { batch, value: v }))
            .collect()
    }

    /// Scores in input order. Batches of at most 64 are sent by up to
    /// `max_in_flight` workers; the lowest failing batch index is reported.
    pub fn score_batch(&self, texts: &[String]) -> Result<Vec<AlignmentScore>, ScoreError> {
        let client = self.client()?;
        let batches: Vec<&[String]> = texts.chunks(MAX_BATCH).collect();
        let results: Mutex<Vec<Option<BatchResult>>> =
            Mutex::new((0..batches.len()).map(|_| None).collect());
        let next = AtomicUsize::new(0);
        let workers = self.max_in_flight.max(1).min(batches.len().max(1));
        thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= batches.len() {
                        break;
                    }
                    let r = self.score_one_batch(&client, i, batches[i]);
                    results.lock().expect("results lock")[i] = Some(r);
                });
            }
        });
        let mut out = Vec::with_capacity(texts.len());
        for r in results.into_inner().expect("results lock") {
            out.extend(r.expect("every batch ran")?);
        }
        Ok(out)
    }
}
