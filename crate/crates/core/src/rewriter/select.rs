use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{rerank_score, FeatureContext, RerankerModel, RewriteCandidate, RewriteError};
use crate::corpus::Prompt;
use crate::metrics::sentence_bleu;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Chosen candidate with `bleu_vs_source` filled in.
    pub candidate: RewriteCandidate,
    pub score: f64,
    /// A BLEU floor was given and no candidate reached it; the highest-BLEU
    /// candidate was returned instead.
    pub floor_unmet: bool,
}

fn tie_key(c: &RewriteCandidate) -> (&str, &str) {
    (c.template_id.as_str(), c.text.as_str())
}

/// Highest-scoring candidate among those with sentence BLEU against the
/// source at or above `bleu_floor`. Equal scores go to the smallest
/// `(template_id, text)`.
pub fn select_rewrite<T: Scalar>(
    model: &RerankerModel<T>,
    prompt: &Prompt,
    candidates: &[RewriteCandidate],
    bleu_floor: Option<f64>,
    ctx: &FeatureContext,
) -> Result<Selection, RewriteError> {
    if candidates.is_empty() {
        return Err(RewriteError::NoCandidates(prompt.id.clone()));
    }
    let bleu: Vec<f64> = candidates
        .iter()
        .map(|c| sentence_bleu(&c.text, &prompt.text).score)
        .collect();
    let eligible: Vec<usize> = (0..candidates.len())
        .filter(|&i| bleu_floor.is_none_or(|f| bleu[i] >= f))
        .collect();

    let finish = |i: usize, score: f64, floor_unmet: bool| {
        let mut candidate = candidates[i].clone();
        candidate.bleu_vs_source = Some(bleu[i]);
        Selection {
            candidate,
            score,
            floor_unmet,
        }
    };

    if eligible.is_empty() {
        let best = (0..candidates.len())
            .max_by(|&a, &b| {
                bleu[a]
                    .partial_cmp(&bleu[b])
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| tie_key(&candidates[b]).cmp(&tie_key(&candidates[a])))
            })
            .expect("non-empty");
        let s = rerank_score(model, &ctx.features(&candidates[best].text))?;
        return Ok(finish(best, s.as_f64(), true));
    }

    let mut best: Option<(usize, T)> = None;
    for i in eligible {
        let s = rerank_score(model, &ctx.features(&candidates[i].text))?;
        best = match best {
            None => Some((i, s)),
            Some((j, t)) => {
                let better = s > t || (s == t && tie_key(&candidates[i]) < tie_key(&candidates[j]));
                if better {
                    Some((i, s))
                } else {
                    Some((j, t))
                }
            }
        };
    }
    let (i, s) = best.expect("eligible is non-empty");
    Ok(finish(i, s.as_f64(), false))
}
