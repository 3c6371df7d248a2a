use serde::{Deserialize, Serialize};

use super::{RewriteSetup, TrainError};
use crate::alignment::{score_batch, ScorerSpec};
use crate::corpus::Prompt;
use crate::rewriter::{
    generate_candidates, rerank_score, FeatureContext, FeatureVector, RerankerModel,
    RewriteCandidate,
};
use crate::scalar::Scalar;

/// Which pairs `build_pairs` forms for each prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairMode {
    /// Every candidate against the original, plus the top candidate against
    /// every other candidate.
    #[default]
    All,
    /// Only candidate-versus-original pairs.
    OriginalOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairMember<T> {
    /// Prompt id for originals, `"{prompt_id}#{k}"` for the k-th candidate.
    pub id: String,
    pub text: String,
    pub alignment: f64,
    pub features: FeatureVector<T>,
}

/// Two scored texts with ranking label `y`: +1 means `a` should outrank `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPair<T> {
    pub a: PairMember<T>,
    pub b: PairMember<T>,
    pub y: i8,
    /// `alignment(a) - alignment(b)`.
    pub score_gap: f64,
}

/// Candidates of one prompt with their alignment scores, original first.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPrompt {
    pub prompt: Prompt,
    pub original_alignment: f64,
    pub candidates: Vec<RewriteCandidate>,
}

/// Generate and score candidates for each prompt; one scorer batch per prompt.
pub fn score_prompts(
    prompts: &[Prompt],
    scorer: &ScorerSpec,
    setup: &RewriteSetup,
) -> Result<Vec<ScoredPrompt>, TrainError> {
    prompts
        .iter()
        .map(|p| {
            let mut candidates =
                generate_candidates(p, &setup.templates, &setup.ctx.lexicon, setup.k, setup.seed)?;
            let mut texts = vec![p.text.clone()];
            texts.extend(candidates.iter().map(|c| c.text.clone()));
            let scores = score_batch(scorer, &texts).map_err(|source| TrainError::Score {
                prompt_id: p.id.clone(),
                source,
            })?;
            for (c, s) in candidates.iter_mut().zip(&scores[1..]) {
                c.alignment = Some(*s);
            }
            Ok(ScoredPrompt {
                prompt: p.clone(),
                original_alignment: scores[0].value(),
                candidates,
            })
        })
        .collect()
}

fn member<T: Scalar>(
    id: String,
    text: &str,
    alignment: f64,
    ctx: &FeatureContext,
) -> PairMember<T> {
    PairMember {
        id,
        text: text.to_string(),
        alignment,
        features: ctx.features(text),
    }
}

fn oriented<T: Scalar>(x: &PairMember<T>, z: &PairMember<T>, tie: f64) -> Option<RankedPair<T>> {
    let gap = x.alignment - z.alignment;
    if gap.abs() <= tie {
        return None;
    }
    let (a, b) = if gap > 0.0 { (x, z) } else { (z, x) };
    Some(RankedPair {
        a: a.clone(),
        b: b.clone(),
        y: 1,
        score_gap: gap.abs(),
    })
}

/// Ranked pairs for one scored prompt. Each pair is oriented so that `a` has
/// the higher alignment and `y = +1`; gaps within `tie_threshold` are dropped.
pub fn pairs_for_prompt<T: Scalar>(
    scored: &ScoredPrompt,
    tie_threshold: f64,
    mode: PairMode,
    ctx: &FeatureContext,
) -> Vec<RankedPair<T>> {
    let original = member(
        scored.prompt.id.clone(),
        &scored.prompt.text,
        scored.original_alignment,
        ctx,
    );
    let cands: Vec<PairMember<T>> = scored
        .candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let a = c.alignment.map_or(0.0, |s| s.value());
            member(format!("{}#{}", scored.prompt.id, i + 1), &c.text, a, ctx)
        })
        .collect();

    let mut pairs: Vec<RankedPair<T>> = cands
        .iter()
        .filter_map(|c| oriented(c, &original, tie_threshold))
        .collect();
    if mode == PairMode::All && !cands.is_empty() {
        let top = (1..cands.len()).fold(0, |best, i| {
            if cands[i].alignment > cands[best].alignment {
                i
            } else {
                best
            }
        });
        pairs.extend(
            cands
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != top)
                .filter_map(|(_, c)| oriented(&cands[top], c, tie_threshold)),
        );
    }
    pairs
}

/// Alignment-feedback pairs over `prompts`, in prompt order.
pub fn build_pairs<T: Scalar>(
    prompts: &[Prompt],
    scorer: &ScorerSpec,
    setup: &RewriteSetup,
    tie_threshold: f64,
    mode: PairMode,
) -> Result<Vec<RankedPair<T>>, TrainError> {
    if prompts.is_empty() {
        return Err(TrainError::Config("no prompts to build pairs from".into()));
    }
    let scored = score_prompts(prompts, scorer, setup)?;
    Ok(scored
        .iter()
        .flat_map(|s| pairs_for_prompt(s, tie_threshold, mode, &setup.ctx))
        .collect())
}

/// Fraction of pairs the model orders correctly (`score(a) > score(b)` when
/// `y = +1`). Exact score ties count as wrong. `Ok(None)` for an empty slice.
pub fn ranking_accuracy<T: Scalar>(
    model: &RerankerModel<T>,
    pairs: &[RankedPair<T>],
) -> Result<Option<f64>, TrainError> {
    if pairs.is_empty() {
        return Ok(None);
    }
    let mut correct = 0usize;
    for p in pairs {
        let d = rerank_score(model, &p.a.features)? - rerank_score(model, &p.b.features)?;
        if (p.y > 0 && d > T::zero()) || (p.y < 0 && d < T::zero()) {
            correct += 1;
        }
    }
    Ok(Some(correct as f64 / pairs.len() as f64))
}
