use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::templates::Piece;
use super::{InstructionTemplate, RewriteError, Slot};
use crate::alignment::{AlignmentScore, AudioneseLexicon};
use crate::corpus::Prompt;
use crate::rng::{fnv1a64, SplitMix64};

/// Attempts allowed per requested candidate before giving up on distinct texts.
pub const ATTEMPTS_PER_CANDIDATE: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewriteCandidate {
    pub source_id: String,
    pub text: String,
    pub template_id: String,
    pub slot_fills: Vec<(Slot, String)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alignment: Option<AlignmentScore>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bleu_vs_source: Option<f64>,
}

fn render(
    template: &InstructionTemplate,
    prompt: &str,
    lexicon: &AudioneseLexicon,
    rng: &mut SplitMix64,
) -> (String, Vec<(Slot, String)>) {
    let mut text = String::new();
    let mut fills = Vec::new();
    for piece in template.pieces() {
        match piece {
            Piece::Literal(s) => text.push_str(s),
            Piece::Prompt => text.push_str(prompt),
            Piece::Slot(slot) => {
                let pool = lexicon.category(slot.category());
                let term = &pool[rng.below(pool.len())];
                text.push_str(term);
                fills.push((*slot, term.clone()));
            }
        }
    }
    (text, fills)
}

/// `k` distinct rewrites of `prompt`.
///
/// Templates are used round-robin in registry order (one per attempt); slot
/// terms come from one SplitMix64 stream seeded with `seed ^ fnv1a64(prompt.id)`.
/// A rendering that duplicates an earlier text is discarded and the next
/// template is tried, up to `10 * k` attempts.
pub fn generate_candidates(
    prompt: &Prompt,
    templates: &[InstructionTemplate],
    lexicon: &AudioneseLexicon,
    k: usize,
    seed: u64,
) -> Result<Vec<RewriteCandidate>, RewriteError> {
    if k == 0 {
        return Err(RewriteError::ZeroCandidates);
    }
    if templates.is_empty() {
        return Err(RewriteError::NoTemplates);
    }
    let source = prompt.text.trim();
    let mut rng = SplitMix64::new(seed ^ fnv1a64(prompt.id.as_bytes()));
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(k);
    for attempt in 0..ATTEMPTS_PER_CANDIDATE * k {
        let template = &templates[attempt % templates.len()];
        let (text, slot_fills) = render(template, source, lexicon, &mut rng);
        if !seen.insert(text.clone()) {
            continue;
        }
        out.push(RewriteCandidate {
            source_id: prompt.id.clone(),
            text,
            template_id: template.id().to_string(),
            slot_fills,
            alignment: None,
            bleu_vs_source: None,
        });
        if out.len() == k {
            return Ok(out);
        }
    }
    Err(RewriteError::CannotFill {
        prompt_id: prompt.id.clone(),
        wanted: k,
        got: out.len(),
    })
}
