use super::{AlignmentScore, AudioneseLexicon};
use crate::rewriter::{hashed_counts, HASH_BUCKETS};
use crate::rng::fnv1a64_words;

pub const EMBED_DIM: usize = 64;

/// Entry `(i, j)` of the fixed projection from hashed features to the
/// embedding space: `((FNV-1a64(seed, i, j) mod 2001) - 1000) / 1000`, with
/// the three words hashed as little-endian `u64`s.
pub fn projection_entry(seed: u64, i: usize, j: usize) -> f64 {
    let h = fnv1a64_words(&[seed, i as u64, j as u64]);
    ((h % 2001) as f64 - 1000.0) / 1000.0
}

pub fn project(seed: u64, text: &str) -> [f64; EMBED_DIM] {
    let mut out = [0.0; EMBED_DIM];
    for (idx, count) in hashed_counts(text) {
        debug_assert!((idx as usize) < HASH_BUCKETS);
        for (j, o) in out.iter_mut().enumerate() {
            *o += count as f64 * projection_entry(seed, idx as usize, j);
        }
    }
    out
}

fn cosine_unit(a: &[f64; EMBED_DIM], b: &[f64; EMBED_DIM]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum();
    let nb: f64 = b.iter().map(|x| x * x).sum();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
}

/// Cosine similarity to the lexicon reference sentence in a random
/// projection of hashed n-gram counts, mapped to [0, 1].
#[derive(Debug, Clone)]
pub struct EmbeddingScorer {
    seed: u64,
    anchor: [f64; EMBED_DIM],
}

impl EmbeddingScorer {
    pub fn new(seed: u64, lexicon: &AudioneseLexicon) -> Self {
        Self::with_anchor(seed, &lexicon.reference_sentence())
    }

    pub fn with_anchor(seed: u64, anchor_text: &str) -> Self {
        Self {
            seed,
            anchor: project(seed, anchor_text),
        }
    }

    pub fn score(&self, text: &str) -> AlignmentScore {
        let v = project(self.seed, text);
        AlignmentScore::clamped((1.0 + cosine_unit(&v, &self.anchor)) / 2.0)
    }
}

pub fn embed_score(seed: u64, lexicon: &AudioneseLexicon, text: &str) -> AlignmentScore {
    EmbeddingScorer::new(seed, lexicon).score(text)
}
