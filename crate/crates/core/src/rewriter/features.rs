use std::collections::BTreeMap;

use crate::alignment::AudioneseLexicon;
use crate::corpus::tokenize_basic;
use crate::metrics::UnigramModel;
use crate::rng::{fnv1a64, fnv1a64_extend};
use crate::scalar::Scalar;

pub const HASH_BUCKETS: usize = 16_384;
pub const SCALAR_FEATURES: usize = 3;
/// Hashed buckets followed by the token-count, surprisal and lexicon-hit scalars.
pub const FEATURE_DIM: usize = HASH_BUCKETS + SCALAR_FEATURES;

pub const TOKEN_COUNT_INDEX: usize = HASH_BUCKETS;
pub const SURPRISAL_INDEX: usize = HASH_BUCKETS + 1;
pub const LEXICON_HITS_INDEX: usize = HASH_BUCKETS + 2;

const BIGRAM_JOIN: u8 = 0x1f;

pub fn unigram_bucket(token: &str) -> u32 {
    (fnv1a64(token.as_bytes()) % HASH_BUCKETS as u64) as u32
}

pub fn bigram_bucket(left: &str, right: &str) -> u32 {
    let h = fnv1a64_extend(fnv1a64(left.as_bytes()), &[BIGRAM_JOIN]);
    (fnv1a64_extend(h, right.as_bytes()) % HASH_BUCKETS as u64) as u32
}

/// Bucket counts over unigrams and adjacent bigrams of `tokenize_basic(text)`,
/// sorted by bucket index.
pub fn hashed_counts(text: &str) -> Vec<(u32, u32)> {
    let toks = tokenize_basic(text);
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for t in &toks {
        *counts.entry(unigram_bucket(t)).or_insert(0) += 1;
    }
    for w in toks.as_slice().windows(2) {
        *counts.entry(bigram_bucket(&w[0], &w[1])).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

/// Sparse hashed counts plus three capped scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T> {
    /// `(bucket, count)` sorted by bucket, no zero counts.
    pub sparse: Vec<(u32, T)>,
    /// `[token_count/20, mean_surprisal/10, lexicon_hits/8]`, each capped at 1.
    pub scalars: [T; SCALAR_FEATURES],
}

impl<T: Scalar> FeatureVector<T> {
    pub fn zero() -> Self {
        Self {
            sparse: Vec::new(),
            scalars: [T::zero(); SCALAR_FEATURES],
        }
    }

    /// Non-zero coordinates in the flat `FEATURE_DIM` layout.
    pub fn entries(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.sparse
            .iter()
            .map(|&(i, v)| (i as usize, v))
            .chain(
                self.scalars
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| (HASH_BUCKETS + k, v)),
            )
            .filter(|(_, v)| *v != T::zero())
    }

    pub fn count_at(&self, bucket: u32) -> T {
        self.sparse
            .binary_search_by_key(&bucket, |&(i, _)| i)
            .map(|k| self.sparse[k].1)
            .unwrap_or_else(|_| T::zero())
    }

    pub fn dot(&self, weights: &[T]) -> T {
        self.entries()
            .fold(T::zero(), |acc, (i, v)| acc + weights[i] * v)
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            sparse: self.sparse.iter().map(|&(i, v)| (i, v * c)).collect(),
            scalars: self.scalars.map(|v| v * c),
        }
    }

    pub fn to_dense(&self) -> Vec<T> {
        let mut d = vec![T::zero(); FEATURE_DIM];
        for (i, v) in self.entries() {
            d[i] += v;
        }
        d
    }
}

/// Inputs shared by every feature extraction in a run.
#[derive(Debug, Clone)]
pub struct FeatureContext {
    pub unigram: UnigramModel,
    pub lexicon: AudioneseLexicon,
}

impl FeatureContext {
    pub fn new(unigram: UnigramModel, lexicon: AudioneseLexicon) -> Self {
        Self { unigram, lexicon }
    }

    pub fn features<T: Scalar>(&self, text: &str) -> FeatureVector<T> {
        extract_features(text, &self.unigram, &self.lexicon)
    }
}

pub fn extract_features<T: Scalar>(
    text: &str,
    model: &UnigramModel,
    lexicon: &AudioneseLexicon,
) -> FeatureVector<T> {
    let sparse = hashed_counts(text)
        .into_iter()
        .map(|(i, c)| (i, T::of(f64::from(c))))
        .collect();
    let (surprisal, tokens) = model.mean_surprisal(text).unwrap_or((0.0, 0));
    let hits = lexicon.distinct_hits(text);
    let cap = |v: f64| T::of(v.min(1.0));
    FeatureVector {
        sparse,
        scalars: [
            cap(tokens as f64 / 20.0),
            cap(surprisal / 10.0),
            cap(hits as f64 / 8.0),
        ],
    }
}
