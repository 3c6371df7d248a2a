//! Sentence and corpus BLEU with the `13a` tokenizer and exponential smoothing,
//! matching the reference SacreBLEU defaults (case-sensitive, n = 4).

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::corpus::TokenSequence;

pub const MAX_ORDER: usize = 4;

/// Configuration string recorded in reports.
pub const BLEU_SIGNATURE: &str = "nrefs:1|case:mixed|eff:yes|tok:13a|smooth:exp|version:2.6.0";

fn rules() -> &'static [(Regex, &'static str); 4] {
    static RULES: OnceLock<[(Regex, &'static str); 4]> = OnceLock::new();
    RULES.get_or_init(|| {
        [
            (Regex::new(r"([\{-~\[-` -&\(-\+:-@/])").unwrap(), " ${1} "),
            (Regex::new(r"([^0-9])([\.,])").unwrap(), "${1} ${2} "),
            (Regex::new(r"([\.,])([^0-9])").unwrap(), " ${1} ${2}"),
            (Regex::new(r"([0-9])(-)").unwrap(), "${1} ${2} "),
        ]
    })
}

/// Whitespace as Python's `str.split()` sees it: Unicode White_Space plus the
/// ASCII information separators U+001C..U+001F.
fn is_py_space(c: char) -> bool {
    c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)
}

/// mteval-v13a tokenization.
pub fn tokenize_13a(text: &str) -> TokenSequence {
    let mut line = text
        .replace("<skipped>", "")
        .replace("-\n", "")
        .replace('\n', " ");
    if line.contains('&') {
        line = line
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let mut line = format!(" {line} ");
    for (re, rep) in rules() {
        line = re.replace_all(&line, *rep).into_owned();
    }
    TokenSequence(
        line.split(is_py_space)
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuScore {
    /// 0..=100.
    pub score: f64,
    /// Smoothed n-gram precisions in [0, 1], orders 1..=4. Orders past the
    /// effective order, or all orders when nothing matched, are 0.
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_len: usize,
    pub ref_len: usize,
    /// Empty hypothesis or reference.
    pub degenerate: bool,
}

/// Clipped match counts and totals for one hypothesis/reference pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matched: [usize; MAX_ORDER],
    pub total: [usize; MAX_ORDER],
    pub hyp_len: usize,
    pub ref_len: usize,
}

impl BleuStats {
    pub fn from_pair(hyp: &str, reference: &str) -> Self {
        let h = tokenize_13a(hyp);
        let r = tokenize_13a(reference);
        let mut stats = BleuStats {
            hyp_len: h.len(),
            ref_len: r.len(),
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            let ref_counts = ngram_counts(r.as_slice(), n);
            let hyp_counts = ngram_counts(h.as_slice(), n);
            stats.total[n - 1] = h.len().saturating_sub(n - 1);
            stats.matched[n - 1] = hyp_counts
                .iter()
                .map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
                .sum();
        }
        stats
    }

    pub fn add(&mut self, other: &BleuStats) {
        for n in 0..MAX_ORDER {
            self.matched[n] += other.matched[n];
            self.total[n] += other.total[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    /// Score from sufficient statistics with exponential smoothing and
    /// effective order (stop at the first order with no hypothesis n-grams).
    pub fn score(&self) -> BleuScore {
        let degenerate = self.hyp_len == 0 || self.ref_len == 0;
        let brevity_penalty = if self.hyp_len < self.ref_len {
            if self.hyp_len > 0 {
                (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
            } else {
                0.0
            }
        } else {
            1.0
        };
        let mut precisions = [0.0; MAX_ORDER];
        let zero = BleuScore {
            score: 0.0,
            precisions,
            brevity_penalty,
            hyp_len: self.hyp_len,
            ref_len: self.ref_len,
            degenerate,
        };
        if degenerate || self.matched.iter().all(|&m| m == 0) {
            return zero;
        }

        // Percent-scale precisions keep the arithmetic identical to the reference.
        let mut percent = [0.0; MAX_ORDER];
        let mut smooth = 1.0;
        let mut order = 0;
        #[allow(clippy::needless_range_loop)]
        for n in 0..MAX_ORDER {
            if self.total[n] == 0 {
                break;
            }
            order = n + 1;
            percent[n] = if self.matched[n] == 0 {
                smooth *= 2.0;
                100.0 / (smooth * self.total[n] as f64)
            } else {
                100.0 * self.matched[n] as f64 / self.total[n] as f64
            };
        }
        let log_sum: f64 = percent[..order].iter().map(|p| p.ln()).sum();
        let score = brevity_penalty * (log_sum / order as f64).exp();
        for n in 0..MAX_ORDER {
            precisions[n] = percent[n] / 100.0;
        }
        BleuScore {
            score: score.clamp(0.0, 100.0),
            precisions,
            ..zero
        }
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// BLEU-4 of `hyp` against the single reference `reference`.
pub fn sentence_bleu(hyp: &str, reference: &str) -> BleuScore {
    BleuStats::from_pair(hyp, reference).score()
}

/// Corpus BLEU: statistics pooled over all pairs before scoring.
pub fn corpus_bleu<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
) -> Result<BleuScore, MetricsError> {
    if hyps.len() != refs.len() {
        return Err(MetricsError::LengthMismatch(hyps.len(), refs.len()));
    }
    if hyps.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut pooled = BleuStats::default();
    for (h, r) in hyps.iter().zip(refs) {
        pooled.add(&BleuStats::from_pair(h.as_ref(), r.as_ref()));
    }
    Ok(pooled.score())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize_13a("pop, rock.").0, vec!["pop", ",", "rock", "."]);
        assert_eq!(tokenize_13a("hello").0, vec!["hello"]);
        assert_eq!(tokenize_13a("3.5 beats").0, vec!["3.5", "beats"]);
        assert_eq!(tokenize_13a("Sad Harp").0, vec!["Sad", "Harp"]);
    }

    #[test]
    fn identity_scores_100() {
        for s in ["cat", "sad harp solo", "The music is bumpy, and jazzy."] {
            let b = sentence_bleu(s, s);
            assert!((b.score - 100.0).abs() < 1e-9, "{s}: {}", b.score);
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(sentence_bleu("", "x").degenerate);
        assert_eq!(sentence_bleu("", "x").score, 0.0);
        assert!(sentence_bleu("x", "").degenerate);
        assert_eq!(sentence_bleu("x", "").score, 0.0);
    }

    #[test]
    fn hand_computed_short_rewrite() {
        // hyp 4 tokens, ref 3: p = 3/4, 2/3, 1/2, (0 -> 1/(2*1)); bp = 1.
        let expected = 100.0 * (0.75f64 * (2.0 / 3.0) * 0.5 * 0.5).powf(0.25);
        let b = sentence_bleu("warm sad harp solo", "sad harp solo");
        assert!((b.score - expected).abs() < 1e-9);
        assert_eq!(b.brevity_penalty, 1.0);
    }

    #[test]
    fn corpus_checks() {
        assert!(corpus_bleu(&["a"], &["a", "b"]).is_err());
        assert!(corpus_bleu::<&str, &str>(&[], &[]).is_err());
        let all_same = corpus_bleu(&["a b c", "d e"], &["a b c", "d e"]).unwrap();
        assert!((all_same.score - 100.0).abs() < 1e-9);
        let one = corpus_bleu(&["warm sad harp solo"], &["sad harp solo"]).unwrap();
        assert_eq!(one, sentence_bleu("warm sad harp solo", "sad harp solo"));
    }

    proptest! {
        #[test]
        fn score_bounded(h in "[a-c ,.]{0,24}", r in "[a-c ,.]{0,24}") {
            let b = sentence_bleu(&h, &r);
            prop_assert!((0.0..=100.0).contains(&b.score));
        }

        #[test]
        fn self_bleu_is_100(s in "[a-e]{1,3}( [a-e]{1,3}){0,8}") {
            prop_assert!((sentence_bleu(&s, &s).score - 100.0).abs() < 1e-9);
        }

        #[test]
        fn appending_matched_pair_never_loses_matches(
            hs in proptest::collection::vec("[a-c]( [a-c]){0,5}", 1..5),
            rs in proptest::collection::vec("[a-c]( [a-c]){0,5}", 1..5),
            extra in "[a-c]( [a-c]){0,5}",
        ) {
            let n = hs.len().min(rs.len());
            let pooled = |h: &[String], r: &[String]| {
                let mut s = BleuStats::default();
                for (a, b) in h.iter().zip(r) { s.add(&BleuStats::from_pair(a, b)); }
                s
            };
            let before = pooled(&hs[..n], &rs[..n]);
            let mut h2 = hs[..n].to_vec(); h2.push(extra.clone());
            let mut r2 = rs[..n].to_vec(); r2.push(extra.clone());
            let after = pooled(&h2, &r2);
            for k in 0..MAX_ORDER {
                prop_assert!(after.matched[k] >= before.matched[k]);
            }
        }
    }
}
