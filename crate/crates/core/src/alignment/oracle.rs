use super::{AlignmentScore, AudioneseLexicon};

pub const ORACLE_BASE: f64 = 0.02;
pub const ORACLE_SPAN: f64 = 0.13;
pub const ORACLE_DECAY: f64 = 4.0;

/// Deterministic stand-in for a text-audio alignment model.
///
/// With `h` distinct lexicon hits: `0.02 + 0.13 * (1 - exp(-h / 4))`, which
/// rises from 0.02 toward 0.15.
pub fn oracle_score(lexicon: &AudioneseLexicon, text: &str) -> AlignmentScore {
    oracle_from_hits(lexicon.distinct_hits(text))
}

pub fn oracle_from_hits(hits: usize) -> AlignmentScore {
    let v = ORACLE_BASE + ORACLE_SPAN * (1.0 - (-(hits as f64) / ORACLE_DECAY).exp());
    AlignmentScore::clamped(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_points() {
        let lex = AudioneseLexicon::default_music();
        assert_eq!(oracle_score(&lex, "cupcake").value(), 0.02);
        assert_eq!(oracle_score(&lex, "").value(), 0.02);
        let five = oracle_score(&lex, "piano warm groovy dreamy jazz");
        assert!((five.value() - 0.112_754_4).abs() < 1e-6);
        assert!((five.value() - (0.02 + 0.13 * (1.0 - (-1.25f64).exp()))).abs() < 1e-15);
        assert_eq!(oracle_score(&lex, "drum drum"), oracle_score(&lex, "drum"));
        assert_eq!(
            oracle_score(&lex, "jazz piano warm"),
            oracle_score(&lex, "warm JAZZ, piano")
        );
    }

    #[test]
    fn strictly_increasing_to_asymptote() {
        let mut prev = oracle_from_hits(0).value();
        for h in 1..200 {
            let v = oracle_from_hits(h).value();
            assert!(v >= prev);
            if h < 60 {
                assert!(v > prev, "h={h}");
            }
            assert!(v <= 0.15);
            prev = v;
        }
    }
}
