//! Parity with the reference SacreBLEU tool on committed fixtures
//! (`fixtures/make_bleu_fixtures.py`).

use audionese::metrics::{corpus_bleu, sentence_bleu, tokenize_13a};
use serde_json::Value;

const TOL: f64 = 0.01;

fn fixtures() -> Value {
    serde_json::from_str(include_str!("fixtures/bleu_fixtures.json")).unwrap()
}

fn pairs(f: &Value) -> Vec<(String, String)> {
    f["sentence_bleu"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e["hyp"].as_str().unwrap().into(),
                e["ref"].as_str().unwrap().into(),
            )
        })
        .collect()
}

#[test]
fn tokenizer_13a_matches() {
    let f = fixtures();
    let cases = f["tokenize_13a"].as_array().unwrap();
    assert!(cases.len() >= 50);
    for e in cases {
        let text = e["text"].as_str().unwrap();
        let want: Vec<&str> = e["tokens"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| t.as_str().unwrap())
            .collect();
        assert_eq!(tokenize_13a(text).0, want, "{text:?}");
    }
}

#[test]
fn sentence_bleu_matches() {
    let f = fixtures();
    let cases = f["sentence_bleu"].as_array().unwrap();
    assert_eq!(cases.len(), 20);
    for e in cases {
        let (hyp, reference) = (e["hyp"].as_str().unwrap(), e["ref"].as_str().unwrap());
        let s = sentence_bleu(hyp, reference);
        let want = e["score"].as_f64().unwrap();
        assert!(
            (s.score - want).abs() <= TOL,
            "{hyp:?} | {reference:?}: {} vs {want}",
            s.score
        );
        assert!((s.brevity_penalty - e["bp"].as_f64().unwrap()).abs() < 1e-9);
        assert_eq!(s.hyp_len as u64, e["sys_len"].as_u64().unwrap());
        assert_eq!(s.ref_len as u64, e["ref_len"].as_u64().unwrap());
    }
}

#[test]
fn corpus_bleu_matches() {
    let f = fixtures();
    let (hyps, refs): (Vec<String>, Vec<String>) = pairs(&f).into_iter().unzip();
    let s = corpus_bleu(&hyps, &refs).unwrap();
    let want = &f["corpus_bleu"];
    assert!(
        (s.score - want["score"].as_f64().unwrap()).abs() <= TOL,
        "{}",
        s.score
    );
    assert_eq!(s.hyp_len as u64, want["sys_len"].as_u64().unwrap());
    assert_eq!(s.ref_len as u64, want["ref_len"].as_u64().unwrap());
}

#[test]
fn known_hand_values() {
    assert!((sentence_bleu("warm sad harp solo", "sad harp solo").score - 59.4604).abs() < 1e-3);
    assert_eq!(sentence_bleu("cat", "dog").score, 0.0);
    assert!((sentence_bleu("same words here", "same words here").score - 100.0).abs() < 1e-9);
}
