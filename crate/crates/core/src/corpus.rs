//! Prompt corpora: ingestion, the shared word tokenizer, and train/test splits.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON on line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("empty id on line {0}")]
    EmptyId(usize),
    #[error("empty corpus")]
    Empty,
    #[error("n_train must satisfy 0 < n_train < {size}, got {n_train}")]
    SplitOutOfRange { n_train: usize, size: usize },
    #[error("unknown origin {0:?} (expected user, expert or rewritten)")]
    UnknownOrigin(String),
    #[error("split references unknown id {0:?}")]
    UnknownId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    User,
    Expert,
    Rewritten,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::User => "user",
            Origin::Expert => "expert",
            Origin::Rewritten => "rewritten",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Origin {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "user" => Ok(Origin::User),
            "expert" => Ok(Origin::Expert),
            "rewritten" => Ok(Origin::Rewritten),
            other => Err(CorpusError::UnknownOrigin(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub id: String,
    pub text: String,
    pub origin: Origin,
}

impl Prompt {
    pub fn new(id: impl Into<String>, text: impl Into<String>, origin: Origin) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            origin,
        }
    }
}

/// Ordered list of word tokens; never contains empty or whitespace-bearing tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSequence(pub Vec<String>);

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn join(&self, sep: &str) -> String {
        self.0.join(sep)
    }
}

impl IntoIterator for TokenSequence {
    type Item = String;
    type IntoIter = std::vec::IntoIter<String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a TokenSequence {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Simple (single code point) case folding.
///
/// `char::to_lowercase` agrees with the simple folding for nearly all code
/// points; the exceptions below are the ones where CaseFolding.txt status C/S
/// differs from the lowercase mapping, plus code points whose lowercase is
/// multi-character and which have no simple fold.
fn simple_fold(c: char) -> char {
    match c {
        '\u{00B5}' => '\u{03BC}',
        '\u{017F}' => 's',
        '\u{0345}' | '\u{1FBE}' => '\u{03B9}',
        '\u{03C2}' => '\u{03C3}',
        '\u{03D0}' => '\u{03B2}',
        '\u{03D1}' => '\u{03B8}',
        '\u{03D5}' => '\u{03C6}',
        '\u{03D6}' => '\u{03C0}',
        '\u{03F0}' => '\u{03BA}',
        '\u{03F1}' => '\u{03C1}',
        '\u{03F5}' => '\u{03B5}',
        '\u{1E9B}' => '\u{1E61}',
        '\u{1E9E}' => '\u{00DF}',
        '\u{1C80}' => '\u{0432}',
        '\u{1C81}' => '\u{0434}',
        '\u{1C82}' => '\u{043E}',
        '\u{1C83}' => '\u{0441}',
        '\u{1C84}' | '\u{1C85}' => '\u{0442}',
        '\u{1C86}' => '\u{044A}',
        '\u{1C87}' => '\u{0463}',
        '\u{1C88}' => '\u{A64B}',
        // Cherokee folds toward the uppercase block.
        '\u{13A0}'..='\u{13F5}' => c,
        '\u{13F8}'..='\u{13FD}' => char::from_u32(c as u32 - 8).unwrap_or(c),
        '\u{AB70}'..='\u{ABBF}' => char::from_u32(c as u32 - 0xAB70 + 0x13A0).unwrap_or(c),
        _ => {
            let mut lower = c.to_lowercase();
            match (lower.next(), lower.next()) {
                (Some(l), None) => l,
                _ => c,
            }
        }
    }
}

/// Shared word tokenizer for density and feature extraction.
///
/// Case-folds, splits on Unicode whitespace, strips ASCII punctuation from
/// both token ends and drops what is left empty.
pub fn tokenize_basic(text: &str) -> TokenSequence {
    let folded: String = text.chars().map(simple_fold).collect();
    let tokens = folded
        .split(char::is_whitespace)
        .map(|t| t.trim_matches(|c: char| c.is_ascii_punctuation()))
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect();
    TokenSequence(tokens)
}

/// Prompts in file order with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PromptCorpus {
    prompts: Vec<Prompt>,
    /// Blank lines skipped during ingestion.
    pub skipped_blank: usize,
}

#[derive(Deserialize)]
struct JsonLine {
    id: String,
    text: String,
    #[serde(default)]
    origin: Option<Origin>,
}

impl PromptCorpus {
    pub fn from_prompts(prompts: Vec<Prompt>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for p in &prompts {
            if !seen.insert(p.id.as_str()) {
                return Err(CorpusError::DuplicateId(p.id.clone()));
            }
        }
        Ok(Self {
            prompts,
            skipped_blank: 0,
        })
    }

    pub fn prompts(&self) -> &[Prompt] {
        &self.prompts
    }

    pub fn len(&self) -> usize {
        self.prompts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prompts.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Prompt> {
        self.prompts.iter().find(|p| p.id == id)
    }

    pub fn ids(&self) -> Vec<String> {
        self.prompts.iter().map(|p| p.id.clone()).collect()
    }

    /// Append another corpus, rejecting id collisions.
    pub fn merge(mut self, other: PromptCorpus) -> Result<Self, CorpusError> {
        self.skipped_blank += other.skipped_blank;
        self.prompts.extend(other.prompts);
        let skipped = self.skipped_blank;
        let mut merged = Self::from_prompts(self.prompts)?;
        merged.skipped_blank = skipped;
        Ok(merged)
    }

    /// Prompts for `ids`, in the order given.
    pub fn select(&self, ids: &[String]) -> Result<Vec<Prompt>, CorpusError> {
        ids.iter()
            .map(|id| {
                self.get(id)
                    .cloned()
                    .ok_or_else(|| CorpusError::UnknownId(id.clone()))
            })
            .collect()
    }

    /// Parse corpus text. Lines starting with `{` switch the whole input to
    /// JSON-lines; anything else is plain text with generated ids.
    pub fn parse(content: &str, origin: Origin) -> Result<Self, CorpusError> {
        let first = content.lines().find(|l| !l.trim().is_empty());
        let is_jsonl = first.is_some_and(|l| l.trim_start().starts_with('{'));
        let mut prompts = Vec::new();
        let mut skipped = 0;
        let mut seen = HashSet::new();

        for (idx, line) in content.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                skipped += 1;
                continue;
            }
            let prompt = if is_jsonl {
                let rec: JsonLine =
                    serde_json::from_str(line).map_err(|e| CorpusError::MalformedLine {
                        line: line_no,
                        message: e.to_string(),
                    })?;
                if rec.id.trim().is_empty() {
                    return Err(CorpusError::EmptyId(line_no));
                }
                if rec.text.trim().is_empty() {
                    skipped += 1;
                    continue;
                }
                Prompt::new(rec.id, rec.text, rec.origin.unwrap_or(origin))
            } else {
                let id = format!("p{:04}", prompts.len() + 1);
                Prompt::new(id, line.trim(), origin)
            };
            if !seen.insert(prompt.id.clone()) {
                return Err(CorpusError::DuplicateId(prompt.id));
            }
            prompts.push(prompt);
        }
        if prompts.is_empty() {
            return Err(CorpusError::Empty);
        }
        Ok(Self {
            prompts,
            skipped_blank: skipped,
        })
    }

    /// Canonical JSON-lines form: one `{"id","text","origin"}` object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for p in &self.prompts {
            out.push_str(&serde_json::to_string(p).expect("prompt serializes"));
            out.push('\n');
        }
        out
    }
}

/// Read a JSON-lines or plain-text corpus from disk.
pub fn ingest_corpus(path: impl AsRef<Path>, origin: Origin) -> Result<PromptCorpus, CorpusError> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    PromptCorpus::parse(&content, origin)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSplit {
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
    pub seed: u64,
}

/// Shuffle ids with SplitMix64(seed) Fisher–Yates; the first `n_train` train.
pub fn split_corpus(
    corpus: &PromptCorpus,
    n_train: usize,
    seed: u64,
) -> Result<CorpusSplit, CorpusError> {
    let size = corpus.len();
    if n_train == 0 || n_train >= size {
        return Err(CorpusError::SplitOutOfRange { n_train, size });
    }
    let mut ids = corpus.ids();
    SplitMix64::new(seed).shuffle(&mut ids);
    let test_ids = ids.split_off(n_train);
    Ok(CorpusSplit {
        train_ids: ids,
        test_ids,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize_basic(s).0
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(toks("Bumpy Jazz!"), vec!["bumpy", "jazz"]);
        assert!(toks("").is_empty());
        assert_eq!(toks("sad harp solo"), vec!["sad", "harp", "solo"]);
        assert_eq!(toks("  ...  hip-hop, (beat)  "), vec!["hip-hop", "beat"]);
    }

    #[test]
    fn folding_uses_simple_mapping() {
        assert_eq!(toks("ΣΟΦΟΣ ſ"), vec!["σοφοσ", "s"]);
        assert_eq!(toks("ς"), vec!["σ"]);
        // Dotted capital I has no simple fold.
        assert_eq!(toks("İ"), vec!["İ"]);
        assert_eq!(toks("ẞ"), vec!["ß"]);
    }

    #[test]
    fn plain_text_single_line() {
        let c = PromptCorpus::parse("cupcake\n", Origin::User).unwrap();
        assert_eq!(
            c.prompts(),
            &[Prompt::new("p0001", "cupcake", Origin::User)]
        );
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert!(matches!(
            PromptCorpus::parse("", Origin::User),
            Err(CorpusError::Empty)
        ));
        assert!(matches!(
            PromptCorpus::parse("  \n\t\n", Origin::User),
            Err(CorpusError::Empty)
        ));
    }

    #[test]
    fn blank_lines_are_counted_and_ids_stay_dense() {
        let c = PromptCorpus::parse("a\n\n  \nb\n", Origin::User).unwrap();
        assert_eq!(c.skipped_blank, 2);
        assert_eq!(c.ids(), vec!["p0001", "p0002"]);
    }

    #[test]
    fn jsonl_errors_name_line() {
        let input = "{\"id\":\"a\",\"text\":\"x\"}\n{\"id\": \"b\", \"text\"\n";
        match PromptCorpus::parse(input, Origin::User) {
            Err(CorpusError::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let dup = "{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n";
        assert!(matches!(
            PromptCorpus::parse(dup, Origin::User),
            Err(CorpusError::DuplicateId(id)) if id == "a"
        ));
    }

    #[test]
    fn canonical_jsonl_reingests_identically() {
        let c = PromptCorpus::parse("bumpy jazz\nsad harp solo\n", Origin::Expert).unwrap();
        let text = c.to_jsonl();
        assert_eq!(
            text.lines().next().unwrap(),
            r#"{"id":"p0001","text":"bumpy jazz","origin":"expert"}"#
        );
        let again = PromptCorpus::parse(&text, Origin::User).unwrap();
        assert_eq!(again.to_jsonl(), text);
    }

    fn numbered(n: usize) -> PromptCorpus {
        let text: String = (0..n).map(|i| format!("prompt {i}\n")).collect();
        PromptCorpus::parse(&text, Origin::User).unwrap()
    }

    #[test]
    fn split_sizes_and_bounds() {
        let c = numbered(300);
        let s = split_corpus(&c, 50, 42).unwrap();
        assert_eq!((s.train_ids.len(), s.test_ids.len()), (50, 250));
        assert_eq!(s, split_corpus(&c, 50, 42).unwrap());
        assert_ne!(s, split_corpus(&c, 50, 43).unwrap());
        assert!(split_corpus(&c, 300, 42).is_err());
        assert!(split_corpus(&c, 0, 42).is_err());
    }

    #[test]
    fn split_matches_hand_rolled_fisher_yates() {
        // Independent replay of the shuffle on indices.
        let c = numbered(6);
        let mut state: u64 = 9;
        let mut next = || {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        };
        let mut idx: Vec<usize> = (0..6).collect();
        for i in (1..6).rev() {
            let j = (next() % (i as u64 + 1)) as usize;
            idx.swap(i, j);
        }
        let expected: Vec<String> = idx.iter().map(|i| format!("p{:04}", i + 1)).collect();
        let s = split_corpus(&c, 2, 9).unwrap();
        assert_eq!(s.train_ids, expected[..2]);
        assert_eq!(s.test_ids, expected[2..]);
    }

    proptest! {
        #[test]
        fn tokenizer_fixpoint(s in "\\PC{0,40}") {
            let once = tokenize_basic(&s);
            for t in once.iter() {
                prop_assert!(!t.is_empty());
                prop_assert!(!t.chars().any(char::is_whitespace));
            }
            prop_assert_eq!(tokenize_basic(&once.join(" ")), once);
        }

        #[test]
        fn split_partitions(n in 2usize..60, frac in 0.0f64..1.0, seed in any::<u64>()) {
            let c = numbered(n);
            let n_train = 1 + ((n - 2) as f64 * frac) as usize;
            let s = split_corpus(&c, n_train, seed).unwrap();
            let mut all: Vec<String> = s.train_ids.iter().chain(&s.test_ids).cloned().collect();
            prop_assert_eq!(all.len(), n);
            all.sort();
            all.dedup();
            prop_assert_eq!(all.len(), n);
        }
    }
}
