use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use super::ScoreError;
use crate::corpus::tokenize_basic;

const DEFAULT_LEXICON: &str = include_str!("../../resources/lexicon.txt");

/// Descriptor vocabulary the synthetic oracle treats as well-aligned text.
///
/// File format: `#` comments, one `@version <tag>` line, `[category]`
/// headers, and one term per line. Terms before any header land in the
/// `general` category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AudioneseLexicon {
    version: String,
    terms: BTreeSet<String>,
    /// Terms in file order, for building the reference sentence.
    ordered: Vec<String>,
    categories: BTreeMap<String, Vec<String>>,
}

impl AudioneseLexicon {
    pub fn parse(content: &str) -> Result<Self, ScoreError> {
        let mut version = String::from("unversioned");
        let mut category = String::from("general");
        let mut terms = BTreeSet::new();
        let mut ordered = Vec::new();
        let mut categories: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (i, raw) in content.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(v) = line.strip_prefix("@version") {
                version = v.trim().to_string();
            } else if let Some(c) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                category = c.trim().to_lowercase();
            } else {
                let toks = tokenize_basic(line);
                if toks.len() != 1 || toks.0[0] != line {
                    return Err(ScoreError::BadLexicon(format!(
                        "line {}: {line:?} is not a single normalized token",
                        i + 1
                    )));
                }
                if terms.insert(line.to_string()) {
                    ordered.push(line.to_string());
                }
                categories
                    .entry(category.clone())
                    .or_default()
                    .push(line.to_string());
            }
        }
        if terms.is_empty() {
            return Err(ScoreError::BadLexicon("no terms".into()));
        }
        Ok(Self {
            version,
            terms,
            ordered,
            categories,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScoreError> {
        let path = path.as_ref();
        let content = fs::read_to_string(path)
            .map_err(|e| ScoreError::BadLexicon(format!("{}: {e}", path.display())))?;
        Self::parse(&content)
    }

    /// The bundled 96-term music lexicon.
    pub fn default_music() -> Self {
        Self::parse(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.terms.contains(token)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.ordered.iter().map(String::as_str)
    }

    /// Terms of one category, falling back to the whole lexicon when the
    /// category is absent.
    pub fn category(&self, name: &str) -> &[String] {
        self.categories
            .get(name)
            .map(Vec::as_slice)
            .unwrap_or(&self.ordered)
    }

    /// Count of distinct lexicon terms among the tokens of `text`.
    pub fn distinct_hits(&self, text: &str) -> usize {
        tokenize_basic(text)
            .iter()
            .filter(|t| self.contains(t))
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// All terms joined by spaces in file order; the embedding scorer's anchor.
    pub fn reference_sentence(&self) -> String {
        self.ordered.join(" ")
    }
}
