use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RewriteError;

const DEFAULT_TEMPLATES: &str = include_str!("../../resources/templates.json");

/// Descriptor slots a template may reference, each drawn from the lexicon
/// category of the same (lowercase) name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Slot {
    Instrument,
    Tone,
    Rhythm,
    Atmosphere,
    Style,
}

impl Slot {
    pub const ALL: [Slot; 5] = [
        Slot::Instrument,
        Slot::Tone,
        Slot::Rhythm,
        Slot::Atmosphere,
        Slot::Style,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Slot::Instrument => "INSTRUMENT",
            Slot::Tone => "TONE",
            Slot::Rhythm => "RHYTHM",
            Slot::Atmosphere => "ATMOSPHERE",
            Slot::Style => "STYLE",
        }
    }

    pub fn category(self) -> &'static str {
        match self {
            Slot::Instrument => "instrument",
            Slot::Tone => "tone",
            Slot::Rhythm => "rhythm",
            Slot::Atmosphere => "atmosphere",
            Slot::Style => "style",
        }
    }

    fn from_name(name: &str) -> Option<Slot> {
        Slot::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Piece {
    Literal(String),
    Prompt,
    Slot(Slot),
}

/// A rewrite pattern with exactly one `{PROMPT}` and any number of
/// descriptor slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTemplate", into = "RawTemplate")]
pub struct InstructionTemplate {
    id: String,
    pattern: String,
    pieces: Vec<Piece>,
}

#[derive(Serialize, Deserialize)]
struct RawTemplate {
    id: String,
    pattern: String,
}

impl TryFrom<RawTemplate> for InstructionTemplate {
    type Error = RewriteError;

    fn try_from(raw: RawTemplate) -> Result<Self, Self::Error> {
        InstructionTemplate::new(raw.id, raw.pattern)
    }
}

impl From<InstructionTemplate> for RawTemplate {
    fn from(t: InstructionTemplate) -> Self {
        RawTemplate {
            id: t.id,
            pattern: t.pattern,
        }
    }
}

impl InstructionTemplate {
    pub fn new(id: impl Into<String>, pattern: impl Into<String>) -> Result<Self, RewriteError> {
        let id = id.into();
        let pattern = pattern.into();
        let bad = |why: &str| RewriteError::BadTemplate {
            id: id.clone(),
            reason: why.to_string(),
        };
        if id.trim().is_empty() {
            return Err(bad("empty id"));
        }
        let mut pieces = Vec::new();
        let mut rest = pattern.as_str();
        let mut prompts = 0;
        while let Some(open) = rest.find('{') {
            if open > 0 {
                pieces.push(Piece::Literal(rest[..open].to_string()));
            }
            let close = rest[open..]
                .find('}')
                .map(|c| open + c)
                .ok_or_else(|| bad("unclosed '{'"))?;
            let name = &rest[open + 1..close];
            if name == "PROMPT" {
                prompts += 1;
                pieces.push(Piece::Prompt);
            } else {
                let slot = Slot::from_name(name)
                    .ok_or_else(|| bad(&format!("unknown slot {{{name}}}")))?;
                pieces.push(Piece::Slot(slot));
            }
            rest = &rest[close + 1..];
        }
        if rest.contains('}') {
            return Err(bad("stray '}'"));
        }
        if !rest.is_empty() {
            pieces.push(Piece::Literal(rest.to_string()));
        }
        if prompts != 1 {
            return Err(bad("pattern must contain {PROMPT} exactly once"));
        }
        Ok(Self {
            id,
            pattern,
            pieces,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    pub fn slots(&self) -> impl Iterator<Item = Slot> + '_ {
        self.pieces.iter().filter_map(|p| match p {
            Piece::Slot(s) => Some(*s),
            _ => None,
        })
    }

    pub(crate) fn pieces(&self) -> &[Piece] {
        &self.pieces
    }
}

/// Parse `[{"id": ..., "pattern": ...}]`, rejecting duplicate ids.
pub fn parse_templates(json: &str) -> Result<Vec<InstructionTemplate>, RewriteError> {
    let list: Vec<InstructionTemplate> =
        serde_json::from_str(json).map_err(|e| RewriteError::TemplateFile(e.to_string()))?;
    if list.is_empty() {
        return Err(RewriteError::NoTemplates);
    }
    let mut seen = std::collections::HashSet::new();
    for t in &list {
        if !seen.insert(t.id()) {
            return Err(RewriteError::BadTemplate {
                id: t.id().to_string(),
                reason: "duplicate id".into(),
            });
        }
    }
    Ok(list)
}

pub fn load_templates(path: impl AsRef<Path>) -> Result<Vec<InstructionTemplate>, RewriteError> {
    let path = path.as_ref();
    let json = fs::read_to_string(path)
        .map_err(|e| RewriteError::TemplateFile(format!("{}: {e}", path.display())))?;
    parse_templates(&json)
}

/// The six bundled patterns, shortest edit first; `t6` renders the canonical
/// "describe the music" instruction as a description.
pub fn default_templates() -> Vec<InstructionTemplate> {
    parse_templates(DEFAULT_TEMPLATES).expect("bundled templates are valid")
}

/// Defaults plus patterns derived from the instruction-diversification
/// rewrite ("rewrite the following prompts to be diverse and different").
pub fn extended_templates() -> Vec<InstructionTemplate> {
    let mut v = default_templates();
    v.push(
        InstructionTemplate::new("d1", "{PROMPT}, played on {INSTRUMENT} in a {STYLE} style")
            .expect("valid"),
    );
    v.push(
        InstructionTemplate::new(
            "d2",
            "{PROMPT} with layers of {INSTRUMENT} and {INSTRUMENT}",
        )
        .expect("valid"),
    );
    v
}
