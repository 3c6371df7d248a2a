//! Pipeline configuration: built-in defaults, then a TOML file, then command
//! line flags, then `AUDIONESE_SCORER_URL` for the scorer URL.

use std::path::{Path, PathBuf};
use std::time::Duration;

use audionese::alignment::{ExternalScorer, SCORER_URL_ENV};
use audionese::rewriter::{default_templates, load_templates, InstructionTemplate};
use audionese::rng::fnv1a64;
use audionese::trainer::DEFAULT_K;
use audionese::{AudioneseLexicon, ScorerSpec, TrainConfig};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    /// Lexicon-hit oracle
    #[default]
    Oracle,
    /// Hashed random-projection similarity to the lexicon
    Embedding,
    /// HTTP scoring service
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    #[default]
    F64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub corpus: Option<PathBuf>,
    pub split: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub model_in: Option<PathBuf>,
    pub model_out: Option<PathBuf>,
    pub report_dir: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Self {
            corpus: None,
            split: None,
            templates: None,
            lexicon: None,
            model_in: None,
            model_out: None,
            report_dir: PathBuf::from("reports"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScorerConfig {
    pub kind: ScorerKind,
    /// Projection seed for the embedding scorer.
    pub seed: u64,
    pub url: Option<String>,
    pub timeout_secs: u64,
    pub max_in_flight: usize,
    pub retries: u32,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        Self {
            kind: ScorerKind::Oracle,
            seed: 0,
            url: None,
            timeout_secs: 30,
            max_in_flight: 4,
            retries: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub n_train: usize,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            n_train: 50,
            seed: 42,
        }
    }
}

/// Everything a command may need. Scalar keys come before tables so the
/// struct serializes to valid TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Rewrite candidates per prompt.
    pub k: usize,
    /// Add-k smoothing of the unigram model.
    pub unigram_k: f64,
    /// Scalar type of the reranker.
    pub precision: Precision,
    pub paths: Paths,
    pub scorer: ScorerConfig,
    pub split: SplitConfig,
    pub train: TrainConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            unigram_k: 1.0,
            precision: Precision::F64,
            paths: Paths::default(),
            scorer: ScorerConfig::default(),
            split: SplitConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("reading config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Apply the environment layer.
    pub fn apply_env(&mut self) {
        if let Ok(url) = std::env::var(SCORER_URL_ENV) {
            if !url.trim().is_empty() {
                self.scorer.url = Some(url);
            }
        }
    }

    /// First 8 hex digits of the FNV-1a hash of the serialized config.
    pub fn short_hash(&self) -> String {
        format!("{:016x}", fnv1a64(self.to_toml().as_bytes()))[..8].to_string()
    }

    /// Fail early on input paths that do not exist and on bad numbers.
    pub fn check(&self) -> Result<(), CliError> {
        let p = &self.paths;
        for (name, path) in [
            ("corpus", &p.corpus),
            ("split", &p.split),
            ("templates", &p.templates),
            ("lexicon", &p.lexicon),
            ("model_in", &p.model_in),
        ] {
            if let Some(path) = path {
                if !path.exists() {
                    return Err(CliError::Config(format!(
                        "{name} path {} does not exist",
                        path.display()
                    )));
                }
            }
        }
        if self.k == 0 {
            return Err(CliError::Config("k must be at least 1".into()));
        }
        if !(self.unigram_k > 0.0 && self.unigram_k.is_finite()) {
            return Err(CliError::Config("unigram_k must be positive".into()));
        }
        self.train.validate()?;
        Ok(())
    }

    pub fn lexicon(&self) -> Result<AudioneseLexicon, CliError> {
        match &self.paths.lexicon {
            Some(p) => AudioneseLexicon::load(p).map_err(|e| CliError::Config(e.to_string())),
            None => Ok(AudioneseLexicon::default_music()),
        }
    }

    pub fn templates(&self) -> Result<Vec<InstructionTemplate>, CliError> {
        match &self.paths.templates {
            Some(p) => Ok(load_templates(p)?),
            None => Ok(default_templates()),
        }
    }

    pub fn scorer(&self, lexicon: &AudioneseLexicon) -> Result<ScorerSpec, CliError> {
        Ok(match self.scorer.kind {
            ScorerKind::Oracle => ScorerSpec::oracle(lexicon.clone()),
            ScorerKind::Embedding => ScorerSpec::embedding(self.scorer.seed, lexicon.clone()),
            ScorerKind::External => {
                let url = self
                    .scorer
                    .url
                    .as_deref()
                    .filter(|u| !u.trim().is_empty())
                    .ok_or_else(|| {
                        CliError::Config(format!(
                            "external scorer needs scorer.url or ${SCORER_URL_ENV}"
                        ))
                    })?;
                let mut e = ExternalScorer::new(url);
                e.timeout = Duration::from_secs(self.scorer.timeout_secs);
                e.max_in_flight = self.scorer.max_in_flight.max(1);
                e.retries = self.scorer.retries;
                ScorerSpec::External(e)
            }
        })
    }
}
