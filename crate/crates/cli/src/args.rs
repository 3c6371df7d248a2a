use std::path::PathBuf;

use audionese::trainer::PairMode;
use audionese::Origin;
use clap::parser::ValueSource;
use clap::{ArgMatches, Args, Parser, Subcommand, ValueEnum};

use crate::config::{PipelineConfig, Precision, ScorerKind};

/// Prompt rewriting with alignment feedback.
///
/// Settings come from built-in defaults, then the --config TOML file, then
/// flags given on the command line, then $AUDIONESE_SCORER_URL for the
/// scorer URL. Exit codes: 0 ok, 2 config or I/O error, 3 scorer failure,
/// 4 numeric failure.
#[derive(Debug, Parser)]
#[command(name = "audionese", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read a prompt file and write the canonical corpus and a train/test split
    Ingest(IngestArgs),
    /// Correlate information density with alignment, per prompt and per origin
    Analyze(AnalyzeArgs),
    /// Rewrite prompts read from a file or stdin, one rewrite per line
    Rewrite(RewriteArgs),
    /// Train the reranker on the training split under the BLEU gate
    Train(TrainArgs),
    /// Compare original, zero-shot and selected rewrites on the test split
    Evaluate(EvaluateArgs),
    /// Run the training schedule and print the learning curve as CSV
    Curve(TrainArgs),
    /// Check the loss gradient against central finite differences
    Gradcheck(GradcheckArgs),
    /// Print the alignment score of each input line
    Score(ScoreArgs),
    /// Write a synthetic user/expert prompt corpus
    Synth(SynthArgs),
}

pub fn explicit(m: &ArgMatches, id: &str) -> bool {
    matches!(m.value_source(id), Some(ValueSource::CommandLine))
}

/// Copy a flag into the config when it was given on the command line.
macro_rules! take {
    ($m:expr, $id:literal, $dst:expr, $val:expr) => {
        if explicit($m, $id) {
            $dst = $val;
        }
    };
}

#[derive(Debug, Clone, Args)]
pub struct RunOpts {
    /// TOML config file [default: none]
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Reports go under DIR/<run-id>
    #[arg(long, value_name = "DIR", default_value = "reports")]
    pub report_dir: PathBuf,
    /// Run folder name [default: <UTC timestamp>-<config hash>]
    #[arg(long, value_name = "ID")]
    pub run_id: Option<String>,
}

impl RunOpts {
    pub fn apply(&self, m: &ArgMatches, cfg: &mut PipelineConfig) {
        take!(
            m,
            "report_dir",
            cfg.paths.report_dir,
            self.report_dir.clone()
        );
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScorerOpts {
    /// Alignment scorer
    #[arg(long, value_enum, default_value_t = ScorerKind::Oracle)]
    pub scorer: ScorerKind,
    /// External scorer base URL; $AUDIONESE_SCORER_URL takes precedence [default: none]
    #[arg(long, value_name = "URL")]
    pub scorer_url: Option<String>,
    /// Projection seed of the embedding scorer
    #[arg(long, default_value_t = 0)]
    pub scorer_seed: u64,
    /// Lexicon file [default: built-in music lexicon]
    #[arg(long, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,
}

impl ScorerOpts {
    pub fn apply(&self, m: &ArgMatches, cfg: &mut PipelineConfig) {
        take!(m, "scorer", cfg.scorer.kind, self.scorer);
        take!(m, "scorer_seed", cfg.scorer.seed, self.scorer_seed);
        if self.scorer_url.is_some() {
            cfg.scorer.url = self.scorer_url.clone();
        }
        if self.lexicon.is_some() {
            cfg.paths.lexicon = self.lexicon.clone();
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CandidateOpts {
    /// Template file (JSON list of {id, pattern}) [default: built-in templates]
    #[arg(long, value_name = "PATH")]
    pub templates: Option<PathBuf>,
    /// Rewrite candidates per prompt
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    /// Seed for slot fills and SGD shuffling
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Scalar type of the reranker
    #[arg(long, value_enum, default_value_t = Precision::F64)]
    pub precision: Precision,
}

impl CandidateOpts {
    pub fn apply(&self, m: &ArgMatches, cfg: &mut PipelineConfig) {
        take!(m, "k", cfg.k, self.k);
        take!(m, "seed", cfg.train.seed, self.seed);
        take!(m, "precision", cfg.precision, self.precision);
        if self.templates.is_some() {
            cfg.paths.templates = self.templates.clone();
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataOpts {
    /// Corpus file, JSONL or one prompt per line [default: none]
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,
    /// Split file written by `ingest` [default: random split of the corpus]
    #[arg(long, value_name = "PATH")]
    pub split: Option<PathBuf>,
    /// Training prompts when no split file is given
    #[arg(long, default_value_t = 50)]
    pub n_train: usize,
    /// Shuffle seed when no split file is given
    #[arg(long, default_value_t = 42)]
    pub split_seed: u64,
}

impl DataOpts {
    pub fn apply(&self, m: &ArgMatches, cfg: &mut PipelineConfig) {
        take!(m, "n_train", cfg.split.n_train, self.n_train);
        take!(m, "split_seed", cfg.split.seed, self.split_seed);
        if self.corpus.is_some() {
            cfg.paths.corpus = self.corpus.clone();
        }
        if self.split.is_some() {
            cfg.paths.split = self.split.clone();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairsArg {
    /// Candidate-vs-original plus best-candidate-vs-rest
    All,
    /// Candidate-vs-original only
    OriginalOnly,
}

impl From<PairsArg> for PairMode {
    fn from(p: PairsArg) -> Self {
        match p {
            PairsArg::All => PairMode::All,
            PairsArg::OriginalOnly => PairMode::OriginalOnly,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    /// Prompt file, JSONL or one prompt per line (required)
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// Origin of prompts without an explicit one
    #[arg(long, value_enum, default_value_t = OriginArg::User)]
    pub origin: OriginArg,
    /// Number of training prompts
    #[arg(long, default_value_t = 50)]
    pub train: usize,
    /// Split shuffle seed
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output folder for corpus.jsonl and split.json [default: the run folder]
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunOpts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OriginArg {
    User,
    Expert,
    Rewritten,
}

impl From<OriginArg> for Origin {
    fn from(o: OriginArg) -> Self {
        match o {
            OriginArg::User => Origin::User,
            OriginArg::Expert => Origin::Expert,
            OriginArg::Rewritten => Origin::Rewritten,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Corpus file read as user prompts; repeatable [default: paths.corpus]
    #[arg(long, value_name = "PATH")]
    pub corpus: Vec<PathBuf>,
    /// Corpus file read as expert prompts; repeatable [default: none]
    #[arg(long, value_name = "PATH")]
    pub expert_corpus: Vec<PathBuf>,
    #[command(flatten)]
    pub scorer: ScorerOpts,
    #[command(flatten)]
    pub run: RunOpts,
}

#[derive(Debug, Clone, Args)]
pub struct RewriteArgs {
    /// Trained model JSON [default: untrained initial model]
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Prompt file, one prompt per line [default: stdin]
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Corpus for the unigram model [default: the input prompts]
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,
    /// Only pick rewrites with at least this sentence BLEU [default: none]
    #[arg(long, value_name = "BLEU")]
    pub bleu_floor: Option<f64>,
    /// TOML config file [default: none]
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Length prior of the untrained initial model
    #[arg(long, default_value_t = audionese::trainer::DEFAULT_LENGTH_PRIOR)]
    pub init_length_prior: f64,
    #[command(flatten)]
    pub candidates: CandidateOpts,
    /// Lexicon file [default: built-in music lexicon]
    #[arg(long, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// SGD learning rate
    #[arg(long, default_value_t = 3e-4)]
    pub lr: f64,
    /// Hinge margin
    #[arg(long, default_value_t = 0.1)]
    pub margin: f64,
    /// SGD epochs per schedule step
    #[arg(long, default_value_t = 20)]
    pub epochs: usize,
    /// Stop when mean sentence BLEU of selected rewrites drops below this
    #[arg(long, default_value_t = 20.0)]
    pub bleu_stop: f64,
    /// Training prompt counts, comma separated
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "5,10,15,20,25,30,35,40,45,50"
    )]
    pub schedule: Vec<usize>,
    /// Which preference pairs to build
    #[arg(long, value_enum, default_value_t = PairsArg::All)]
    pub pairs: PairsArg,
    /// Alignment gaps at or below this form no pair
    #[arg(long, default_value_t = 1e-6)]
    pub tie_threshold: f64,
    /// Only pick rewrites with at least this sentence BLEU [default: none]
    #[arg(long, value_name = "BLEU")]
    pub bleu_floor: Option<f64>,
    /// Length prior of the initial model; 0 starts from zero weights
    #[arg(long, default_value_t = audionese::trainer::DEFAULT_LENGTH_PRIOR)]
    pub init_length_prior: f64,
    /// Start from this model instead of the initial one [default: none]
    #[arg(long, value_name = "PATH")]
    pub model_in: Option<PathBuf>,
    /// Where to save the trained model [default: <run folder>/model.json]
    #[arg(long, value_name = "PATH")]
    pub model_out: Option<PathBuf>,
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub candidates: CandidateOpts,
    #[command(flatten)]
    pub scorer: ScorerOpts,
    #[command(flatten)]
    pub run: RunOpts,
}

impl TrainArgs {
    pub fn apply(&self, m: &ArgMatches, cfg: &mut PipelineConfig) {
        let t = &mut cfg.train;
        take!(m, "lr", t.learning_rate, self.lr);
        take!(m, "margin", t.margin, self.margin);
        take!(m, "epochs", t.epochs, self.epochs);
        take!(m, "bleu_stop", t.bleu_stop, self.bleu_stop);
        take!(m, "schedule", t.schedule, self.schedule.clone());
        take!(m, "pairs", t.pair_mode, self.pairs.into());
        take!(m, "tie_threshold", t.tie_threshold, self.tie_threshold);
        take!(
            m,
            "init_length_prior",
            t.init_length_prior,
            self.init_length_prior
        );
        if self.bleu_floor.is_some() {
            t.bleu_floor = self.bleu_floor;
        }
        if self.model_in.is_some() {
            cfg.paths.model_in = self.model_in.clone();
        }
        if self.model_out.is_some() {
            cfg.paths.model_out = self.model_out.clone();
        }
        self.data.apply(m, cfg);
        self.candidates.apply(m, cfg);
        self.scorer.apply(m, cfg);
        self.run.apply(m, cfg);
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    /// Trained model JSON [default: untrained initial model]
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Only pick rewrites with at least this sentence BLEU [default: none]
    #[arg(long, value_name = "BLEU")]
    pub bleu_floor: Option<f64>,
    /// Length prior of the untrained initial model
    #[arg(long, default_value_t = audionese::trainer::DEFAULT_LENGTH_PRIOR)]
    pub init_length_prior: f64,
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub candidates: CandidateOpts,
    #[command(flatten)]
    pub scorer: ScorerOpts,
    #[command(flatten)]
    pub run: RunOpts,
}

#[derive(Debug, Clone, Args)]
pub struct GradcheckArgs {
    /// Model JSON [default: untrained initial model]
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Corpus for pairs [default: 300 synthetic user prompts]
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,
    /// Pairs to sample
    #[arg(long, default_value_t = 100)]
    pub sample: usize,
    /// Central difference step
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    /// Skip pairs whose hinge argument is closer than this to zero
    #[arg(long, default_value_t = audionese::trainer::DEFAULT_KINK_EXCLUSION)]
    pub kink_exclusion: f64,
    /// Pass when the max relative error is below this
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
    /// Hinge margin
    #[arg(long, default_value_t = 0.1)]
    pub margin: f64,
    /// Length prior of the untrained initial model
    #[arg(long, default_value_t = audionese::trainer::DEFAULT_LENGTH_PRIOR)]
    pub init_length_prior: f64,
    /// Seed for pair and coordinate sampling
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Template file [default: built-in templates]
    #[arg(long, value_name = "PATH")]
    pub templates: Option<PathBuf>,
    #[command(flatten)]
    pub scorer: ScorerOpts,
    #[command(flatten)]
    pub run: RunOpts,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    /// Text file, one text per line [default: stdin]
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// TOML config file [default: none]
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub scorer: ScorerOpts,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Number of user prompts
    #[arg(long, default_value_t = 300)]
    pub users: usize,
    /// Number of expert captions
    #[arg(long, default_value_t = 0)]
    pub experts: usize,
    /// Generator seed
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output JSONL [default: <run folder>/synthetic.jsonl]
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Lexicon file [default: built-in music lexicon]
    #[arg(long, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunOpts,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::{CommandFactory, FromArgMatches};

    fn parse(args: &[&str]) -> (Cli, ArgMatches) {
        let m = Cli::command().try_get_matches_from(args).unwrap();
        (Cli::from_arg_matches(&m).unwrap(), m)
    }

    #[test]
    fn flag_defaults_match_config_defaults() {
        let (cli, m) = parse(&["audionese", "train"]);
        let Command::Train(a) = cli.command else {
            panic!()
        };
        let sub = m.subcommand_matches("train").unwrap();
        let mut forced = PipelineConfig::default();
        // Force every flag into the config as if it had been given.
        let t = &mut forced.train;
        t.learning_rate = a.lr;
        t.margin = a.margin;
        t.epochs = a.epochs;
        t.bleu_stop = a.bleu_stop;
        t.schedule = a.schedule.clone();
        t.pair_mode = a.pairs.into();
        t.tie_threshold = a.tie_threshold;
        t.init_length_prior = a.init_length_prior;
        t.seed = a.candidates.seed;
        forced.k = a.candidates.k;
        forced.precision = a.candidates.precision;
        forced.split.n_train = a.data.n_train;
        forced.split.seed = a.data.split_seed;
        forced.scorer.kind = a.scorer.scorer;
        forced.scorer.seed = a.scorer.scorer_seed;
        forced.paths.report_dir = a.run.report_dir.clone();
        assert_eq!(forced, PipelineConfig::default());

        let mut applied = PipelineConfig::default();
        a.apply(sub, &mut applied);
        assert_eq!(applied, PipelineConfig::default());
    }

    #[test]
    fn only_explicit_flags_override() {
        let mut cfg = PipelineConfig::default();
        cfg.train.margin = 0.5;
        cfg.train.epochs = 3;
        let (cli, m) = parse(&["audionese", "train", "--epochs", "20", "--schedule", "5,10"]);
        let Command::Train(a) = cli.command else {
            panic!()
        };
        a.apply(m.subcommand_matches("train").unwrap(), &mut cfg);
        assert_eq!(cfg.train.margin, 0.5);
        assert_eq!(cfg.train.epochs, 20);
        assert_eq!(cfg.train.schedule, vec![5, 10]);
    }
}
