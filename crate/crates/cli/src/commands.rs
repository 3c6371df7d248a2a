use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use audionese::alignment::{correlation_report, score_batch, OriginMeans};
use audionese::corpus::{ingest_corpus, split_corpus, CorpusSplit};
use audionese::metrics::{fit_unigram, UnigramModel};
use audionese::rewriter::{generate_candidates, select_rewrite, FeatureContext, RerankerModel};
use audionese::rng::SplitMix64;
use audionese::trainer::{build_pairs, evaluate, grad_check, train, PairMode, TrainReport};
use audionese::{synth, AudioneseLexicon, Origin, Prompt, PromptCorpus, RewriteSetup, Scalar};
use clap::ArgMatches;
use serde::Serialize;

use crate::args::*;
use crate::config::{PipelineConfig, Precision};
use crate::error::CliError;
use crate::run::{write_file, RunDir};

pub fn run(command: Command, m: &ArgMatches) -> Result<(), CliError> {
    match command {
        Command::Ingest(a) => ingest(&a, m),
        Command::Analyze(a) => analyze(&a, m),
        Command::Rewrite(a) => rewrite(&a, m),
        Command::Train(a) => train_cmd(&a, m, false),
        Command::Curve(a) => train_cmd(&a, m, true),
        Command::Evaluate(a) => evaluate_cmd(&a, m),
        Command::Gradcheck(a) => gradcheck(&a, m),
        Command::Score(a) => score(&a, m),
        Command::Synth(a) => synth_cmd(&a, m),
    }
}

fn finish(mut cfg: PipelineConfig) -> Result<PipelineConfig, CliError> {
    cfg.apply_env();
    cfg.check()?;
    Ok(cfg)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Config(format!("reading {}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn input_lines(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect()
}

fn load_corpus(cfg: &PipelineConfig) -> Result<PromptCorpus, CliError> {
    let path = cfg
        .paths
        .corpus
        .as_ref()
        .ok_or_else(|| CliError::Config("no corpus given (--corpus or paths.corpus)".into()))?;
    Ok(ingest_corpus(path, Origin::User)?)
}

fn load_split(cfg: &PipelineConfig, corpus: &PromptCorpus) -> Result<CorpusSplit, CliError> {
    match &cfg.paths.split {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("reading {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("split file {}: {e}", p.display())))
        }
        None => Ok(split_corpus(corpus, cfg.split.n_train, cfg.split.seed)?),
    }
}

fn rewrite_setup(
    cfg: &PipelineConfig,
    unigram: UnigramModel,
    lexicon: AudioneseLexicon,
) -> Result<RewriteSetup, CliError> {
    Ok(RewriteSetup {
        templates: cfg.templates()?,
        ctx: FeatureContext::new(unigram, lexicon),
        k: cfg.k,
        seed: cfg.train.seed,
    })
}

fn load_model<T: Scalar>(cfg: &PipelineConfig) -> Result<RerankerModel<T>, CliError> {
    match &cfg.paths.model_in {
        Some(p) => Ok(RerankerModel::load(p)?),
        None => Ok(cfg.train.initial_model()),
    }
}

fn ingest(a: &IngestArgs, m: &ArgMatches) -> Result<(), CliError> {
    let mut cfg = PipelineConfig::load(a.run.config.as_deref())?;
    a.run.apply(m, &mut cfg);
    if explicit(m, "train") {
        cfg.split.n_train = a.train;
    }
    if explicit(m, "seed") {
        cfg.split.seed = a.seed;
    }
    let cfg = finish(cfg)?;

    let corpus = ingest_corpus(&a.input, a.origin.into())?;
    let split = split_corpus(&corpus, cfg.split.n_train, cfg.split.seed)?;
    let write_all = |dir: &Path| -> Result<(), CliError> {
        write_file(&dir.join("corpus.jsonl"), &corpus.to_jsonl())?;
        write_file(&dir.join("split.json"), &json(&split))
    };
    let out: PathBuf = match &a.out_dir {
        Some(dir) => {
            write_all(dir)?;
            dir.clone()
        }
        None => {
            let run = RunDir::open(&cfg, a.run.run_id.as_deref())?;
            write_all(&run.dir)?;
            run.dir.clone()
        }
    };
    if corpus.skipped_blank > 0 {
        eprintln!("skipped {} blank lines", corpus.skipped_blank);
    }
    eprintln!("wrote {}", out.display());
    println!(
        "{} prompts ({} train / {} test)",
        corpus.len(),
        split.train_ids.len(),
        split.test_ids.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct AnalysisSummary<'a> {
    prompts: usize,
    scorer: &'a str,
    normalization: &'a str,
    pearson: f64,
    spearman: f64,
    per_origin: &'a BTreeMap<Origin, OriginMeans>,
}

fn analyze(a: &AnalyzeArgs, m: &ArgMatches) -> Result<(), CliError> {
    let mut cfg = PipelineConfig::load(a.run.config.as_deref())?;
    a.run.apply(m, &mut cfg);
    a.scorer.apply(m, &mut cfg);
    let cfg = finish(cfg)?;

    let mut sources: Vec<(PathBuf, Origin)> = Vec::new();
    sources.extend(a.corpus.iter().map(|p| (p.clone(), Origin::User)));
    sources.extend(a.expert_corpus.iter().map(|p| (p.clone(), Origin::Expert)));
    if sources.is_empty() {
        let p = cfg.paths.corpus.clone().ok_or_else(|| {
            CliError::Config("no corpus given (--corpus, --expert-corpus or paths.corpus)".into())
        })?;
        sources.push((p, Origin::User));
    }
    let mut corpus: Option<PromptCorpus> = None;
    for (path, origin) in &sources {
        let c = ingest_corpus(path, *origin)?;
        corpus = Some(match corpus {
            None => c,
            Some(acc) => acc.merge(c)?,
        });
    }
    let corpus = corpus.expect("at least one source");

    let lexicon = cfg.lexicon()?;
    let scorer = cfg.scorer(&lexicon)?;
    let unigram = fit_unigram(&corpus, cfg.unigram_k)?;
    let report = correlation_report(&corpus, &scorer, &unigram)?;

    let run = RunDir::open(&cfg, a.run.run_id.as_deref())?;
    run.write("analysis.csv", &report.to_csv())?;
    let summary = AnalysisSummary {
        prompts: report.rows.len(),
        scorer: &report.scorer,
        normalization: report.normalization,
        pearson: report.pearson,
        spearman: report.spearman,
        per_origin: &report.per_origin,
    };
    run.write("analysis.json", &json(&summary))?;
    eprintln!("run {}: wrote {}", run.id, run.dir.display());

    println!("prompts {}", summary.prompts);
    println!("pearson {:.4}", report.pearson);
    println!("spearman {:.4}", report.spearman);
    for (origin, means) in &report.per_origin {
        println!(
            "{}: n={} mean_surprisal={:.4} mean_alignment={:.4} mean_tokens={:.2}",
            origin.as_str(),
            means.count,
            means.mean_surprisal,
            means.mean_alignment,
            means.mean_token_count
        );
    }
    Ok(())
}

fn rewrite(a: &RewriteArgs, m: &ArgMatches) -> Result<(), CliError> {
    let mut cfg = PipelineConfig::load(a.config.as_deref())?;
    a.candidates.apply(m, &mut cfg);
    if explicit(m, "init_length_prior") {
        cfg.train.init_length_prior = a.init_length_prior;
    }
    if a.model.is_some() {
        cfg.paths.model_in = a.model.clone();
    }
    if a.corpus.is_some() {
        cfg.paths.corpus = a.corpus.clone();
    }
    if a.lexicon.is_some() {
        cfg.paths.lexicon = a.lexicon.clone();
    }
    if a.bleu_floor.is_some() {
        cfg.train.bleu_floor = a.bleu_floor;
    }
    let cfg = finish(cfg)?;

    let lines = input_lines(&read_input(a.input.as_deref())?);
    if lines.is_empty() {
        return Err(CliError::Config("no prompts to rewrite".into()));
    }
    let prompts: Vec<Prompt> = lines
        .iter()
        .enumerate()
        .map(|(i, t)| Prompt::new(format!("p{:04}", i + 1), t.clone(), Origin::User))
        .collect();
    let unigram = match &cfg.paths.corpus {
        Some(_) => fit_unigram(&load_corpus(&cfg)?, cfg.unigram_k)?,
        None => UnigramModel::from_texts(lines.iter().map(String::as_str), cfg.unigram_k)?,
    };
    let setup = rewrite_setup(&cfg, unigram, cfg.lexicon()?)?;
    let out = match cfg.precision {
        Precision::F64 => rewrite_typed::<f64>(&cfg, &prompts, &setup)?,
        Precision::F32 => rewrite_typed::<f32>(&cfg, &prompts, &setup)?,
    };
    for line in out {
        println!("{line}");
    }
    Ok(())
}

fn rewrite_typed<T: Scalar>(
    cfg: &PipelineConfig,
    prompts: &[Prompt],
    setup: &RewriteSetup,
) -> Result<Vec<String>, CliError> {
    let model = load_model::<T>(cfg)?;
    prompts
        .iter()
        .map(|p| {
            let cands =
                generate_candidates(p, &setup.templates, &setup.ctx.lexicon, setup.k, setup.seed)?;
            let sel = select_rewrite(&model, p, &cands, cfg.train.bleu_floor, &setup.ctx)?;
            Ok(sel.candidate.text)
        })
        .collect()
}

fn train_cmd(a: &TrainArgs, m: &ArgMatches, curve_only: bool) -> Result<(), CliError> {
    let mut cfg = PipelineConfig::load(a.run.config.as_deref())?;
    a.apply(m, &mut cfg);
    let cfg = finish(cfg)?;

    let corpus = load_corpus(&cfg)?;
    let split = load_split(&cfg, &corpus)?;
    let train_prompts = corpus.select(&split.train_ids)?;
    let lexicon = cfg.lexicon()?;
    let scorer = cfg.scorer(&lexicon)?;
    let setup = rewrite_setup(&cfg, fit_unigram(&corpus, cfg.unigram_k)?, lexicon)?;

    let run = RunDir::open(&cfg, a.run.run_id.as_deref())?;
    let report = match cfg.precision {
        Precision::F64 => {
            train_typed::<f64>(&cfg, &train_prompts, &scorer, &setup, &run, curve_only)?
        }
        Precision::F32 => {
            train_typed::<f32>(&cfg, &train_prompts, &scorer, &setup, &run, curve_only)?
        }
    };
    let curve = report.curve_csv();
    run.write("curve.csv", &curve)?;
    if curve_only {
        eprintln!("run {}: wrote {}", run.id, run.dir.display());
        print!("{curve}");
        return Ok(());
    }
    run.write("train_report.json", &json(&report))?;
    run.write("config.toml", &cfg.to_toml())?;
    eprintln!("run {}: wrote {}", run.id, run.dir.display());
    let last = report.curve.last().expect("at least one step");
    println!("stop: {:?} at n={}", report.stop_reason, last.n_samples);
    println!("model: {}", report.model_version);
    for p in &report.curve {
        println!(
            "n={:>3} alignment={:.6} bleu={:.4}{}",
            p.n_samples,
            p.mean_alignment,
            p.mean_bleu,
            if p.stopped { " (stopped)" } else { "" }
        );
    }
    Ok(())
}

fn train_typed<T: Scalar>(
    cfg: &PipelineConfig,
    prompts: &[Prompt],
    scorer: &audionese::ScorerSpec,
    setup: &RewriteSetup,
    run: &RunDir,
    curve_only: bool,
) -> Result<TrainReport, CliError> {
    let init = load_model::<T>(cfg)?;
    let (model, report) = train(init, prompts, scorer, setup, &cfg.train)?;
    if !curve_only {
        let out = cfg
            .paths
            .model_out
            .clone()
            .unwrap_or_else(|| run.path("model.json"));
        model.save(&out)?;
    }
    Ok(report)
}

fn evaluate_cmd(a: &EvaluateArgs, m: &ArgMatches) -> Result<(), CliError> {
    let mut cfg = PipelineConfig::load(a.run.config.as_deref())?;
    a.run.apply(m, &mut cfg);
    a.scorer.apply(m, &mut cfg);
    a.candidates.apply(m, &mut cfg);
    a.data.apply(m, &mut cfg);
    if explicit(m, "init_length_prior") {
        cfg.train.init_length_prior = a.init_length_prior;
    }
    if a.model.is_some() {
        cfg.paths.model_in = a.model.clone();
    }
    if a.bleu_floor.is_some() {
        cfg.train.bleu_floor = a.bleu_floor;
    }
    let cfg = finish(cfg)?;
    if cfg.paths.model_in.is_none() {
        eprintln!("no --model given; evaluating the untrained initial model");
    }

    let corpus = load_corpus(&cfg)?;
    let split = load_split(&cfg, &corpus)?;
    let test_prompts = corpus.select(&split.test_ids)?;
    let lexicon = cfg.lexicon()?;
    let scorer = cfg.scorer(&lexicon)?;
    let setup = rewrite_setup(&cfg, fit_unigram(&corpus, cfg.unigram_k)?, lexicon)?;
    let report = match cfg.precision {
        Precision::F64 => evaluate(
            &load_model::<f64>(&cfg)?,
            &test_prompts,
            &scorer,
            &setup,
            cfg.train.bleu_floor,
        )?,
        Precision::F32 => evaluate(
            &load_model::<f32>(&cfg)?,
            &test_prompts,
            &scorer,
            &setup,
            cfg.train.bleu_floor,
        )?,
    };

    let run = RunDir::open(&cfg, a.run.run_id.as_deref())?;
    run.write("eval_report.json", &json(&report))?;
    run.write("eval_rows.csv", &report.rows_csv())?;
    eprintln!("run {}: wrote {}", run.id, run.dir.display());
    let s = &report.summary;
    println!("model: {}", report.model_version);
    println!("prompts {}", s.prompts);
    println!("original  alignment={:.6}", s.mean_original_alignment);
    println!(
        "zero-shot alignment={:.6} bleu={:.4}",
        s.mean_zero_shot_alignment, s.mean_zero_shot_bleu
    );
    println!(
        "selected  alignment={:.6} bleu={:.4}",
        s.mean_selected_alignment, s.mean_selected_bleu
    );
    println!("improvement ratio {:.4}", s.improvement_ratio);
    Ok(())
}

fn gradcheck(a: &GradcheckArgs, m: &ArgMatches) -> Result<(), CliError> {
    let mut cfg = PipelineConfig::load(a.run.config.as_deref())?;
    a.run.apply(m, &mut cfg);
    a.scorer.apply(m, &mut cfg);
    if explicit(m, "init_length_prior") {
        cfg.train.init_length_prior = a.init_length_prior;
    }
    if explicit(m, "margin") {
        cfg.train.margin = a.margin;
    }
    if a.model.is_some() {
        cfg.paths.model_in = a.model.clone();
    }
    if a.corpus.is_some() {
        cfg.paths.corpus = a.corpus.clone();
    }
    if a.templates.is_some() {
        cfg.paths.templates = a.templates.clone();
    }
    let cfg = finish(cfg)?;
    if !(a.epsilon > 0.0 && a.epsilon.is_finite()) {
        return Err(CliError::Config("epsilon must be positive".into()));
    }

    let corpus = match &cfg.paths.corpus {
        Some(_) => load_corpus(&cfg)?,
        None => synth::user_corpus(300, a.seed),
    };
    let lexicon = cfg.lexicon()?;
    let scorer = cfg.scorer(&lexicon)?;
    let setup = rewrite_setup(&cfg, fit_unigram(&corpus, cfg.unigram_k)?, lexicon)?;
    let model = load_model::<f64>(&cfg)?;
    let mut pairs = build_pairs(
        corpus.prompts(),
        &scorer,
        &setup,
        cfg.train.tie_threshold,
        PairMode::All,
    )?;
    SplitMix64::new(a.seed).shuffle(&mut pairs);
    pairs.truncate(a.sample);
    let report = grad_check(
        &model,
        &pairs,
        cfg.train.margin,
        a.epsilon,
        a.kink_exclusion,
        a.seed,
    )?;

    let run = RunDir::open(&cfg, a.run.run_id.as_deref())?;
    run.write("gradcheck.json", &json(&report))?;
    eprintln!("run {}: wrote {}", run.id, run.dir.display());
    println!("{}", report.summary());
    if report.passes(a.tolerance) {
        Ok(())
    } else {
        Err(CliError::Numeric(format!(
            "gradient check did not pass tolerance {:e}",
            a.tolerance
        )))
    }
}

fn score(a: &ScoreArgs, m: &ArgMatches) -> Result<(), CliError> {
    let mut cfg = PipelineConfig::load(a.config.as_deref())?;
    a.scorer.apply(m, &mut cfg);
    let cfg = finish(cfg)?;
    let texts = input_lines(&read_input(a.input.as_deref())?);
    if texts.is_empty() {
        return Err(CliError::Config("no texts to score".into()));
    }
    let scorer = cfg.scorer(&cfg.lexicon()?)?;
    for (s, t) in score_batch(&scorer, &texts)?.iter().zip(&texts) {
        println!("{:.6}\t{t}", s.value());
    }
    Ok(())
}

fn synth_cmd(a: &SynthArgs, m: &ArgMatches) -> Result<(), CliError> {
    let mut cfg = PipelineConfig::load(a.run.config.as_deref())?;
    a.run.apply(m, &mut cfg);
    if a.lexicon.is_some() {
        cfg.paths.lexicon = a.lexicon.clone();
    }
    let cfg = finish(cfg)?;
    if a.users + a.experts == 0 {
        return Err(CliError::Config("nothing to generate".into()));
    }
    let lexicon = cfg.lexicon()?;
    let corpus = match (a.users, a.experts) {
        (u, 0) => synth::user_corpus(u, a.seed),
        (0, e) => synth::expert_corpus(e, a.seed, &lexicon),
        (u, e) => synth::mixed_corpus(u, e, a.seed, &lexicon),
    };
    let out = match &a.out {
        Some(p) => {
            write_file(p, &corpus.to_jsonl())?;
            p.clone()
        }
        None => {
            let run = RunDir::open(&cfg, a.run.run_id.as_deref())?;
            run.write("synthetic.jsonl", &corpus.to_jsonl())?
        }
    };
    println!("{} prompts written to {}", corpus.len(), out.display());
    Ok(())
}
