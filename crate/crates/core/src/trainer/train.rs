use serde::{Deserialize, Serialize};

use super::pairs::{pairs_for_prompt, score_prompts, PairMode, RankedPair, ScoredPrompt};
use super::{loss_gradient, pair_loss, RewriteSetup, TrainError};
use crate::alignment::ScorerSpec;
use crate::corpus::Prompt;
use crate::metrics::BLEU_SIGNATURE;
use crate::rewriter::{select_rewrite, RerankerModel};
use crate::rng::SplitMix64;
use crate::scalar::Scalar;

pub const DEFAULT_LENGTH_PRIOR: f64 = 32.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub margin: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Stop once the mean sentence BLEU of selected rewrites drops below this.
    pub bleu_stop: f64,
    /// Numbers of training prompts, strictly increasing.
    pub schedule: Vec<usize>,
    pub tie_threshold: f64,
    /// Optional BLEU floor applied when selecting rewrites.
    pub bleu_floor: Option<f64>,
    pub pair_mode: PairMode,
    /// Strength of the length prior in the initial model; 0 starts from zeros.
    pub init_length_prior: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 3e-4,
            margin: 0.1,
            epochs: 20,
            seed: 42,
            bleu_stop: 20.0,
            schedule: (1..=10).map(|i| i * 5).collect(),
            tie_threshold: 1e-6,
            bleu_floor: None,
            pair_mode: PairMode::All,
            init_length_prior: DEFAULT_LENGTH_PRIOR,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::Config(m.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return bad("margin must be non-negative");
        }
        if self.schedule.is_empty() || self.schedule[0] == 0 {
            return bad("schedule must be non-empty and start above zero");
        }
        if self.schedule.windows(2).any(|w| w[0] >= w[1]) {
            return bad("schedule must be strictly increasing");
        }
        if self.tie_threshold < 0.0 {
            return bad("tie_threshold must be non-negative");
        }
        if !(self.init_length_prior >= 0.0 && self.init_length_prior.is_finite()) {
            return bad("init_length_prior must be non-negative");
        }
        Ok(())
    }

    /// Model that training starts from.
    pub fn initial_model<T: Scalar>(&self) -> RerankerModel<T> {
        RerankerModel::with_length_prior("init", self.init_length_prior)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n_samples: usize,
    pub mean_alignment: f64,
    pub mean_bleu: f64,
    pub stopped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ScheduleExhausted,
    BleuGate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub model_version: String,
    pub curve: Vec<CurvePoint>,
    pub stop_reason: StopReason,
    /// Pairs trained on at each executed step.
    pub pair_counts: Vec<usize>,
    pub config: TrainConfig,
    pub bleu: String,
}

impl TrainReport {
    pub fn curve_csv(&self) -> String {
        curve_csv(&self.curve)
    }
}

pub fn curve_csv(curve: &[CurvePoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n_samples", "mean_alignment", "mean_bleu", "stopped"])
        .expect("in-memory write");
    for p in curve {
        w.write_record([
            p.n_samples.to_string(),
            format!("{:.6}", p.mean_alignment),
            format!("{:.4}", p.mean_bleu),
            p.stopped.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

/// Mean alignment and mean sentence BLEU (vs. the original) of the rewrites
/// the model selects for already-scored prompts.
pub fn selection_means<T: Scalar>(
    model: &RerankerModel<T>,
    scored: &[ScoredPrompt],
    setup: &RewriteSetup,
    bleu_floor: Option<f64>,
) -> Result<(f64, f64), TrainError> {
    let (mut align, mut bleu) = (0.0, 0.0);
    for s in scored {
        let sel = select_rewrite(model, &s.prompt, &s.candidates, bleu_floor, &setup.ctx)?;
        align += sel.candidate.alignment.map_or(0.0, |a| a.value());
        bleu += sel.candidate.bleu_vs_source.unwrap_or(0.0);
    }
    let n = scored.len().max(1) as f64;
    Ok((align / n, bleu / n))
}

fn sgd_epochs<T: Scalar>(
    model: &mut RerankerModel<T>,
    pairs: &[RankedPair<T>],
    config: &TrainConfig,
    step: usize,
) -> Result<(), TrainError> {
    let lr = T::of(config.learning_rate);
    let m = T::of(config.margin);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    for epoch in 0..config.epochs {
        let stream = (step * config.epochs + epoch) as u64;
        SplitMix64::derive(config.seed, stream).shuffle(&mut order);
        for &i in &order {
            let pair = &pairs[i];
            let (s1, s2, loss) = pair_loss(pair, model, m)?;
            if !loss.is_finite() {
                return Err(TrainError::NonFiniteLoss {
                    step,
                    epoch,
                    pair: format!("{} vs {}", pair.a.id, pair.b.id),
                    scores: (s1.as_f64(), s2.as_f64()),
                });
            }
            loss_gradient(pair, model, m)?.apply(model, lr);
        }
    }
    Ok(())
}

/// Margin-rank training over a growing prompt schedule with a BLEU gate.
///
/// Step `n` trains on the pairs of the first `n` prompts (continuing from the
/// previous step's model), then measures the selected rewrites of those same
/// prompts. When the mean BLEU falls below `bleu_stop` the point is recorded
/// as stopped and the previous step's model is returned.
pub fn train<T: Scalar>(
    model: RerankerModel<T>,
    prompts: &[Prompt],
    scorer: &ScorerSpec,
    setup: &RewriteSetup,
    config: &TrainConfig,
) -> Result<(RerankerModel<T>, TrainReport), TrainError> {
    config.validate()?;
    let needed = *config.schedule.last().expect("validated non-empty");
    if prompts.len() < needed {
        return Err(TrainError::NotEnoughPrompts {
            needed,
            got: prompts.len(),
        });
    }
    model.validate()?;

    let mut scored: Vec<ScoredPrompt> = Vec::new();
    let mut pairs: Vec<RankedPair<T>> = Vec::new();
    let mut current = model;
    let mut curve = Vec::new();
    let mut pair_counts = Vec::new();
    let mut stop_reason = StopReason::ScheduleExhausted;

    for (step, &n) in config.schedule.iter().enumerate() {
        let fresh = score_prompts(&prompts[scored.len()..n], scorer, setup)?;
        for s in &fresh {
            pairs.extend(pairs_for_prompt(
                s,
                config.tie_threshold,
                config.pair_mode,
                &setup.ctx,
            ));
        }
        scored.extend(fresh);

        let previous = current.clone();
        sgd_epochs(&mut current, &pairs, config, step)?;
        current.version = format!("reranker-s{}-n{}", config.seed, n);
        pair_counts.push(pairs.len());

        let (mean_alignment, mean_bleu) =
            selection_means(&current, &scored, setup, config.bleu_floor)?;
        let stopped = mean_bleu < config.bleu_stop;
        curve.push(CurvePoint {
            n_samples: n,
            mean_alignment,
            mean_bleu,
            stopped,
        });
        if stopped {
            current = previous;
            stop_reason = StopReason::BleuGate;
            break;
        }
    }

    let report = TrainReport {
        model_version: current.version.clone(),
        curve,
        stop_reason,
        pair_counts,
        config: config.clone(),
        bleu: BLEU_SIGNATURE.to_string(),
    };
    Ok((current, report))
}
