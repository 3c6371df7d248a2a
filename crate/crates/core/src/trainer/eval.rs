use serde::{Deserialize, Serialize};

use super::{RewriteSetup, TrainError};
use crate::alignment::{score_batch, ScorerSpec};
use crate::corpus::Prompt;
use crate::metrics::{sentence_bleu, BLEU_SIGNATURE};
use crate::rewriter::{generate_candidates, select_rewrite, RerankerModel};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub prompt_id: String,
    pub original: String,
    pub original_alignment: f64,
    /// First candidate in template order: the untrained zero-shot rewrite.
    pub zero_shot: String,
    pub zero_shot_alignment: f64,
    pub zero_shot_bleu: f64,
    pub selected: String,
    pub selected_template: String,
    pub selected_alignment: f64,
    pub selected_bleu: f64,
    pub floor_unmet: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub prompts: usize,
    pub mean_original_alignment: f64,
    pub mean_zero_shot_alignment: f64,
    pub mean_selected_alignment: f64,
    pub mean_zero_shot_bleu: f64,
    pub mean_selected_bleu: f64,
    /// `mean_selected_alignment / mean_original_alignment`.
    pub improvement_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model_version: String,
    pub rows: Vec<EvalRow>,
    pub summary: EvalSummary,
    pub bleu: String,
}

impl EvalReport {
    pub fn rows_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "prompt_id",
            "original_alignment",
            "zero_shot_alignment",
            "selected_alignment",
            "zero_shot_bleu",
            "selected_bleu",
            "selected_template",
            "selected",
        ])
        .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.prompt_id.clone(),
                format!("{:.6}", r.original_alignment),
                format!("{:.6}", r.zero_shot_alignment),
                format!("{:.6}", r.selected_alignment),
                format!("{:.4}", r.zero_shot_bleu),
                format!("{:.4}", r.selected_bleu),
                r.selected_template.clone(),
                r.selected.clone(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

/// Original vs. zero-shot vs. model-selected rewrites on held-out prompts.
pub fn evaluate<T: Scalar>(
    model: &RerankerModel<T>,
    prompts: &[Prompt],
    scorer: &ScorerSpec,
    setup: &RewriteSetup,
    bleu_floor: Option<f64>,
) -> Result<EvalReport, TrainError> {
    if prompts.is_empty() {
        return Err(TrainError::Config("no prompts to evaluate".into()));
    }
    let mut picks = Vec::with_capacity(prompts.len());
    for p in prompts {
        let cands =
            generate_candidates(p, &setup.templates, &setup.ctx.lexicon, setup.k, setup.seed)?;
        let sel = select_rewrite(model, p, &cands, bleu_floor, &setup.ctx)?;
        picks.push((cands[0].text.clone(), sel));
    }
    // One scorer call: [original, zero-shot, selected] per prompt.
    let texts: Vec<String> = prompts
        .iter()
        .zip(&picks)
        .flat_map(|(p, (zs, sel))| [p.text.clone(), zs.clone(), sel.candidate.text.clone()])
        .collect();
    let scores = score_batch(scorer, &texts).map_err(|source| TrainError::Score {
        prompt_id: "<evaluation batch>".into(),
        source,
    })?;

    let rows: Vec<EvalRow> = prompts
        .iter()
        .zip(picks)
        .enumerate()
        .map(|(i, (p, (zero_shot, sel)))| EvalRow {
            prompt_id: p.id.clone(),
            original: p.text.clone(),
            original_alignment: scores[3 * i].value(),
            zero_shot_bleu: sentence_bleu(&zero_shot, &p.text).score,
            zero_shot,
            zero_shot_alignment: scores[3 * i + 1].value(),
            selected: sel.candidate.text.clone(),
            selected_template: sel.candidate.template_id.clone(),
            selected_alignment: scores[3 * i + 2].value(),
            selected_bleu: sel.candidate.bleu_vs_source.unwrap_or(0.0),
            floor_unmet: sel.floor_unmet,
        })
        .collect();

    let n = rows.len() as f64;
    let mean = |f: fn(&EvalRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    let mean_original_alignment = mean(|r| r.original_alignment);
    let mean_selected_alignment = mean(|r| r.selected_alignment);
    let summary = EvalSummary {
        prompts: rows.len(),
        mean_original_alignment,
        mean_zero_shot_alignment: mean(|r| r.zero_shot_alignment),
        mean_selected_alignment,
        mean_zero_shot_bleu: mean(|r| r.zero_shot_bleu),
        mean_selected_bleu: mean(|r| r.selected_bleu),
        improvement_ratio: mean_selected_alignment / mean_original_alignment,
    };
    Ok(EvalReport {
        model_version: model.version.clone(),
        rows,
        summary,
        bleu: BLEU_SIGNATURE.to_string(),
    })
}
