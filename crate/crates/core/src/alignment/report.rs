use std::collections::BTreeMap;

use serde::Serialize;

use super::{score_batch, ScoreError, ScorerSpec};
use crate::corpus::{Origin, PromptCorpus};
use crate::metrics::{
    correlation, information_density, normalize_minmax, CorrelationMethod, MetricsError,
    UnigramModel,
};

pub const REPORT_HEADER: [&str; 6] = [
    "prompt_id",
    "token_count",
    "mean_surprisal",
    "alignment",
    "norm_surprisal",
    "norm_alignment",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub prompt_id: String,
    pub origin: Origin,
    pub token_count: usize,
    pub mean_surprisal: f64,
    pub alignment: f64,
    pub norm_surprisal: f64,
    pub norm_alignment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OriginMeans {
    pub count: usize,
    pub mean_surprisal: f64,
    pub mean_alignment: f64,
    pub mean_token_count: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub rows: Vec<ReportRow>,
    pub pearson: f64,
    pub spearman: f64,
    pub normalization: &'static str,
    pub scorer: String,
    pub per_origin: BTreeMap<Origin, OriginMeans>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Per-prompt information density against alignment, with min-max normalised
/// columns and Pearson/Spearman coefficients over the raw values.
pub fn correlation_report(
    corpus: &PromptCorpus,
    scorer: &ScorerSpec,
    model: &UnigramModel,
) -> Result<CorrelationReport, ReportError> {
    if corpus.is_empty() {
        return Err(MetricsError::EmptyInput.into());
    }
    let texts: Vec<String> = corpus.prompts().iter().map(|p| p.text.clone()).collect();
    let scores = score_batch(scorer, &texts)?;
    let densities: Vec<_> = corpus
        .prompts()
        .iter()
        .map(|p| information_density(model, p))
        .collect();
    let surprisal: Vec<f64> = densities.iter().map(|d| d.mean_surprisal).collect();
    let alignment: Vec<f64> = scores.iter().map(|s| s.value()).collect();
    let pearson = correlation(&surprisal, &alignment, CorrelationMethod::Pearson)?;
    let spearman = correlation(&surprisal, &alignment, CorrelationMethod::Spearman)?;
    let norm_s = normalize_minmax(&surprisal);
    let norm_a = normalize_minmax(&alignment);

    let rows: Vec<ReportRow> = corpus
        .prompts()
        .iter()
        .enumerate()
        .map(|(i, p)| ReportRow {
            prompt_id: p.id.clone(),
            origin: p.origin,
            token_count: densities[i].token_count,
            mean_surprisal: surprisal[i],
            alignment: alignment[i],
            norm_surprisal: norm_s[i],
            norm_alignment: norm_a[i],
        })
        .collect();

    let mut per_origin: BTreeMap<Origin, OriginMeans> = BTreeMap::new();
    for row in &rows {
        let e = per_origin.entry(row.origin).or_insert(OriginMeans {
            count: 0,
            mean_surprisal: 0.0,
            mean_alignment: 0.0,
            mean_token_count: 0.0,
        });
        e.count += 1;
        e.mean_surprisal += row.mean_surprisal;
        e.mean_alignment += row.alignment;
        e.mean_token_count += row.token_count as f64;
    }
    for m in per_origin.values_mut() {
        let n = m.count as f64;
        m.mean_surprisal /= n;
        m.mean_alignment /= n;
        m.mean_token_count /= n;
    }

    Ok(CorrelationReport {
        rows,
        pearson,
        spearman,
        normalization: "minmax",
        scorer: scorer.describe(),
        per_origin,
    })
}

impl CorrelationReport {
    /// CSV body with the fixed header, then `#`-prefixed footer lines.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(REPORT_HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.prompt_id.clone(),
                r.token_count.to_string(),
                format!("{:.6}", r.mean_surprisal),
                format!("{:.6}", r.alignment),
                format!("{:.6}", r.norm_surprisal),
                format!("{:.6}", r.norm_alignment),
            ])
            .expect("in-memory write");
        }
        let mut out = String::from_utf8(w.into_inner().expect("flush")).expect("utf8");
        out.push_str(&format!("# pearson={:.6}\n", self.pearson));
        out.push_str(&format!("# spearman={:.6}\n", self.spearman));
        out.push_str(&format!("# normalization={}\n", self.normalization));
        out.push_str(&format!("# scorer={}\n", self.scorer));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::AudioneseLexicon;
    use crate::metrics::fit_unigram;

    #[test]
    fn single_prompt_is_zero_variance() {
        let c = PromptCorpus::parse("warm piano\n", Origin::User).unwrap();
        let m = fit_unigram(&c, 1.0).unwrap();
        let spec = ScorerSpec::oracle(AudioneseLexicon::default_music());
        let err = correlation_report(&c, &spec, &m).unwrap_err();
        assert_eq!(err.to_string(), "zero variance");
    }

    #[test]
    fn csv_shape() {
        let c = PromptCorpus::parse(
            "cupcake\nwarm piano piano\nsad harp solo with dreamy strings\nbumpy jazz\n",
            Origin::User,
        )
        .unwrap();
        let m = fit_unigram(&c, 1.0).unwrap();
        let spec = ScorerSpec::oracle(AudioneseLexicon::default_music());
        let r = correlation_report(&c, &spec, &m).unwrap();
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), REPORT_HEADER.join(","));
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 5);
        assert!(csv.contains("# spearman="));
        for row in &r.rows {
            assert!((0.0..=1.0).contains(&row.norm_alignment));
            assert!((0.0..=1.0).contains(&row.norm_surprisal));
        }
    }
}
