//! Central finite-difference check of `loss_gradient`.

use serde::Serialize;

use super::{loss_gradient, pair_loss, RankedPair};
use crate::rewriter::{RerankerModel, RewriteError, FEATURE_DIM};
use crate::rng::SplitMix64;
use crate::scalar::Scalar;

pub const COORDS_PER_PAIR: usize = 32;
pub const DEFAULT_KINK_EXCLUSION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheckReport {
    /// `None` when every pair was excluded as too close to the hinge kink.
    pub max_rel_error: Option<f64>,
    pub tested_pairs: usize,
    pub skipped_pairs: usize,
    pub coordinates: usize,
    pub epsilon: f64,
}

impl GradCheckReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_error.is_some_and(|e| e < tolerance)
    }

    pub fn summary(&self) -> String {
        match self.max_rel_error {
            Some(e) => format!(
                "max relative error {e:.3e} over {} pairs ({} coordinates, {} skipped near kink)",
                self.tested_pairs, self.coordinates, self.skipped_pairs
            ),
            None => format!(
                "no testable pairs ({} skipped near kink)",
                self.skipped_pairs
            ),
        }
    }
}

/// Floor on the relative-error denominator. Central differences of an exactly
/// zero derivative leave rounding noise of order `ulp(score) / epsilon`, which
/// would otherwise come out as a relative error of 1.
pub const ERROR_FLOOR: f64 = 1e-3;

fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(ERROR_FLOOR)
}

/// Compare the analytic gradient against central differences on
/// `COORDS_PER_PAIR` random weight coordinates per pair, drawn from the
/// coordinates where either pair member has a non-zero feature.
pub fn grad_check<T: Scalar>(
    model: &RerankerModel<T>,
    pairs: &[RankedPair<T>],
    margin: f64,
    epsilon: f64,
    kink_exclusion: f64,
    seed: u64,
) -> Result<GradCheckReport, RewriteError> {
    let m = T::of(margin);
    let mut rng = SplitMix64::new(seed);
    let mut work = model.clone();
    let mut report = GradCheckReport {
        max_rel_error: None,
        tested_pairs: 0,
        skipped_pairs: 0,
        coordinates: 0,
        epsilon,
    };
    for pair in pairs {
        let (s1, s2, _) = pair_loss(pair, model, m)?;
        let arg = -f64::from(pair.y) * (s1 - s2).as_f64() + margin;
        if arg.abs() < kink_exclusion {
            report.skipped_pairs += 1;
            continue;
        }
        let grad = loss_gradient(pair, model, m)?;
        let mut support: Vec<usize> = pair
            .a
            .features
            .entries()
            .chain(pair.b.features.entries())
            .map(|(i, _)| i)
            .collect();
        support.sort_unstable();
        support.dedup();

        for _ in 0..COORDS_PER_PAIR {
            let i = if support.is_empty() {
                rng.below(FEATURE_DIM)
            } else {
                support[rng.below(support.len())]
            };
            let w = model.weights[i];
            let up = w + T::of(epsilon);
            let down = w - T::of(epsilon);
            work.weights[i] = up;
            let (_, _, l_up) = pair_loss(pair, &work, m)?;
            work.weights[i] = down;
            let (_, _, l_down) = pair_loss(pair, &work, m)?;
            work.weights[i] = w;
            let numeric = (l_up - l_down).as_f64() / (up - down).as_f64();
            let err = relative_error(grad.get(i).as_f64(), numeric);
            report.max_rel_error = Some(report.max_rel_error.map_or(err, |e| e.max(err)));
            report.coordinates += 1;
        }
        report.tested_pairs += 1;
    }
    Ok(report)
}
