use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FeatureVector, RewriteError, FEATURE_DIM, TOKEN_COUNT_INDEX};
use crate::scalar::Scalar;

/// Linear scorer `w · φ + b` over `FEATURE_DIM` features.
///
/// Persisted as `{"version", "bias", "weights": [FEATURE_DIM reals]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RerankerModel<T> {
    pub version: String,
    pub bias: T,
    pub weights: Vec<T>,
}

impl<T: Scalar> RerankerModel<T> {
    pub fn zeros(version: impl Into<String>) -> Self {
        Self {
            version: version.into(),
            bias: T::zero(),
            weights: vec![T::zero(); FEATURE_DIM],
        }
    }

    /// Starting point that prefers rewrites close in length to the source:
    /// a negative weight on the token-count scalar, zeros elsewhere.
    pub fn with_length_prior(version: impl Into<String>, strength: f64) -> Self {
        let mut m = Self::zeros(version);
        m.weights[TOKEN_COUNT_INDEX] = T::of(-strength);
        m
    }

    pub fn validate(&self) -> Result<(), RewriteError> {
        if self.weights.len() != FEATURE_DIM {
            return Err(RewriteError::DimensionMismatch {
                expected: FEATURE_DIM,
                got: self.weights.len(),
            });
        }
        if !self.bias.is_finite() || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(RewriteError::NonFiniteWeights);
        }
        Ok(())
    }

    /// Multiply weights and bias by `c`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            version: self.version.clone(),
            bias: self.bias * c,
            weights: self.weights.iter().map(|&w| w * c).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, RewriteError> {
        let m: Self =
            serde_json::from_str(json).map_err(|e| RewriteError::ModelFile(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), RewriteError> {
        let path = path.as_ref();
        fs::write(path, self.to_json())
            .map_err(|e| RewriteError::ModelFile(format!("{}: {e}", path.display())))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RewriteError> {
        let path = path.as_ref();
        let json = fs::read_to_string(path)
            .map_err(|e| RewriteError::ModelFile(format!("{}: {e}", path.display())))?;
        Self::from_json(&json)
    }
}

/// `w · φ + b`; errors if the result is not finite.
pub fn rerank_score<T: Scalar>(
    model: &RerankerModel<T>,
    features: &FeatureVector<T>,
) -> Result<T, RewriteError> {
    if model.weights.len() != FEATURE_DIM {
        return Err(RewriteError::DimensionMismatch {
            expected: FEATURE_DIM,
            got: model.weights.len(),
        });
    }
    let s = features.dot(&model.weights) + model.bias;
    if s.is_finite() {
        Ok(s)
    } else {
        Err(RewriteError::NumericOverflow)
    }
}
