//! Logistic model specifications and scoring.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use nbvoi_core::simlab::inv_logit;
use serde::{Deserialize, Serialize};

use crate::data::FeatureTable;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    #[default]
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub column: String,
    pub coefficient: f64,
}

/// `risk = inv_logit(intercept + Σ coefficient·column)`.
///
/// ```toml
/// intercept = -2.084
///
/// [[terms]]
/// column = "age"
/// coefficient = 0.078
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub intercept: f64,
    #[serde(default)]
    pub link: Link,
    #[serde(default)]
    pub terms: Vec<Term>,
}

impl ModelSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        let spec: Self = toml::from_str(text).map_err(|e| e.message().to_owned())?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|message| CliError::Config {
            path: path.to_owned(),
            message,
        })
    }

    fn validate(&self) -> Result<(), String> {
        if !self.intercept.is_finite() {
            return Err("intercept must be finite".into());
        }
        let mut seen = HashSet::new();
        for term in &self.terms {
            if !term.coefficient.is_finite() {
                return Err(format!("coefficient of '{}' must be finite", term.column));
            }
            if !seen.insert(term.column.as_str()) {
                return Err(format!("column '{}' appears twice", term.column));
            }
        }
        Ok(())
    }

    pub fn columns(&self) -> Vec<&str> {
        self.terms.iter().map(|t| t.column.as_str()).collect()
    }
}

/// Predicted risks for every row of `features`.
pub fn score(features: &FeatureTable, spec: &ModelSpec) -> Result<Vec<f64>, CliError> {
    let columns = spec
        .terms
        .iter()
        .map(|t| {
            features.column(&t.column).ok_or_else(|| {
                CliError::Usage(format!("feature table lacks model column '{}'", t.column))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    (0..features.n_rows)
        .map(|i| {
            let eta = spec
                .terms
                .iter()
                .zip(&columns)
                .fold(spec.intercept, |acc, (t, col)| acc + t.coefficient * col[i]);
            let risk = inv_logit(eta);
            if risk.is_nan() {
                Err(nbvoi_core::Error::NonFinite("linear predictor").into())
            } else {
                Ok(risk)
            }
        })
        .collect()
}
