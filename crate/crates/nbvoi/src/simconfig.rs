//! TOML configuration for `nbvoi simulate`.
//!
//! ```toml
//! seed = 20240101
//! n_sims = 100
//! n_reps = 1000
//! methods = ["bayes", "ordinary", "asymptotic"]
//! thresholds = "0.1,0.2,0.3"
//! sizes = [250, 500, 1000, 2000]
//!
//! [synthetic]
//! intercept = -1.55
//! slopes = [0.77]
//! ```
//!
//! A `[subsample]` table (`data`, `outcome`, `risk` or `model`) replaces
//! `[synthetic]` to resample an existing dataset; its sizes default to a
//! doubling ladder from 250 up to the dataset size.

use std::path::{Path, PathBuf};

use nbvoi_core::simlab::{LogisticDgm, SweepConfig};
use nbvoi_core::voi::Method;
use nbvoi_core::Threshold;
use serde::Deserialize;

use crate::data::{load_dataset, DatasetSchema, Delimiter, RiskSource};
use crate::error::CliError;
use crate::grid::parse_grid;
use crate::model::ModelSpec;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Text(String),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSource {
    pub intercept: f64,
    pub slopes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsampleSource {
    /// Relative paths resolve against the config file's directory.
    pub data: PathBuf,
    #[serde(default = "default_outcome")]
    pub outcome: String,
    pub risk: Option<String>,
    pub model: Option<PathBuf>,
}

fn default_outcome() -> String {
    "y".into()
}

fn default_methods() -> Vec<String> {
    vec!["all".into()]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub seed: u64,
    #[serde(default = "default_sims")]
    pub n_sims: usize,
    #[serde(default = "default_reps")]
    pub n_reps: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    pub thresholds: GridSpec,
    pub sizes: Option<Vec<usize>>,
    pub synthetic: Option<SyntheticSource>,
    pub subsample: Option<SubsampleSource>,
}

fn default_sims() -> usize {
    100
}

fn default_reps() -> usize {
    1000
}

/// What a configuration resolves to.
pub enum Plan {
    Synthetic(LogisticDgm, SweepConfig),
    Subsample(nbvoi_core::ValidationSample, SweepConfig),
}

/// Parses a method list; `all` expands to every method.
pub fn parse_methods(labels: &[String]) -> Result<Vec<Method>, String> {
    let mut methods = Vec::new();
    for label in labels {
        let add: Vec<Method> = if label == "all" {
            Method::ALL.to_vec()
        } else {
            vec![Method::from_label(label).ok_or_else(|| format!("unknown method '{label}'"))?]
        };
        for m in add {
            if !methods.contains(&m) {
                methods.push(m);
            }
        }
    }
    Ok(methods)
}

impl SimulationConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_owned())
    }

    fn grid(&self) -> Result<Vec<Threshold>, CliError> {
        match &self.thresholds {
            GridSpec::Text(s) => parse_grid(s),
            GridSpec::Values(v) => {
                let joined = v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
                parse_grid(&joined)
            }
        }
    }

    /// Resolves data sources relative to `base` (the config's directory).
    pub fn plan(&self, path: &Path) -> Result<Plan, CliError> {
        let config_error = |message: String| CliError::Config {
            path: path.to_owned(),
            message,
        };
        let methods = parse_methods(&self.methods).map_err(config_error)?;
        let mut sweep = SweepConfig {
            sizes: self.sizes.clone().unwrap_or_default(),
            thresholds: self.grid()?,
            n_sims: self.n_sims,
            n_reps: self.n_reps,
            methods,
            seed: self.seed,
        };
        match (&self.synthetic, &self.subsample) {
            (Some(src), None) => {
                let dgm = LogisticDgm::new(src.intercept, src.slopes.clone())?;
                if self.sizes.is_none() {
                    sweep.sizes = vec![250, 500, 1000, 2000];
                }
                sweep.validate()?;
                Ok(Plan::Synthetic(dgm, sweep))
            }
            (None, Some(src)) => {
                let base = path.parent().unwrap_or(Path::new("."));
                let risk = match (&src.risk, &src.model) {
                    (Some(col), None) => RiskSource::Column(col.clone()),
                    (None, Some(model)) => RiskSource::Model(ModelSpec::load(&base.join(model))?),
                    (None, None) => RiskSource::Column("p".into()),
                    (Some(_), Some(_)) => {
                        return Err(config_error("give either 'risk' or 'model', not both".into()))
                    }
                };
                let schema = DatasetSchema {
                    outcome: src.outcome.clone(),
                    risk,
                };
                let data = load_dataset(&base.join(&src.data), &schema, Delimiter::Auto)?;
                if self.sizes.is_none() {
                    sweep.sizes = SweepConfig::doubling_sizes(data.len());
                }
                sweep.validate()?;
                Ok(Plan::Subsample(data, sweep))
            }
            _ => Err(config_error(
                "exactly one of [synthetic] or [subsample] is required".into(),
            )),
        }
    }
}
