//! File formats, command-line interface and a rayon-backed executor for
//! [`nbvoi_core`].

pub mod cli;
pub mod data;
pub mod error;
pub mod exec;
pub mod grid;
pub mod model;
pub mod report;
pub mod simconfig;

pub use data::{load_dataset, DatasetSchema, Delimiter, FeatureTable, RiskSource};
pub use error::CliError;
pub use exec::RayonExecutor;
pub use model::{score, ModelSpec};
pub use report::{population_impact, PopulationImpact};

pub use nbvoi_core as core;
