use std::io;
use std::path::PathBuf;

use serde_json::{json, Map, Value};

/// Exit status for malformed input, bad flags or invalid configuration.
pub const EXIT_INPUT: i32 = 2;
/// Exit status for numerical failures.
pub const EXIT_NUMERIC: i32 = 3;
/// Exit status for failures writing output.
pub const EXIT_OUTPUT: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: io::Error },

    #[error("{path}{}: {message}", row.map(|r| format!(", row {r}")).unwrap_or_default())]
    Data {
        path: PathBuf,
        /// 1-based data row (the header is row 0).
        row: Option<usize>,
        column: Option<String>,
        code: &'static str,
        message: String,
    },

    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] nbvoi_core::Error),

    #[error("writing output: {0}")]
    Write(#[from] io::Error),
}

impl CliError {
    pub(crate) fn data(
        path: impl Into<PathBuf>,
        row: Option<usize>,
        column: Option<&str>,
        code: &'static str,
        message: impl Into<String>,
    ) -> Self {
        CliError::Data {
            path: path.into(),
            row,
            column: column.map(str::to_owned),
            code,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numeric() => EXIT_NUMERIC,
            CliError::Write(_) => EXIT_OUTPUT,
            _ => EXIT_INPUT,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_NUMERIC => "numeric",
            EXIT_OUTPUT => "output",
            _ => "input",
        }
    }

    /// Short machine-readable identifier.
    pub fn code(&self) -> &'static str {
        use nbvoi_core::Error as E;
        match self {
            CliError::Read { .. } => "unreadable_file",
            CliError::Data { code, .. } => code,
            CliError::Config { .. } => "invalid_config",
            CliError::Usage(_) => "usage",
            CliError::Write(_) => "write_failed",
            CliError::Core(e) => match e {
                E::EmptySample => "empty_sample",
                E::LengthMismatch { .. } => "length_mismatch",
                E::RiskOutOfRange { .. } => "risk_out_of_range",
                E::ThresholdOutOfRange { .. } => "threshold_out_of_range",
                E::UnorderedGrid => "invalid_grid",
                E::WeightLength { .. } => "weight_length",
                E::TooFewRows { .. } => "too_few_rows",
                E::TooFewReplicates { .. } => "too_few_replicates",
                E::SingleClass => "single_class",
                E::SubsampleTooLarge { .. } => "subsample_too_large",
                E::InvalidParameter(_) => "invalid_parameter",
                E::NotPositiveSemiDefinite { .. } => "not_positive_semidefinite",
                E::NonFinite(_) => "non_finite",
            },
        }
    }

    /// One-line JSON record for standard error.
    pub fn to_record(&self) -> Value {
        let mut rec = Map::new();
        rec.insert("error".into(), json!(self.code()));
        rec.insert("kind".into(), json!(self.kind()));
        rec.insert("exit_code".into(), json!(self.exit_code()));
        rec.insert("message".into(), json!(self.to_string()));
        match self {
            CliError::Read { path, .. } | CliError::Config { path, .. } => {
                rec.insert("path".into(), json!(path.display().to_string()));
            }
            CliError::Data {
                path, row, column, ..
            } => {
                rec.insert("path".into(), json!(path.display().to_string()));
                if let Some(row) = row {
                    rec.insert("row".into(), json!(row));
                }
                if let Some(column) = column {
                    rec.insert("column".into(), json!(column));
                }
            }
            _ => {}
        }
        Value::Object(rec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_kind() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_INPUT);
        let numeric = CliError::Core(nbvoi_core::Error::NonFinite("x"));
        assert_eq!(numeric.exit_code(), EXIT_NUMERIC);
        assert_eq!(numeric.kind(), "numeric");
        let psd = CliError::Core(nbvoi_core::Error::NotPositiveSemiDefinite {
            min_eigenvalue: -1.0,
        });
        assert_eq!(psd.exit_code(), EXIT_INPUT);
    }

    #[test]
    fn data_record_carries_row_and_column() {
        let e = CliError::data("d.csv", Some(3), Some("p"), "risk_out_of_range", "risk 1.2");
        let rec = e.to_record();
        assert_eq!(rec["row"], 3);
        assert_eq!(rec["column"], "p");
        assert_eq!(rec["error"], "risk_out_of_range");
        assert_eq!(e.to_string(), "d.csv, row 3: risk 1.2");
    }
}
