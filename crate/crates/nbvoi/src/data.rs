//! Delimited text input.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use nbvoi_core::ValidationSample;

use crate::error::CliError;
use crate::model::{score, ModelSpec};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Delimiter {
    /// Tab if the header line has a tab and no comma, else comma.
    #[default]
    Auto,
    Comma,
    Tab,
}

impl Delimiter {
    fn resolve(self, header_line: &str) -> u8 {
        match self {
            Delimiter::Comma => b',',
            Delimiter::Tab => b'\t',
            Delimiter::Auto if header_line.contains('\t') && !header_line.contains(',') => b'\t',
            Delimiter::Auto => b',',
        }
    }
}

/// A header plus string records, as read from disk.
#[derive(Debug, Clone)]
pub struct Table {
    pub path: PathBuf,
    pub delimiter: u8,
    pub headers: csv::StringRecord,
    pub records: Vec<csv::StringRecord>,
}

impl Table {
    pub fn read(path: &Path, delimiter: Delimiter) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(path, &text, delimiter)
    }

    pub fn parse(path: &Path, text: &str, delimiter: Delimiter) -> Result<Self, CliError> {
        let first = text.lines().next().unwrap_or("");
        if first.trim().is_empty() {
            return Err(CliError::data(path, None, None, "empty_file", "no header row"));
        }
        let delimiter = delimiter.resolve(first);
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let malformed = |e: csv::Error| {
            let row = e.position().map(|p| p.record() as usize);
            CliError::data(path, row, None, "malformed_row", e.to_string())
        };
        let headers = reader.headers().map_err(malformed)?.clone();
        let records = reader
            .records()
            .collect::<Result<Vec<_>, _>>()
            .map_err(malformed)?;
        if records.is_empty() {
            return Err(CliError::data(path, None, None, "empty_file", "no data rows"));
        }
        Ok(Self {
            path: path.to_owned(),
            delimiter,
            headers,
            records,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Result<usize, CliError> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| {
            CliError::data(
                &self.path,
                None,
                Some(name),
                "missing_column",
                format!("no column named '{name}'"),
            )
        })
    }

    pub fn outcomes(&self, name: &str) -> Result<Vec<bool>, CliError> {
        let j = self.column_index(name)?;
        self.cells(j)
            .map(|(row, cell)| match cell {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(CliError::data(
                    &self.path,
                    Some(row),
                    Some(name),
                    "non_binary_outcome",
                    format!("outcome '{other}' is not 0 or 1"),
                )),
            })
            .collect()
    }

    pub fn numbers(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let j = self.column_index(name)?;
        self.cells(j)
            .map(|(row, cell)| {
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        CliError::data(
                            &self.path,
                            Some(row),
                            Some(name),
                            "non_numeric",
                            format!("'{cell}' is not a finite number"),
                        )
                    })
            })
            .collect()
    }

    pub fn risks(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let values = self.numbers(name)?;
        check_risks(&self.path, Some(name), &values)?;
        Ok(values)
    }

    /// `(1-based row, cell)` pairs of column `j`.
    fn cells(&self, j: usize) -> impl Iterator<Item = (usize, &str)> + '_ {
        self.records
            .iter()
            .enumerate()
            .map(move |(i, r)| (i + 1, r.get(j).unwrap_or("")))
    }
}

fn check_risks(path: &Path, column: Option<&str>, risks: &[f64]) -> Result<(), CliError> {
    match risks.iter().position(|p| !(0.0..=1.0).contains(p)) {
        Some(i) => Err(CliError::data(
            path,
            Some(i + 1),
            column,
            "risk_out_of_range",
            format!("predicted risk {} is outside [0, 1]", risks[i]),
        )),
        None => Ok(()),
    }
}

/// Numeric predictor columns by name.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub n_rows: usize,
}

impl FeatureTable {
    pub fn from_table(table: &Table, names: &[&str]) -> Result<Self, CliError> {
        let columns = names
            .iter()
            .map(|name| table.numbers(name))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            names: names.iter().map(|s| (*s).to_owned()).collect(),
            columns,
            n_rows: table.len(),
        })
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|j| self.columns[j].as_slice())
    }
}

/// Where predicted risks come from.
#[derive(Debug, Clone, PartialEq)]
pub enum RiskSource {
    Column(String),
    Model(ModelSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSchema {
    pub outcome: String,
    pub risk: RiskSource,
}

/// Reads and validates a validation dataset.
pub fn load_dataset(
    path: &Path,
    schema: &DatasetSchema,
    delimiter: Delimiter,
) -> Result<ValidationSample, CliError> {
    let table = Table::read(path, delimiter)?;
    sample_from_table(&table, schema)
}

pub fn sample_from_table(
    table: &Table,
    schema: &DatasetSchema,
) -> Result<ValidationSample, CliError> {
    let outcomes = table.outcomes(&schema.outcome)?;
    let risks = match &schema.risk {
        RiskSource::Column(name) => table.risks(name)?,
        RiskSource::Model(spec) => {
            let features = FeatureTable::from_table(table, &spec.columns())?;
            let risks = score(&features, spec)?;
            check_risks(&table.path, None, &risks)?;
            risks
        }
    };
    Ok(ValidationSample::new(outcomes, risks)?)
}
