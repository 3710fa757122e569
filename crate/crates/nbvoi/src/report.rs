//! Serializable result records and their CSV, JSON and table renderings.
//!
//! CSV and JSON print every float in shortest round-trip form; the human
//! table rounds to four decimals.

use std::io::Write;

use nbvoi_core::simlab::{SparseSideWarning, SweepResult};
use nbvoi_core::{DecisionCurve, NbDrawMatrix, Strategy, Threshold, ValidationSample, VoiResult};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct SampleSummary {
    pub n: usize,
    pub events: usize,
    pub prevalence: f64,
}

impl SampleSummary {
    pub fn of(sample: &ValidationSample) -> Self {
        Self {
            n: sample.len(),
            events: sample.events(),
            prevalence: sample.prevalence(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DcaRow {
    pub threshold: f64,
    pub nb_model: f64,
    pub nb_all: f64,
    pub nb_none: f64,
    pub model_lower: Option<f64>,
    pub model_upper: Option<f64>,
    pub all_lower: Option<f64>,
    pub all_upper: Option<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DcaReport {
    #[serde(flatten)]
    pub sample: SampleSummary,
    pub ci_level: f64,
    pub n_boot: usize,
    pub method: &'static str,
    pub seed: u64,
    pub rows: Vec<DcaRow>,
}

impl DcaReport {
    pub fn new(sample: &ValidationSample, curve: &DecisionCurve) -> Self {
        let rows = curve
            .rows
            .iter()
            .map(|r| DcaRow {
                threshold: r.estimate.threshold.value(),
                nb_model: r.estimate.nb_model,
                nb_all: r.estimate.nb_all,
                nb_none: r.estimate.nb_none,
                model_lower: r.model_ci.map(|i| i.lower),
                model_upper: r.model_ci.map(|i| i.upper),
                all_lower: r.all_ci.map(|i| i.lower),
                all_upper: r.all_ci.map(|i| i.upper),
                degenerate: r.degenerate,
            })
            .collect();
        Self {
            sample: SampleSummary::of(sample),
            ci_level: curve.ci_level,
            n_boot: curve.n_boot,
            method: nbvoi_core::voi::Method::from(curve.method).label(),
            seed: curve.seed,
            rows,
        }
    }
}

/// EVPI expressed in events per period for a population of `multiplier`
/// decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationImpact {
    pub multiplier: f64,
    /// True positives lost per period by deciding under current information.
    pub tp_equivalents: f64,
    /// The same loss as extra false positives, `tp · (1−z)/z`.
    pub fp_equivalents: f64,
}

pub fn population_impact(evpi: f64, t: Threshold, multiplier: f64) -> PopulationImpact {
    let tp_equivalents = evpi * multiplier;
    PopulationImpact {
        multiplier,
        tp_equivalents,
        fp_equivalents: tp_equivalents * t.odds_against(),
    }
}

pub fn strategy_label(s: Strategy) -> String {
    match s {
        Strategy::Model(0) => "model".into(),
        Strategy::Model(i) => format!("model_{i}"),
        Strategy::TreatAll => "treat_all".into(),
        Strategy::TreatNone => "treat_none".into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvpiRow {
    pub threshold: f64,
    pub method: &'static str,
    pub evpi: f64,
    pub evpi_unclamped: f64,
    pub enb_current: f64,
    pub enb_perfect: f64,
    pub enb_model: f64,
    pub enb_all: f64,
    pub p_useful: f64,
    pub best_strategy: String,
    pub r_evpi: Option<f64>,
    pub mc_se: Option<f64>,
    pub n_reps: Option<usize>,
    pub seed: Option<u64>,
    pub tp_equivalents: Option<f64>,
    pub fp_equivalents: Option<f64>,
}

impl EvpiRow {
    pub fn new(r: &VoiResult, population: Option<f64>) -> Self {
        let impact = population.map(|m| population_impact(r.evpi, r.threshold, m));
        Self {
            threshold: r.threshold.value(),
            method: r.method.label(),
            evpi: r.evpi,
            evpi_unclamped: r.evpi_unclamped,
            enb_current: r.enb_current,
            enb_perfect: r.enb_perfect,
            enb_model: r.enb_model,
            enb_all: r.enb_all,
            p_useful: r.p_useful,
            best_strategy: strategy_label(r.best_strategy),
            r_evpi: r.r_evpi,
            mc_se: r.mc_se,
            n_reps: r.n_reps,
            seed: r.seed,
            tp_equivalents: impact.map(|i| i.tp_equivalents),
            fp_equivalents: impact.map(|i| i.fp_equivalents),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvpiReport {
    #[serde(flatten)]
    pub sample: SampleSummary,
    pub population: Option<f64>,
    pub rows: Vec<EvpiRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub seed: u64,
    pub n_reps: usize,
    pub n_sims: usize,
    pub config_sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepCsvRow {
    pub size: usize,
    pub threshold: f64,
    pub method: &'static str,
    pub mean_evpi: f64,
    pub mc_se: f64,
    pub n_sims: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepWarningRecord {
    pub warning: &'static str,
    pub size: usize,
    pub threshold: f64,
    pub sims_affected: usize,
    pub min_side: usize,
}

impl From<&SparseSideWarning> for SweepWarningRecord {
    fn from(w: &SparseSideWarning) -> Self {
        Self {
            warning: "sparse_threshold_side",
            size: w.size,
            threshold: w.threshold.value(),
            sims_affected: w.sims_affected,
            min_side: w.min_side,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub provenance: Provenance,
    pub rows: Vec<SweepCsvRow>,
    pub warnings: Vec<SweepWarningRecord>,
}

impl SweepReport {
    pub fn new(provenance: Provenance, result: &SweepResult) -> Self {
        Self {
            provenance,
            rows: result
                .rows
                .iter()
                .map(|r| SweepCsvRow {
                    size: r.size,
                    threshold: r.threshold.value(),
                    method: r.method.label(),
                    mean_evpi: r.mean_evpi,
                    mc_se: r.mc_se,
                    n_sims: r.n_sims,
                })
                .collect(),
            warnings: result.warnings.iter().map(Into::into).collect(),
        }
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let p = &self.provenance;
        writeln!(out, "# {} {} (core {})", p.tool, p.version, p.core_version)?;
        writeln!(out, "# seed {}", p.seed)?;
        writeln!(out, "# n_sims {} n_reps {}", p.n_sims, p.n_reps)?;
        writeln!(out, "# config_sha256 {}", p.config_sha256)?;
        write_csv(out, &self.rows)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DrawRow {
    pub method: &'static str,
    pub threshold: f64,
    pub replicate: usize,
    pub nb_model: f64,
    pub nb_all: f64,
}

pub fn draw_rows(method: nbvoi_core::voi::Method, m: &NbDrawMatrix) -> impl Iterator<Item = DrawRow> + '_ {
    m.rows().enumerate().map(move |(l, row)| DrawRow {
        method: method.label(),
        threshold: m.threshold.value(),
        replicate: l,
        nb_model: row[0],
        nb_all: row[m.all_column()],
    })
}

pub fn write_csv<T: Serialize>(out: &mut dyn Write, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::Write(e),
        other => CliError::Write(std::io::Error::other(format!("{other:?}"))),
    }
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn fmt4(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |v| format!("{v:.4}"))
}

/// Fixed-width table, four decimals.
pub fn write_evpi_table(out: &mut dyn Write, report: &EvpiReport) -> Result<(), CliError> {
    let s = &report.sample;
    writeln!(
        out,
        "n = {}, events = {}, prevalence = {:.4}",
        s.n, s.events, s.prevalence
    )?;
    let population = report.population.is_some();
    write!(
        out,
        "{:>9}  {:<10}  {:>8}  {:>9}  {:>9}  {:>8}  {:<10}  {:>7}  {:>8}",
        "threshold", "method", "evpi", "enb_model", "enb_all", "p_useful", "best", "r_evpi", "mc_se"
    )?;
    if population {
        write!(out, "  {:>12}  {:>12}", "tp_per_pop", "fp_per_pop")?;
    }
    writeln!(out)?;
    for r in &report.rows {
        write!(
            out,
            "{:>9.4}  {:<10}  {:>8.4}  {:>9.4}  {:>9.4}  {:>8.4}  {:<10}  {:>7}  {:>8}",
            r.threshold,
            r.method,
            r.evpi,
            r.enb_model,
            r.enb_all,
            r.p_useful,
            r.best_strategy,
            fmt4(r.r_evpi),
            fmt4(r.mc_se),
        )?;
        if population {
            write!(
                out,
                "  {:>12.1}  {:>12.1}",
                r.tp_equivalents.unwrap_or(0.0),
                r.fp_equivalents.unwrap_or(0.0)
            )?;
        }
        writeln!(out)?;
    }
    Ok(())
}
