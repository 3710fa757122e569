//! Command-line interface.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nbvoi_core::simlab::{subsample_sweep_with, synthetic_sweep_with};
use nbvoi_core::voi::Method;
use nbvoi_core::{decision_curve_with, evpi_threshold_sweep_with, ResampleMethod, SweepSettings};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::data::{load_dataset, DatasetSchema, Delimiter, FeatureTable, RiskSource, Table};
use crate::error::CliError;
use crate::exec::RayonExecutor;
use crate::grid::parse_grid;
use crate::model::{score, ModelSpec};
use crate::report::{
    draw_rows, write_csv, write_evpi_table, write_json, DcaReport, EvpiReport, EvpiRow,
    Provenance, SampleSummary, SweepReport, SweepWarningRecord,
};
use crate::simconfig::{Plan, SimulationConfig};

#[derive(Debug, Parser)]
#[command(name = "nbvoi", version, about = "Net benefit, decision curves and validation EVPI")]
pub struct Cli {
    /// Worker threads (0 = one per CPU). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decision curve with percentile bootstrap intervals.
    Dca(DcaArgs),
    /// Expected value of perfect information across thresholds.
    Evpi(EvpiArgs),
    /// Sample-size sweep from a TOML configuration.
    Simulate(SimulateArgs),
    /// Predicted risks from a logistic model specification.
    Score(ScoreArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Delimited text file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Outcome column (0/1).
    #[arg(long, default_value = "y")]
    pub outcome: String,
    /// Predicted-risk column; ignored when --model is given.
    #[arg(long, default_value = "p")]
    pub risk: String,
    /// Score risks from this model specification instead of reading them.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Delimiter::Auto)]
    pub delimiter: Delimiter,
}

impl InputArgs {
    fn load(&self) -> Result<nbvoi_core::ValidationSample, CliError> {
        let risk = match &self.model {
            Some(path) => RiskSource::Model(ModelSpec::load(path)?),
            None => RiskSource::Column(self.risk.clone()),
        };
        let schema = DatasetSchema {
            outcome: self.outcome.clone(),
            risk,
        };
        load_dataset(&self.data, &schema, self.delimiter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BootMethod {
    Bayes,
    Ordinary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Bayes,
    Ordinary,
    Asymptotic,
    All,
}

impl MethodChoice {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::Bayes => vec![Method::BayesianBootstrap],
            MethodChoice::Ordinary => vec![Method::OrdinaryBootstrap],
            MethodChoice::Asymptotic => vec![Method::Asymptotic],
            MethodChoice::All => Method::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
    /// Human-readable, four decimals.
    Table,
}

#[derive(Debug, Args)]
pub struct DcaArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// `default`, a value, a list `a,b,c` or a range `start:stop:step`.
    #[arg(long, default_value = "default")]
    pub thresholds: String,
    /// Bootstrap replicates for the intervals (0 disables them).
    #[arg(long, default_value_t = 1000)]
    pub n_reps: usize,
    #[arg(long, value_enum, default_value_t = BootMethod::Ordinary)]
    pub method: BootMethod,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.95)]
    pub ci_level: f64,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub out: OutFormat,
}

#[derive(Debug, Args)]
pub struct EvpiArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "default")]
    pub thresholds: String,
    #[arg(long, default_value_t = 1000)]
    pub n_reps: usize,
    #[arg(long, value_enum, default_value_t = MethodChoice::All)]
    pub method: MethodChoice,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Decisions per period, for reporting EVPI as events per period.
    #[arg(long)]
    pub population: Option<u64>,
    /// Write every bootstrap draw to this CSV file.
    #[arg(long)]
    pub dump_draws: Option<PathBuf>,
    /// Warn when a Monte Carlo SE exceeds 10% of its EVPI.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum, default_value_t = OutFormat::Table)]
    pub out: OutFormat,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML sweep configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the configured replicate count.
    #[arg(long)]
    pub n_reps: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub out: OutFormat,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum, default_value_t = Delimiter::Auto)]
    pub delimiter: Delimiter,
    /// Name of the appended column.
    #[arg(long, default_value = "risk")]
    pub column: String,
}

fn emit_record(err: &mut dyn Write, value: serde_json::Value) {
    // a failing stderr leaves nowhere to report to
    let _ = writeln!(err, "{value}");
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let usage = CliError::Usage(e.to_string().trim().to_owned());
            emit_record(err, usage.to_record());
            return usage.exit_code();
        }
    };
    match run(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            emit_record(err, e.to_record());
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let exec = RayonExecutor::new(cli.threads)
        .map_err(|e| CliError::Usage(format!("cannot start {} threads: {e}", cli.threads)))?;
    match &cli.command {
        Command::Dca(args) => dca(&exec, args, out),
        Command::Evpi(args) => evpi(&exec, args, out, err),
        Command::Simulate(args) => simulate(&exec, args, out, err),
        Command::Score(args) => score_cmd(args, out),
    }
}

fn dca(exec: &RayonExecutor, args: &DcaArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sample = args.input.load()?;
    let grid = parse_grid(&args.thresholds)?;
    let method = match args.method {
        BootMethod::Bayes => ResampleMethod::Bayesian,
        BootMethod::Ordinary => ResampleMethod::Ordinary,
    };
    let curve = decision_curve_with(exec, &sample, &grid, args.n_reps, args.ci_level, method, args.seed)?;
    let report = DcaReport::new(&sample, &curve);
    match args.out {
        OutFormat::Json => write_json(out, &report),
        OutFormat::Csv | OutFormat::Table => write_csv(out, &report.rows),
    }
}

fn evpi(
    exec: &RayonExecutor,
    args: &EvpiArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let sample = args.input.load()?;
    let grid = parse_grid(&args.thresholds)?;
    let settings = SweepSettings {
        methods: args.method.methods(),
        n_reps: args.n_reps,
        seed: args.seed,
        keep_draws: args.dump_draws.is_some(),
    };
    let sweep = evpi_threshold_sweep_with(exec, &sample, &grid, &settings)?;
    let population = args.population.map(|m| m as f64);
    let rows: Vec<EvpiRow> = sweep
        .points
        .iter()
        .flat_map(|p| p.results.iter().map(|r| EvpiRow::new(r, population)))
        .collect();

    if args.strict {
        for r in &rows {
            if let Some(se) = r.mc_se {
                if se > 0.1 * r.evpi {
                    emit_record(
                        err,
                        json!({
                            "warning": "mc_se_exceeds_10pct_of_evpi",
                            "threshold": r.threshold,
                            "method": r.method,
                            "evpi": r.evpi,
                            "mc_se": se,
                        }),
                    );
                }
            }
        }
    }

    if let Some(path) = &args.dump_draws {
        let file = File::create(path).map_err(|source| CliError::Read {
            path: path.clone(),
            source,
        })?;
        let mut w = BufWriter::new(file);
        let rows = sweep
            .draws
            .iter()
            .flat_map(|(method, mats)| mats.iter().flat_map(move |m| draw_rows(*method, m)));
        write_csv(&mut w, rows)?;
        w.flush()?;
    }

    let report = EvpiReport {
        sample: SampleSummary::of(&sample),
        population,
        rows,
    };
    match args.out {
        OutFormat::Json => write_json(out, &report),
        OutFormat::Csv => write_csv(out, &report.rows),
        OutFormat::Table => write_evpi_table(out, &report),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn simulate(
    exec: &RayonExecutor,
    args: &SimulateArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let path: &Path = &args.config;
    let bytes = fs::read(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Config {
        path: path.to_owned(),
        message: "configuration is not UTF-8".into(),
    })?;
    let mut config = SimulationConfig::from_toml_str(&text).map_err(|message| CliError::Config {
        path: path.to_owned(),
        message,
    })?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(n_reps) = args.n_reps {
        config.n_reps = n_reps;
    }
    let result = match config.plan(path)? {
        Plan::Synthetic(dgm, sweep) => synthetic_sweep_with(exec, &dgm, &sweep)?,
        Plan::Subsample(data, sweep) => subsample_sweep_with(exec, &data, &sweep)?,
    };
    let provenance = Provenance {
        tool: "nbvoi",
        version: env!("CARGO_PKG_VERSION"),
        core_version: nbvoi_core::VERSION,
        seed: config.seed,
        n_reps: config.n_reps,
        n_sims: config.n_sims,
        config_sha256: sha256_hex(&bytes),
    };
    let report = SweepReport::new(provenance, &result);
    for w in &result.warnings {
        emit_record(err, json!(SweepWarningRecord::from(w)));
    }
    match args.out {
        OutFormat::Json => write_json(out, &report),
        OutFormat::Csv | OutFormat::Table => report.write_csv(out),
    }
}

fn score_cmd(args: &ScoreArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = ModelSpec::load(&args.model)?;
    let table = Table::read(&args.data, args.delimiter)?;
    let features = FeatureTable::from_table(&table, &spec.columns())?;
    let risks = score(&features, &spec)?;
    let mut w = csv::WriterBuilder::new()
        .delimiter(table.delimiter)
        .from_writer(out);
    let write_err = |e: csv::Error| CliError::Write(std::io::Error::other(e.to_string()));
    let mut header = table.headers.clone();
    header.push_field(&args.column);
    w.write_record(&header).map_err(write_err)?;
    for (record, risk) in table.records.iter().zip(&risks) {
        let mut record = record.clone();
        record.push_field(&risk.to_string());
        w.write_record(&record).map_err(write_err)?;
    }
    w.flush()?;
    Ok(())
}
