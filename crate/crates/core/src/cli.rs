//! The `gridobs` command line.
//!
//! Exit codes: 0 success, 1 validation failure, 2 I/O failure.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::ahp::{
    build_weight_tables, AggregationMode, DerivationOptions, Judgment, PriorityMethod, Questionnaire, WeightTables,
    DEFAULT_CR_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::ingest::{
    generate, load_inventory, load_snapshot, FixtureConfig, HistoryStore, MissingSignalPolicy, StoredScores,
};
use crate::observability::{
    compare_snapshots, score_by_area, score_by_station, weighted_observability, InvalidityPolicy,
    ObservabilityScore,
};
use crate::report::{
    ComparisonBody, OutputFormat, ReportBody, ReportDocument, ScopeKind, ScoresBody, WeightsBody,
};
use crate::service::{self, AppState};

/// Environment variable naming a JSON file with default settings.
pub const CONFIG_ENV: &str = "GRIDOBS_CONFIG";

#[derive(Debug, Parser)]
#[command(name = "gridobs", version, about = "Weighted observability of power-grid telemetry")]
pub struct Cli {
    /// JSON file with default settings (tables, policy, cr_threshold, method, aggregation, format).
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,

    /// Override the report timestamp (RFC 3339).
    #[arg(long, global = true)]
    pub generated_at: Option<DateTime<Utc>>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive or inspect weight tables.
    #[command(subcommand)]
    Weights(WeightsCommand),
    /// Score a snapshot against an inventory.
    Score(ScoreArgs),
    /// Compare two score sets.
    Compare(CompareArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Write a synthetic inventory and snapshot.
    Fixture(FixtureArgs),
}

#[derive(Debug, Subcommand)]
pub enum WeightsCommand {
    /// Derive M and N tables from questionnaire files.
    Derive(DeriveArgs),
    /// Print a tables file, or the bundled reference tables.
    Show(ShowArgs),
    /// Priorities and consistency of one matrix, as `/api/matrix/evaluate` returns them.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// JSON file with `items` and upper-triangle `judgments`.
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub method: Option<PriorityMethod>,
    #[arg(long)]
    pub cr_threshold: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct EvaluateRequest {
    items: Vec<String>,
    judgments: Vec<Judgment>,
    #[serde(default)]
    method: Option<PriorityMethod>,
    #[serde(default)]
    cr_threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    #[arg(required = true)]
    pub questionnaires: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_enum)]
    pub method: Option<PriorityMethod>,
    #[arg(long, value_enum)]
    pub aggregation: Option<AggregationMode>,
    #[arg(long)]
    pub cr_threshold: Option<f64>,
    /// Treat consistency warnings as errors.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct ShowArgs {
    #[arg(long)]
    pub tables: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub inventory: PathBuf,
    #[arg(long)]
    pub snapshot: PathBuf,
    /// Weight tables JSON; defaults to the bundled reference tables.
    #[arg(long)]
    pub tables: Option<PathBuf>,
    /// Invalidity policy as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub policy: Option<String>,
    #[arg(long, value_enum, default_value = "area")]
    pub by: ScopeKind,
    /// Fail instead of treating unreported signals as FAULTY.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Append the scores to this history store.
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// Id to store under; defaults to the snapshot file stem.
    #[arg(long)]
    pub snapshot_id: Option<String>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Score report files, or snapshot ids when --history is given.
    pub before: String,
    pub after: String,
    #[arg(long)]
    pub history: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    #[arg(long)]
    pub tables: Option<PathBuf>,
    #[arg(long, default_value = "questionnaires")]
    pub questionnaires: PathBuf,
    #[arg(long, requires = "snapshot")]
    pub inventory: Option<PathBuf>,
    #[arg(long, requires = "inventory")]
    pub snapshot: Option<PathBuf>,
    /// Serve the latest stored scores from this history store.
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    /// Generator config JSON.
    #[arg(long)]
    pub config_file: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Defaults read from the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub tables: Option<PathBuf>,
    pub policy: Option<InvalidityPolicy>,
    pub cr_threshold: Option<f64>,
    pub method: Option<PriorityMethod>,
    pub aggregation: Option<AggregationMode>,
    pub format: Option<OutputFormat>,
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Load {
            path: path.to_path_buf(),
            line: Some(e.line() as u64),
            reason: e.to_string(),
        })
    }
}

/// Parses arguments and runs, returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::io("stdout", e))
}

fn load_tables(path: Option<&Path>) -> Result<WeightTables> {
    match path {
        Some(p) => WeightTables::load(p),
        None => Ok(WeightTables::reference()),
    }
}

fn parse_policy(raw: &str) -> Result<InvalidityPolicy> {
    if raw.trim_start().starts_with('{') {
        InvalidityPolicy::from_json(raw)
    } else {
        let path = Path::new(raw);
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        InvalidityPolicy::from_json(&text)
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let settings = match &cli.config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    let stamp = cli.generated_at;
    match cli.command {
        Command::Weights(WeightsCommand::Derive(a)) => derive(a, &settings, stamp, out, err),
        Command::Weights(WeightsCommand::Show(a)) => {
            let tables = load_tables(a.tables.as_deref().or(settings.tables.as_deref()))?;
            let doc = ReportDocument::new(
                stamp.unwrap_or_else(Utc::now),
                ReportBody::Weights(WeightsBody::from_tables(&tables)),
            );
            write_out(out, &doc.render(a.format.or(settings.format).unwrap_or(OutputFormat::Text)))?;
            Ok(0)
        }
        Command::Weights(WeightsCommand::Evaluate(a)) => {
            let text = std::fs::read_to_string(&a.input).map_err(|e| Error::io(&a.input, e))?;
            let req: EvaluateRequest = serde_json::from_str(&text).map_err(|e| Error::Load {
                path: a.input.clone(),
                line: Some(e.line() as u64),
                reason: e.to_string(),
            })?;
            let method = a.method.or(req.method).or(settings.method).unwrap_or_default();
            let threshold = a
                .cr_threshold
                .or(req.cr_threshold)
                .or(settings.cr_threshold)
                .unwrap_or(DEFAULT_CR_THRESHOLD);
            let value = service::evaluate(req.items, &req.judgments, method, threshold)?;
            write_out(out, &format!("{value}\n"))?;
            Ok(0)
        }
        Command::Score(a) => score(a, &settings, stamp, out),
        Command::Compare(a) => compare(a, &settings, stamp, out),
        Command::Serve(a) => serve(a, &settings, err),
        Command::Fixture(a) => {
            let text = std::fs::read_to_string(&a.config_file).map_err(|e| Error::io(&a.config_file, e))?;
            let fixture = generate(&FixtureConfig::from_json(&text)?)?;
            fixture.write(&a.out)?;
            write_out(
                out,
                &format!(
                    "wrote {} signals to {}\n",
                    fixture.inventory.len(),
                    a.out.display()
                ),
            )?;
            Ok(0)
        }
    }
}

fn derive(
    a: DeriveArgs,
    settings: &Settings,
    stamp: Option<DateTime<Utc>>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let questionnaires = a
        .questionnaires
        .iter()
        .map(Questionnaire::load)
        .collect::<Result<Vec<_>>>()?;
    let options = DerivationOptions {
        method: a.method.or(settings.method).unwrap_or_default(),
        aggregation: a.aggregation.or(settings.aggregation).unwrap_or_default(),
        cr_threshold: a
            .cr_threshold
            .or(settings.cr_threshold)
            .unwrap_or(DEFAULT_CR_THRESHOLD),
    };
    let derivation = build_weight_tables(&questionnaires, &options)?;
    for w in &derivation.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    if a.strict && derivation.has_warnings() {
        let _ = writeln!(err, "error: {} warning(s) with --strict; tables not written", derivation.warnings.len());
        return Ok(1);
    }
    derivation.tables.save(&a.output)?;
    let doc = ReportDocument::new(
        stamp.unwrap_or_else(Utc::now),
        ReportBody::Weights(WeightsBody::from_derivation(&derivation)),
    );
    write_out(out, &doc.render(a.format.or(settings.format).unwrap_or(OutputFormat::Text)))?;
    Ok(0)
}

/// Loads inputs and produces the score report for `score` and `serve`.
pub fn score_report(
    inventory: &Path,
    snapshot: &Path,
    tables: &WeightTables,
    policy: &InvalidityPolicy,
    by: ScopeKind,
    missing: MissingSignalPolicy,
) -> Result<(ReportDocument, Vec<ObservabilityScore>, String)> {
    let inventory = load_inventory(inventory)?;
    let set = load_snapshot(snapshot, &inventory, missing)?;
    let scores = match by {
        ScopeKind::Area => score_by_area(&inventory.signals, &set.records, tables, policy)?,
        ScopeKind::Station => score_by_station(&inventory.signals, &set.records, tables, policy)?,
    };
    let network = weighted_observability(&inventory.signals, &set.records, tables, policy)?;
    let body = ScoresBody::new(by, Some(set.snapshot_id.clone()), Some(&network), &scores);
    Ok((
        ReportDocument::new(set.taken_at, ReportBody::Scores(body)),
        scores,
        set.snapshot_id,
    ))
}

fn score(a: ScoreArgs, settings: &Settings, stamp: Option<DateTime<Utc>>, out: &mut dyn Write) -> Result<i32> {
    let tables = load_tables(a.tables.as_deref().or(settings.tables.as_deref()))?;
    let policy = match &a.policy {
        Some(raw) => parse_policy(raw)?,
        None => settings.policy.clone().unwrap_or_default(),
    };
    let missing = if a.strict {
        MissingSignalPolicy::Error
    } else {
        MissingSignalPolicy::Faulty
    };
    let (mut doc, scores, stem) = score_report(&a.inventory, &a.snapshot, &tables, &policy, a.by, missing)?;
    if let Some(t) = stamp {
        doc.generated_at = t;
    }
    if let Some(dir) = &a.history {
        let mut store = HistoryStore::open(dir)?;
        let id = a.snapshot_id.clone().unwrap_or(stem);
        store.persist_scores(&id, doc.generated_at, &scores)?;
    }
    write_out(out, &doc.render(a.format.or(settings.format).unwrap_or(OutputFormat::Text)))?;
    Ok(0)
}

/// Reads a score set from a score report or a stored-scores document.
pub fn read_score_file(path: &Path) -> Result<(Vec<ObservabilityScore>, DateTime<Utc>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if let Ok(doc) = ReportDocument::from_json(&text) {
        return match doc.body {
            ReportBody::Scores(body) => Ok((body.scores(), doc.generated_at)),
            _ => Err(Error::Load {
                path: path.to_path_buf(),
                line: None,
                reason: "not a score report".into(),
            }),
        };
    }
    let stored: StoredScores = serde_json::from_str(&text).map_err(|e| Error::Load {
        path: path.to_path_buf(),
        line: Some(e.line() as u64),
        reason: format!("neither a score report nor stored scores: {e}"),
    })?;
    Ok((stored.scores, stored.taken_at))
}

fn compare(a: CompareArgs, settings: &Settings, stamp: Option<DateTime<Utc>>, out: &mut dyn Write) -> Result<i32> {
    let ((before, _), (after, after_at)) = match &a.history {
        Some(dir) => {
            let store = HistoryStore::open(dir)?;
            let b = store.load(&a.before)?;
            let f = store.load(&a.after)?;
            ((b.scores, b.taken_at), (f.scores, f.taken_at))
        }
        None => (
            read_score_file(Path::new(&a.before))?,
            read_score_file(Path::new(&a.after))?,
        ),
    };
    let report = compare_snapshots(&before, &after)?;
    let doc = ReportDocument::new(
        stamp.unwrap_or(after_at),
        ReportBody::Comparison(ComparisonBody::new(&a.before, &a.after, &report)),
    );
    write_out(out, &doc.render(a.format.or(settings.format).unwrap_or(OutputFormat::Text)))?;
    Ok(0)
}

fn serve(a: ServeArgs, settings: &Settings, err: &mut dyn Write) -> Result<i32> {
    let tables = load_tables(a.tables.as_deref().or(settings.tables.as_deref()))?;
    let latest = match (&a.inventory, &a.snapshot, &a.history) {
        (Some(inv), Some(snap), _) => {
            let policy = settings.policy.clone().unwrap_or_default();
            Some(score_report(inv, snap, &tables, &policy, ScopeKind::Area, MissingSignalPolicy::Faulty)?.0)
        }
        (_, _, Some(dir)) => HistoryStore::open(dir)?.latest()?.map(|s| {
            ReportDocument::new(
                s.taken_at,
                ReportBody::Scores(ScoresBody::new(ScopeKind::Area, Some(s.snapshot_id), None, &s.scores)),
            )
        }),
        _ => None,
    };
    let state = Arc::new(AppState::new(tables, a.questionnaires, latest));
    let _ = writeln!(err, "listening on http://{}", a.bind);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::io("tokio runtime", e))?;
    runtime.block_on(service::serve(a.bind, state))?;
    Ok(0)
}
