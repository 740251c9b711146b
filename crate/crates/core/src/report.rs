//! Report documents and their machine (JSON) and human (text, CSV)
//! renderings.
//!
//! Bodies keep full-precision numbers. JSON and CSV round to two decimals;
//! the ranking columns use whole percentages, both computed from the full
//! value so the renderings agree.

use std::fmt::Write as _;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize, Serializer};

use crate::ahp::{ContextConsistency, WeightDerivation, WeightTables};
use crate::error::{Error, Result};
use crate::ingest::format_timestamp;
use crate::observability::{ComparisonReport, Movement, ObservabilityScore};
use crate::taxonomy::{ComponentKind, QuantityKind};

pub fn round_to(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round() / scale
}

/// Whole percentage, rounding halves away from zero.
pub fn whole_percent(x: f64) -> i64 {
    x.round() as i64
}

fn ser_2dp<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_to(*x, 2))
}

// Signal weights are products of two 2-decimal table cells, so sums of them
// are exact at 4 decimals.
fn ser_4dp<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_to(*x, 4))
}

fn ser_2dp_vec<S: Serializer>(xs: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| round_to(*x, 2)))
}

fn ser_2dp_opt_vec<S: Serializer>(xs: &[Option<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.map(|v| round_to(v, 2))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Weights,
    Scores,
    Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportBody {
    Weights(WeightsBody),
    Scores(ScoresBody),
    Comparison(ComparisonBody),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub kind: ReportKind,
    pub generated_at: DateTime<Utc>,
    pub body: ReportBody,
}

impl ReportDocument {
    pub fn new(generated_at: DateTime<Utc>, body: ReportBody) -> Self {
        let kind = match body {
            ReportBody::Weights(_) => ReportKind::Weights,
            ReportBody::Scores(_) => ReportKind::Scores,
            ReportBody::Comparison(_) => ReportKind::Comparison,
        };
        ReportDocument {
            kind,
            generated_at,
            body,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ReportDocument =
            serde_json::from_str(s).map_err(|e| Error::Validation(format!("report: {e}")))?;
        let body_kind = ReportDocument::new(doc.generated_at, doc.body.clone()).kind;
        if body_kind != doc.kind {
            return Err(Error::Validation(format!(
                "report kind {:?} does not match its body",
                doc.kind
            )));
        }
        Ok(doc)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            OutputFormat::Text => {
                let mut out = format!(
                    "{} report generated {}\n\n",
                    match self.kind {
                        ReportKind::Weights => "Weights",
                        ReportKind::Scores => "Observability",
                        ReportKind::Comparison => "Comparison",
                    },
                    format_timestamp(&self.generated_at)
                );
                match &self.body {
                    ReportBody::Weights(b) => b.render_text(&mut out),
                    ReportBody::Scores(b) => b.render_text(&mut out),
                    ReportBody::Comparison(b) => b.render_text(&mut out),
                }
                out
            }
            OutputFormat::Csv => match &self.body {
                ReportBody::Weights(b) => b.render_csv(),
                ReportBody::Scores(b) => b.render_csv(),
                ReportBody::Comparison(b) => b.render_csv(),
            },
        }
    }
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

// ---------------------------------------------------------------- weights

/// A weight table laid out as rows × columns; `None` where the pair does
/// not apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableView {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    #[serde(serialize_with = "ser_2dp_opt_vec")]
    pub cells: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalWeightRow {
    pub component: ComponentKind,
    pub quantity: QuantityKind,
    #[serde(serialize_with = "ser_4dp")]
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsBody {
    pub m_table: TableView,
    pub n_table: TableView,
    /// Every applicable pair by descending `M × N` weight.
    pub signal_weights: Vec<SignalWeightRow>,
    #[serde(default)]
    pub consistency: Vec<ContextConsistency>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl WeightsBody {
    pub fn from_tables(tables: &WeightTables) -> Self {
        let m_table = TableView {
            name: "M".into(),
            columns: ComponentKind::ALL.iter().map(|c| c.to_string()).collect(),
            rows: QuantityKind::ALL
                .iter()
                .map(|q| TableRow {
                    label: q.to_string(),
                    cells: ComponentKind::ALL.iter().map(|c| tables.m(*c, *q).ok()).collect(),
                })
                .collect(),
        };
        let n_table = TableView {
            name: "N".into(),
            columns: QuantityKind::ALL.iter().map(|q| q.to_string()).collect(),
            rows: ComponentKind::ALL
                .iter()
                .map(|c| TableRow {
                    label: c.to_string(),
                    cells: QuantityKind::ALL.iter().map(|q| tables.n(*q, *c).ok()).collect(),
                })
                .collect(),
        };
        let mut signal_weights: Vec<SignalWeightRow> = tables
            .pair_weights()
            .into_iter()
            .map(|(component, quantity, weight)| SignalWeightRow {
                component,
                quantity,
                weight,
            })
            .collect();
        signal_weights.sort_by(|a, b| b.weight.total_cmp(&a.weight));
        WeightsBody {
            m_table,
            n_table,
            signal_weights,
            consistency: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn from_derivation(derivation: &WeightDerivation) -> Self {
        WeightsBody {
            consistency: derivation.consistency.clone(),
            warnings: derivation.warnings.clone(),
            ..WeightsBody::from_tables(&derivation.tables)
        }
    }

    fn render_table(view: &TableView, out: &mut String) {
        let label_width = view.rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(view.name.len());
        let col_width = view.columns.iter().map(|c| c.len()).max().unwrap_or(0).max(8);
        let _ = write!(out, "{:<label_width$}", view.name);
        for c in &view.columns {
            let _ = write!(out, "  {c:>col_width$}");
        }
        out.push('\n');
        for r in &view.rows {
            let _ = write!(out, "{:<label_width$}", r.label);
            for cell in &r.cells {
                match cell {
                    Some(v) => {
                        let _ = write!(out, "  {v:>col_width$.2}");
                    }
                    None => {
                        let _ = write!(out, "  {:>col_width$}", "-");
                    }
                }
            }
            out.push('\n');
        }
        out.push('\n');
    }

    fn render_text(&self, out: &mut String) {
        out.push_str("Quantity importance within each component\n");
        Self::render_table(&self.m_table, out);
        out.push_str("Component importance within each quantity\n");
        Self::render_table(&self.n_table, out);
        out.push_str("Signal weights (M x N)\n");
        for (k, row) in self.signal_weights.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:>3}  {:<26} {:<7} {:>10.2}",
                k + 1,
                row.component.to_string(),
                row.quantity.to_string(),
                row.weight
            );
        }
        if !self.consistency.is_empty() {
            out.push_str("\nConsistency\n");
            let _ = writeln!(
                out,
                "{:<50} {:<16} {:>10} {:>8} {:>8}  ok",
                "context", "expert", "lambda_max", "CI", "CR"
            );
            for c in &self.consistency {
                let _ = writeln!(
                    out,
                    "{:<50} {:<16} {:>10.4} {:>8.4} {:>8.4}  {}",
                    c.context.to_string(),
                    c.expert_id.as_deref().unwrap_or("(pooled)"),
                    c.report.lambda_max,
                    c.report.consistency_index,
                    c.report.consistency_ratio,
                    if c.report.acceptable { "yes" } else { "NO" }
                );
            }
        }
        if !self.warnings.is_empty() {
            out.push_str("\nWarnings\n");
            for w in &self.warnings {
                let _ = writeln!(out, "  {w}");
            }
        }
    }

    fn render_csv(&self) -> String {
        let mut rows = Vec::new();
        for view in [&self.m_table, &self.n_table] {
            for r in &view.rows {
                for (col, cell) in view.columns.iter().zip(&r.cells) {
                    if let Some(v) = cell {
                        rows.push(vec![
                            view.name.clone(),
                            r.label.clone(),
                            col.clone(),
                            format!("{:.2}", v),
                        ]);
                    }
                }
            }
        }
        for w in &self.signal_weights {
            rows.push(vec![
                "MxN".into(),
                w.component.to_string(),
                w.quantity.to_string(),
                format!("{:.4}", round_to(w.weight, 4)),
            ]);
        }
        csv_string(&["table", "row", "column", "weight"], rows)
    }
}

// ----------------------------------------------------------------- scores

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ScopeKind {
    Area,
    Station,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub scope: String,
    pub total_signals: u64,
    pub invalid_signals: u64,
    #[serde(serialize_with = "ser_2dp")]
    pub unweighted: f64,
    #[serde(serialize_with = "ser_2dp")]
    pub weighted: f64,
    #[serde(serialize_with = "ser_4dp")]
    pub total_weighted: f64,
    #[serde(serialize_with = "ser_4dp")]
    pub invalid_weighted: f64,
}

impl From<&ObservabilityScore> for ScoreRow {
    fn from(s: &ObservabilityScore) -> Self {
        ScoreRow {
            scope: s.scope.clone(),
            total_signals: s.total_raw,
            invalid_signals: s.invalid_raw,
            unweighted: s.unweighted,
            weighted: s.weighted,
            total_weighted: s.total_weighted,
            invalid_weighted: s.invalid_weighted,
        }
    }
}

impl From<&ScoreRow> for ObservabilityScore {
    fn from(r: &ScoreRow) -> Self {
        ObservabilityScore {
            scope: r.scope.clone(),
            total_raw: r.total_signals,
            invalid_raw: r.invalid_signals,
            unweighted: r.unweighted,
            total_weighted: r.total_weighted,
            invalid_weighted: r.invalid_weighted,
            weighted: r.weighted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankEntry {
    /// Competition rank on whole percentages: tied scopes share a rank.
    pub rank: usize,
    pub scope: String,
    pub percent: i64,
}

/// Scopes sharing a whole-percent unweighted score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieGroup {
    pub unweighted_percent: i64,
    pub scopes: Vec<String>,
    #[serde(serialize_with = "ser_2dp_vec")]
    pub weighted: Vec<f64>,
    /// The weighted index tells the tied scopes apart.
    pub separated_by_weighting: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoresBody {
    pub scope_kind: ScopeKind,
    pub snapshot_id: Option<String>,
    pub network: Option<ScoreRow>,
    /// Ordered by descending weighted score.
    pub scopes: Vec<ScoreRow>,
    pub without_weighting: Vec<RankEntry>,
    pub with_weighting: Vec<RankEntry>,
    pub unweighted_ties: Vec<TieGroup>,
}

fn ranking(scores: &[ObservabilityScore], value: impl Fn(&ObservabilityScore) -> f64) -> Vec<RankEntry> {
    let mut sorted: Vec<&ObservabilityScore> = scores.iter().collect();
    sorted.sort_by(|a, b| value(b).total_cmp(&value(a)).then_with(|| a.scope.cmp(&b.scope)));
    let percents: Vec<i64> = sorted.iter().map(|s| whole_percent(value(s))).collect();
    sorted
        .iter()
        .zip(&percents)
        .map(|(s, &p)| RankEntry {
            rank: 1 + percents.iter().filter(|&&q| q > p).count(),
            scope: s.scope.clone(),
            percent: p,
        })
        .collect()
}

impl ScoresBody {
    pub fn new(
        scope_kind: ScopeKind,
        snapshot_id: Option<String>,
        network: Option<&ObservabilityScore>,
        scores: &[ObservabilityScore],
    ) -> Self {
        let mut ordered = scores.to_vec();
        crate::observability::rank_by_weighted(&mut ordered);
        let without_weighting = ranking(scores, |s| s.unweighted);
        let with_weighting = ranking(scores, |s| s.weighted);

        let mut unweighted_ties = Vec::new();
        let mut k = 0;
        while k < without_weighting.len() {
            let p = without_weighting[k].percent;
            let group: Vec<&RankEntry> = without_weighting[k..].iter().take_while(|e| e.percent == p).collect();
            if group.len() > 1 {
                let scopes: Vec<String> = group.iter().map(|e| e.scope.clone()).collect();
                let weighted: Vec<f64> = scopes
                    .iter()
                    .map(|sc| scores.iter().find(|s| &s.scope == sc).expect("scope present").weighted)
                    .collect();
                let first = whole_percent(weighted[0]);
                let separated_by_weighting = weighted.iter().any(|w| whole_percent(*w) != first);
                unweighted_ties.push(TieGroup {
                    unweighted_percent: p,
                    scopes,
                    weighted,
                    separated_by_weighting,
                });
            }
            k += group.len();
        }

        ScoresBody {
            scope_kind,
            snapshot_id,
            network: network.map(ScoreRow::from),
            scopes: ordered.iter().map(ScoreRow::from).collect(),
            without_weighting,
            with_weighting,
            unweighted_ties,
        }
    }

    pub fn scores(&self) -> Vec<ObservabilityScore> {
        self.scopes.iter().map(ObservabilityScore::from).collect()
    }

    fn render_text(&self, out: &mut String) {
        let label = match self.scope_kind {
            ScopeKind::Area => "Area",
            ScopeKind::Station => "Station",
        };
        if let Some(id) = &self.snapshot_id {
            let _ = writeln!(out, "Snapshot {id}\n");
        }
        let w = self
            .scopes
            .iter()
            .chain(self.network.iter())
            .map(|s| s.scope.len())
            .max()
            .unwrap_or(0)
            .max(label.len());
        let _ = writeln!(out, "{:<w2$}   With weighting", "Without weighting", w2 = w + 16);
        let _ = writeln!(out, "{:>4}  {label:<w$}  {:>5}   {:>4}  {label:<w$}  {:>5}", "Rank", "OI", "Rank", "OI");
        for (a, b) in self.without_weighting.iter().zip(&self.with_weighting) {
            let _ = writeln!(
                out,
                "{:>4}  {:<w$}  {:>4}%   {:>4}  {:<w$}  {:>4}%",
                a.rank, a.scope, a.percent, b.rank, b.scope, b.percent
            );
        }
        out.push('\n');
        let _ = writeln!(
            out,
            "{label:<w$}  {:>8}  {:>8}  {:>10}  {:>10}",
            "signals", "invalid", "unweighted", "weighted"
        );
        let rows = self.scopes.iter().chain(self.network.iter());
        for s in rows {
            let _ = writeln!(
                out,
                "{:<w$}  {:>8}  {:>8}  {:>9.2}%  {:>9.2}%",
                s.scope, s.total_signals, s.invalid_signals, s.unweighted, s.weighted
            );
        }
        for t in &self.unweighted_ties {
            let detail: Vec<String> = t
                .scopes
                .iter()
                .zip(&t.weighted)
                .map(|(s, w)| format!("{s} {w:.2}%"))
                .collect();
            let _ = writeln!(
                out,
                "\nTie at {}% without weighting: {}; weighted {}{}",
                t.unweighted_percent,
                t.scopes.join(", "),
                detail.join(", "),
                if t.separated_by_weighting { " (separated by weighting)" } else { "" }
            );
        }
    }

    fn render_csv(&self) -> String {
        let rank_of = |entries: &[RankEntry], scope: &str| {
            entries.iter().find(|e| e.scope == scope).map(|e| e.rank).unwrap_or(0)
        };
        let rows = self
            .scopes
            .iter()
            .map(|s| {
                vec![
                    s.scope.clone(),
                    s.total_signals.to_string(),
                    s.invalid_signals.to_string(),
                    format!("{:.2}", round_to(s.unweighted, 2)),
                    format!("{:.2}", round_to(s.weighted, 2)),
                    rank_of(&self.without_weighting, &s.scope).to_string(),
                    rank_of(&self.with_weighting, &s.scope).to_string(),
                ]
            })
            .collect();
        csv_string(
            &[
                "scope",
                "total_signals",
                "invalid_signals",
                "unweighted",
                "weighted",
                "unweighted_rank",
                "weighted_rank",
            ],
            rows,
        )
    }
}

// ------------------------------------------------------------- comparison

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MovementCounts {
    pub improved: usize,
    pub unchanged: usize,
    pub declined: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    #[serde(serialize_with = "ser_2dp")]
    pub before: f64,
    #[serde(serialize_with = "ser_2dp")]
    pub after: f64,
    #[serde(serialize_with = "ser_2dp")]
    pub delta: f64,
    pub movement: Movement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub area: String,
    pub unweighted: DeltaRow,
    pub weighted: DeltaRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonBody {
    pub before: String,
    pub after: String,
    pub areas: Vec<ComparisonRow>,
    pub unweighted_summary: MovementCounts,
    pub weighted_summary: MovementCounts,
}

fn count(rows: &[ComparisonRow], pick: impl Fn(&ComparisonRow) -> Movement) -> MovementCounts {
    let mut c = MovementCounts::default();
    for r in rows {
        match pick(r) {
            Movement::Improved => c.improved += 1,
            Movement::Unchanged => c.unchanged += 1,
            Movement::Declined => c.declined += 1,
        }
    }
    c
}

impl ComparisonBody {
    pub fn new(before: impl Into<String>, after: impl Into<String>, report: &ComparisonReport) -> Self {
        let areas: Vec<ComparisonRow> = report
            .areas
            .iter()
            .map(|a| ComparisonRow {
                area: a.area.clone(),
                unweighted: DeltaRow {
                    before: a.unweighted.before,
                    after: a.unweighted.after,
                    delta: a.unweighted.delta,
                    movement: a.unweighted.movement,
                },
                weighted: DeltaRow {
                    before: a.weighted.before,
                    after: a.weighted.after,
                    delta: a.weighted.delta,
                    movement: a.weighted.movement,
                },
            })
            .collect();
        ComparisonBody {
            before: before.into(),
            after: after.into(),
            unweighted_summary: count(&areas, |r| r.unweighted.movement),
            weighted_summary: count(&areas, |r| r.weighted.movement),
            areas,
        }
    }

    fn render_text(&self, out: &mut String) {
        let _ = writeln!(out, "{} -> {}\n", self.before, self.after);
        let w = self.areas.iter().map(|a| a.area.len()).max().unwrap_or(0).max(4);
        let _ = writeln!(
            out,
            "{:<w$}  {:>8} {:>8} {:>7} {:<9}  {:>8} {:>8} {:>7} {:<9}",
            "Area", "unw.bef", "unw.aft", "delta", "", "wtd.bef", "wtd.aft", "delta", ""
        );
        let tag = |m: Movement| match m {
            Movement::Improved => "improved",
            Movement::Unchanged => "unchanged",
            Movement::Declined => "declined",
        };
        for a in &self.areas {
            let _ = writeln!(
                out,
                "{:<w$}  {:>8.2} {:>8.2} {:>+7.2} {:<9}  {:>8.2} {:>8.2} {:>+7.2} {:<9}",
                a.area,
                a.unweighted.before,
                a.unweighted.after,
                round_to(a.unweighted.delta, 2),
                tag(a.unweighted.movement),
                a.weighted.before,
                a.weighted.after,
                round_to(a.weighted.delta, 2),
                tag(a.weighted.movement),
            );
        }
        for (name, c) in [("without weighting", self.unweighted_summary), ("with weighting", self.weighted_summary)] {
            let _ = writeln!(
                out,
                "\n{name}: {} improved, {} unchanged, {} declined",
                c.improved, c.unchanged, c.declined
            );
        }
    }

    fn render_csv(&self) -> String {
        let mv = |m: Movement| {
            serde_json::to_value(m)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default()
        };
        let rows = self
            .areas
            .iter()
            .map(|a| {
                vec![
                    a.area.clone(),
                    format!("{:.2}", round_to(a.unweighted.before, 2)),
                    format!("{:.2}", round_to(a.unweighted.after, 2)),
                    format!("{:.2}", round_to(a.unweighted.delta, 2)),
                    mv(a.unweighted.movement),
                    format!("{:.2}", round_to(a.weighted.before, 2)),
                    format!("{:.2}", round_to(a.weighted.after, 2)),
                    format!("{:.2}", round_to(a.weighted.delta, 2)),
                    mv(a.weighted.movement),
                ]
            })
            .collect();
        csv_string(
            &[
                "area",
                "unweighted_before",
                "unweighted_after",
                "unweighted_delta",
                "unweighted_movement",
                "weighted_before",
                "weighted_after",
                "weighted_delta",
                "weighted_movement",
            ],
            rows,
        )
    }
}
