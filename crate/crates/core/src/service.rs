//! JSON-over-HTTP access to the engine for the elicitation front end and
//! for scripts.
//!
//! | method | path                     | purpose                               |
//! |--------|--------------------------|---------------------------------------|
//! | POST   | `/api/matrix/evaluate`   | priorities and consistency of a matrix |
//! | GET    | `/api/taxonomy`          | component → quantity applicability    |
//! | POST   | `/api/questionnaires`    | validate and store a questionnaire    |
//! | GET    | `/api/tables`            | current weight tables                 |
//! | GET    | `/api/reports/latest`    | last score report, if any             |
//!
//! Errors are JSON `{"error": ..., "fields": [{"field": ..., "message": ...}]}`
//! with status 400 for bad input and 404 for unknown routes.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::{json, Value};
use tokio::sync::Mutex;

use crate::ahp::{
    consistency_with_threshold, derive_with, ComparisonContext, ComparisonMatrix, Judgment, PriorityMethod,
    Questionnaire, WeightTables, DEFAULT_CR_THRESHOLD, MAX_SIZE,
};
use crate::error::{Error, Result};
use crate::report::ReportDocument;
use crate::taxonomy::{applicable_pairs, ComponentKind, ValidityTag};

pub struct AppState {
    pub tables: WeightTables,
    pub questionnaire_dir: PathBuf,
    pub latest_report: Option<ReportDocument>,
    write_lock: Mutex<()>,
}

impl AppState {
    pub fn new(tables: WeightTables, questionnaire_dir: impl Into<PathBuf>, latest_report: Option<ReportDocument>) -> Self {
        AppState {
            tables,
            questionnaire_dir: questionnaire_dir.into(),
            latest_report,
            write_lock: Mutex::new(()),
        }
    }
}

#[derive(Debug, Serialize)]
struct FieldError {
    field: String,
    message: String,
}

struct ApiError {
    status: StatusCode,
    error: String,
    fields: Vec<FieldError>,
}

impl ApiError {
    fn bad_request(error: impl Into<String>, fields: Vec<FieldError>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            error: error.into(),
            fields,
        }
    }

    fn field(error: &str, field: &str, message: impl Into<String>) -> Self {
        ApiError::bad_request(
            error,
            vec![FieldError {
                field: field.into(),
                message: message.into(),
            }],
        )
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(json!({"error": self.error, "fields": self.fields})),
        )
            .into_response()
    }
}

type ApiResult = std::result::Result<Response, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/matrix/evaluate", post(evaluate_matrix))
        .route("/api/taxonomy", get(taxonomy))
        .route("/api/questionnaires", post(store_questionnaire))
        .route("/api/tables", get(tables))
        .route("/api/reports/latest", get(latest_report))
        .fallback(not_found)
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| Error::io(addr.to_string(), e))?;
    serve_on(listener, state).await
}

pub async fn serve_on(listener: tokio::net::TcpListener, state: Arc<AppState>) -> Result<()> {
    let addr = listener
        .local_addr()
        .map_err(|e| Error::io("listener", e))?;
    axum::serve(listener, router(state))
        .await
        .map_err(|e| Error::io(addr.to_string(), e))
}

async fn not_found() -> Response {
    (StatusCode::NOT_FOUND, Json(json!({"error": "not found", "fields": []}))).into_response()
}

fn parse_body(body: &Bytes) -> std::result::Result<Value, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::field("malformed body", "$", e.to_string()))
}

/// Field-level validation of an evaluate request.
fn parse_evaluate(body: &Value) -> std::result::Result<(Vec<String>, Vec<Judgment>, PriorityMethod, f64), ApiError> {
    let mut fields = Vec::new();
    let mut push = |field: String, message: &str| {
        fields.push(FieldError {
            field,
            message: message.into(),
        })
    };
    let mut items = Vec::new();
    match body.get("items").and_then(Value::as_array) {
        None => push("items".into(), "required array of item labels"),
        Some(arr) => {
            for (k, v) in arr.iter().enumerate() {
                match v.as_str() {
                    Some(s) => items.push(s.to_string()),
                    None => push(format!("items[{k}]"), "must be a string"),
                }
            }
        }
    }
    let mut judgments = Vec::new();
    match body.get("judgments").and_then(Value::as_array) {
        None => push("judgments".into(), "required array of {row, col, value}"),
        Some(arr) => {
            for (k, j) in arr.iter().enumerate() {
                let row = j.get("row").and_then(Value::as_u64);
                let col = j.get("col").and_then(Value::as_u64);
                let value = j.get("value").and_then(Value::as_f64);
                if row.is_none() {
                    push(format!("judgments[{k}].row"), "must be a non-negative integer");
                }
                if col.is_none() {
                    push(format!("judgments[{k}].col"), "must be a non-negative integer");
                }
                match value {
                    None => push(format!("judgments[{k}].value"), "must be a number"),
                    Some(v) if !(v.is_finite() && v > 0.0) => {
                        push(format!("judgments[{k}].value"), "must be a positive finite ratio")
                    }
                    _ => {}
                }
                if let (Some(r), Some(c), Some(v)) = (row, col, value) {
                    judgments.push(Judgment {
                        row: r as usize,
                        col: c as usize,
                        value: v,
                    });
                }
            }
        }
    }
    let method = match body.get("method") {
        None | Some(Value::Null) => PriorityMethod::GeometricMean,
        Some(v) => match serde_json::from_value::<PriorityMethod>(v.clone()) {
            Ok(m) => m,
            Err(_) => {
                push("method".into(), "expected \"geometric-mean\" or \"eigenvector\"");
                PriorityMethod::GeometricMean
            }
        },
    };
    let threshold = match body.get("cr_threshold") {
        None | Some(Value::Null) => DEFAULT_CR_THRESHOLD,
        Some(v) => match v.as_f64() {
            Some(t) if t >= 0.0 => t,
            _ => {
                push("cr_threshold".into(), "must be a non-negative number");
                DEFAULT_CR_THRESHOLD
            }
        },
    };
    if !fields.is_empty() {
        return Err(ApiError::bad_request("invalid matrix request", fields));
    }
    if items.len() > MAX_SIZE {
        return Err(ApiError::field(
            "invalid matrix request",
            "items",
            format!("at most {MAX_SIZE} items are supported"),
        ));
    }
    Ok((items, judgments, method, threshold))
}

/// Priorities and consistency for one matrix, serialized exactly as the
/// service returns it.
pub fn evaluate(
    items: Vec<String>,
    judgments: &[Judgment],
    method: PriorityMethod,
    cr_threshold: f64,
) -> Result<Value> {
    let matrix = ComparisonMatrix::from_judgments(items, judgments)?;
    let priorities = derive_with(&matrix, method);
    let report = consistency_with_threshold(&matrix, &priorities, cr_threshold)?;
    Ok(json!({
        "items": priorities.items,
        "weights": priorities.weights,
        "lambda_max": report.lambda_max,
        "ci": report.consistency_index,
        "cr": report.consistency_ratio,
        "acceptable": report.acceptable,
    }))
}

async fn evaluate_matrix(body: Bytes) -> ApiResult {
    let value = parse_body(&body)?;
    let (items, judgments, method, threshold) = parse_evaluate(&value)?;
    let out = evaluate(items, &judgments, method, threshold)
        .map_err(|e| ApiError::field("invalid matrix", "judgments", e.to_string()))?;
    Ok(Json(out).into_response())
}

/// The applicability relation as served by `/api/taxonomy`.
pub fn taxonomy_json() -> Value {
    let pairs: Vec<Value> = applicable_pairs()
        .into_iter()
        .map(|(c, q)| json!({"component": c, "quantity": q}))
        .collect();
    let components: serde_json::Map<String, Value> = ComponentKind::ALL
        .iter()
        .map(|c| (c.to_string(), json!(c.quantities())))
        .collect();
    let contexts: Vec<Value> = ComparisonContext::all()
        .into_iter()
        .map(|c| json!({"context": c, "items": c.items()}))
        .collect();
    json!({
        "pairs": pairs,
        "components": components,
        "contexts": contexts,
        "tags": ValidityTag::ALL,
    })
}

async fn taxonomy() -> Response {
    Json(taxonomy_json()).into_response()
}

async fn tables(State(state): State<Arc<AppState>>) -> Response {
    Json(state.tables.clone()).into_response()
}

async fn latest_report(State(state): State<Arc<AppState>>) -> Response {
    match &state.latest_report {
        Some(r) => Json(r.clone()).into_response(),
        None => (
            StatusCode::NOT_FOUND,
            Json(json!({"error": "no report available", "fields": []})),
        )
            .into_response(),
    }
}

fn next_questionnaire_id(dir: &std::path::Path) -> std::io::Result<String> {
    let mut max = 0u32;
    if dir.exists() {
        for entry in std::fs::read_dir(dir)? {
            let name = entry?.file_name().to_string_lossy().into_owned();
            if let Some(n) = name
                .strip_prefix("q-")
                .and_then(|s| s.strip_suffix(".json"))
                .and_then(|s| s.parse::<u32>().ok())
            {
                max = max.max(n);
            }
        }
    }
    Ok(format!("q-{:04}", max + 1))
}

async fn store_questionnaire(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let value = parse_body(&body)?;
    let questionnaire: Questionnaire = serde_json::from_value(value)
        .map_err(|e| ApiError::field("malformed questionnaire", "$", e.to_string()))?;
    let parsed = questionnaire
        .matrices_by_context()
        .map_err(|e| ApiError::field("invalid questionnaire", "matrices", e.to_string()))?;
    let missing = questionnaire.missing_contexts();
    if !missing.is_empty() {
        return Err(ApiError::bad_request(
            "incomplete questionnaire",
            missing
                .iter()
                .map(|c| FieldError {
                    field: "matrices".into(),
                    message: format!("missing context {c}"),
                })
                .collect(),
        ));
    }
    let oversized: Vec<FieldError> = parsed
        .iter()
        .filter(|(_, m)| m.len() > MAX_SIZE)
        .map(|(c, _)| FieldError {
            field: "matrices".into(),
            message: format!("{c} has more than {MAX_SIZE} items"),
        })
        .collect();
    if !oversized.is_empty() {
        return Err(ApiError::bad_request("invalid questionnaire", oversized));
    }

    let _guard = state.write_lock.lock().await;
    let io_err = |e: std::io::Error| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        error: format!("could not store questionnaire: {e}"),
        fields: Vec::new(),
    };
    std::fs::create_dir_all(&state.questionnaire_dir).map_err(io_err)?;
    let id = next_questionnaire_id(&state.questionnaire_dir).map_err(io_err)?;
    let text = serde_json::to_string_pretty(&questionnaire).expect("questionnaire serializes");
    std::fs::write(state.questionnaire_dir.join(format!("{id}.json")), text + "\n").map_err(io_err)?;
    Ok((StatusCode::CREATED, Json(json!({"id": id, "expert_id": questionnaire.expert_id}))).into_response())
}
