use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn parse_flag(raw: &str, column: &str) -> std::result::Result<bool, String> {
    match raw.trim() {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(format!("{column} must be 0 or 1, found `{other}`")),
    }
}

pub(crate) fn flag(value: bool) -> &'static str {
    if value {
        "1"
    } else {
        "0"
    }
}

/// Reads a header-first CSV file whose header must equal `columns`, calling
/// `row` for each data record with its 1-based line number.
pub(crate) fn read_rows(
    path: &Path,
    text: &str,
    columns: &[&str],
    mut row: impl FnMut(u64, &csv::StringRecord) -> std::result::Result<(), Error>,
) -> Result<()> {
    let load_err = |line: Option<u64>, reason: String| Error::Load {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| load_err(Some(1), e.to_string()))?
        .clone();
    let found: Vec<&str> = header.iter().collect();
    if found != columns {
        return Err(load_err(
            Some(1),
            format!("header must be `{}`, found `{}`", columns.join(","), found.join(",")),
        ));
    }
    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map(|p| p.line());
            load_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        row(line, &record).map_err(|e| match e {
            Error::Load { .. } => e,
            other => load_err(Some(line), other.to_string()),
        })?;
    }
    Ok(())
}

pub(crate) fn write_rows(path: &Path, columns: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    std::fs::write(path, render_rows(columns, rows)).map_err(|e| Error::io(path, e))
}

pub(crate) fn render_rows(columns: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(columns).expect("in-memory write");
    for r in rows {
        writer.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}
