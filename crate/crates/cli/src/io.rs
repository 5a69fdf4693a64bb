//! CSV matrices in, CSV or JSON tables out.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use dscim::macro_sim::MacroConfig;
use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::{CliError, CliResult};

/// Reads a matrix of signed 8-bit integers. Lines starting with `#` are
/// comments. Every data row must have `width` fields when `width` is given,
/// otherwise the width of the first row.
pub fn read_i8_matrix(path: &Path, width: Option<usize>) -> CliResult<Vec<Vec<i8>>> {
    let file = File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let mut rows = Vec::new();
    let mut expected = width;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        let want = *expected.get_or_insert(record.len());
        if record.len() != want {
            return Err(CliError::Input(format!(
                "{}:{line}: expected {want} values, found {}",
                path.display(),
                record.len()
            )));
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                let v: i64 = field.parse().map_err(|_| {
                    CliError::Input(format!(
                        "{}:{line}:{}: not an integer: {field:?}",
                        path.display(),
                        col + 1
                    ))
                })?;
                i8::try_from(v).map_err(|_| {
                    CliError::Input(format!(
                        "{}:{line}:{}: value {v} outside [-128, 127]",
                        path.display(),
                        col + 1
                    ))
                })
            })
            .collect::<CliResult<Vec<i8>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    let file =
        File::create(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn config_json(cfg: &MacroConfig) -> String {
    serde_json::to_string(cfg).expect("config serializes")
}

#[derive(Serialize)]
struct JsonTable<'a, R: Serialize> {
    config: &'a MacroConfig,
    rows: &'a [R],
}

/// Writes `rows` with the resolved config embedded: a `# config=` line for
/// CSV, a `config` field for JSON.
pub fn write_table<R: Serialize>(
    path: &Path,
    format: OutputFormat,
    cfg: &MacroConfig,
    rows: &[R],
) -> CliResult<()> {
    let mut out = create(path)?;
    match format {
        OutputFormat::Csv => {
            writeln!(out, "# config={}", config_json(cfg))?;
            let mut w = csv::Writer::from_writer(&mut out);
            for row in rows {
                w.serialize(row)
                    .map_err(|e| CliError::Internal(format!("csv write: {e}")))?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &JsonTable { config: cfg, rows })
                .map_err(|e| CliError::Internal(format!("json write: {e}")))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| CliError::Internal(format!("json write: {e}")))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
