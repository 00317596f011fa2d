//! CSV file formats for corpora, disparity matrices, annual series,
//! periodograms, and correlation matrices.
//!
//! All formats are UTF-8 CSV with a header row and `\n` terminators.
//! Multi-valued cells (classes, inventors, assignees) are `;`-delimited.
//! Values that would collide with a delimiter (`,`, `;`, quotes, newlines)
//! are rejected at write time instead of quoted, which keeps every file
//! parseable by any CSV reader and diffable by eye. Missing values are
//! empty cells — never 0, never a sentinel word. Floating-point values are
//! written in Rust's shortest round-trip notation, so `parse(write(x))`
//! reproduces `x` bit for bit.
//!
//! Patent corpus (`patent_id,year,classes,inventors,assignees`):
//!
//! ```text
//! patent_id,year,classes,inventors,assignees
//! US123,1990,H01L;C01B,smith;jones,acme
//! ```
//!
//! Disparity matrix (first row and column carry the class codes, in the
//! same order):
//!
//! ```text
//! code,A,B
//! A,0,0.4
//! B,0.4,0
//! ```
//!
//! Annual series (first column `year`, one column per series, empty cell =
//! missing):
//!
//! ```text
//! year,gini_simpson,simpson
//! 1990,0.5,0.5
//! 1991,,
//! 1992,0.62,0.38
//! ```

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use thiserror::Error;

use crate::corpus::{Corpus, CorpusError, PatentRecord};
use crate::proximity::{DisparityMatrix, ProximityError};
use crate::rankstats::{CorrelationMatrix, CorrelationResult, Stars};
use crate::series::AnnualSeries;
use crate::spectral::Periodogram;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("expected header {expected:?}, found {found:?}")]
    BadHeader { expected: String, found: String },
    #[error("line {line}, column {column}: {message}")]
    MalformedRow { line: u64, column: String, message: String },
    #[error("duplicate patent_id {id:?} on lines {first_line} and {second_line}")]
    DuplicatePatentId { id: String, first_line: u64, second_line: u64 },
    #[error("line {line}: unparseable year {value:?}")]
    BadYear { line: u64, value: String },
    #[error("line {line}: record has no classification codes")]
    EmptyClasses { line: u64 },
    #[error("{context} contains a delimiter or control character: {value:?}")]
    UnwritableValue { context: &'static str, value: String },
    #[error("line {line}: matrix row label {found:?} does not match column {expected:?}")]
    RowCodeMismatch { line: u64, expected: String, found: String },
    #[error("matrix has {rows} data rows for {codes} codes")]
    MatrixShape { rows: usize, codes: usize },
    #[error("line {line}: duplicate year {year}")]
    DuplicateYearRow { line: u64, year: i32 },
    #[error("line {line}: year {year} is not greater than the previous row")]
    NonMonotoneYears { line: u64, year: i32 },
    #[error("duplicate series name {0:?}")]
    DuplicateSeriesName(String),
    #[error("missing or invalid periodogram metadata line: {0}")]
    BadPeriodogramMeta(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Matrix(#[from] ProximityError),
}

const PATENT_HEADER: [&str; 5] = ["patent_id", "year", "classes", "inventors", "assignees"];

/// Characters that may not appear inside a written value.
fn writable(context: &'static str, value: &str) -> Result<(), IngestError> {
    if value.contains([',', ';', '"', '\n', '\r']) {
        return Err(IngestError::UnwritableValue { context, value: value.to_string() });
    }
    Ok(())
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

/// Splits a `;`-delimited multi-value cell. Empty segments (from trailing
/// or doubled separators) are dropped.
fn split_multi(cell: &str) -> impl Iterator<Item = &str> {
    cell.split(';').filter(|s| !s.is_empty())
}

/// Parses a patent corpus, optionally truncating classification codes to
/// their first `class_truncation` characters (codes are deduplicated after
/// truncation).
pub fn parse_patents<R: Read>(
    reader: R,
    class_truncation: Option<usize>,
) -> Result<Corpus, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let found: Vec<&str> = headers.iter().collect();
    if found != PATENT_HEADER {
        return Err(IngestError::BadHeader {
            expected: PATENT_HEADER.join(","),
            found: found.join(","),
        });
    }

    let truncate = |code: &str| -> String {
        match class_truncation {
            Some(n) => code.chars().take(n).collect(),
            None => code.to_string(),
        }
    };

    let mut first_seen: HashMap<String, u64> = HashMap::new();
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = record_line(&row);
        let id = row.get(0).unwrap_or_default();
        if id.is_empty() {
            return Err(IngestError::MalformedRow {
                line,
                column: "patent_id".to_string(),
                message: "empty patent_id".to_string(),
            });
        }
        if let Some(&first_line) = first_seen.get(id) {
            return Err(IngestError::DuplicatePatentId {
                id: id.to_string(),
                first_line,
                second_line: line,
            });
        }
        first_seen.insert(id.to_string(), line);

        let year_cell = row.get(1).unwrap_or_default();
        let year: i32 = year_cell.parse().map_err(|_| IngestError::BadYear {
            line,
            value: year_cell.to_string(),
        })?;

        let classes: Vec<String> = split_multi(row.get(2).unwrap_or_default())
            .map(truncate)
            .filter(|c| !c.is_empty())
            .collect();
        if classes.is_empty() {
            return Err(IngestError::EmptyClasses { line });
        }
        let inventors: Vec<String> =
            split_multi(row.get(3).unwrap_or_default()).map(str::to_string).collect();
        let assignees: Vec<String> =
            split_multi(row.get(4).unwrap_or_default()).map(str::to_string).collect();

        let record = PatentRecord::new(id, year, classes, inventors, assignees).map_err(|e| {
            IngestError::MalformedRow { line, column: "record".to_string(), message: e.to_string() }
        })?;
        records.push(record);
    }
    Ok(Corpus::new(records)?)
}

/// Writes a corpus in the patent CSV format. Set values are emitted in
/// sorted order, `;`-joined.
pub fn write_patents<W: Write>(writer: W, corpus: &Corpus) -> Result<(), IngestError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(PATENT_HEADER)?;
    for record in corpus.records() {
        writable("patent_id", &record.id)?;
        let join = |set: &std::collections::BTreeSet<String>,
                    context: &'static str|
         -> Result<String, IngestError> {
            for item in set {
                writable(context, item)?;
            }
            Ok(set.iter().cloned().collect::<Vec<_>>().join(";"))
        };
        wtr.write_record([
            record.id.clone(),
            record.year.to_string(),
            join(&record.classes, "class code")?,
            join(&record.inventors, "inventor id")?,
            join(&record.assignees, "assignee id")?,
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// What the numeric cells of a matrix file hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixValueKind {
    /// Cells are disparities d_ij, used as-is.
    Disparity,
    /// Cells are cosine similarities; converted via d = 1 − s on load.
    Cosine,
}

/// Parses a disparity matrix file, validating symmetry, zero diagonal, and
/// the [0, 1] range after any cosine conversion. Validation failures list
/// the first ten violations.
pub fn parse_matrix<R: Read>(
    reader: R,
    kind: MatrixValueKind,
) -> Result<DisparityMatrix, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let codes: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(codes.len());
    for row in rdr.records() {
        let row = row?;
        let line = record_line(&row);
        let label = row.get(0).unwrap_or_default();
        let expected = codes.get(rows.len()).cloned().unwrap_or_default();
        if label != expected {
            return Err(IngestError::RowCodeMismatch {
                line,
                expected,
                found: label.to_string(),
            });
        }
        let mut values = Vec::with_capacity(codes.len());
        for (i, cell) in row.iter().skip(1).enumerate() {
            let v: f64 = cell.parse().map_err(|_| IngestError::MalformedRow {
                line,
                column: codes.get(i).cloned().unwrap_or_else(|| format!("col {i}")),
                message: format!("unparseable number {cell:?}"),
            })?;
            values.push(match kind {
                MatrixValueKind::Disparity => v,
                MatrixValueKind::Cosine => 1.0 - v,
            });
        }
        rows.push(values);
    }
    if rows.len() != codes.len() {
        return Err(IngestError::MatrixShape { rows: rows.len(), codes: codes.len() });
    }
    Ok(DisparityMatrix::from_rows(codes, rows)?)
}

/// Writes a disparity matrix with codes on the first row and column.
pub fn write_matrix<W: Write>(writer: W, matrix: &DisparityMatrix) -> Result<(), IngestError> {
    for code in matrix.codes() {
        writable("class code", code)?;
    }
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["code".to_string()];
    header.extend(matrix.codes().iter().cloned());
    wtr.write_record(&header)?;
    for (i, code) in matrix.codes().iter().enumerate() {
        let mut row = vec![code.clone()];
        row.extend(matrix.row(i).iter().map(|v| v.to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Parses an annual-series file into one series per value column.
pub fn parse_series<R: Read>(reader: R) -> Result<Vec<AnnualSeries>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut cols = headers.iter();
    if cols.next() != Some("year") {
        return Err(IngestError::BadHeader {
            expected: "year,<series>...".to_string(),
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }
    let names: Vec<String> = cols.map(str::to_string).collect();
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(IngestError::BadHeader {
                expected: "year,<series>...".to_string(),
                found: headers.iter().collect::<Vec<_>>().join(","),
            });
        }
        if names[..i].contains(name) {
            return Err(IngestError::DuplicateSeriesName(name.clone()));
        }
    }

    let mut columns: Vec<Vec<(i32, Option<f64>)>> = vec![Vec::new(); names.len()];
    let mut prev_year: Option<i32> = None;
    for row in rdr.records() {
        let row = row?;
        let line = record_line(&row);
        let year_cell = row.get(0).unwrap_or_default();
        let year: i32 = year_cell.parse().map_err(|_| IngestError::BadYear {
            line,
            value: year_cell.to_string(),
        })?;
        if let Some(prev) = prev_year {
            if year == prev {
                return Err(IngestError::DuplicateYearRow { line, year });
            }
            if year < prev {
                return Err(IngestError::NonMonotoneYears { line, year });
            }
        }
        prev_year = Some(year);
        for (i, cell) in row.iter().skip(1).enumerate() {
            let value = if cell.is_empty() {
                None
            } else {
                let v: f64 = cell.parse().map_err(|_| IngestError::MalformedRow {
                    line,
                    column: names[i].clone(),
                    message: format!("unparseable number {cell:?}"),
                })?;
                if !v.is_finite() {
                    return Err(IngestError::MalformedRow {
                        line,
                        column: names[i].clone(),
                        message: format!("non-finite value {cell:?}"),
                    });
                }
                Some(v)
            };
            columns[i].push((year, value));
        }
    }

    Ok(names
        .into_iter()
        .zip(columns)
        .map(|(name, points)| {
            AnnualSeries::new(name, points).expect("years increase and values are finite")
        })
        .collect())
}

/// Writes series side by side, one row per year appearing in any series'
/// span, empty cells for missing values.
pub fn write_series<W: Write>(writer: W, series: &[AnnualSeries]) -> Result<(), IngestError> {
    for (i, s) in series.iter().enumerate() {
        writable("series name", s.name())?;
        if s.name().is_empty() || s.name() == "year"
            || series[..i].iter().any(|other| other.name() == s.name())
        {
            return Err(IngestError::DuplicateSeriesName(s.name().to_string()));
        }
    }
    let mut years: Vec<i32> = Vec::new();
    for s in series {
        years.extend(s.points().iter().map(|&(y, _)| y));
    }
    years.sort_unstable();
    years.dedup();

    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["year".to_string()];
    header.extend(series.iter().map(|s| s.name().to_string()));
    wtr.write_record(&header)?;
    for year in years {
        let mut row = vec![year.to_string()];
        for s in series {
            row.push(s.value_at(year).map(|v| v.to_string()).unwrap_or_default());
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes a periodogram: a `#` metadata line, then frequency/intensity
/// rows.
pub fn write_periodogram<W: Write>(mut writer: W, pgram: &Periodogram) -> Result<(), IngestError> {
    writeln!(
        writer,
        "# n={} mean_removed={} dropped_first={}",
        pgram.n, pgram.mean_removed, pgram.dropped_first
    )?;
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["frequency", "intensity"])?;
    for &(freq, intensity) in &pgram.ordinates {
        wtr.write_record([freq.to_string(), intensity.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Parses a periodogram written by [`write_periodogram`].
pub fn parse_periodogram<R: Read>(reader: R) -> Result<Periodogram, IngestError> {
    let mut reader = BufReader::new(reader);
    let mut meta = String::new();
    reader.read_line(&mut meta)?;
    let meta = meta.trim_end();
    let body = meta
        .strip_prefix("# ")
        .ok_or_else(|| IngestError::BadPeriodogramMeta(meta.to_string()))?;
    let mut n = None;
    let mut mean_removed = None;
    let mut dropped_first = None;
    for pair in body.split_whitespace() {
        match pair.split_once('=') {
            Some(("n", v)) => n = v.parse::<usize>().ok(),
            Some(("mean_removed", v)) => mean_removed = v.parse::<bool>().ok(),
            Some(("dropped_first", v)) => dropped_first = v.parse::<bool>().ok(),
            _ => return Err(IngestError::BadPeriodogramMeta(meta.to_string())),
        }
    }
    let (n, mean_removed, dropped_first) = match (n, mean_removed, dropped_first) {
        (Some(n), Some(m), Some(d)) => (n, m, d),
        _ => return Err(IngestError::BadPeriodogramMeta(meta.to_string())),
    };

    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let mut ordinates = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = record_line(&row);
        let parse = |cell: &str, column: &str| -> Result<f64, IngestError> {
            cell.parse().map_err(|_| IngestError::MalformedRow {
                line,
                column: column.to_string(),
                message: format!("unparseable number {cell:?}"),
            })
        };
        let freq = parse(row.get(0).unwrap_or_default(), "frequency")?;
        let intensity = parse(row.get(1).unwrap_or_default(), "intensity")?;
        ordinates.push((freq, intensity));
    }
    if ordinates.len() != n / 2 {
        return Err(IngestError::BadPeriodogramMeta(format!(
            "n={} but {} ordinates",
            n,
            ordinates.len()
        )));
    }
    Ok(Periodogram { n, ordinates, mean_removed, dropped_first })
}

/// Writes the display-formatted correlation table: names across the top,
/// `.835**`-style cells, `1` on the diagonal, empty cells for pairs that
/// could not be computed.
pub fn write_correlation_table<W: Write>(
    writer: W,
    matrix: &CorrelationMatrix,
) -> Result<(), IngestError> {
    for name in &matrix.names {
        writable("series name", name)?;
    }
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["series".to_string()];
    header.extend(matrix.names.iter().cloned());
    wtr.write_record(&header)?;
    for (i, name) in matrix.names.iter().enumerate() {
        let mut row = vec![name.clone()];
        for j in 0..matrix.names.len() {
            row.push(match matrix.get(i, j) {
                _ if i == j => "1".to_string(),
                Ok(cell) => cell.table_cell(),
                Err(_) => String::new(),
            });
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// One parsed row of a correlation details file.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationDetail {
    pub row: String,
    pub col: String,
    pub result: Result<CorrelationResult, String>,
}

const DETAILS_HEADER: [&str; 7] = ["row", "col", "rho", "n", "p_value", "stars", "error"];

/// Writes the machine-readable companion to the correlation table: full
/// precision rho and p-value, per-cell n, and the failure reason for cells
/// that have one.
pub fn write_correlation_details<W: Write>(
    writer: W,
    matrix: &CorrelationMatrix,
) -> Result<(), IngestError> {
    for name in &matrix.names {
        writable("series name", name)?;
    }
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(DETAILS_HEADER)?;
    for (i, row_name) in matrix.names.iter().enumerate() {
        for (j, col_name) in matrix.names.iter().enumerate() {
            let record = match matrix.get(i, j) {
                Ok(cell) => [
                    row_name.clone(),
                    col_name.clone(),
                    cell.rho.to_string(),
                    cell.n.to_string(),
                    cell.p_value.to_string(),
                    cell.stars.as_str().to_string(),
                    String::new(),
                ],
                Err(e) => {
                    let message = e.to_string();
                    writable("error message", &message)?;
                    [
                        row_name.clone(),
                        col_name.clone(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        message,
                    ]
                }
            };
            wtr.write_record(record)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Parses a correlation details file back into its rows.
pub fn parse_correlation_details<R: Read>(
    reader: R,
) -> Result<Vec<CorrelationDetail>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let found: Vec<&str> = headers.iter().collect();
    if found != DETAILS_HEADER {
        return Err(IngestError::BadHeader {
            expected: DETAILS_HEADER.join(","),
            found: found.join(","),
        });
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = record_line(&row);
        let cell = |i: usize| row.get(i).unwrap_or_default().to_string();
        let error = cell(6);
        let result = if error.is_empty() {
            let parse_num = |i: usize, column: &str| -> Result<f64, IngestError> {
                row.get(i).unwrap_or_default().parse().map_err(|_| IngestError::MalformedRow {
                    line,
                    column: column.to_string(),
                    message: "unparseable number".to_string(),
                })
            };
            let stars = match row.get(5).unwrap_or_default() {
                "" => Stars::None,
                "*" => Stars::P05,
                "**" => Stars::P01,
                other => {
                    return Err(IngestError::MalformedRow {
                        line,
                        column: "stars".to_string(),
                        message: format!("unknown stars {other:?}"),
                    })
                }
            };
            Ok(CorrelationResult {
                rho: parse_num(2, "rho")?,
                n: row.get(3).unwrap_or_default().parse().map_err(|_| {
                    IngestError::MalformedRow {
                        line,
                        column: "n".to_string(),
                        message: "unparseable count".to_string(),
                    }
                })?,
                p_value: parse_num(4, "p_value")?,
                stars,
            })
        } else {
            Err(error)
        };
        out.push(CorrelationDetail { row: cell(0), col: cell(1), result });
    }
    Ok(out)
}
