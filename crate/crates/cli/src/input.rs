//! Hand-rolled CSV grid parsers for the two input formats.
//!
//! Dialect: comma-separated, no quoting, labels restricted to
//! `[A-Za-z0-9_-]`. The first row holds a corner cell (ignored) followed by
//! column labels; every later row holds a row label and its cells. Cells
//! are trimmed of surrounding whitespace, so CRLF files parse fine. Parse
//! failures carry 1-based line and column positions.

use std::path::Path;

use poolchain_core::{ContingencyTable, Error, Matrix, TransitionMatrix};

use crate::error::CliError;

/// Row sums of a matrix CSV may deviate from 1 by at most this much; the
/// rows are then renormalized exactly and the largest adjustment reported.
pub const ROW_SUM_INPUT_TOLERANCE: f64 = 1e-6;

fn parse_error(path: &Path, line: usize, column: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

fn valid_label(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

struct Grid {
    col_labels: Vec<String>,
    row_labels: Vec<String>,
    /// Cell text with its 1-based (line, column) position.
    cells: Vec<Vec<(String, usize, usize)>>,
}

fn parse_grid(path: &Path, content: &str) -> Result<Grid, CliError> {
    // Positions must refer to the original file, so blank lines are
    // skipped without losing real line numbers.
    let numbered: Vec<(usize, &str)> = content
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect();

    if numbered.is_empty() {
        return Err(parse_error(path, 1, 1, "empty input"));
    }

    let split =
        |line: &str| -> Vec<String> { line.split(',').map(|c| c.trim().to_string()).collect() };

    let (header_line, header) = (numbered[0].0, split(numbered[0].1));
    if header.len() < 2 {
        return Err(parse_error(
            path,
            header_line,
            1,
            "header needs a corner cell and at least one column label",
        ));
    }
    let col_labels: Vec<String> = header[1..].to_vec();
    for (j, label) in col_labels.iter().enumerate() {
        if !valid_label(label) {
            return Err(parse_error(
                path,
                header_line,
                j + 2,
                format!("invalid label '{label}' (allowed: A-Za-z0-9_-)"),
            ));
        }
    }

    let mut row_labels = Vec::new();
    let mut cells = Vec::new();
    for &(line_no, line) in &numbered[1..] {
        let fields = split(line);
        if fields.len() != col_labels.len() + 1 {
            return Err(parse_error(
                path,
                line_no,
                fields.len(),
                format!(
                    "expected {} fields (label plus {} cells), found {}",
                    col_labels.len() + 1,
                    col_labels.len(),
                    fields.len()
                ),
            ));
        }
        if !valid_label(&fields[0]) {
            return Err(parse_error(
                path,
                line_no,
                1,
                format!("invalid label '{}' (allowed: A-Za-z0-9_-)", fields[0]),
            ));
        }
        row_labels.push(fields[0].clone());
        cells.push(
            fields[1..]
                .iter()
                .enumerate()
                .map(|(j, c)| (c.clone(), line_no, j + 2))
                .collect(),
        );
    }
    if row_labels.len() < 2 || col_labels.len() < 2 {
        return Err(parse_error(
            path,
            numbered[0].0,
            1,
            format!(
                "need at least a 2x2 grid, got {}x{}",
                row_labels.len(),
                col_labels.len()
            ),
        ));
    }
    Ok(Grid {
        col_labels,
        row_labels,
        cells,
    })
}

/// Parses a contingency table of non-negative integer counts.
pub fn parse_contingency_str(path: &Path, content: &str) -> Result<ContingencyTable, CliError> {
    let grid = parse_grid(path, content)?;
    let mut counts = Vec::with_capacity(grid.row_labels.len());
    for row in &grid.cells {
        let mut out = Vec::with_capacity(row.len());
        for (text, line, column) in row {
            let v: u64 = text.parse().map_err(|_| {
                parse_error(
                    path,
                    *line,
                    *column,
                    format!("'{text}' is not a non-negative integer count"),
                )
            })?;
            out.push(v);
        }
        counts.push(out);
    }
    Ok(ContingencyTable::new(
        grid.row_labels,
        grid.col_labels,
        counts,
    )?)
}

/// Parses a transition matrix. Column labels must repeat the row labels in
/// the same order; rows must sum to 1 within [`ROW_SUM_INPUT_TOLERANCE`]
/// and are renormalized exactly. Returns the matrix and the largest
/// row-sum adjustment made.
pub fn parse_matrix_str(path: &Path, content: &str) -> Result<(TransitionMatrix, f64), CliError> {
    let grid = parse_grid(path, content)?;
    if grid.col_labels != grid.row_labels {
        return Err(parse_error(
            path,
            1,
            1,
            format!(
                "column labels [{}] must match row labels [{}] in order",
                grid.col_labels.join(", "),
                grid.row_labels.join(", ")
            ),
        ));
    }
    let n = grid.row_labels.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for row in &grid.cells {
        let mut out = Vec::with_capacity(n);
        for (text, line, column) in row {
            let v: f64 = text.parse().map_err(|_| {
                parse_error(path, *line, *column, format!("'{text}' is not a number"))
            })?;
            if !v.is_finite() {
                return Err(parse_error(path, *line, *column, "value is not finite"));
            }
            out.push(v);
        }
        rows.push(out);
    }

    let mut max_delta = 0.0f64;
    for (i, row) in rows.iter_mut().enumerate() {
        let sum: f64 = row.iter().sum();
        let delta = (sum - 1.0).abs();
        if delta > ROW_SUM_INPUT_TOLERANCE {
            return Err(CliError::Core(Error::Stochasticity {
                row: i,
                reason: format!("row sums to {sum}, beyond the input tolerance 1e-6"),
            }));
        }
        max_delta = max_delta.max(delta);
        for v in row.iter_mut() {
            *v /= sum;
        }
    }

    let tm = TransitionMatrix::new(grid.row_labels, Matrix::from_rows(&rows)?)?;
    Ok((tm, max_delta))
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Hex SHA-256 of the raw input bytes, prefixed with the algorithm name.
pub fn digest(content: &str) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(content.as_bytes());
    let out = hasher.finalize();
    let mut hex = String::with_capacity(7 + 64);
    hex.push_str("sha256:");
    for byte in out {
        use std::fmt::Write;
        write!(hex, "{byte:02x}").expect("writing to a String cannot fail");
    }
    hex
}
