//! Contingency tables and Pearson's chi-square test of independence.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::special::chi_square_sf;

/// Cross-classified counts with labeled axes.
///
/// Invariants held by construction: at least 2x2, labels unique per axis and
/// matching the grid shape, grand total at least 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContingencyTable {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    counts: Vec<u64>,
}

impl ContingencyTable {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        counts: Vec<Vec<u64>>,
    ) -> Result<Self> {
        if row_labels.len() < 2 || col_labels.len() < 2 {
            return Err(Error::Dimension(format!(
                "contingency table needs at least 2 rows and 2 columns, got {}x{}",
                row_labels.len(),
                col_labels.len()
            )));
        }
        if counts.len() != row_labels.len() {
            return Err(Error::Dimension(format!(
                "{} count rows for {} row labels",
                counts.len(),
                row_labels.len()
            )));
        }
        if let Some(bad) = counts.iter().position(|r| r.len() != col_labels.len()) {
            return Err(Error::Dimension(format!(
                "count row {bad} has {} entries for {} column labels",
                counts[bad].len(),
                col_labels.len()
            )));
        }
        check_unique("row", &row_labels)?;
        check_unique("column", &col_labels)?;
        let flat: Vec<u64> = counts.concat();
        if flat.iter().all(|&c| c == 0) {
            return Err(Error::DegenerateTable("grand total is zero".into()));
        }
        Ok(Self {
            row_labels,
            col_labels,
            counts: flat,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn count(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.n_cols() + col]
    }

    pub fn row_totals(&self) -> Vec<u64> {
        (0..self.n_rows())
            .map(|i| (0..self.n_cols()).map(|j| self.count(i, j)).sum())
            .collect()
    }

    pub fn col_totals(&self) -> Vec<u64> {
        (0..self.n_cols())
            .map(|j| (0..self.n_rows()).map(|i| self.count(i, j)).sum())
            .collect()
    }

    pub fn grand_total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn check_unique(axis: &str, labels: &[String]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if l.is_empty() {
            return Err(Error::Label(format!("{axis} label {i} is empty")));
        }
        if labels[..i].contains(l) {
            return Err(Error::Label(format!("duplicate {axis} label '{l}'")));
        }
    }
    Ok(())
}

/// Continuity correction applied to the chi-square statistic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Correction {
    None,
    /// Yates: shrink each |O - E| by 0.5, clamped at zero.
    Yates,
}

/// Outcome of a chi-square independence test.
#[derive(Clone, Debug, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
    pub correction: Correction,
    pub expected: Matrix,
}

/// Verdict of [`independence_decision`] at a given significance level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Reject,
    FailToReject,
}

/// Expected cell counts under independence: `E_ij = row_i * col_j / N`.
pub fn expected_counts(table: &ContingencyTable) -> Result<Matrix> {
    let n = table.grand_total() as f64;
    let rows = table.row_totals();
    let cols = table.col_totals();
    let entries = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| (r as f64) * (c as f64) / n))
        .collect();
    Matrix::new(table.n_rows(), table.n_cols(), entries)
}

/// Pearson's chi-square test of independence.
///
/// Every row and column marginal must be positive (zero marginals make the
/// statistic undefined and error with `DegenerateTable`). The p-value is the
/// chi-square survival function at `(rows - 1) * (cols - 1)` degrees of
/// freedom.
pub fn chi_square_test(table: &ContingencyTable, correction: Correction) -> Result<TestResult> {
    let row_totals = table.row_totals();
    let col_totals = table.col_totals();
    if let Some(i) = row_totals.iter().position(|&t| t == 0) {
        return Err(Error::DegenerateTable(format!(
            "row '{}' has a zero total",
            table.row_labels[i]
        )));
    }
    if let Some(j) = col_totals.iter().position(|&t| t == 0) {
        return Err(Error::DegenerateTable(format!(
            "column '{}' has a zero total",
            table.col_labels[j]
        )));
    }

    let expected = expected_counts(table)?;
    let mut statistic = 0.0;
    for i in 0..table.n_rows() {
        for j in 0..table.n_cols() {
            let e = expected.get(i, j);
            let mut dev = (table.count(i, j) as f64 - e).abs();
            if correction == Correction::Yates {
                dev = (dev - 0.5).max(0.0);
            }
            statistic += dev * dev / e;
        }
    }
    let df = (table.n_rows() as u32 - 1) * (table.n_cols() as u32 - 1);
    let p_value = chi_square_sf(statistic, df)?;
    Ok(TestResult {
        statistic,
        df,
        p_value,
        correction,
        expected,
    })
}

/// Rejects independence iff `p < alpha` (strict). `alpha` must lie strictly
/// inside (0, 1); anything else errors with `Domain`.
pub fn independence_decision(result: &TestResult, alpha: f64) -> Result<Decision> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::Domain(format!(
            "significance level must lie in (0, 1), got {alpha}"
        )));
    }
    if result.p_value < alpha {
        Ok(Decision::Reject)
    } else {
        Ok(Decision::FailToReject)
    }
}
