//! Dense row-major matrix kernel.
//!
//! Everything downstream (chain analysis, absorption, the craps model) runs
//! on matrices no larger than a few dozen rows, so the kernel favours
//! predictable numerics over scale: plain O(n^3) products, exponentiation by
//! squaring, and Gaussian elimination with partial pivoting.

use crate::error::{Error, Result};

/// Pivots smaller than this are treated as zero during elimination.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Dense matrix with row-major storage. Construction validates shape and
/// finiteness; every entry of a live `Matrix` is a finite `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries.
    ///
    /// Errors with `Dimension` if either dimension is zero or the entry count
    /// does not equal `rows * cols`, and with `Domain` if any entry is NaN or
    /// infinite.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "matrix entry at ({}, {}) is not finite",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from nested rows, which must be non-empty and ragged-free.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Dimension(
                "matrix dimensions must be positive".into(),
            ));
        }
        let cols = rows[0].len();
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// The n x n identity.
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.rows && col < self.cols);
        self.entries[row * self.cols + col]
    }

    /// Borrows one row as a slice.
    pub fn row(&self, row: usize) -> &[f64] {
        debug_assert!(row < self.rows);
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    /// Row-major view of all entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Matrix product `self * rhs`. Errors with `Dimension` if the inner
    /// dimensions disagree.
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![0.0; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.entries[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Matrix::new(self.rows, rhs.cols, out)
    }

    /// k-th matrix power by exponentiation by squaring; `pow(0)` is the
    /// identity. Errors with `Dimension` on non-square input.
    pub fn pow(&self, k: u32) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "matrix power needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let mut result = Matrix::identity(self.rows);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.matmul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.matmul(&base)?;
            }
        }
        Ok(result)
    }

    /// Solves `self * x = rhs` for a (possibly multi-column) right-hand side
    /// using Gaussian elimination with partial pivoting.
    ///
    /// Errors with `Dimension` if `self` is not square or the row counts
    /// disagree, and with `SingularMatrix` when the best available pivot
    /// falls below [`PIVOT_TOLERANCE`].
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "solve needs a square system, got {}x{}",
                self.rows, self.cols
            )));
        }
        if rhs.rows != self.rows {
            return Err(Error::Dimension(format!(
                "right-hand side has {} rows, system has {}",
                rhs.rows, self.rows
            )));
        }
        let n = self.rows;
        let m = rhs.cols;
        let mut a = self.entries.clone();
        let mut b = rhs.entries.clone();

        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot = a[col * n + col].abs();
            for r in col + 1..n {
                let v = a[r * n + col].abs();
                if v > pivot {
                    pivot = v;
                    pivot_row = r;
                }
            }
            if pivot < PIVOT_TOLERANCE {
                return Err(Error::SingularMatrix { column: col, pivot });
            }
            if pivot_row != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot_row * n + k);
                }
                for k in 0..m {
                    b.swap(col * m + k, pivot_row * m + k);
                }
            }
            let diag = a[col * n + col];
            for r in col + 1..n {
                let factor = a[r * n + col] / diag;
                if factor == 0.0 {
                    continue;
                }
                for k in col..n {
                    a[r * n + k] -= factor * a[col * n + k];
                }
                for k in 0..m {
                    b[r * m + k] -= factor * b[col * m + k];
                }
            }
        }

        for col in (0..n).rev() {
            let diag = a[col * n + col];
            for k in 0..m {
                let mut sum = b[col * m + k];
                for j in col + 1..n {
                    sum -= a[col * n + j] * b[j * m + k];
                }
                b[col * m + k] = sum / diag;
            }
        }
        Matrix::new(n, m, b)
    }

    /// Largest absolute entry-wise difference. Errors with `Dimension` if
    /// the shapes differ.
    pub fn max_abs_diff(&self, other: &Matrix) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot compare {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = vec![0.0; self.entries.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j * self.rows + i] = self.entries[i * self.cols + j];
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            entries: out,
        }
    }
}
