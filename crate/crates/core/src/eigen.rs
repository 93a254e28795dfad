//! Closed-form spectral decomposition for 2x2 row-stochastic matrices.
//!
//! A two-state chain has eigenvalues 1 and `p00 + p11 - 1`. The eigenvalue-1
//! eigenvector is the constant vector; the second eigenvector is
//! `(-p01, p10)` up to scale. Eigenvector scaling is display convention only:
//! the contract enforced here is reconstruction, `q * diag(values) * q_inv`
//! recovering the input to 1e-10.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const ROW_SUM_TOLERANCE: f64 = 1e-9;
const ENTRY_TOLERANCE: f64 = 1e-12;

/// Spectral decomposition `q * diag(eigenvalues) * q_inv` of a 2x2 matrix.
///
/// Columns of `q` are unit-norm eigenvectors with the sign fixed so the
/// second component is non-negative (first component breaks ties), which
/// matches how such decompositions are conventionally displayed.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: [f64; 2],
    pub q: Matrix,
    pub q_inv: Matrix,
}

impl EigenSystem {
    /// Recomputes `q * diag(eigenvalues) * q_inv`.
    pub fn reconstruct(&self) -> Result<Matrix> {
        let lambda = Matrix::from_rows(&[
            vec![self.eigenvalues[0], 0.0],
            vec![0.0, self.eigenvalues[1]],
        ])?;
        self.q.matmul(&lambda)?.matmul(&self.q_inv)
    }
}

/// Decomposes a 2x2 row-stochastic matrix.
///
/// Errors with `Dimension` unless the input is 2x2, and with `Stochasticity`
/// unless every entry lies in [0, 1] (tolerance 1e-12) and each row sums to 1
/// within 1e-9.
pub fn two_state(p: &Matrix) -> Result<EigenSystem> {
    if p.rows() != 2 || p.cols() != 2 {
        return Err(Error::Dimension(format!(
            "two-state decomposition needs a 2x2 matrix, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    check_row_stochastic(p)?;

    let p01 = p.get(0, 1);
    let p10 = p.get(1, 0);
    let second = p.get(0, 0) + p.get(1, 1) - 1.0;

    let s = std::f64::consts::FRAC_1_SQRT_2;
    // Degenerate identity case: every vector is an eigenvector, so pick an
    // orthogonal complement of the constant vector.
    let (v0, v1) = if p01 == 0.0 && p10 == 0.0 {
        (-s, s)
    } else {
        let norm = (p01 * p01 + p10 * p10).sqrt();
        let (mut v0, mut v1) = (-p01 / norm, p10 / norm);
        if v1 < 0.0 || (v1 == 0.0 && v0 < 0.0) {
            v0 = -v0;
            v1 = -v1;
        }
        (v0, v1)
    };

    let q = Matrix::from_rows(&[vec![s, v0], vec![s, v1]])?;
    let det = q.get(0, 0) * q.get(1, 1) - q.get(0, 1) * q.get(1, 0);
    if det.abs() < crate::matrix::PIVOT_TOLERANCE {
        return Err(Error::SingularMatrix {
            column: 0,
            pivot: det.abs(),
        });
    }
    let q_inv = Matrix::from_rows(&[
        vec![q.get(1, 1) / det, -q.get(0, 1) / det],
        vec![-q.get(1, 0) / det, q.get(0, 0) / det],
    ])?;

    Ok(EigenSystem {
        eigenvalues: [1.0, second],
        q,
        q_inv,
    })
}

fn check_row_stochastic(p: &Matrix) -> Result<()> {
    for row in 0..p.rows() {
        let mut sum = 0.0;
        for col in 0..p.cols() {
            let v = p.get(row, col);
            if !(-ENTRY_TOLERANCE..=1.0 + ENTRY_TOLERANCE).contains(&v) {
                return Err(Error::Stochasticity {
                    row,
                    reason: format!("entry {v} at column {col} is outside [0, 1]"),
                });
            }
            sum += v;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::Stochasticity {
                row,
                reason: format!("row sums to {sum}, expected 1"),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decompose(rows: &[Vec<f64>]) -> EigenSystem {
        two_state(&Matrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn second_eigenvalue_of_the_pool_chain() {
        let sys = decompose(&[
            vec![31.0 / 39.0, 8.0 / 39.0],
            vec![19.0 / 74.0, 55.0 / 74.0],
        ]);
        assert_eq!(sys.eigenvalues[0], 1.0);
        assert!(
            (sys.eigenvalues[1] - 0.538).abs() < 1e-3,
            "{}",
            sys.eigenvalues[1]
        );
    }

    #[test]
    fn displayed_eigenvectors_match_the_conventional_scaling() {
        // Unit columns with non-negative second component: (0.707, 0.707)
        // and (-0.624, 0.781) for the pool chain.
        let sys = decompose(&[
            vec![31.0 / 39.0, 8.0 / 39.0],
            vec![19.0 / 74.0, 55.0 / 74.0],
        ]);
        assert!((sys.q.get(0, 0) - 0.707).abs() < 1e-3);
        assert!((sys.q.get(1, 0) - 0.707).abs() < 1e-3);
        assert!((sys.q.get(0, 1) - -0.624).abs() < 1e-3);
        assert!((sys.q.get(1, 1) - 0.781).abs() < 1e-3);
    }

    #[test]
    fn reconstruction_recovers_the_input() {
        let p = Matrix::from_rows(&[
            vec![31.0 / 39.0, 8.0 / 39.0],
            vec![19.0 / 74.0, 55.0 / 74.0],
        ])
        .unwrap();
        let sys = two_state(&p).unwrap();
        assert!(sys.reconstruct().unwrap().max_abs_diff(&p).unwrap() < 1e-10);
        let qq = sys.q.matmul(&sys.q_inv).unwrap();
        assert!(qq.max_abs_diff(&Matrix::identity(2)).unwrap() < 1e-10);
    }

    #[test]
    fn averaging_chain_has_zero_second_eigenvalue() {
        let sys = decompose(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert_eq!(sys.eigenvalues[1], 0.0);
        let p = Matrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(sys.reconstruct().unwrap().max_abs_diff(&p).unwrap() < 1e-10);
    }

    #[test]
    fn identity_decomposes_despite_the_repeated_eigenvalue() {
        let sys = decompose(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(sys.eigenvalues, [1.0, 1.0]);
        assert!(
            sys.reconstruct()
                .unwrap()
                .max_abs_diff(&Matrix::identity(2))
                .unwrap()
                < 1e-10
        );
    }

    #[test]
    fn alternating_chain_has_eigenvalue_minus_one() {
        let sys = decompose(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(sys.eigenvalues[1], -1.0);
        let p = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(sys.reconstruct().unwrap().max_abs_diff(&p).unwrap() < 1e-10);
    }

    #[test]
    fn absorbing_state_eigenvector_is_axis_aligned() {
        let sys = decompose(&[vec![0.5, 0.5], vec![0.0, 1.0]]);
        assert!((sys.eigenvalues[1] - 0.5).abs() < 1e-15);
        assert!((sys.q.get(0, 1) - 1.0).abs() < 1e-12);
        assert!(sys.q.get(1, 1).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_stochastic_and_wrong_shapes() {
        let p = Matrix::from_rows(&[vec![0.9, 0.2], vec![0.3, 0.7]]).unwrap();
        assert!(matches!(
            two_state(&p),
            Err(Error::Stochasticity { row: 0, .. })
        ));
        let p = Matrix::from_rows(&[vec![0.5, 0.6], vec![-0.1, 1.1]]).unwrap();
        assert!(matches!(two_state(&p), Err(Error::Stochasticity { .. })));
        let p = Matrix::identity(3);
        assert!(matches!(two_state(&p), Err(Error::Dimension(_))));
    }

    #[test]
    fn eigenvalue_one_eigenvector_is_constant() {
        // First column of q must be the constant vector for any stochastic p.
        let mut rng = crate::simulate::SplitMix64::new(0xe16e_f00d);
        for _ in 0..200 {
            let a = rng.next_f64();
            let b = rng.next_f64();
            let sys = decompose(&[vec![a, 1.0 - a], vec![b, 1.0 - b]]);
            assert!((sys.q.get(0, 0) - sys.q.get(1, 0)).abs() < 1e-14);
        }
    }
}
