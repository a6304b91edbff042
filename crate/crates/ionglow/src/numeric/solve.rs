use super::Matrix;
use crate::error::{Error, Result};

/// Solves the dense linear system `A x = b` by Gaussian elimination with
/// partial pivoting. `a` and `b` are consumed as working storage.
pub fn solve_linear(mut a: Matrix, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "matrix must be square");
    assert_eq!(b.len(), n, "right-hand side must match");

    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a.get(row, col).abs() > a.get(pivot, col).abs() {
                pivot = row;
            }
        }
        if a.get(pivot, col).abs() < 1e-300 {
            return Err(Error::SolverFailure {
                what: "linear solve (singular matrix)",
                iterations: col,
                residual: a.get(pivot, col).abs(),
            });
        }
        if pivot != col {
            for j in 0..n {
                let (x, y) = (a.get(col, j), a.get(pivot, j));
                a.set(col, j, y);
                a.set(pivot, j, x);
            }
            b.swap(col, pivot);
        }
        let diag = a.get(col, col);
        for row in col + 1..n {
            let factor = a.get(row, col) / diag;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                let v = a.get(row, j) - factor * a.get(col, j);
                a.set(row, j, v);
            }
            b[row] -= factor * b[col];
        }
    }

    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut sum = b[row];
        for j in row + 1..n {
            sum -= a.get(row, j) * x[j];
        }
        x[row] = sum / a.get(row, row);
    }
    Ok(x)
}
