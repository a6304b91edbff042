use super::Matrix;
use crate::error::{Error, Result};

/// Off-diagonal threshold, relative to the largest diagonal entry, below
/// which the matrix counts as diagonalized.
const OFF_DIAGONAL_THRESHOLD: f64 = 1e-14;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns the eigenvalues in ascending order together with the matrix of
/// corresponding eigenvectors (one per column, orthonormal). Column signs
/// are fixed so the entry of largest magnitude in each eigenvector is
/// positive, which keeps results deterministic across runs.
pub fn jacobi_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    assert_eq!(a.rows(), a.cols(), "matrix must be square");
    let n = a.rows();
    let mut a = a.clone();
    let mut v = Matrix::identity(n);

    if n == 1 {
        return Ok((vec![a.get(0, 0)], v));
    }

    let scale = (0..n).fold(1.0_f64, |m, i| m.max(a.get(i, i).abs()));
    let threshold = OFF_DIAGONAL_THRESHOLD * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0_f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off = off.max(a.get(p, q).abs());
            }
        }
        if off <= threshold {
            converged = true;
            break;
        }

        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq.abs() <= threshold {
                    continue;
                }
                // Rotation angle from the stable half-angle formula.
                let theta = 0.5 * (a.get(q, q) - a.get(p, p)) / apq;
                let t = {
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let app = a.get(p, p);
                let aqq = a.get(q, q);
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);

                for i in 0..n {
                    if i != p && i != q {
                        let aip = a.get(i, p);
                        let aiq = a.get(i, q);
                        let new_ip = aip - s * (aiq + tau * aip);
                        let new_iq = aiq + s * (aip - tau * aiq);
                        a.set(i, p, new_ip);
                        a.set(p, i, new_ip);
                        a.set(i, q, new_iq);
                        a.set(q, i, new_iq);
                    }
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip - s * (viq + tau * vip));
                    v.set(i, q, viq + s * (vip - tau * viq));
                }
            }
        }
    }

    if !converged {
        let mut off = 0.0_f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off = off.max(a.get(p, q).abs());
            }
        }
        return Err(Error::SolverFailure {
            what: "Jacobi eigen-decomposition",
            iterations: MAX_SWEEPS,
            residual: off,
        });
    }

    let mut values: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();

    // Selection-sort ascending, reordering eigenvector columns in step.
    for i in 0..n {
        let mut min = i;
        for j in i + 1..n {
            if values[j] < values[min] {
                min = j;
            }
        }
        if min != i {
            values.swap(i, min);
            v.swap_columns(i, min);
        }
    }

    // Deterministic sign: largest-magnitude component positive, ties
    // resolved by the lowest row index.
    for j in 0..n {
        let mut best = 0;
        for i in 1..n {
            if v.get(i, j).abs() > v.get(best, j).abs() {
                best = i;
            }
        }
        if v.get(best, j) < 0.0 {
            v.scale_column(j, -1.0);
        }
    }

    Ok((values, v))
}
