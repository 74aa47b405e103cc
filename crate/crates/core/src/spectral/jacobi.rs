//! Cyclic Jacobi rotations for dense real symmetric matrices.
//!
//! The full matrix is stored row-major. Each rotation updates rows `p` and
//! `q` in place and mirrors them into the corresponding columns, so the
//! inner loops stay contiguous.

use crate::error::{Error, Result};

/// Off-diagonal Frobenius tolerance, relative to `max(1, ‖A‖_F)`.
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 60;

#[derive(Clone, Debug)]
pub struct Eigen {
    /// Unsorted eigenvalues.
    pub values: Vec<f64>,
    /// Row `i` is the unit eigenvector of `values[i]`, when requested.
    pub vectors: Option<Vec<f64>>,
    pub sweeps: usize,
}

fn off_norm_sq(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += a[i * n + j] * a[i * n + j];
        }
    }
    2.0 * s
}

/// Diagonalizes the symmetric `n × n` row-major matrix `a`.
///
/// Symmetry is assumed; only the upper triangle drives the rotations.
pub fn jacobi_eigen(mut a: Vec<f64>, n: usize, want_vectors: bool) -> Result<Eigen> {
    if a.len() != n * n {
        return Err(Error::SizeMismatch {
            left: n * n,
            right: a.len(),
        });
    }
    let mut v = want_vectors.then(|| {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        v
    });
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = OFF_DIAGONAL_TOLERANCE * frob.max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_norm_sq(&a, n).sqrt();
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NotConverged {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Negligible against both diagonal entries: drop it.
                let g = 100.0 * apq.abs();
                if sweeps > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, n, p, q, c, s);
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    rotate_rows(v, n, p, q, c, s);
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    Ok(Eigen {
        values,
        vectors: v,
        sweeps,
    })
}

fn rotate(a: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = a.split_at_mut(q * n);
    let row_p = &mut lo[p * n..(p + 1) * n];
    let row_q = &mut hi[..n];
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let x = row_p[k];
        let y = row_q[k];
        row_p[k] = c * x - s * y;
        row_q[k] = s * x + c * y;
    }
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let (xp, xq) = (a[p * n + k], a[q * n + k]);
        a[k * n + p] = xp;
        a[k * n + q] = xq;
    }
}

fn rotate_rows(v: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = v.split_at_mut(q * n);
    let row_p = &mut lo[p * n..(p + 1) * n];
    let row_q = &mut hi[..n];
    for (x, y) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}
