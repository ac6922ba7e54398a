//! Small dense matrices and vectors.
//!
//! Everything in this crate works with modest dimensions (states n <= 10 or
//! so), so matrices are plain row-major `Vec<f64>` buffers. The one
//! non-trivial routine is [`Matrix::expm`], the scaling-and-squaring matrix
//! exponential used by zero-order-hold discretization.

use serde::{Deserialize, Serialize};

/// Dense row-major matrix. Serializes as a nested array (`[[..], [..]]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix rows have inconsistent lengths")]
    Ragged,
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("matrix exponential series did not converge")]
    ExpmDiverged,
    #[error("singular matrix")]
    Singular,
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = LinalgError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(LinalgError::Ragged);
        }
        Ok(Matrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        (0..m.rows).map(|i| m.row(i).to_vec()).collect()
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, LinalgError> {
        Matrix::try_from(rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Max absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a: f64, v| a.max(v.abs()))
    }

    pub fn scale(&self, k: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// Elementwise interval image: bounds of `A x` for `lb <= x <= ub`.
    pub fn interval_image(&self, lb: &[f64], ub: &[f64]) -> (Vec<f64>, Vec<f64>) {
        assert_eq!(self.cols, lb.len());
        assert_eq!(self.cols, ub.len());
        let mut lo = vec![0.0; self.rows];
        let mut hi = vec![0.0; self.rows];
        for i in 0..self.rows {
            for (j, &a) in self.row(i).iter().enumerate() {
                if a >= 0.0 {
                    lo[i] += a * lb[j];
                    hi[i] += a * ub[j];
                } else {
                    lo[i] += a * ub[j];
                    hi[i] += a * lb[j];
                }
            }
        }
        (lo, hi)
    }

    /// Matrix exponential by scaling and squaring with a truncated Taylor
    /// series. The scaling exponent is chosen so the scaled norm is <= 0.5
    /// and the series is summed to a 1e-12 tolerance.
    pub fn expm(&self) -> Result<Matrix, LinalgError> {
        assert_eq!(self.rows, self.cols, "expm requires a square matrix");
        let n = self.rows;
        let norm = self.inf_norm();
        if !norm.is_finite() {
            return Err(LinalgError::ExpmDiverged);
        }
        let k = if norm <= 0.5 {
            0
        } else {
            (norm / 0.5).log2().ceil() as u32
        };
        let scaled = self.scale(1.0 / f64::powi(2.0, k as i32));

        let mut sum = Matrix::identity(n);
        let mut term = Matrix::identity(n);
        let mut converged = false;
        for j in 1..=64 {
            term = term.matmul(&scaled).scale(1.0 / j as f64);
            sum = sum.add(&term);
            if term.inf_norm() <= 1e-12 * sum.inf_norm().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(LinalgError::ExpmDiverged);
        }
        let mut result = sum;
        for _ in 0..k {
            result = result.matmul(&result);
            if !result.is_finite() {
                return Err(LinalgError::ExpmDiverged);
            }
        }
        Ok(result)
    }

    /// Solve `self * x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, b.len());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&i, &j| {
                    a[i * n + col]
                        .abs()
                        .partial_cmp(&a[j * n + col].abs())
                        .unwrap()
                })
                .unwrap();
            if a[pivot_row * n + col].abs() < 1e-300 {
                return Err(LinalgError::Singular);
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                }
                x.swap(col, pivot_row);
            }
            let p = a[col * n + col];
            for i in (col + 1)..n {
                let factor = a[i * n + col] / p;
                if factor == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[i * n + j] -= factor * a[col * n + j];
                }
                x[i] -= factor * x[col];
            }
        }
        for col in (0..n).rev() {
            x[col] /= a[col * n + col];
            for i in 0..col {
                x[i] -= a[i * n + col] * x[col];
            }
        }
        Ok(x)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn vec_inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a: f64, x| a.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_zero_is_identity() {
        let e = Matrix::zeros(3, 3).expm().unwrap();
        assert_eq!(e, Matrix::identity(3));
    }

    #[test]
    fn expm_scalar_closed_form() {
        let a = Matrix::from_rows(vec![vec![-0.7]]).unwrap();
        let e = a.expm().unwrap();
        assert!((e[(0, 0)] - (-0.7f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn expm_inverse_identity() {
        let a = Matrix::from_rows(vec![
            vec![0.3, -1.2, 0.0],
            vec![2.0, 0.1, -0.5],
            vec![0.7, 0.0, -2.0],
        ])
        .unwrap();
        let e = a.expm().unwrap();
        let einv = a.scale(-1.0).expm().unwrap();
        let prod = e.matmul(&einv);
        let mut err: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((prod[(i, j)] - target).abs());
            }
        }
        assert!(err < 1e-9, "expm(A) expm(-A) deviates from I by {err}");
    }

    #[test]
    fn solve_roundtrip() {
        let a = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = a.solve(&[5.0, 10.0]).unwrap();
        let back = a.matvec(&x);
        assert!((back[0] - 5.0).abs() < 1e-12 && (back[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn interval_image_signs() {
        let a = Matrix::from_rows(vec![vec![1.0, -2.0]]).unwrap();
        let (lo, hi) = a.interval_image(&[-1.0, -1.0], &[2.0, 3.0]);
        assert_eq!(lo[0], -1.0 - 6.0);
        assert_eq!(hi[0], 2.0 + 2.0);
    }
}
