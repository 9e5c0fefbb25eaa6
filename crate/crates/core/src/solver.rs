//! Dense Cholesky and partially pivoted LU solves.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

// needed when std is absent from the build graph
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Dense row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::Dimension(format!("row {} has {} entries, expected {}", i, r.len(), n)));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { n, data })
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension(format!("{} values for a {}x{} matrix", data.len(), n, n)));
        }
        Ok(Matrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                scale = scale.max(self[(i, j)].abs());
                if j > i {
                    worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
                }
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Cholesky,
    Lu,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    /// `||Ax - b|| / ||b||` in the 2-norm, recomputed from the original
    /// matrix.
    pub residual_norm: f64,
    pub method: Method,
}

/// Relative residual `||Ax - b||_2 / ||b||_2` (absolute when `b = 0`).
pub fn residual_norm(a: &Matrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nb == 0.0 {
        r
    } else {
        r / nb
    }
}

fn check_dims(a: &Matrix, b: &[f64]) -> Result<()> {
    if b.len() != a.dim() {
        return Err(Error::Dimension(format!(
            "matrix is {}x{} but right-hand side has {} entries",
            a.dim(),
            a.dim(),
            b.len()
        )));
    }
    Ok(())
}

/// Solve `Ax = b` for symmetric positive definite `A` through `A = LL^T`.
///
/// Only the lower triangle of `A` is read. A non-positive pivot is reported
/// as [`Error::NotPositiveDefinite`].
pub fn cholesky_solve(a: &Matrix, b: &[f64]) -> Result<Solution> {
    check_dims(a, b)?;
    let n = a.dim();
    let mut l = a.data.clone();
    for j in 0..n {
        let row_j = &mut l[j * n..j * n + n];
        let mut d = row_j[j];
        for k in 0..j {
            d -= row_j[k] * row_j[k];
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { row: j, pivot: d });
        }
        let d = d.sqrt();
        row_j[j] = d;
        for i in j + 1..n {
            let (top, bottom) = l.split_at_mut(i * n);
            let row_j = &top[j * n..j * n + n];
            let row_i = &mut bottom[..n];
            let mut s = row_i[j];
            for k in 0..j {
                s -= row_i[k] * row_j[k];
            }
            row_i[j] = s / d;
        }
    }
    // forward then backward substitution
    let mut y = b.to_vec();
    for i in 0..n {
        let row = &l[i * n..i * n + n];
        let mut s = y[i];
        for k in 0..i {
            s -= row[k] * y[k];
        }
        y[i] = s / row[i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    Ok(Solution {
        residual_norm: residual_norm(a, &y, b),
        x: y,
        method: Method::Cholesky,
    })
}

/// Solve `Ax = b` by LU factorisation with partial pivoting.
///
/// The first pivot below `1e-14 * ||A||_inf`, necessarily the smallest so
/// far, is reported as [`Error::Singular`] with its row.
pub fn lu_solve(a: &Matrix, b: &[f64]) -> Result<Solution> {
    check_dims(a, b)?;
    let n = a.dim();
    let mut m = a.data.clone();
    let mut x = b.to_vec();
    let tiny = 1e-14 * a.norm_inf();
    for k in 0..n {
        let (p, pv) = (k..n)
            .map(|i| (i, m[i * n + k].abs()))
            .fold((k, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        if !(pv > tiny) {
            return Err(Error::Singular { row: k, pivot: pv });
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        let piv = m[k * n + k];
        for i in k + 1..n {
            let f = m[i * n + k] / piv;
            if f == 0.0 {
                continue;
            }
            m[i * n + k] = 0.0;
            let (top, bottom) = m.split_at_mut(i * n);
            let row_k = &top[k * n..k * n + n];
            let row_i = &mut bottom[..n];
            for j in k + 1..n {
                row_i[j] -= f * row_k[j];
            }
            x[i] -= f * x[k];
        }
    }
    for i in (0..n).rev() {
        let row = &m[i * n..i * n + n];
        let mut s = x[i];
        for j in i + 1..n {
            s -= row[j] * x[j];
        }
        x[i] = s / row[i];
    }
    Ok(Solution {
        residual_norm: residual_norm(a, &x, b),
        x,
        method: Method::Lu,
    })
}
