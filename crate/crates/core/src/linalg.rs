//! Dense vectors and matrices in `f64`, plus dominant-eigenvalue estimation.
//!
//! Only the handful of operations the solvers need are provided. Values are
//! immutable after construction; arithmetic returns fresh vectors.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    /// Builds a vector, rejecting NaN and infinite entries.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(entries))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn filled(len: usize, value: f64) -> Self {
        Self(vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        check_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, a: f64) -> Self {
        Self(self.0.iter().map(|v| a * v).collect())
    }

    /// `a * self + y`
    pub fn axpy(&self, a: f64, y: &Self) -> Result<Self> {
        check_len(self.len(), y.len())?;
        Ok(Self(
            self.0.iter().zip(&y.0).map(|(x, y)| a * x + y).collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// Euclidean distance `‖self - other‖₂`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        check_len(self.len(), other.len())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().copied().map(f).collect())
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<'a> IntoIterator for &'a DenseVector {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl TryFrom<Vec<f64>> for DenseVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}

pub fn dot(u: &DenseVector, v: &DenseVector) -> Result<f64> {
    u.dot(v)
}

pub fn norm2(v: &DenseVector) -> f64 {
    v.norm2()
}

/// `a * x + y`
pub fn axpy(a: f64, x: &DenseVector, y: &DenseVector) -> Result<DenseVector> {
    x.axpy(a, y)
}

pub fn matvec(m: &DenseMatrix, v: &DenseVector) -> Result<DenseVector> {
    m.matvec(v)
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            check_len(cols, row.len())?;
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, value: f64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = value;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Copies rows `start..start + len` into a new matrix.
    pub fn row_block(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.rows {
            return Err(Error::Dimension {
                expected: self.rows,
                found: start + len,
            });
        }
        Ok(Self {
            rows: len,
            cols: self.cols,
            data: self.data[start * self.cols..(start + len) * self.cols].to_vec(),
        })
    }

    pub fn matvec(&self, v: &DenseVector) -> Result<DenseVector> {
        check_len(self.cols, v.len())?;
        let out = (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect();
        Ok(DenseVector(out))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_len(self.rows, other.rows)?;
        check_len(self.cols, other.cols)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Quadratic form `vᵀ M v`.
    pub fn quad_form(&self, v: &DenseVector) -> Result<f64> {
        v.dot(&self.matvec(v)?)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry magnitude.
    pub fn relative_asymmetry(&self) -> f64 {
        let scale = self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.rows.min(self.cols);
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst / scale
    }
}

/// Estimates the largest eigenvalue of a symmetric positive semidefinite
/// matrix by power iteration on the Rayleigh quotient.
///
/// Iteration stops once the Rayleigh quotient changes by at most
/// `tol * |quotient|` between sweeps. Two fixed start vectors are used: the
/// normalized all-ones vector and a fixed pseudo-random vector. The all-ones
/// vector alone is an eigenvector of many structured matrices (for example
/// `[[a, -b], [-b, a]]`), so the larger of the two quotients is returned;
/// both are lower bounds on the true eigenvalue.
pub fn dominant_eigenvalue(m: &DenseMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let asym = m.relative_asymmetry();
    if asym > 1e-10 {
        return Err(Error::InvalidMatrix(format!(
            "matrix is not symmetric (relative asymmetry {asym:e})"
        )));
    }
    let n = m.rows();
    if n == 0 || m.as_slice().iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }

    let ones = DenseVector::filled(n, 1.0);
    let first = power_iteration(m, ones, tol, max_iter)?;
    let second = power_iteration(m, scrambled_start(n), tol, max_iter)?;
    Ok(first.max(second))
}

/// Deterministic start vector with entries in [0.5, 1.5) from a fixed LCG.
fn scrambled_start(n: usize) -> DenseVector {
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let entries = (0..n)
        .map(|_| {
            state = state
                .wrapping_mul(6_364_136_223_846_793_005)
                .wrapping_add(1_442_695_040_888_963_407);
            0.5 + (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect();
    DenseVector(entries)
}

fn power_iteration(m: &DenseMatrix, start: DenseVector, tol: f64, max_iter: usize) -> Result<f64> {
    let mut v = start.scale(1.0 / start.norm2());
    let mut mv = m.matvec(&v)?;
    let mut rq = v.dot(&mv)?;
    for _ in 0..max_iter {
        let norm = mv.norm2();
        if norm == 0.0 {
            // start vector lies in the null space
            return Ok(0.0);
        }
        v = mv.scale(1.0 / norm);
        mv = m.matvec(&v)?;
        let next = v.dot(&mv)?;
        if (next - rq).abs() <= tol * next.abs() {
            return Ok(next);
        }
        rq = next;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
    })
}
