//! Euclidean projections onto closed convex sets.
//!
//! The proximity operator of a set's indicator function is the projection
//! onto that set, so these are the only "prox" steps the solvers need.

use crate::error::{Error, Result};
use crate::linalg::DenseVector;

/// Projection onto a fixed closed convex set.
///
/// Implementations must return a point of the set, be idempotent and be
/// non-expansive in the Euclidean norm.
pub trait Projection: Send + Sync {
    fn project(&self, x: &DenseVector) -> Result<DenseVector>;

    /// Membership test with slack `tol`.
    fn contains(&self, x: &DenseVector, tol: f64) -> bool;
}

/// The probability simplex `{w >= 0, Σw = 1}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Simplex;

impl Projection for Simplex {
    fn project(&self, x: &DenseVector) -> Result<DenseVector> {
        project_simplex(x)
    }

    fn contains(&self, x: &DenseVector, tol: f64) -> bool {
        !x.is_empty() && x.iter().all(|&v| v >= -tol) && (x.sum() - 1.0).abs() <= tol
    }
}

/// The horizontal band `{x ∈ R² : |x₂| <= a0}`.
#[derive(Debug, Clone, Copy)]
pub struct Band {
    a0: f64,
}

impl Band {
    pub fn new(a0: f64) -> Result<Self> {
        if !(a0 > 0.0) || !a0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "band half-width must be positive, got {a0}"
            )));
        }
        Ok(Self { a0 })
    }

    pub fn half_width(&self) -> f64 {
        self.a0
    }
}

impl Projection for Band {
    fn project(&self, x: &DenseVector) -> Result<DenseVector> {
        project_band(x, self.a0)
    }

    fn contains(&self, x: &DenseVector, tol: f64) -> bool {
        x.len() == 2 && x[1].abs() <= self.a0 + tol
    }
}

/// Projects onto the probability simplex by the sort-and-threshold method.
///
/// Sort descending, take the largest `j` with
/// `x̂_j - (Σ_{i<=j} x̂_i - 1)/j > 0`, then clip `x - θ` at zero.
pub fn project_simplex(x: &DenseVector) -> Result<DenseVector> {
    if x.is_empty() {
        return Err(Error::Dimension {
            expected: 1,
            found: 0,
        });
    }
    if !x.is_finite() {
        return Err(Error::NumericalBreakdown(
            "non-finite input to simplex projection".into(),
        ));
    }

    let mut sorted = x.as_slice().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));

    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - 1.0) / (j + 1) as f64;
        if v - candidate > 0.0 {
            theta = candidate;
        }
    }
    // j = 1 always qualifies: x̂₁ - (x̂₁ - 1) = 1 > 0, so theta is set.
    DenseVector::new(x.iter().map(|&v| (v - theta).max(0.0)).collect())
}

/// Clamps the second coordinate of a point in R² to `[-a0, a0]`.
pub fn project_band(x: &DenseVector, a0: f64) -> Result<DenseVector> {
    if !(a0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "band half-width must be positive, got {a0}"
        )));
    }
    if x.len() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: x.len(),
        });
    }
    let x2 = x[1];
    DenseVector::new(vec![x[0], x2.signum() * x2.abs().min(a0)])
}
