//! Sharpe-ratio maximization over the long-only simplex.
//!
//! For a returns matrix `R` (T periods × N assets) the regularized Sharpe
//! ratio of a portfolio `w` is
//!
//! ```text
//! S(w) = pᵀw / sqrt(wᵀ(QᵀQ + ε̂I)w),   p = Rᵀ1/T,   Q = (R - 1pᵀ)/sqrt(T - 1)
//! ```
//!
//! Maximizing `S` is the fractional program `min f/g` with `f(w) = -pᵀw` and
//! `g(w) = sqrt(wᵀ Q_ε w)`. On the simplex `g >= sqrt(ε̂/N)`, `∇g` is
//! `2λ₁sqrt(N/ε̂)`-Lipschitz and `f/g >= -‖p‖₂ sqrt(N/ε̂)`, which gives the
//! admissible step range `(0, ε̂/(2Nλ₁‖p‖₂))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dominant_eigenvalue, DenseMatrix, DenseVector};
use crate::pga::{pga_solve, PgaConfig, SolveResult};
use crate::problem::{FractionalProblem, GradLipschitz};
use crate::projection::{project_simplex, Projection, Simplex};

pub const DEFAULT_EPS_HAT: f64 = 1e-4;

const EIGEN_TOL: f64 = 1e-10;
const EIGEN_MAX_ITER: usize = 100_000;

/// Asset returns, one row per period and one column per asset, as decimal
/// simple returns.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsMatrix {
    values: DenseMatrix,
    asset_labels: Vec<String>,
    period_labels: Option<Vec<String>>,
}

impl ReturnsMatrix {
    pub fn new(
        values: DenseMatrix,
        asset_labels: Vec<String>,
        period_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if values.rows() < 2 {
            return Err(Error::InsufficientData(format!(
                "need at least 2 periods, got {}",
                values.rows()
            )));
        }
        if values.cols() < 1 {
            return Err(Error::InsufficientData("need at least 1 asset".into()));
        }
        if asset_labels.len() != values.cols() {
            return Err(Error::Dimension {
                expected: values.cols(),
                found: asset_labels.len(),
            });
        }
        if let Some(labels) = &period_labels {
            if labels.len() != values.rows() {
                return Err(Error::Dimension {
                    expected: values.rows(),
                    found: labels.len(),
                });
            }
        }
        Ok(Self {
            values,
            asset_labels,
            period_labels,
        })
    }

    /// Labels assets `A1, A2, …` and leaves periods unlabeled.
    pub fn unlabeled(values: DenseMatrix) -> Result<Self> {
        let labels = (1..=values.cols()).map(|i| format!("A{i}")).collect();
        Self::new(values, labels, None)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::unlabeled(DenseMatrix::from_rows(rows)?)
    }

    pub fn periods(&self) -> usize {
        self.values.rows()
    }

    pub fn assets(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &DenseMatrix {
        &self.values
    }

    pub fn row(&self, t: usize) -> &[f64] {
        self.values.row(t)
    }

    pub fn asset_labels(&self) -> &[String] {
        &self.asset_labels
    }

    pub fn period_labels(&self) -> Option<&[String]> {
        self.period_labels.as_deref()
    }

    /// Rows `start..start + len` as a new matrix.
    pub fn window(&self, start: usize, len: usize) -> Result<Self> {
        Self::new(
            self.values.row_block(start, len)?,
            self.asset_labels.clone(),
            self.period_labels
                .as_ref()
                .map(|l| l[start..start + len].to_vec()),
        )
    }
}

/// Long-only fully-invested weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PortfolioWeights(DenseVector);

impl PortfolioWeights {
    pub fn new(w: DenseVector) -> Result<Self> {
        if !Simplex.contains(&w, 1e-10) {
            return Err(Error::InvalidParameter(
                "weights must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(Self(w))
    }

    pub fn equal(n: usize) -> Self {
        Self(DenseVector::filled(n, 1.0 / n as f64))
    }

    pub fn as_vector(&self) -> &DenseVector {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpeModel {
    p: DenseVector,
    q_eps: DenseMatrix,
    eps_hat: f64,
    lambda1: f64,
    step_bound: f64,
}

impl SharpeModel {
    /// Mean returns, regularized covariance `QᵀQ + ε̂I`, its largest
    /// eigenvalue and the step bound `ε̂/(2Nλ₁‖p‖₂)`.
    pub fn build(r: &ReturnsMatrix, eps_hat: f64) -> Result<Self> {
        if !(eps_hat > 0.0 && eps_hat.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eps_hat must be positive, got {eps_hat}"
            )));
        }
        let (t, n) = (r.periods(), r.assets());
        if t < 2 {
            return Err(Error::InsufficientData(format!(
                "need at least 2 periods, got {t}"
            )));
        }

        let mut mean = vec![0.0; n];
        for i in 0..t {
            for (m, v) in mean.iter_mut().zip(r.row(i)) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= t as f64);

        // QᵀQ is the sample covariance with the T-1 denominator
        let mut cov = vec![0.0; n * n];
        let mut centered = vec![0.0; n];
        for i in 0..t {
            for ((c, v), m) in centered.iter_mut().zip(r.row(i)).zip(&mean) {
                *c = v - m;
            }
            for a in 0..n {
                for b in a..n {
                    cov[a * n + b] += centered[a] * centered[b];
                }
            }
        }
        let denom = (t - 1) as f64;
        for a in 0..n {
            cov[a * n + a] = cov[a * n + a] / denom + eps_hat;
            for b in a + 1..n {
                let v = cov[a * n + b] / denom;
                cov[a * n + b] = v;
                cov[b * n + a] = v;
            }
        }

        let p = DenseVector::new(mean)?;
        let q_eps = DenseMatrix::new(n, n, cov)?;
        let p_norm = p.norm2();
        if p_norm == 0.0 {
            return Err(Error::DegenerateModel(
                "all mean returns are zero; step bound is undefined".into(),
            ));
        }
        let lambda1 = dominant_eigenvalue(&q_eps, EIGEN_TOL, EIGEN_MAX_ITER)?;
        let step_bound = eps_hat / (2.0 * n as f64 * lambda1 * p_norm);
        Ok(Self {
            p,
            q_eps,
            eps_hat,
            lambda1,
            step_bound,
        })
    }

    pub fn mean_returns(&self) -> &DenseVector {
        &self.p
    }

    pub fn q_eps(&self) -> &DenseMatrix {
        &self.q_eps
    }

    pub fn eps_hat(&self) -> f64 {
        self.eps_hat
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn assets(&self) -> usize {
        self.p.len()
    }

    /// Lower bound `-‖p‖₂ sqrt(N/ε̂)` of `f/g` on the simplex.
    pub fn shift(&self) -> f64 {
        -self.p.norm2() * (self.assets() as f64 / self.eps_hat).sqrt()
    }

    /// Lipschitz constant of `∇g` on the simplex, `2λ₁ sqrt(N/ε̂)`.
    pub fn grad_g_lipschitz(&self) -> f64 {
        2.0 * self.lambda1 * (self.assets() as f64 / self.eps_hat).sqrt()
    }

    /// `S(w) = pᵀw / sqrt(wᵀ Q_ε w)`.
    pub fn objective(&self, w: &DenseVector) -> Result<f64> {
        Ok(self.p.dot(w)? / self.q_eps.quad_form(w)?.sqrt())
    }
}

impl FractionalProblem for SharpeModel {
    fn dimension(&self) -> usize {
        self.assets()
    }

    fn eval_f(&self, w: &DenseVector) -> Result<f64> {
        Ok(-self.p.dot(w)?)
    }

    fn eval_g(&self, w: &DenseVector) -> Result<f64> {
        Ok(self.q_eps.quad_form(w)?.sqrt())
    }

    fn grad_f(&self, _w: &DenseVector) -> Result<DenseVector> {
        Ok(self.p.scale(-1.0))
    }

    /// `Q_ε w / g(w)`
    fn grad_g(&self, w: &DenseVector) -> Result<DenseVector> {
        let qw = self.q_eps.matvec(w)?;
        let g = w.dot(&qw)?.sqrt();
        if !(g > 0.0) {
            return Err(Error::NumericalBreakdown("g(w) vanished".into()));
        }
        Ok(qw.scale(1.0 / g))
    }

    fn project(&self, x: &DenseVector) -> Result<DenseVector> {
        project_simplex(x)
    }

    fn contains(&self, x: &DenseVector, tol: f64) -> bool {
        x.len() == self.assets() && Simplex.contains(x, tol)
    }

    fn step_bound(&self) -> f64 {
        self.step_bound
    }

    fn grad_lipschitz(&self) -> Option<GradLipschitz> {
        Some(GradLipschitz {
            grad_f: 0.0,
            grad_g: self.grad_g_lipschitz(),
        })
    }
}

/// Overrides for the SRM-PGA defaults (`α = 0.99 ε̂/(2Nλ₁‖p‖₂)`,
/// `tol = 1e-5`, `max_iter = 1e5`, start at equal weights).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SrmOptions {
    pub alpha: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub record_trace: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SrmOutcome {
    pub weights: PortfolioWeights,
    /// `S(w*) = -ratio`
    pub sharpe: f64,
    /// `pᵀw* >= 0`: the critical point found is a global maximizer.
    pub global_certificate: bool,
    pub solve: SolveResult,
}

pub fn srm_pga(model: &SharpeModel, opts: &SrmOptions) -> Result<SrmOutcome> {
    let mut cfg = PgaConfig::for_problem(model).with_trace(opts.record_trace);
    if let Some(alpha) = opts.alpha {
        cfg = cfg.with_alpha(alpha);
    }
    if let Some(tol) = opts.tol {
        cfg = cfg.with_tol(tol);
    }
    if let Some(max_iter) = opts.max_iter {
        cfg = cfg.with_max_iter(max_iter);
    }
    let x0 = PortfolioWeights::equal(model.assets());
    let solve = pga_solve(model, x0.as_vector(), &cfg)?;
    let weights = PortfolioWeights::new(solve.x_star.clone())?;
    let global_certificate = model.p.dot(&solve.x_star)? >= -1e-12;
    Ok(SrmOutcome {
        weights,
        sharpe: -solve.ratio,
        global_certificate,
        solve,
    })
}
