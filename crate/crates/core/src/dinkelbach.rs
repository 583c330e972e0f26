//! Dinkelbach's parametric method, used as a reference solver.
//!
//! With `c_k = -f(x_k)/g(x_k) >= 0`, each outer step minimizes the convex
//! function `f + c_k g` over Ω and updates `c_{k+1} = -f(x_{k+1})/g(x_{k+1})`
//! until `F(c_k) = -min_{x∈Ω}(f + c_k g)` reaches zero. The inner problem is
//! solved by projected gradient descent with a fixed step
//! `0.99 / (L_∇f + c_k L_∇g)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::pga::{fixed_point_residual, SolveResult, SolveStatus};
use crate::problem::FractionalProblem;

#[derive(Debug, Clone, PartialEq)]
pub struct DinkelbachConfig {
    /// Stop once `|f(x_{k+1}) + c_k g(x_{k+1})| <= outer_tol`.
    pub outer_tol: f64,
    pub max_outer: usize,
    /// Relative-change threshold of the inner projected gradient loop.
    pub inner_tol: f64,
    pub max_inner: usize,
}

impl Default for DinkelbachConfig {
    fn default() -> Self {
        Self {
            outer_tol: 1e-10,
            max_outer: 100,
            inner_tol: 1e-12,
            max_inner: 100_000,
        }
    }
}

impl DinkelbachConfig {
    fn validate(&self) -> Result<()> {
        if !(self.outer_tol > 0.0 && self.inner_tol > 0.0)
            || self.max_outer == 0
            || self.max_inner == 0
        {
            return Err(Error::InvalidParameter(
                "Dinkelbach tolerances and iteration limits must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DinkelbachResult {
    pub solution: SolveResult,
    /// Parameters `c_0, c_1, …` used by the outer steps.
    pub params: Vec<f64>,
    /// `F(c_k) = -(f(x_{k+1}) + c_k g(x_{k+1}))` for each outer step.
    pub gaps: Vec<f64>,
    pub inner_iterations: usize,
}

impl DinkelbachResult {
    /// Final parameter `c* = -f(x*)/g(x*)`.
    pub fn parameter(&self) -> f64 {
        -self.solution.ratio
    }
}

pub fn dinkelbach_solve<P>(
    problem: &P,
    x0: &DenseVector,
    cfg: &DinkelbachConfig,
) -> Result<DinkelbachResult>
where
    P: FractionalProblem + ?Sized,
{
    cfg.validate()?;
    let lipschitz = problem.grad_lipschitz().ok_or_else(|| {
        Error::InvalidParameter("problem does not provide gradient Lipschitz constants".into())
    })?;
    if x0.len() != problem.dimension() {
        return Err(Error::Dimension {
            expected: problem.dimension(),
            found: x0.len(),
        });
    }
    let mut x = if problem.contains(x0, 0.0) {
        x0.clone()
    } else {
        problem.project(x0)?
    };

    let f0 = problem.eval_f(&x)?;
    if f0 > 0.0 {
        return Err(Error::InvalidStart { f0 });
    }
    let mut c = -f0 / positive_g(problem, &x, 0)?;

    let mut params = Vec::new();
    let mut gaps = Vec::new();
    let mut inner_total = 0;
    let mut status = SolveStatus::MaxIterReached;
    let mut outer = 0;
    while outer < cfg.max_outer {
        outer += 1;
        params.push(c);
        let (next, inner) =
            minimize_parametric(problem, &x, c, lipschitz.grad_f + c * lipschitz.grad_g, cfg)
                .map_err(|e| match e {
                    Error::NoConvergence { .. } => Error::InnerSolverFailure { outer },
                    other => other,
                })?;
        inner_total += inner;
        x = next;

        let f = problem.eval_f(&x)?;
        let g = positive_g(problem, &x, outer)?;
        let value = f + c * g;
        gaps.push(-value);
        if value.abs() <= cfg.outer_tol {
            status = SolveStatus::Converged;
            break;
        }
        c = -f / g;
    }

    let ratio = problem.eval_f(&x)? / positive_g(problem, &x, outer)?;
    let fixed_point_residual = fixed_point_residual(problem, &x, problem.default_alpha())?;
    Ok(DinkelbachResult {
        solution: SolveResult {
            x_star: x,
            ratio,
            iterations: outer,
            status,
            fixed_point_residual,
            alpha: problem.default_alpha(),
            trace: None,
        },
        params,
        gaps,
        inner_iterations: inner_total,
    })
}

fn positive_g<P>(problem: &P, x: &DenseVector, iteration: usize) -> Result<f64>
where
    P: FractionalProblem + ?Sized,
{
    let g = problem.eval_g(x)?;
    if !(g > 0.0) {
        return Err(Error::PositivityViolation {
            iteration,
            value: g,
        });
    }
    Ok(g)
}

/// Projected gradient descent on `f + c g`, warm-started at `start`.
fn minimize_parametric<P>(
    problem: &P,
    start: &DenseVector,
    c: f64,
    lipschitz: f64,
    cfg: &DinkelbachConfig,
) -> Result<(DenseVector, usize)>
where
    P: FractionalProblem + ?Sized,
{
    // a linear objective has L = 0; any positive step is admissible
    let step = 0.99 / if lipschitz > 0.0 { lipschitz } else { 1.0 };
    let mut x = start.clone();
    for k in 1..=cfg.max_inner {
        let grad = problem.grad_g(&x)?.axpy(c, &problem.grad_f(&x)?)?;
        let next = problem.project(&grad.axpy(-step, &x)?)?;
        if !next.is_finite() {
            return Err(Error::NumericalBreakdown("non-finite inner iterate".into()));
        }
        let base = x.norm2();
        let moved = next.distance(&x)?;
        x = next;
        let change = if base > 0.0 { moved / base } else { moved };
        if change <= cfg.inner_tol {
            return Ok((x, k));
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_inner,
    })
}
