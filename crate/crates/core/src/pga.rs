//! Proximal gradient iteration for fractional programs.
//!
//! The production path is the shift-free update
//!
//! ```text
//! x⁺ = P_Ω(x - α∇f(x) + α (f(x)/g(x)) ∇g(x))
//! ```
//!
//! which needs no lower bound on `f/g`. [`pga_solve_shifted`] runs the
//! algebraically identical form built on `f̃ = f - M g` and exists to
//! cross-check the plain path and to expose the shifted ratios `f̃/g >= 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::problem::FractionalProblem;

/// Shifted ratios below this are treated as a violated lower bound.
const SHIFT_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PgaConfig {
    pub alpha: f64,
    /// Stop once `‖xᵏ - xᵏ⁻¹‖₂ / ‖xᵏ⁻¹‖₂ <= tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub record_trace: bool,
}

impl PgaConfig {
    /// `alpha = 0.99 * step_bound`, `tol = 1e-5`, `max_iter = 100_000`.
    pub fn for_problem(problem: &(impl FractionalProblem + ?Sized)) -> Self {
        Self {
            alpha: problem.default_alpha(),
            tol: 1e-5,
            max_iter: 100_000,
            record_trace: false,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_trace(mut self, record: bool) -> Self {
        self.record_trace = record;
        self
    }

    pub fn validate(&self, step_bound: f64) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < step_bound) {
            return Err(Error::InvalidParameter(format!(
                "step size {} must lie in (0, {step_bound})",
                self.alpha
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter(
                "max_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Converged,
    MaxIterReached,
}

/// Iterate history. `iterates` and `ratios` start at the (projected) initial
/// point; `steps[k]` is `‖x^{k+1} - x^k‖₂`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveTrace {
    pub iterates: Vec<DenseVector>,
    pub ratios: Vec<f64>,
    pub steps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub x_star: DenseVector,
    /// `f/g` at `x_star` (unshifted).
    pub ratio: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub fixed_point_residual: f64,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<SolveTrace>,
}

/// Runs the shift-free proximal gradient iteration from `x0`.
///
/// An infeasible `x0` is projected onto Ω first.
pub fn pga_solve<P>(problem: &P, x0: &DenseVector, cfg: &PgaConfig) -> Result<SolveResult>
where
    P: FractionalProblem + ?Sized,
{
    run(problem, x0, cfg, Form::Plain)
}

/// Runs the iteration on `f̃ = f - shift·g`. Iterates coincide with
/// [`pga_solve`] up to rounding; trace ratios are the shifted values
/// `f/g - shift`.
pub fn pga_solve_shifted<P>(
    problem: &P,
    shift: f64,
    x0: &DenseVector,
    cfg: &PgaConfig,
) -> Result<SolveResult>
where
    P: FractionalProblem + ?Sized,
{
    if !shift.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "shift must be finite, got {shift}"
        )));
    }
    run(problem, x0, cfg, Form::Shifted(shift))
}

/// `‖x - P_Ω(x - α∇f(x) + α (f(x)/g(x)) ∇g(x))‖₂`; zero exactly at fixed
/// points of the iteration.
pub fn fixed_point_residual<P>(problem: &P, x: &DenseVector, alpha: f64) -> Result<f64>
where
    P: FractionalProblem + ?Sized,
{
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let step = step(problem, x, alpha, Form::Plain, 0)?;
    x.distance(&step.next)
}

#[derive(Debug, Clone, Copy)]
enum Form {
    Plain,
    Shifted(f64),
}

struct Step {
    next: DenseVector,
    /// Ratio at the current point, shifted when the form is shifted.
    ratio: f64,
}

fn evaluate_ratio<P>(problem: &P, x: &DenseVector, iteration: usize) -> Result<(f64, f64)>
where
    P: FractionalProblem + ?Sized,
{
    let f = problem.eval_f(x)?;
    let g = problem.eval_g(x)?;
    if f.is_nan() || g.is_nan() {
        return Err(Error::NumericalBreakdown(format!(
            "NaN objective at iterate {iteration}"
        )));
    }
    if !(g > 0.0) {
        return Err(Error::PositivityViolation {
            iteration,
            value: g,
        });
    }
    Ok((f, g))
}

fn step<P>(problem: &P, x: &DenseVector, alpha: f64, form: Form, iteration: usize) -> Result<Step>
where
    P: FractionalProblem + ?Sized,
{
    let (f, g) = evaluate_ratio(problem, x, iteration)?;
    let grad_f = problem.grad_f(x)?;
    let grad_g = problem.grad_g(x)?;
    if !grad_f.is_finite() || !grad_g.is_finite() {
        return Err(Error::NumericalBreakdown(format!(
            "non-finite gradient at iterate {iteration}"
        )));
    }

    let (ratio, moved) = match form {
        Form::Plain => {
            let c = f / g;
            // x - α∇f + αc∇g
            let y = grad_f.axpy(-alpha, x)?;
            (c, grad_g.axpy(alpha * c, &y)?)
        }
        Form::Shifted(m) => {
            let c = (f - m * g) / g;
            if c < -SHIFT_SLACK {
                return Err(Error::ShiftViolation {
                    iteration,
                    value: c,
                });
            }
            // ∇f̃ = ∇f - M∇g, then x - α∇f̃ + αc̃∇g
            let grad_shifted = grad_g.axpy(-m, &grad_f)?;
            let y = grad_shifted.axpy(-alpha, x)?;
            (c, grad_g.axpy(alpha * c, &y)?)
        }
    };
    if !moved.is_finite() {
        return Err(Error::NumericalBreakdown(format!(
            "non-finite gradient step at iterate {iteration}"
        )));
    }
    Ok(Step {
        next: problem.project(&moved)?,
        ratio,
    })
}

fn run<P>(problem: &P, x0: &DenseVector, cfg: &PgaConfig, form: Form) -> Result<SolveResult>
where
    P: FractionalProblem + ?Sized,
{
    cfg.validate(problem.step_bound())?;
    if x0.len() != problem.dimension() {
        return Err(Error::Dimension {
            expected: problem.dimension(),
            found: x0.len(),
        });
    }
    if !x0.is_finite() {
        return Err(Error::NumericalBreakdown(
            "non-finite starting point".into(),
        ));
    }

    let mut x = if problem.contains(x0, 0.0) {
        x0.clone()
    } else {
        problem.project(x0)?
    };
    let mut trace = cfg.record_trace.then(|| SolveTrace {
        iterates: vec![x.clone()],
        ..SolveTrace::default()
    });

    let mut status = SolveStatus::MaxIterReached;
    let mut iterations = 0;
    for k in 1..=cfg.max_iter {
        let Step { next, ratio } = step(problem, &x, cfg.alpha, form, k - 1)?;
        let step_len = next.distance(&x)?;
        let base = x.norm2();
        let change = if base > 0.0 {
            step_len / base
        } else {
            step_len
        };

        if let Some(t) = trace.as_mut() {
            t.ratios.push(ratio);
            t.steps.push(step_len);
            t.iterates.push(next.clone());
        }
        x = next;
        iterations = k;
        if change <= cfg.tol {
            status = SolveStatus::Converged;
            break;
        }
    }

    let (f, g) = evaluate_ratio(problem, &x, iterations)?;
    let ratio = f / g;
    if let Form::Shifted(m) = form {
        let shifted = (f - m * g) / g;
        if shifted < -SHIFT_SLACK {
            return Err(Error::ShiftViolation {
                iteration: iterations,
                value: shifted,
            });
        }
    }
    if let Some(t) = trace.as_mut() {
        t.ratios.push(match form {
            Form::Plain => ratio,
            Form::Shifted(m) => (f - m * g) / g,
        });
    }
    let fixed_point_residual = fixed_point_residual(problem, &x, cfg.alpha)?;

    Ok(SolveResult {
        x_star: x,
        ratio,
        iterations,
        status,
        fixed_point_residual,
        alpha: cfg.alpha,
        trace,
    })
}
