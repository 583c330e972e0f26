//! The fractional program `min_{x∈Ω} f(x)/g(x)`.

use crate::error::Result;
use crate::linalg::DenseVector;
use crate::projection::Projection;

/// Lipschitz constants of `∇f` and `∇g` on Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradLipschitz {
    pub grad_f: f64,
    pub grad_g: f64,
}

/// One instance of a single-ratio fractional program.
///
/// `f` and `g` are convex and smooth on Ω with `g > 0` there. `step_bound`
/// is the supremum of admissible step sizes of the proximal gradient
/// iteration, i.e. `1 / L` where `L` is the Lipschitz constant of the
/// gradient of `f - M g` for some lower bound `M` of `f/g` on Ω.
pub trait FractionalProblem: Sync {
    fn dimension(&self) -> usize;

    fn eval_f(&self, x: &DenseVector) -> Result<f64>;

    fn eval_g(&self, x: &DenseVector) -> Result<f64>;

    fn grad_f(&self, x: &DenseVector) -> Result<DenseVector>;

    fn grad_g(&self, x: &DenseVector) -> Result<DenseVector>;

    fn project(&self, x: &DenseVector) -> Result<DenseVector>;

    /// Membership test for Ω with slack `tol`.
    fn contains(&self, x: &DenseVector, tol: f64) -> bool;

    fn step_bound(&self) -> f64;

    /// Gradient Lipschitz constants, when known. Required by Dinkelbach's
    /// inner solver.
    fn grad_lipschitz(&self) -> Option<GradLipschitz> {
        None
    }

    /// `0.99 * step_bound`.
    fn default_alpha(&self) -> f64 {
        0.99 * self.step_bound()
    }
}

type ScalarFn = Box<dyn Fn(&DenseVector) -> Result<f64> + Send + Sync>;
type VectorFn = Box<dyn Fn(&DenseVector) -> Result<DenseVector> + Send + Sync>;

/// A fractional program assembled from closures and a projection.
pub struct FnProblem<P> {
    dimension: usize,
    f: ScalarFn,
    g: ScalarFn,
    grad_f: VectorFn,
    grad_g: VectorFn,
    projection: P,
    step_bound: f64,
    lipschitz: Option<GradLipschitz>,
}

impl<P: Projection> FnProblem<P> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        dimension: usize,
        f: impl Fn(&DenseVector) -> Result<f64> + Send + Sync + 'static,
        g: impl Fn(&DenseVector) -> Result<f64> + Send + Sync + 'static,
        grad_f: impl Fn(&DenseVector) -> Result<DenseVector> + Send + Sync + 'static,
        grad_g: impl Fn(&DenseVector) -> Result<DenseVector> + Send + Sync + 'static,
        projection: P,
        step_bound: f64,
    ) -> Self {
        Self {
            dimension,
            f: Box::new(f),
            g: Box::new(g),
            grad_f: Box::new(grad_f),
            grad_g: Box::new(grad_g),
            projection,
            step_bound,
            lipschitz: None,
        }
    }

    pub fn with_lipschitz(mut self, lipschitz: GradLipschitz) -> Self {
        self.lipschitz = Some(lipschitz);
        self
    }
}

impl<P: Projection> FractionalProblem for FnProblem<P> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn eval_f(&self, x: &DenseVector) -> Result<f64> {
        (self.f)(x)
    }

    fn eval_g(&self, x: &DenseVector) -> Result<f64> {
        (self.g)(x)
    }

    fn grad_f(&self, x: &DenseVector) -> Result<DenseVector> {
        (self.grad_f)(x)
    }

    fn grad_g(&self, x: &DenseVector) -> Result<DenseVector> {
        (self.grad_g)(x)
    }

    fn project(&self, x: &DenseVector) -> Result<DenseVector> {
        self.projection.project(x)
    }

    fn contains(&self, x: &DenseVector, tol: f64) -> bool {
        self.projection.contains(x, tol)
    }

    fn step_bound(&self) -> f64 {
        self.step_bound
    }

    fn grad_lipschitz(&self) -> Option<GradLipschitz> {
        self.lipschitz
    }
}
