//! Two small fractional programs with closed-form solutions.
//!
//! * Sim1: `min pᵀx / ‖x‖₂` over the 2-simplex.
//! * Sim2: `min (xᵀAx + a₃)/(xᵀBx + a₆)` over the unbounded band
//!   `|x₂| <= a₀`, with `A = diag(a₁, a₂)` and `B = diag(a₄, a₅)`. Its
//!   minimizers form the segment `{x₁ = 0, |x₂| <= a₀}`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::problem::{FractionalProblem, GradLipschitz};
use crate::projection::{project_band, project_simplex, Band, Projection, Simplex};

/// Norms below this make `x/‖x‖` meaningless.
const MIN_NORM: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sim1Params {
    p: [f64; 2],
}

impl Sim1Params {
    /// Requires `p₁ ≠ 0`, `p₂ ≠ 0`, `p₁ + p₂ ≠ 0` and `p₁ ≠ p₂`.
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        if !(p1.is_finite() && p2.is_finite()) {
            return Err(Error::InvalidParameter("p must be finite".into()));
        }
        if p1 == 0.0 || p2 == 0.0 || p1 + p2 == 0.0 || p1 == p2 {
            return Err(Error::InvalidParameter(format!(
                "p = ({p1}, {p2}) needs p1 != 0, p2 != 0, p1 + p2 != 0 and p1 != p2"
            )));
        }
        Ok(Self { p: [p1, p2] })
    }

    pub fn p(&self) -> [f64; 2] {
        self.p
    }

    pub fn norm(&self) -> f64 {
        self.p[0].hypot(self.p[1])
    }
}

#[derive(Debug, Clone)]
pub struct Sim1Problem {
    params: Sim1Params,
    p: DenseVector,
}

pub fn build_sim1(params: Sim1Params) -> Sim1Problem {
    Sim1Problem {
        params,
        p: DenseVector::new(params.p.to_vec()).expect("validated parameters are finite"),
    }
}

impl Sim1Problem {
    pub fn params(&self) -> Sim1Params {
        self.params
    }

    fn checked_norm(x: &DenseVector) -> Result<f64> {
        let n = x.norm2();
        if n < MIN_NORM {
            return Err(Error::NumericalBreakdown(
                "‖x‖ vanishes; g is not differentiable at the origin".into(),
            ));
        }
        Ok(n)
    }
}

impl FractionalProblem for Sim1Problem {
    fn dimension(&self) -> usize {
        2
    }

    fn eval_f(&self, x: &DenseVector) -> Result<f64> {
        self.p.dot(x)
    }

    fn eval_g(&self, x: &DenseVector) -> Result<f64> {
        Self::checked_norm(x)
    }

    fn grad_f(&self, _x: &DenseVector) -> Result<DenseVector> {
        Ok(self.p.clone())
    }

    fn grad_g(&self, x: &DenseVector) -> Result<DenseVector> {
        Ok(x.scale(1.0 / Self::checked_norm(x)?))
    }

    fn project(&self, x: &DenseVector) -> Result<DenseVector> {
        project_simplex(x)
    }

    fn contains(&self, x: &DenseVector, tol: f64) -> bool {
        x.len() == 2 && Simplex.contains(x, tol)
    }

    /// `1 / (4‖p‖₂)`.
    fn step_bound(&self) -> f64 {
        1.0 / (4.0 * self.params.norm())
    }

    fn grad_lipschitz(&self) -> Option<GradLipschitz> {
        // ∇(x/‖x‖) on the 2-simplex, bounded as for the Sharpe model with
        // Q = 0, ε̂ = 1, N = 2: 2λ₁√(N/ε̂) = 2√2.
        Some(GradLipschitz {
            grad_f: 0.0,
            grad_g: 2.0 * 2f64.sqrt(),
        })
    }
}

/// Global minimizer of Sim1.
pub fn sim1_analytic_solution(params: &Sim1Params) -> DenseVector {
    let [p1, p2] = params.p;
    let x = if p1 < 0.0 && p2 < 0.0 {
        vec![p1 / (p1 + p2), p2 / (p1 + p2)]
    } else if p1 > p2 {
        vec![0.0, 1.0]
    } else {
        vec![1.0, 0.0]
    };
    DenseVector::new(x).expect("finite by construction")
}

/// Sim1 objective restricted to the simplex, `x = (t, 1 - t)`.
pub fn sim1_parametric_objective(params: &Sim1Params, t: f64) -> f64 {
    let [p1, p2] = params.p;
    ((p1 - p2) * t + p2) / (2.0 * t * t - 2.0 * t + 1.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sim2Params {
    pub a0: f64,
    /// `a₁ … a₆`
    pub a: [f64; 6],
}

impl Sim2Params {
    /// Requires all parameters positive, `a₁a₅ > a₂a₄` and `a₃a₅ = a₂a₆`
    /// (the latter to relative precision 1e-12).
    pub fn new(a0: f64, a: [f64; 6]) -> Result<Self> {
        if !(a0 > 0.0 && a0.is_finite()) || a.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter(
                "a0 and a1..a6 must be positive and finite".into(),
            ));
        }
        let [a1, a2, a3, a4, a5, a6] = a;
        if a1 * a5 <= a2 * a4 {
            return Err(Error::InvalidParameter(format!(
                "need a1*a5 > a2*a4, got {} <= {}",
                a1 * a5,
                a2 * a4
            )));
        }
        let (lhs, rhs) = (a3 * a5, a2 * a6);
        if (lhs - rhs).abs() > 1e-12 * lhs.max(rhs) {
            return Err(Error::InvalidParameter(format!(
                "need a3*a5 = a2*a6, got {lhs} != {rhs}"
            )));
        }
        Ok(Self { a0, a })
    }

    /// `a₀ = 100, a = (4, 2, 3, 3, 2, 3)`.
    pub fn reference() -> Self {
        Self::new(100.0, [4.0, 2.0, 3.0, 3.0, 2.0, 3.0]).expect("reference parameters are valid")
    }

    /// Draws `a₁, a₂, a₄, a₅, a₆` uniformly from [0.5, 5] and `a₀` from
    /// [1, 200], rejecting until `a₁a₅ > a₂a₄`, then sets `a₃ = a₂a₆/a₅`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut draw = || rng.gen_range(0.5..5.0);
            let (a1, a2, a4, a5, a6) = (draw(), draw(), draw(), draw(), draw());
            if a1 * a5 <= a2 * a4 {
                continue;
            }
            let a3 = a2 * a6 / a5;
            let a0 = rng.gen_range(1.0..200.0);
            if let Ok(params) = Self::new(a0, [a1, a2, a3, a4, a5, a6]) {
                return params;
            }
        }
    }

    /// Minimum value of the objective, `a₂/a₅`.
    pub fn optimal_value(&self) -> f64 {
        self.a[1] / self.a[4]
    }
}

#[derive(Debug, Clone)]
pub struct Sim2Problem {
    params: Sim2Params,
    band: Band,
}

pub fn build_sim2(params: Sim2Params) -> Result<Sim2Problem> {
    // re-validate: fields are public
    let params = Sim2Params::new(params.a0, params.a)?;
    Ok(Sim2Problem {
        band: Band::new(params.a0)?,
        params,
    })
}

impl Sim2Problem {
    pub fn params(&self) -> Sim2Params {
        self.params
    }

    fn check_dim(x: &DenseVector) -> Result<()> {
        if x.len() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                found: x.len(),
            });
        }
        Ok(())
    }
}

impl FractionalProblem for Sim2Problem {
    fn dimension(&self) -> usize {
        2
    }

    fn eval_f(&self, x: &DenseVector) -> Result<f64> {
        Self::check_dim(x)?;
        let [a1, a2, a3, ..] = self.params.a;
        Ok(a1 * x[0] * x[0] + a2 * x[1] * x[1] + a3)
    }

    fn eval_g(&self, x: &DenseVector) -> Result<f64> {
        Self::check_dim(x)?;
        let [_, _, _, a4, a5, a6] = self.params.a;
        Ok(a4 * x[0] * x[0] + a5 * x[1] * x[1] + a6)
    }

    fn grad_f(&self, x: &DenseVector) -> Result<DenseVector> {
        Self::check_dim(x)?;
        let [a1, a2, ..] = self.params.a;
        DenseVector::new(vec![2.0 * a1 * x[0], 2.0 * a2 * x[1]])
    }

    fn grad_g(&self, x: &DenseVector) -> Result<DenseVector> {
        Self::check_dim(x)?;
        let [_, _, _, a4, a5, _] = self.params.a;
        DenseVector::new(vec![2.0 * a4 * x[0], 2.0 * a5 * x[1]])
    }

    fn project(&self, x: &DenseVector) -> Result<DenseVector> {
        project_band(x, self.params.a0)
    }

    fn contains(&self, x: &DenseVector, tol: f64) -> bool {
        self.band.contains(x, tol)
    }

    /// `1 / (2 max{a₁, a₂})`.
    fn step_bound(&self) -> f64 {
        let [a1, a2, ..] = self.params.a;
        1.0 / (2.0 * a1.max(a2))
    }

    fn grad_lipschitz(&self) -> Option<GradLipschitz> {
        let [a1, a2, _, a4, a5, _] = self.params.a;
        Some(GradLipschitz {
            grad_f: 2.0 * a1.max(a2),
            grad_g: 2.0 * a4.max(a5),
        })
    }
}

/// Whether `x` lies (within `tol`) on the optimal segment and attains the
/// optimal value `a₂/a₅`.
pub fn sim2_is_global(params: &Sim2Params, x: &DenseVector, tol: f64) -> bool {
    if x.len() != 2 || !x.is_finite() {
        return false;
    }
    let [a1, a2, a3, a4, a5, a6] = params.a;
    let (x1, x2) = (x[0], x[1]);
    let value = (a1 * x1 * x1 + a2 * x2 * x2 + a3) / (a4 * x1 * x1 + a5 * x2 * x2 + a6);
    x1.abs() <= tol && x2.abs() <= params.a0 + tol && (value - params.optimal_value()).abs() <= tol
}

/// Closed-form gradient of the ratio `f/g` for Sim2.
pub fn sim2_gradient_oracle(params: &Sim2Params, x: &DenseVector) -> Result<DenseVector> {
    if x.len() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: x.len(),
        });
    }
    let [a1, a2, a3, a4, a5, a6] = params.a;
    let (x1, x2) = (x[0], x[1]);
    let g = a4 * x1 * x1 + a5 * x2 * x2 + a6;
    let scale = 2.0 / (g * g);
    DenseVector::new(vec![
        scale * x1 * ((a1 * a5 - a2 * a4) * x2 * x2 + (a1 * a6 - a3 * a4)),
        scale * x2 * ((a2 * a4 - a1 * a5) * x1 * x1 + (a2 * a6 - a3 * a5)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn v(xs: &[f64]) -> DenseVector {
        DenseVector::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn sim1_validation() {
        assert!(Sim1Params::new(1.0, 1.0).is_err());
        assert!(Sim1Params::new(0.0, 1.0).is_err());
        assert!(Sim1Params::new(1.0, -1.0).is_err());
        assert!(Sim1Params::new(2.0, -1.0).is_ok());
    }

    #[test]
    fn sim1_evaluations() {
        let prob = build_sim1(Sim1Params::new(2.0, -1.0).unwrap());
        let x = v(&[0.5, 0.5]);
        assert_eq!(prob.eval_f(&x).unwrap(), 0.5);
        assert!((prob.eval_g(&x).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((prob.default_alpha() - 0.99 / (4.0 * 5f64.sqrt())).abs() < 1e-15);

        let neg = build_sim1(Sim1Params::new(-2.0, -1.0).unwrap());
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!(neg.eval_f(&v(&[t, 1.0 - t])).unwrap() <= 0.0);
        }
    }

    #[test]
    fn sim1_origin_is_a_breakdown() {
        let prob = build_sim1(Sim1Params::new(2.0, -1.0).unwrap());
        assert!(matches!(
            prob.eval_g(&DenseVector::zeros(2)),
            Err(Error::NumericalBreakdown(_))
        ));
        assert!(prob.grad_g(&DenseVector::zeros(2)).is_err());
    }

    #[test]
    fn sim1_solutions() {
        let sol = |p1, p2| sim1_analytic_solution(&Sim1Params::new(p1, p2).unwrap());
        assert_eq!(sol(2.0, -1.0).as_slice(), &[0.0, 1.0]);
        let b = sol(-2.0, -1.0);
        assert!((b[0] - 2.0 / 3.0).abs() < 1e-15 && (b[1] - 1.0 / 3.0).abs() < 1e-15);
        let c = sol(-1.0, -2.0);
        assert!((c[0] - 1.0 / 3.0).abs() < 1e-15 && (c[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(sol(1.0, 3.0).as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn sim1_objective_matches_parametric_form() {
        let params = Sim1Params::new(-2.0, 1.5).unwrap();
        let prob = build_sim1(params);
        for i in 0..=1000 {
            let t = i as f64 / 1000.0;
            let x = v(&[t, 1.0 - t]);
            let direct = prob.eval_f(&x).unwrap() / prob.eval_g(&x).unwrap();
            assert!((direct - sim1_parametric_objective(&params, t)).abs() <= 1e-12);
        }
    }

    #[test]
    fn sim2_validation() {
        let ok = Sim2Params::reference();
        assert!(build_sim2(ok).is_ok());
        assert!(Sim2Params::new(100.0, [1.0, 2.0, 3.0, 3.0, 1.0, 3.0]).is_err());
        assert!(Sim2Params::new(100.0, [4.0, 2.0, 3.1, 3.0, 2.0, 3.0]).is_err());
        assert!(Sim2Params::new(0.0, [4.0, 2.0, 3.0, 3.0, 2.0, 3.0]).is_err());
        let bad = Sim2Params {
            a0: 100.0,
            a: [1.0, 2.0, 3.0, 3.0, 1.0, 3.0],
        };
        assert!(build_sim2(bad).is_err());
    }

    #[test]
    fn sim2_evaluations() {
        let prob = build_sim2(Sim2Params::reference()).unwrap();
        let x = v(&[50.0, 50.0]);
        assert_eq!(prob.eval_f(&x).unwrap(), 15003.0);
        assert_eq!(prob.eval_g(&x).unwrap(), 12503.0);
        assert!((prob.default_alpha() - 0.99 / 8.0).abs() < 1e-16);
    }

    #[test]
    fn sim2_global_verdicts() {
        let params = Sim2Params::reference();
        assert!(sim2_is_global(&params, &v(&[0.0, 72.7701]), 1e-4));
        assert!(sim2_is_global(&params, &v(&[0.0, 100.0]), 1e-4));
        assert!(!sim2_is_global(&params, &v(&[0.1972, 100.0]), 1e-4));
        assert!(!sim2_is_global(&params, &v(&[0.0, 100.5]), 1e-4));
    }

    #[test]
    fn sim2_gradient_oracle_examples() {
        let params = Sim2Params::reference();
        for t in [-100.0, -3.0, 0.0, 42.0] {
            let g = sim2_gradient_oracle(&params, &v(&[0.0, t])).unwrap();
            assert_eq!(g.as_slice(), &[0.0, 0.0]);
        }
        let g = sim2_gradient_oracle(&params, &v(&[1.0, 0.0])).unwrap();
        assert!(g[0] > 0.0);
    }

    #[test]
    fn sim2_objective_bounds() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let params = Sim2Params::reference();
        let prob = build_sim2(params).unwrap();
        let [a1, a2, _, a4, a5, _] = params.a;
        for _ in 0..10_000 {
            let x = v(&[rng.gen_range(-1e3..1e3), rng.gen_range(-100.0..100.0)]);
            let r = prob.eval_f(&x).unwrap() / prob.eval_g(&x).unwrap();
            assert!(r >= a2 / a5 - 1e-15 && r < a1 / a4, "{r}");
        }
    }

    #[test]
    fn random_sim2_params_are_valid() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let p = Sim2Params::random(&mut rng);
            assert!(build_sim2(p).is_ok());
        }
    }
}
